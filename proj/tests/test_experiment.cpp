#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "pfro/experiment.hpp"
#include "pfro/rng.hpp"
#include "pfro/snapshot_io.hpp"

using namespace pfro;
namespace fs = std::filesystem;

namespace {

const char* kSpecTemplate = R"({
  "config": {"dimension": 2, "model": "point", "time_mode": "discrete",
             "n_points": 800, "rng_seed": 17},
  "replicates": 3,
  "checkpoints": [200, 400, 800],
  "workers": %u,
  "output_dir": "%s",
  "save_snapshots": true,
  "analyses": [
    {"name": "box_count", "scales": [4, 8, 16], "density_filter": false},
    {"name": "fit_dimension", "scales": [4, 8, 16], "density_filter": false},
    {"name": "frontier_convergence_series", "m": 64}
  ]
})";

std::string spec_text(uint32_t workers, const std::string& dir) {
    char buf[2048];
    std::snprintf(buf, sizeof(buf), kSpecTemplate, workers, dir.c_str());
    return buf;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("experiment: spec parsing and validation") {
    CHECK_THROWS_AS(parse_experiment_spec("{not json"), FormatError);
    CHECK_THROWS_AS(parse_experiment_spec("{}"), InvalidConfig); // config required

    const std::string good = spec_text(1, "out");
    auto spec = parse_experiment_spec(good);
    CHECK(spec.replicates == 3);
    CHECK(spec.config.n_points == 800);
    CHECK(spec.analyses.size() == 3);
    CHECK(spec.checkpoints == std::vector<uint64_t>{200, 400, 800});

    nlohmann::json j = nlohmann::json::parse(good);
    j["analyses"][0]["name"] = "mystery";
    CHECK_THROWS_AS(parse_experiment_spec(j.dump()), InvalidConfig);

    j = nlohmann::json::parse(good);
    j["replicates"] = 0;
    CHECK_THROWS_AS(parse_experiment_spec(j.dump()), InvalidConfig);

    j = nlohmann::json::parse(good);
    j["checkpoints"] = {800};
    CHECK_THROWS_AS(parse_experiment_spec(j.dump()), InvalidConfig); // convergence needs 2+

    j = nlohmann::json::parse(good);
    j["config"]["model"] = "tetrahedron";
    CHECK_THROWS_AS(parse_experiment_spec(j.dump()), InvalidConfig);
}

TEST_CASE("experiment: outputs exist, parse, and are deterministic across workers") {
    const fs::path base = fs::temp_directory_path() / "pfro_exp_test";
    fs::remove_all(base);
    const std::string dir1 = (base / "w1").string();
    const std::string dir2 = (base / "w2").string();

    auto spec1 = parse_experiment_spec(spec_text(1, dir1));
    auto spec2 = parse_experiment_spec(spec_text(3, dir2)); // more workers than replicates
    const auto res1 = run_experiment(spec1);
    const auto res2 = run_experiment(spec2);

    // artifacts exist
    CHECK(fs::exists(fs::path(dir1) / "report.json"));
    CHECK(fs::exists(fs::path(dir1) / "raw.csv"));
    REQUIRE(res1.snapshot_files.size() == 3);
    for (const auto& f : res1.snapshot_files) CHECK(fs::exists(f));

    // raw rows and snapshots are byte-identical across worker counts
    CHECK(slurp(fs::path(dir1) / "raw.csv") == slurp(fs::path(dir2) / "raw.csv"));
    for (size_t i = 0; i < 3; ++i) {
        CHECK(slurp(res1.snapshot_files[i]) == slurp(res2.snapshot_files[i]));
    }

    // reports agree except for the wall-clock field
    auto r1 = nlohmann::json::parse(slurp(fs::path(dir1) / "report.json"));
    auto r2 = nlohmann::json::parse(slurp(fs::path(dir2) / "report.json"));
    CHECK(r1.contains("wall_time_seconds"));
    r1.erase("wall_time_seconds");
    r2.erase("wall_time_seconds");
    r1.erase("workers_requested");
    r2.erase("workers_requested");
    CHECK(r1.dump() == r2.dump());

    // raw.csv has the documented header and per-replicate rows
    std::istringstream raw(slurp(fs::path(dir1) / "raw.csv"));
    std::string line;
    REQUIRE(std::getline(raw, line));
    CHECK(line == "replicate,analysis,statistic,param,x,value");
    size_t box_rows = 0, conv_rows = 0;
    while (std::getline(raw, line)) {
        if (line.find(",box_count,N,") != std::string::npos) ++box_rows;
        if (line.find(",frontier_convergence_series,hausdorff,") != std::string::npos)
            ++conv_rows;
    }
    CHECK(box_rows == 3 * 3);  // 3 replicates x 3 scales
    CHECK(conv_rows == 3 * 2); // 3 replicates x 2 consecutive checkpoint pairs

    // report structure: per-analysis aggregates are present
    bool saw_fit = false, saw_conv = false;
    for (const auto& a : r1["analyses"]) {
        if (a["name"] == "fit_dimension") {
            saw_fit = true;
            CHECK(a["slopes"].size() == 3);
            CHECK(a.contains("slope_mean"));
            CHECK(a.contains("slope_ci_lo"));
            CHECK(a.contains("slope_ci_hi"));
        }
        if (a["name"] == "frontier_convergence_series") {
            saw_conv = true;
            CHECK(a["series"].size() == 3);
            CHECK(a["median_series"].size() == 2);
        }
    }
    CHECK(saw_fit);
    CHECK(saw_conv);

    // snapshots are loadable and reflect the replicate-derived seeds
    const Snapshot s0 = read_snapshot_file(res1.snapshot_files[0]);
    const Snapshot s1 = read_snapshot_file(res1.snapshot_files[1]);
    CHECK(s0.config.rng_seed == replicate_seed(17, 0));
    CHECK(s1.config.rng_seed == replicate_seed(17, 1));
    CHECK(s0.site_count() == 802);

    fs::remove_all(base);
}

TEST_CASE("experiment: global analyses write aggregate rows") {
    const fs::path base = fs::temp_directory_path() / "pfro_exp_global";
    fs::remove_all(base);
    const std::string spec_json = R"({
      "config": {"dimension": 2, "model": "point", "time_mode": "discrete",
                 "n_points": 400, "rng_seed": 5},
      "replicates": 20,
      "workers": 1,
      "output_dir": ")" + (base / "g").string() + R"(",
      "analyses": [
        {"name": "monochromatic_ball_rate", "x": [0.5, 0.5], "r": 0.2}
      ]
    })";
    auto spec = parse_experiment_spec(spec_json);
    const auto res = run_experiment(spec);
    CHECK(res.snapshot_files.empty()); // nothing asked for snapshots
    const std::string raw = slurp(base / "g" / "raw.csv");
    // aggregate rows carry an empty replicate column
    CHECK(raw.find(",monochromatic_ball_rate,") != std::string::npos);
    CHECK(raw.find("\n,monochromatic_ball_rate,") != std::string::npos);
    auto rep = nlohmann::json::parse(slurp(base / "g" / "report.json"));
    bool found = false;
    for (const auto& a : rep["analyses"]) {
        if (a["name"] == "monochromatic_ball_rate") {
            found = true;
            CHECK(a["trials"] == 20);
            CHECK(a.contains("rate"));
            CHECK(a.contains("ci_lo"));
            CHECK(a.contains("ci_hi"));
        }
    }
    CHECK(found);
    fs::remove_all(base);
}
