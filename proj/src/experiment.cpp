#include "pfro/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pfro/detail/parallel.hpp"
#include "pfro/errors.hpp"
#include "pfro/fractal.hpp"
#include "pfro/frontier.hpp"
#include "pfro/process.hpp"
#include "pfro/rng.hpp"
#include "pfro/snapshot_io.hpp"
#include "pfro/stats.hpp"

namespace pfro {

namespace {

using nlohmann::json;

bool is_per_replicate(const std::string& name) {
    return name == "box_count" || name == "fit_dimension" ||
           name == "frontier_convergence_series" || name == "slice_dimension";
}

bool is_global(const std::string& name) {
    return name == "hitting_probability_scaling" || name == "monochromatic_ball_rate" ||
           name == "separated_ball_decay";
}

AnalysisRequest parse_analysis(const json& a) {
    AnalysisRequest req;
    req.name = a.at("name").get<std::string>();
    if (!is_per_replicate(req.name) && !is_global(req.name))
        throw InvalidConfig("unknown analysis: " + req.name);
    if (a.contains("scales")) req.scales = a["scales"].get<std::vector<uint32_t>>();
    if (a.contains("density_filter")) req.density_filter = a["density_filter"].get<bool>();
    if (a.contains("window")) {
        req.window_lo = a["window"].at(0).get<double>();
        req.window_hi = a["window"].at(1).get<double>();
    }
    if (a.contains("m")) req.m = a["m"].get<uint32_t>();
    if (a.contains("x")) req.x = a["x"].get<std::vector<double>>();
    if (a.contains("deltas")) req.deltas = a["deltas"].get<std::vector<double>>();
    if (a.contains("r")) req.r = a["r"].get<double>();
    if (a.contains("sizes")) req.sizes = a["sizes"].get<std::vector<uint32_t>>();
    if (a.contains("axis")) req.axis = a["axis"].get<uint32_t>();
    if (a.contains("offsets")) req.offsets = a["offsets"].get<std::vector<double>>();
    return req;
}

ProcessConfig parse_config(const json& c) {
    ProcessConfig cfg;
    if (c.contains("dimension")) cfg.dimension = c["dimension"].get<uint32_t>();
    if (c.contains("model")) {
        const auto s = c["model"].get<std::string>();
        if (s == "point")
            cfg.model = Model::Point;
        else if (s == "segment")
            cfg.model = Model::Segment;
        else
            throw InvalidConfig("model must be \"point\" or \"segment\"");
    }
    if (c.contains("time_mode")) {
        const auto s = c["time_mode"].get<std::string>();
        if (s == "discrete")
            cfg.time_mode = TimeMode::Discrete;
        else if (s == "poisson")
            cfg.time_mode = TimeMode::Poisson;
        else
            throw InvalidConfig("time_mode must be \"discrete\" or \"poisson\"");
    }
    if (c.contains("n_points")) cfg.n_points = c["n_points"].get<uint64_t>();
    if (c.contains("t_max")) cfg.t_max = c["t_max"].get<double>();
    if (c.contains("rng_seed")) cfg.rng_seed = c["rng_seed"].get<uint64_t>();
    if (c.contains("seed_red")) cfg.seed_red = c["seed_red"].get<std::vector<double>>();
    if (c.contains("seed_blue")) cfg.seed_blue = c["seed_blue"].get<std::vector<double>>();
    return cfg;
}

// one raw.csv row; empty fields stay empty
void row(std::string& out, const std::string& replicate, const std::string& analysis,
         const std::string& statistic, const std::string& param, const std::string& x,
         const std::string& value) {
    out += replicate;
    out += ',';
    out += analysis;
    out += ',';
    out += statistic;
    out += ',';
    out += param;
    out += ',';
    out += x;
    out += ',';
    out += value;
    out += '\n';
}

std::string fmt_u64(uint64_t v) { return std::to_string(v); }

std::vector<uint32_t> effective_scales(const AnalysisRequest& req, const Snapshot& snap) {
    if (req.scales.empty()) throw InvalidConfig(req.name + " needs a nonempty scales list");
    if (!req.density_filter) return req.scales;
    auto kept = filter_scales_by_density(snap.site_count() - 2, snap.dim(), req.scales);
    if (kept.empty())
        throw InvalidConfig(req.name + ": the density rule rejected every requested scale");
    return kept;
}

} // namespace

ExperimentSpec parse_experiment_spec(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw FormatError(std::string("experiment spec is not valid JSON: ") + e.what());
    }
    ExperimentSpec spec;
    try {
        if (!j.contains("config")) throw InvalidConfig("experiment spec needs a config block");
        spec.config = parse_config(j["config"]);
        if (j.contains("replicates")) spec.replicates = j["replicates"].get<uint32_t>();
        if (j.contains("checkpoints"))
            spec.checkpoints = j["checkpoints"].get<std::vector<uint64_t>>();
        if (j.contains("workers")) spec.workers = j["workers"].get<uint32_t>();
        if (j.contains("output_dir")) spec.output_dir = j["output_dir"].get<std::string>();
        if (j.contains("save_snapshots")) spec.save_snapshots = j["save_snapshots"].get<bool>();
        if (j.contains("analyses"))
            for (const auto& a : j["analyses"]) spec.analyses.push_back(parse_analysis(a));
    } catch (const json::exception& e) {
        throw FormatError(std::string("experiment spec field has the wrong shape: ") + e.what());
    }
    if (spec.replicates < 1) throw InvalidConfig("replicates must be >= 1");
    for (const auto& a : spec.analyses)
        if (a.name == "frontier_convergence_series" && spec.checkpoints.size() < 2)
            throw InvalidConfig("frontier_convergence_series needs >= 2 checkpoints");
    return spec;
}

ExperimentSpec load_experiment_spec(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw FormatError("cannot open: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_experiment_spec(ss.str());
}

ExperimentResult run_experiment(const ExperimentSpec& spec_in) {
    const auto t_begin = std::chrono::steady_clock::now();
    ExperimentSpec spec = spec_in;
    validate_config(spec.config);
    const uint32_t R = spec.replicates;
    const size_t n_analyses = spec.analyses.size();

    bool any_per_rep = false;
    for (const auto& a : spec.analyses) any_per_rep |= is_per_replicate(a.name);
    const bool simulate = any_per_rep || spec.save_snapshots;

    std::filesystem::create_directories(spec.output_dir);
    ExperimentResult result;

    // per replicate: raw rows; per (analysis, replicate): numeric payloads for
    // the report (slope per fit, Hausdorff series per convergence, slope per
    // slice offset)
    std::vector<std::string> rep_rows(R);
    std::vector<std::vector<std::vector<double>>> payload(n_analyses);
    for (auto& p : payload) p.assign(R, {});
    std::vector<std::string> snap_paths(R);

    if (simulate) {
        detail::parallel_tasks(R, spec.workers, [&](uint64_t rep) {
            ProcessConfig rc = spec.config;
            rc.rng_seed = replicate_seed(spec.config.rng_seed, rep);
            const Snapshot snap = run_process(rc, spec.checkpoints);
            if (spec.save_snapshots) {
                const auto path = std::filesystem::path(spec.output_dir) /
                                  ("snapshot_" + std::to_string(rep) + ".pfro");
                write_snapshot_file(snap, path.string());
                snap_paths[rep] = path.string();
            }
            const std::string rep_s = std::to_string(rep);
            ClassifyOptions copt;
            copt.threads = 1; // parallelism lives at the replicate level
            for (size_t ai = 0; ai < n_analyses; ++ai) {
                const AnalysisRequest& req = spec.analyses[ai];
                if (req.name == "box_count" || req.name == "fit_dimension") {
                    const auto curve = box_count(snap, effective_scales(req, snap), copt);
                    const auto leb = lebesgue_decay(curve);
                    for (size_t k = 0; k < curve.deltas.size(); ++k) {
                        const std::string m_s = format_double(1.0 / curve.deltas[k]);
                        row(rep_rows[rep], rep_s, req.name, "N", "", m_s,
                            format_double(curve.counts[k]));
                        row(rep_rows[rep], rep_s, req.name, "lebesgue", "", m_s,
                            format_double(leb[k]));
                    }
                    if (req.name == "fit_dimension") {
                        const auto est = fit_dimension(curve, req.window_lo, req.window_hi);
                        row(rep_rows[rep], rep_s, req.name, "slope", "", "",
                            format_double(est.slope));
                        row(rep_rows[rep], rep_s, req.name, "slope_stderr", "", "",
                            format_double(est.slope_stderr));
                        row(rep_rows[rep], rep_s, req.name, "r2", "", "",
                            format_double(est.r2));
                        payload[ai][rep] = {est.slope, est.slope_stderr, est.r2};
                    }
                } else if (req.name == "frontier_convergence_series") {
                    const auto series =
                        frontier_convergence_series(snap, spec.checkpoints, req.m, copt);
                    std::vector<uint64_t> marks = spec.checkpoints;
                    std::sort(marks.begin(), marks.end());
                    marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
                    for (size_t k = 0; k < series.size(); ++k)
                        row(rep_rows[rep], rep_s, req.name, "hausdorff", "",
                            fmt_u64(marks[k + 1]), format_double(series[k]));
                    payload[ai][rep] = series;
                } else if (req.name == "slice_dimension") {
                    const auto sd = slice_dimension(snap, req.axis, req.offsets,
                                                    effective_scales(req, snap), copt);
                    for (size_t o = 0; o < sd.offsets.size(); ++o) {
                        const std::string off_s = format_double(sd.offsets[o]);
                        const auto& curve = sd.curves[o];
                        for (size_t k = 0; k < curve.deltas.size(); ++k)
                            row(rep_rows[rep], rep_s, req.name, "N", off_s,
                                format_double(1.0 / curve.deltas[k]),
                                format_double(curve.counts[k]));
                        row(rep_rows[rep], rep_s, req.name, "slope", off_s, "",
                            format_double(sd.estimates[o].slope));
                        payload[ai][rep].push_back(sd.estimates[o].slope);
                    }
                }
            }
        });
    }

    // Monte Carlo scaling analyses own their replicate loops.
    std::string global_rows;
    json report_analyses = json::array();
    for (size_t ai = 0; ai < n_analyses; ++ai) {
        const AnalysisRequest& req = spec.analyses[ai];
        json ja;
        ja["name"] = req.name;
        if (req.name == "box_count" || req.name == "fit_dimension") {
            ja["scales"] = req.scales;
            ja["density_filter"] = req.density_filter;
            if (req.name == "fit_dimension") {
                std::vector<double> slopes;
                for (uint32_t rep = 0; rep < R; ++rep)
                    if (!payload[ai][rep].empty()) slopes.push_back(payload[ai][rep][0]);
                ja["slopes"] = slopes;
                if (slopes.size() >= 2) {
                    const auto ci = mean_ci95(slopes);
                    ja["slope_mean"] = ci.mean;
                    ja["slope_ci_lo"] = ci.lo;
                    ja["slope_ci_hi"] = ci.hi;
                }
            }
        } else if (req.name == "frontier_convergence_series") {
            ja["m"] = req.m;
            ja["series"] = payload[ai];
            if (R > 0 && !payload[ai][0].empty()) {
                std::vector<double> medians;
                for (size_t k = 0; k < payload[ai][0].size(); ++k) {
                    std::vector<double> step;
                    for (uint32_t rep = 0; rep < R; ++rep) step.push_back(payload[ai][rep][k]);
                    medians.push_back(median(step));
                }
                ja["median_series"] = medians;
            }
        } else if (req.name == "slice_dimension") {
            ja["axis"] = req.axis;
            ja["offsets"] = req.offsets;
            ja["slopes"] = payload[ai];
        } else if (req.name == "hitting_probability_scaling") {
            const auto hs = hitting_probability_scaling(spec.config, R, req.x, req.deltas,
                                                        req.m, spec.workers);
            for (size_t k = 0; k < hs.deltas.size(); ++k) {
                row(global_rows, "", req.name, "frequency", "", format_double(hs.deltas[k]),
                    format_double(hs.frequencies[k]));
                row(global_rows, "", req.name, "hits", "", format_double(hs.deltas[k]),
                    fmt_u64(hs.hit_counts[k]));
            }
            ja["m"] = req.m;
            ja["x"] = req.x;
            ja["deltas"] = hs.deltas;
            ja["frequencies"] = hs.frequencies;
            ja["exponent"] = hs.fit.exponent;
            ja["exponent_stderr"] = hs.fit.exponent_stderr;
            ja["exponent_ci_lo"] = hs.fit.ci_lo;
            ja["exponent_ci_hi"] = hs.fit.ci_hi;
        } else if (req.name == "monochromatic_ball_rate") {
            const auto mb = monochromatic_ball_rate(spec.config, R, req.x, req.r, spec.workers);
            const double rate = static_cast<double>(mb.monochromatic) / mb.trials;
            row(global_rows, "", req.name, "rate", "", "", format_double(rate));
            row(global_rows, "", req.name, "monochromatic", "", "", fmt_u64(mb.monochromatic));
            ja["x"] = req.x;
            ja["r"] = req.r;
            ja["monochromatic"] = mb.monochromatic;
            ja["trials"] = mb.trials;
            ja["rate"] = rate;
            ja["ci_lo"] = mb.ci.lo;
            ja["ci_hi"] = mb.ci.hi;
        } else if (req.name == "separated_ball_decay") {
            const auto sb =
                separated_ball_decay(spec.config, req.sizes, R, req.r, req.m, spec.workers);
            for (size_t k = 0; k < sb.family_sizes.size(); ++k)
                row(global_rows, "", req.name, "all_hit_frequency", "",
                    fmt_u64(sb.family_sizes[k]), format_double(sb.all_hit_freq[k]));
            ja["r"] = sb.r;
            ja["m"] = req.m;
            ja["sizes"] = sb.family_sizes;
            ja["frequencies"] = sb.all_hit_freq;
            ja["log_slope"] = sb.fit.slope;
            ja["log_slope_stderr"] = sb.fit.slope_stderr;
            ja["log_slope_ci_lo"] = sb.fit.slope - 1.96 * sb.fit.slope_stderr;
            ja["log_slope_ci_hi"] = sb.fit.slope + 1.96 * sb.fit.slope_stderr;
        }
        report_analyses.push_back(ja);
    }

    std::string csv = "replicate,analysis,statistic,param,x,value\n";
    for (const auto& rows : rep_rows) csv += rows;
    csv += global_rows;

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
    char hash_hex[19];
    std::snprintf(hash_hex, sizeof hash_hex, "0x%016llx",
                  static_cast<unsigned long long>(config_hash(spec.config)));

    json report;
    report["version"] = kVersion;
    report["config_hash"] = hash_hex;
    report["dimension"] = spec.config.dimension;
    report["model"] = spec.config.model == Model::Point ? "point" : "segment";
    report["time_mode"] = spec.config.time_mode == TimeMode::Discrete ? "discrete" : "poisson";
    if (spec.config.n_points) report["n_points"] = *spec.config.n_points;
    if (spec.config.t_max) report["t_max"] = *spec.config.t_max;
    report["rng_seed"] = spec.config.rng_seed;
    report["replicates"] = R;
    report["workers_requested"] = spec.workers;
    report["checkpoints"] = spec.checkpoints;
    report["wall_time_seconds"] = wall;
    report["analyses"] = report_analyses;

    result.report_json = report.dump(2) + "\n";
    result.raw_csv = std::move(csv);
    for (auto& p : snap_paths)
        if (!p.empty()) result.snapshot_files.push_back(std::move(p));

    {
        std::ofstream f(std::filesystem::path(spec.output_dir) / "raw.csv",
                        std::ios::binary | std::ios::trunc);
        if (!f) throw FormatError("cannot write raw.csv in " + spec.output_dir);
        f << result.raw_csv;
    }
    {
        std::ofstream f(std::filesystem::path(spec.output_dir) / "report.json",
                        std::ios::binary | std::ios::trunc);
        if (!f) throw FormatError("cannot write report.json in " + spec.output_dir);
        f << result.report_json;
    }
    return result;
}

} // namespace pfro
