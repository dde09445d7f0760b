#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pfro/model.hpp"

namespace pfro {

inline constexpr const char* kVersion = "0.1.0";

// One named analysis request. Which fields apply depends on `name`; the JSON
// schema is documented in the README.
struct AnalysisRequest {
    std::string name; // box_count | fit_dimension | frontier_convergence_series |
                      // slice_dimension | hitting_probability_scaling |
                      // monochromatic_ball_rate | separated_ball_decay
    std::vector<uint32_t> scales;              // box_count / fit_dimension / slice_dimension
    bool density_filter = true;                // apply the n*delta^d >= 10 rule to scales
    double window_lo = 0.0, window_hi = 1e300; // delta window for the dimension fit
    uint32_t m = 512;                          // grid scale for frontier-based analyses
    std::vector<double> x;                     // probe point / ball center
    std::vector<double> deltas;                // hitting radii
    double r = 0.0;                            // ball radius
    std::vector<uint32_t> sizes;               // separated-ball family sizes
    uint32_t axis = 0;                         // slice axis
    std::vector<double> offsets;               // slice offsets
};

struct ExperimentSpec {
    ProcessConfig config;
    uint32_t replicates = 1;
    std::vector<uint64_t> checkpoints; // recorded per replicate; convergence needs >= 2
    uint32_t workers = 0;              // 0 = hardware concurrency
    std::string output_dir = ".";
    bool save_snapshots = false;
    std::vector<AnalysisRequest> analyses;
};

ExperimentSpec parse_experiment_spec(const std::string& json_text);
ExperimentSpec load_experiment_spec(const std::string& path);

struct ExperimentResult {
    std::string report_json;
    std::string raw_csv;
    std::vector<std::string> snapshot_files;
};

// Runs an ExperimentSpec: replicate r simulates with replicate_seed(seed, r)
// on a bounded worker pool; per-replicate analyses run inside the replicate's
// task; Monte Carlo scaling analyses (which own their replicate loops) run
// after. All aggregation is ordered by replicate index, so raw.csv and the
// snapshot files are byte-identical for any worker count. Writes report.json
// and raw.csv (and snapshot_<r>.pfro when save_snapshots) into output_dir.
// A failed replicate aborts the whole experiment with the replicate's error.
ExperimentResult run_experiment(const ExperimentSpec& spec);

} // namespace pfro
