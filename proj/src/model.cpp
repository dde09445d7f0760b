#include "pfro/model.hpp"

#include <cmath>

namespace pfro {

void validate_config(ProcessConfig& cfg) {
    if (cfg.dimension < 1) throw InvalidConfig("dimension must be >= 1");
    const uint32_t d = cfg.dimension;

    // default seeds: red at x0 = 0.25, blue at x0 = 0.75, centered elsewhere
    if (cfg.seed_red.empty()) {
        cfg.seed_red.assign(d, 0.5);
        cfg.seed_red[0] = 0.25;
    }
    if (cfg.seed_blue.empty()) {
        cfg.seed_blue.assign(d, 0.5);
        cfg.seed_blue[0] = 0.75;
    }
    if (cfg.seed_red.size() != d || cfg.seed_blue.size() != d)
        throw InvalidConfig("seed dimension does not match config dimension");
    for (double v : cfg.seed_red)
        if (!(v >= 0.0 && v <= 1.0)) throw InvalidConfig("seed_red outside [0,1]^d");
    for (double v : cfg.seed_blue)
        if (!(v >= 0.0 && v <= 1.0)) throw InvalidConfig("seed_blue outside [0,1]^d");
    if (cfg.seed_red == cfg.seed_blue) throw InvalidConfig("seeds must be distinct");

    if (cfg.time_mode == TimeMode::Discrete) {
        if (!cfg.n_points.has_value()) throw InvalidConfig("discrete mode requires n_points");
        if (cfg.t_max.has_value()) throw InvalidConfig("t_max is a poisson-mode setting");
    } else {
        if (!cfg.t_max.has_value()) throw InvalidConfig("poisson mode requires t_max");
        if (cfg.n_points.has_value()) throw InvalidConfig("n_points is a discrete-mode setting");
        if (!(*cfg.t_max > 0.0) || !std::isfinite(*cfg.t_max))
            throw InvalidConfig("t_max must be positive and finite");
    }
}

Snapshot Snapshot::prefix(uint64_t n_arrivals) const {
    const uint64_t have = site_count() >= 2 ? site_count() - 2 : 0;
    if (n_arrivals > have) throw PreconditionViolated("prefix longer than the run");
    const uint32_t d = config.dimension;
    const uint64_t ns = n_arrivals + 2;

    Snapshot p;
    p.config = config;
    p.config.time_mode = TimeMode::Discrete;
    p.config.t_max.reset();
    p.config.n_points = n_arrivals;
    for (uint64_t c : checkpoints)
        if (c <= n_arrivals) p.checkpoints.push_back(c);
    // Tie/redraw counters are run-scoped and not re-derivable without replay;
    // a prefix only carries its arrival count (and last recorded time).
    p.stats = RunStats{};
    p.stats.arrivals = n_arrivals;
    if (!arrival_times.empty() && ns > 2) p.stats.final_clock = arrival_times[ns - 1];

    p.positions.assign(positions.begin(), positions.begin() + ns * d);
    p.colors.assign(colors.begin(), colors.begin() + ns);
    p.parents.assign(parents.begin(), parents.begin() + ns);
    if (!arrival_times.empty())
        p.arrival_times.assign(arrival_times.begin(), arrival_times.begin() + ns);

    if (config.model == Model::Segment) {
        // one segment per site (seeds are the zero-length segments 0 and 1)
        p.seg_a.assign(seg_a.begin(), seg_a.begin() + ns * d);
        p.seg_b.assign(seg_b.begin(), seg_b.begin() + ns * d);
        p.seg_owner.assign(seg_owner.begin(), seg_owner.begin() + ns);
        p.seg_color.assign(seg_color.begin(), seg_color.begin() + ns);
    }
    return p;
}

} // namespace pfro
