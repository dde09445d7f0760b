#include "pfro/fractal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pfro/detail/parallel.hpp"
#include "pfro/errors.hpp"
#include "pfro/geometry.hpp"
#include "pfro/process.hpp"
#include "pfro/rng.hpp"

namespace pfro {

namespace {

bool is_pow2(uint32_t m) { return m >= 1 && (m & (m - 1)) == 0; }

std::vector<uint32_t> sorted_dyadic_scales(std::vector<uint32_t> scales) {
    if (scales.empty()) throw InvalidConfig("need at least one box-counting scale");
    for (uint32_t m : scales)
        if (!is_pow2(m)) throw InvalidConfig("box-counting scales must be powers of two");
    std::sort(scales.begin(), scales.end());
    scales.erase(std::unique(scales.begin(), scales.end()), scales.end());
    return scales;
}

// Min distance from x to any point of a flat (dim-strided) point set;
// infinity when the set is empty.
double min_dist_to(const std::vector<double>& pts, const double* x, uint32_t dim) {
    double best = std::numeric_limits<double>::infinity();
    const uint64_t n = pts.size() / dim;
    for (uint64_t i = 0; i < n; ++i) best = std::min(best, sq_dist(&pts[i * dim], x, dim));
    return std::sqrt(best);
}

} // namespace

BoxCountCurve box_count(const Snapshot& snap, std::vector<uint32_t> scales,
                        const ClassifyOptions& opt) {
    const auto ms = sorted_dyadic_scales(std::move(scales));
    Classifier cl(snap);
    BoxCountCurve curve;
    curve.dim = snap.dim();
    for (uint32_t m : ms) {
        const auto cells = frontier_cells(cl.classify(m, opt));
        curve.deltas.push_back(1.0 / m);
        curve.counts.push_back(static_cast<double>(cells.count()));
    }
    return curve;
}

BoxCountCurve box_count_from_classifications(const std::vector<GridClassification>& grids) {
    if (grids.empty()) throw InvalidConfig("need at least one classification");
    std::vector<size_t> order(grids.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return grids[a].m < grids[b].m; });
    BoxCountCurve curve;
    curve.dim = grids[0].dim;
    for (size_t i : order) {
        if (grids[i].dim != curve.dim)
            throw InvalidConfig("classifications mix grid dimensions");
        const auto cells = frontier_cells(grids[i]);
        curve.deltas.push_back(1.0 / grids[i].m);
        curve.counts.push_back(static_cast<double>(cells.count()));
    }
    return curve;
}

std::vector<uint32_t> filter_scales_by_density(uint64_t n_sites, uint32_t dim,
                                               const std::vector<uint32_t>& scales) {
    std::vector<uint32_t> keep;
    for (uint32_t m : scales) {
        const double per_cell =
            static_cast<double>(n_sites) * std::pow(1.0 / static_cast<double>(m), dim);
        if (per_cell >= 10.0) keep.push_back(m);
    }
    return keep;
}

DimensionEstimate fit_dimension(const BoxCountCurve& curve, double window_delta_min,
                                double window_delta_max) {
    std::vector<double> xs, ys, used_deltas;
    for (size_t i = 0; i < curve.deltas.size(); ++i) {
        const double delta = curve.deltas[i];
        if (delta < window_delta_min || delta > window_delta_max) continue;
        if (!(curve.counts[i] > 0.0))
            throw DegenerateFit("zero box count inside the fit window");
        xs.push_back(std::log(1.0 / delta));
        ys.push_back(std::log(curve.counts[i]));
        used_deltas.push_back(delta);
    }
    const LinearFit fit = ols_fit(xs, ys);
    DimensionEstimate est;
    est.slope = fit.slope;
    est.slope_stderr = fit.slope_stderr;
    est.ci_lo = fit.slope - 1.96 * fit.slope_stderr;
    est.ci_hi = fit.slope + 1.96 * fit.slope_stderr;
    est.r2 = fit.r2;
    est.n_scales = xs.size();
    est.window_delta_min = *std::min_element(used_deltas.begin(), used_deltas.end());
    est.window_delta_max = *std::max_element(used_deltas.begin(), used_deltas.end());
    return est;
}

std::vector<double> lebesgue_decay(const BoxCountCurve& curve) {
    std::vector<double> out(curve.deltas.size());
    for (size_t i = 0; i < out.size(); ++i)
        out[i] = curve.counts[i] * std::pow(curve.deltas[i], curve.dim);
    return out;
}

HittingScaling hitting_probability_scaling(const ProcessConfig& cfg, uint32_t replicates,
                                           const std::vector<double>& x,
                                           const std::vector<double>& deltas, uint32_t m,
                                           uint32_t workers) {
    ProcessConfig base = cfg;
    validate_config(base);
    const uint32_t d = base.dimension;
    if (x.size() != d) throw InvalidConfig("probe point has wrong dimension");
    for (double v : x)
        if (!(v > 0.0 && v < 1.0))
            throw PreconditionViolated("probe point must be interior to the cube");
    if (deltas.empty()) throw InvalidConfig("need at least one probe radius");
    double delta_max = 0.0;
    for (double delta : deltas) {
        if (!(delta > 0.0 && delta < 1.0)) throw InvalidConfig("probe radii must lie in (0,1)");
        delta_max = std::max(delta_max, delta);
    }
    const double guard = std::sqrt(delta_max);
    if (std::sqrt(sq_dist(base.seed_red.data(), x.data(), d)) <= guard ||
        std::sqrt(sq_dist(base.seed_blue.data(), x.data(), d)) <= guard)
        throw PreconditionViolated("seeds must be farther than sqrt(max delta) from the probe");
    if (replicates == 0) throw InvalidConfig("need at least one replicate");

    // min distance from the probe to the frontier, per replicate
    std::vector<double> probe_dist(replicates);
    detail::parallel_tasks(replicates, workers, [&](uint64_t r) {
        ProcessConfig rc = base;
        rc.rng_seed = replicate_seed(base.rng_seed, r);
        const Snapshot snap = run_process(rc);
        ClassifyOptions copt;
        copt.threads = 1; // parallelism lives at the replicate level
        const auto centers = frontier_centers(frontier_cells(classify_grid(snap, m, copt)));
        probe_dist[r] = min_dist_to(centers, x.data(), d);
    });

    const double reach_pad = 0.5 * std::sqrt(static_cast<double>(d)) / m;
    HittingScaling out;
    out.deltas = deltas;
    out.hit_counts.assign(deltas.size(), 0);
    out.frequencies.assign(deltas.size(), 0.0);
    for (uint32_t r = 0; r < replicates; ++r)
        for (size_t i = 0; i < deltas.size(); ++i)
            if (probe_dist[r] <= deltas[i] + reach_pad) ++out.hit_counts[i];
    for (size_t i = 0; i < deltas.size(); ++i)
        out.frequencies[i] = static_cast<double>(out.hit_counts[i]) / replicates;

    std::vector<double> xs, ys;
    for (size_t i = 0; i < deltas.size(); ++i) {
        if (out.hit_counts[i] == 0) continue;
        xs.push_back(std::log(deltas[i]));
        ys.push_back(std::log(out.frequencies[i]));
    }
    const LinearFit fit = ols_fit(xs, ys); // throws DegenerateFit when underdetermined
    out.fit.exponent = fit.slope;
    out.fit.exponent_stderr = fit.slope_stderr;
    out.fit.ci_lo = fit.slope - 1.96 * fit.slope_stderr;
    out.fit.ci_hi = fit.slope + 1.96 * fit.slope_stderr;
    out.fit.log_prefactor = fit.intercept;
    out.fit.n_points = xs.size();
    return out;
}

MonoBallRate monochromatic_ball_rate(const ProcessConfig& cfg, uint32_t replicates,
                                     const std::vector<double>& x, double r,
                                     uint32_t workers) {
    ProcessConfig base = cfg;
    validate_config(base);
    const uint32_t d = base.dimension;
    if (x.size() != d) throw InvalidConfig("ball center has wrong dimension");
    if (!(r > 0.0 && r < 1.0)) throw InvalidConfig("ball radius must lie in (0,1)");
    if (sq_dist(base.seed_red.data(), x.data(), d) <= r * r ||
        sq_dist(base.seed_blue.data(), x.data(), d) <= r * r)
        throw PreconditionViolated("seeds must lie outside B(x, r)");
    if (replicates == 0) throw InvalidConfig("need at least one replicate");

    const double inner_sq = (r / 6.0) * (r / 6.0);
    std::vector<uint8_t> mono(replicates, 0);
    detail::parallel_tasks(replicates, workers, [&](uint64_t rep) {
        ProcessConfig rc = base;
        rc.rng_seed = replicate_seed(base.rng_seed, rep);
        const Snapshot snap = run_process(rc);
        bool seen[2] = {false, false};
        for (uint64_t i = 0; i < snap.site_count(); ++i) {
            if (sq_dist(snap.position(i), x.data(), d) <= inner_sq) {
                seen[snap.colors[i]] = true;
                if (seen[0] && seen[1]) break;
            }
        }
        mono[rep] = (seen[0] && seen[1]) ? 0 : 1;
    });

    MonoBallRate out;
    out.trials = replicates;
    for (uint8_t v : mono) out.monochromatic += v;
    out.ci = wilson95(out.monochromatic, out.trials);
    return out;
}

SeparatedBallDecay separated_ball_decay(const ProcessConfig& cfg,
                                        const std::vector<uint32_t>& sizes, uint32_t replicates,
                                        double r, uint32_t m, uint32_t workers) {
    ProcessConfig base = cfg;
    validate_config(base);
    const uint32_t d = base.dimension;
    if (sizes.empty()) throw InvalidConfig("need at least one family size");
    for (uint32_t n : sizes)
        if (n == 0) throw InvalidConfig("family sizes must be positive");
    if (!(r > 0.0 && r < 1.0)) throw InvalidConfig("ball radius must lie in (0,1)");
    if (replicates == 0) throw InvalidConfig("need at least one replicate");

    std::vector<uint32_t> fam = sizes;
    std::sort(fam.begin(), fam.end());
    fam.erase(std::unique(fam.begin(), fam.end()), fam.end());
    const uint32_t n_max = fam.back();

    // Deterministic lattice: centers sit at the seed midpoint, spread along
    // the last axis with spacing 15r, so the 7r-dilates are pairwise disjoint
    // (15r > 14r). Balls are ordered center-out (offsets 0, +15r, -15r, ...):
    // families are nested and grow outward from the midpoint, where the
    // interface is most likely to pass.
    std::vector<double> mid(d);
    for (uint32_t a = 0; a < d; ++a) mid[a] = 0.5 * (base.seed_red[a] + base.seed_blue[a]);
    const uint32_t lattice_axis = d - 1;
    std::vector<double> centers(static_cast<size_t>(n_max) * d);
    for (uint32_t i = 0; i < n_max; ++i) {
        const double mult = (i % 2 == 1) ? static_cast<double>((i + 1) / 2)
                                         : -static_cast<double>(i / 2);
        for (uint32_t a = 0; a < d; ++a) centers[i * d + a] = mid[a];
        centers[i * d + lattice_axis] = mid[lattice_axis] + mult * 15.0 * r;
        for (uint32_t a = 0; a < d; ++a) {
            const double c = centers[i * d + a];
            if (!(c - r >= 0.0 && c + r <= 1.0))
                throw CannotPlaceBalls("ball lattice leaves the unit cube");
        }
        const double guard_sq = 49.0 * r * r; // 7r-dilate must avoid the seeds
        if (sq_dist(&centers[i * d], base.seed_red.data(), d) <= guard_sq ||
            sq_dist(&centers[i * d], base.seed_blue.data(), d) <= guard_sq)
            throw CannotPlaceBalls("a seed lies inside a 7r-dilate of the ball lattice");
    }

    const double reach = r + 0.5 * std::sqrt(static_cast<double>(d)) / m;
    // per replicate: largest k such that balls 0..k-1 are all hit
    std::vector<uint32_t> hit_prefix(replicates, 0);
    detail::parallel_tasks(replicates, workers, [&](uint64_t rep) {
        ProcessConfig rc = base;
        rc.rng_seed = replicate_seed(base.rng_seed, rep);
        const Snapshot snap = run_process(rc);
        ClassifyOptions copt;
        copt.threads = 1;
        const auto centers_f = frontier_centers(frontier_cells(classify_grid(snap, m, copt)));
        uint32_t k = 0;
        while (k < n_max && min_dist_to(centers_f, &centers[k * d], d) <= reach) ++k;
        hit_prefix[rep] = k;
    });

    SeparatedBallDecay out;
    out.r = r;
    out.centers = centers;
    out.family_sizes = fam;
    out.all_hit_freq.resize(fam.size());
    std::vector<double> xs, ys;
    for (size_t i = 0; i < fam.size(); ++i) {
        uint64_t all_hit = 0;
        for (uint32_t rep = 0; rep < replicates; ++rep)
            if (hit_prefix[rep] >= fam[i]) ++all_hit;
        out.all_hit_freq[i] = static_cast<double>(all_hit) / replicates;
        if (all_hit > 0) {
            xs.push_back(static_cast<double>(fam[i]));
            ys.push_back(std::log(out.all_hit_freq[i]));
        }
    }
    if (xs.size() < 3)
        throw DegenerateFit("need at least 3 family sizes with positive all-hit frequency");
    out.fit = ols_fit(xs, ys);
    return out;
}

SliceDimension slice_dimension(const Snapshot& snap, uint32_t axis,
                               const std::vector<double>& offsets,
                               const std::vector<uint32_t>& scales,
                               const ClassifyOptions& opt) {
    if (offsets.empty()) throw InvalidConfig("need at least one slice offset");
    const auto ms = sorted_dyadic_scales(scales);
    Classifier cl(snap);
    SliceDimension out;
    out.axis = axis;
    out.offsets = offsets;
    for (double offset : offsets) {
        BoxCountCurve curve;
        curve.dim = 2;
        for (uint32_t m : ms) {
            const auto cells = frontier_cells(cl.classify_slice(axis, offset, m, opt));
            curve.deltas.push_back(1.0 / m);
            curve.counts.push_back(static_cast<double>(cells.count()));
        }
        out.estimates.push_back(fit_dimension(curve));
        out.curves.push_back(std::move(curve));
    }
    return out;
}

} // namespace pfro
