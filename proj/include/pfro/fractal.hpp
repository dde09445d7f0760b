#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "pfro/frontier.hpp"
#include "pfro/model.hpp"
#include "pfro/stats.hpp"

namespace pfro {

// Box-counting curve: (delta, N(delta)) pairs with delta strictly decreasing.
// N is stored as double so synthetic curves (used to validate the fitter)
// can carry non-integer values; real counts are integral.
struct BoxCountCurve {
    uint32_t dim = 2;
    std::vector<double> deltas;
    std::vector<double> counts;
};

struct DimensionEstimate {
    double slope = 0.0;        // estimated box dimension
    double slope_stderr = 0.0;
    double ci_lo = 0.0;        // slope +- 1.96 * stderr
    double ci_hi = 0.0;
    double r2 = 0.0;
    size_t n_scales = 0;
    double window_delta_min = 0.0;
    double window_delta_max = 0.0;
};

struct ScalingFit {
    double exponent = 0.0;
    double exponent_stderr = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double log_prefactor = 0.0;
    size_t n_points = 0;
};

// Frontier box counts of a snapshot at the given dyadic scales (each scale m
// must be a power of two; counts reuse one classifier). Scales are returned
// in increasing-m (decreasing-delta) order regardless of input order.
BoxCountCurve box_count(const Snapshot& snap, std::vector<uint32_t> scales,
                        const ClassifyOptions& opt = {});

BoxCountCurve box_count_from_classifications(const std::vector<GridClassification>& grids);

// The coarse-scale validity rule: a scale with spacing delta is admitted when
// n * delta^dim >= 10, i.e. the expected number of sites per cell is at least
// 10 and cells are resolved rather than empty. Returns the admitted subset
// (order preserved).
std::vector<uint32_t> filter_scales_by_density(uint64_t n_sites, uint32_t dim,
                                               const std::vector<uint32_t>& scales);

// OLS of log N against log(1/delta) over scales with window_delta_min <=
// delta <= window_delta_max (pass 0 and infinity to use every scale). Throws
// DegenerateFit with fewer than 2 usable scales or any zero count inside the
// window.
DimensionEstimate fit_dimension(const BoxCountCurve& curve, double window_delta_min = 0.0,
                                double window_delta_max = 1e300);

// N(delta) * delta^dim per scale — the Lebesgue-measure proxy whose decay
// distinguishes a null set from a fat one.
std::vector<double> lebesgue_decay(const BoxCountCurve& curve);

// ---- Monte Carlo scaling experiments -------------------------------------
// Each experiment runs `replicates` independent runs derived from
// cfg.rng_seed via replicate_seed(). `workers` parallelizes across runs (0 =
// hardware concurrency); results are aggregated in replicate order, so the
// output is independent of the worker count.

struct HittingScaling {
    std::vector<double> deltas;
    std::vector<double> frequencies;    // fraction of replicates whose frontier meets B(x, delta)
    std::vector<uint64_t> hit_counts;
    ScalingFit fit;                      // log frequency ~ alpha * log delta
};

// Frequency that the scale-m frontier meets B(x, delta), per delta, with a
// power-law fit. "Meets" is resolution-honest: some frontier cell center lies
// within delta + half the cell diameter of x. Preconditions: x interior, both
// seeds outside B(x, sqrt(max delta)).
HittingScaling hitting_probability_scaling(const ProcessConfig& cfg, uint32_t replicates,
                                           const std::vector<double>& x,
                                           const std::vector<double>& deltas, uint32_t m,
                                           uint32_t workers = 0);

struct MonoBallRate {
    uint64_t monochromatic = 0;
    uint64_t trials = 0;
    WilsonInterval ci;
};

// Fraction of replicates in which B(x, r/6) contains sites of at most one
// color. Precondition: both seeds outside B(x, r).
MonoBallRate monochromatic_ball_rate(const ProcessConfig& cfg, uint32_t replicates,
                                     const std::vector<double>& x, double r,
                                     uint32_t workers = 0);

struct SeparatedBallDecay {
    double r = 0.0;
    std::vector<double> centers;        // n_max * dim, lattice placement
    std::vector<uint32_t> family_sizes;
    std::vector<double> all_hit_freq;   // per family size
    LinearFit fit;                      // log frequency ~ n
};

// Frequency that the frontier meets every ball of a family of n disjoint
// balls, for nested families n = sizes[0..]; the balls sit on a deterministic
// lattice along the frontier midline with spacing 15r (so their 7r-dilates
// are pairwise disjoint, as the geometric argument requires). The fitted
// log-frequency slope against n is the decay rate. Throws CannotPlaceBalls
// if the lattice leaves the cube or a seed lands inside a 7r-dilate, and
// DegenerateFit if fewer than 3 family sizes have positive frequency.
SeparatedBallDecay separated_ball_decay(const ProcessConfig& cfg,
                                        const std::vector<uint32_t>& sizes, uint32_t replicates,
                                        double r, uint32_t m, uint32_t workers = 0);

struct SliceDimension {
    uint32_t axis = 0;
    std::vector<double> offsets;
    std::vector<BoxCountCurve> curves;       // one per offset
    std::vector<DimensionEstimate> estimates; // one per offset
};

// Box dimension of 2-d slices of a d >= 3 snapshot: classify the plane
// x[axis] = offset at each scale, count frontier cells, fit. Scales obey the
// same dyadic rule as box_count.
SliceDimension slice_dimension(const Snapshot& snap, uint32_t axis,
                               const std::vector<double>& offsets,
                               const std::vector<uint32_t>& scales,
                               const ClassifyOptions& opt = {});

} // namespace pfro
