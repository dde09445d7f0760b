#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "pfro/errors.hpp"

namespace pfro {

// Piecewise-linear curve in R^d with its normalized arc-length
// parameterization (t[0] = 0, t.back() = 1). Consecutive duplicate vertices
// are dropped on construction.
class Polyline {
  public:
    Polyline(uint32_t dimension, std::vector<double> vertices_flat);

    uint32_t dim() const { return dim_; }
    size_t vertex_count() const { return params_.size(); }
    const double* vertex(size_t i) const { return pts_.data() + i * dim_; }
    double param(size_t i) const { return params_[i]; }
    const std::vector<double>& params() const { return params_; }
    const std::vector<double>& flat() const { return pts_; }
    double length() const { return length_; }

    // Point at parameter t in [0,1] (clamped), written into out[0..dim).
    void eval(double t, double* out) const;

    // Endpoint span |gamma(0) - gamma(1)|.
    double endpoint_span() const;
    // Max pairwise vertex distance, with the lexicographically smallest
    // attaining index pair.
    double diameter(size_t* vi = nullptr, size_t* vj = nullptr) const;

    // Sub-curve between parameters t0 <= t1 as a new polyline.
    Polyline subcurve(double t0, double t1) const;

  private:
    uint32_t dim_;
    std::vector<double> pts_;
    std::vector<double> params_;
    double length_ = 0.0;
};

// One application of the splitting procedure at relative scale alpha: the
// curve is cut into kappa sub-paths, each spanning exactly delta =
// alpha * span between its endpoints (span = |gamma(0) - gamma(1)|), pairwise
// separated by at least alpha * delta. Sub-path i covers [sigma_i, tau_i] in
// the input parameterization:
//   sigma_1 = 0, tau_1 = first exit time of the closed ball B(gamma(0), delta);
//   tau_i+1 = first time the curve is farther than (1 + alpha) * delta from
//             every previous sub-path;
//   sigma_i+1 = last time in [tau_i, tau_i+1) outside B(gamma(tau_i+1), delta);
// the procedure stops when the curve stays within (1 + alpha) * delta of the
// pieces found so far, and kappa is the largest i with tau_i < 1.
struct SplitOutput {
    double span = 0.0;  // |gamma(0) - gamma(1)|
    double delta = 0.0; // alpha * span
    std::vector<Polyline> subpaths;
    std::vector<std::pair<double, double>> intervals; // (sigma_i, tau_i)
    uint32_t kappa() const { return static_cast<uint32_t>(subpaths.size()); }
};

SplitOutput split_once(const Polyline& curve, double alpha);

struct DeviationReport {
    // Largest factor by which the curve leaves the sausage around its chord:
    // max over curve points of dist(point, chord segment) / span.
    double rho_max = 0.0;
};

// Exact for polylines: the per-edge max of distance to a fixed segment is
// attained at a vertex, so a vertex scan suffices.
DeviationReport deviation_factor(const Polyline& curve);

struct KappaBounds {
    double bound_plain = 0.0;     // any curve: (1 - alpha) / ((1 + alpha) alpha)
    double bound_deviating = 0.0; // curves deviating by factor rho
};

// Guaranteed lower bounds on kappa for splitting at scale alpha; rho is the
// deviation factor. bound_deviating is
//   (1/2 (1 + sqrt(1 + 2 rho^2)) - (4 + alpha) alpha) / ((1 + alpha) alpha).
KappaBounds kappa_lower_bounds(double alpha, double rho);

// The branching scale beta(alpha): with rho = sqrt(18 alpha),
//   1 / beta = sqrt(bound_plain * bound_deviating),
// the inverse geometric mean of the two kappa bounds. Throws NonpositiveBound
// when either bound is nonpositive at this alpha. Asymptotically
// beta = alpha - alpha^2 + o(alpha^2).
double beta_of_alpha(double alpha);

// Recursive splitting into the scale schedule delta_k = alpha^k, starting at
// k0 = the smallest k >= 0 with alpha^k <= Delta (Delta = curve diameter).
// The root is a sub-path spanning exactly delta_k0, found by a first-crossing
// search from a diameter-attaining vertex; each node at level l spans
// delta_{k0+l} and is split at relative scale alpha into its children.
// Weights: pi(root) = 1, pi(child) = pi(parent) / kappa(parent), so each
// level's weights sum to 1.
struct SplitTreeNode {
    double t_lo = 0.0, t_hi = 0.0; // interval in the root curve's parameterization
    uint32_t level = 0;
    uint32_t kappa = 0; // child count (0 at the deepest level)
    double weight = 1.0;
    std::vector<uint32_t> children; // node indices
};

struct SplitTree {
    double alpha = 0.0;
    uint32_t k0 = 0;
    uint32_t levels = 0;              // split levels applied (depth L)
    std::vector<SplitTreeNode> nodes; // node 0 is the root
    std::vector<std::vector<uint32_t>> level_nodes;

    std::vector<double> level_weight_sums() const;
    std::vector<double> level_max_weights() const;
};

// Requires 0 < alpha < dim^{-1/2} and a curve with positive diameter.
// Throws DepthInfeasible if some node's sub-path cannot be split further.
SplitTree build_split_tree(const Polyline& curve, double alpha, uint32_t levels);

// The s-energy bound the tree certifies (delta = curve diameter scale Delta):
//   (alpha^3 * Delta)^(-s) * sum_l max_weight(l) * alpha^(-s l).
double energy_bound(const SplitTree& tree, double s, double Delta);

} // namespace pfro
