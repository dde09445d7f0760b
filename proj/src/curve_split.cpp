#include "pfro/curve_split.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "pfro/geometry.hpp"

namespace pfro {

// ---- Polyline --------------------------------------------------------------

Polyline::Polyline(uint32_t dimension, std::vector<double> vertices_flat) : dim_(dimension) {
    if (dim_ == 0) throw InvalidConfig("polyline dimension must be >= 1");
    if (vertices_flat.empty() || vertices_flat.size() % dim_ != 0)
        throw InvalidConfig("vertex array length must be a positive multiple of dim");
    const size_t n_in = vertices_flat.size() / dim_;
    pts_.reserve(vertices_flat.size());
    for (size_t i = 0; i < n_in; ++i) {
        const double* v = &vertices_flat[i * dim_];
        if (!pts_.empty()) {
            const double* last = &pts_[pts_.size() - dim_];
            bool same = true;
            for (uint32_t a = 0; a < dim_; ++a)
                if (v[a] != last[a]) {
                    same = false;
                    break;
                }
            if (same) continue;
        }
        pts_.insert(pts_.end(), v, v + dim_);
    }
    const size_t n = pts_.size() / dim_;
    params_.resize(n, 0.0);
    for (size_t i = 1; i < n; ++i) {
        length_ += std::sqrt(sq_dist(&pts_[(i - 1) * dim_], &pts_[i * dim_], dim_));
        params_[i] = length_;
    }
    if (length_ > 0.0) {
        for (size_t i = 1; i + 1 < n; ++i) params_[i] /= length_;
        params_[n - 1] = 1.0;
    }
}

void Polyline::eval(double t, double* out) const {
    const size_t n = vertex_count();
    if (n == 1) {
        std::copy(pts_.begin(), pts_.end(), out);
        return;
    }
    t = std::clamp(t, 0.0, 1.0);
    // edge index i with params_[i] <= t <= params_[i+1]
    size_t i = static_cast<size_t>(
        std::upper_bound(params_.begin(), params_.end(), t) - params_.begin());
    i = (i == 0) ? 0 : i - 1;
    if (i >= n - 1) i = n - 2;
    const double lo = params_[i], hi = params_[i + 1];
    const double f = (t - lo) / (hi - lo);
    const double* A = vertex(i);
    const double* B = vertex(i + 1);
    for (uint32_t a = 0; a < dim_; ++a) out[a] = A[a] + f * (B[a] - A[a]);
}

double Polyline::endpoint_span() const {
    if (vertex_count() < 2) return 0.0;
    return std::sqrt(sq_dist(vertex(0), vertex(vertex_count() - 1), dim_));
}

double Polyline::diameter(size_t* vi, size_t* vj) const {
    const size_t n = vertex_count();
    double best = 0.0;
    size_t bi = 0, bj = 0;
    for (size_t i = 0; i + 1 < n; ++i)
        for (size_t j = i + 1; j < n; ++j) {
            const double d2 = sq_dist(vertex(i), vertex(j), dim_);
            if (d2 > best) { // strict: keeps the lexicographically first pair
                best = d2;
                bi = i;
                bj = j;
            }
        }
    if (vi) *vi = bi;
    if (vj) *vj = bj;
    return std::sqrt(best);
}

Polyline Polyline::subcurve(double t0, double t1) const {
    if (!(t0 >= 0.0 && t0 <= t1 && t1 <= 1.0))
        throw PreconditionViolated("subcurve needs 0 <= t0 <= t1 <= 1");
    std::vector<double> verts;
    verts.resize(dim_);
    eval(t0, verts.data());
    for (size_t i = 0; i < vertex_count(); ++i) {
        if (params_[i] > t0 && params_[i] < t1)
            verts.insert(verts.end(), vertex(i), vertex(i) + dim_);
    }
    verts.resize(verts.size() + dim_);
    eval(t1, verts.data() + verts.size() - dim_);
    return Polyline(dim_, std::move(verts));
}

// ---- Exact crossing-time primitives ----------------------------------------

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Smallest u >= start_u with |curve(u) - p| > R (the boundary-crossing time,
// where the distance equals R exactly); nullopt when the curve stays in the
// closed ball through u = 1. Per edge the squared distance is an upward
// quadratic in the local fraction s, so the first exit is its upper root.
std::optional<double> first_exit_ball(const Polyline& c, double start_u, const double* p,
                                      double R) {
    const uint32_t d = c.dim();
    const size_t n = c.vertex_count();
    if (n < 2) return std::nullopt;
    size_t e = static_cast<size_t>(
        std::upper_bound(c.params().begin(), c.params().end(), start_u) - c.params().begin());
    e = (e == 0) ? 0 : e - 1;
    if (e >= n - 1) e = n - 2;
    for (; e + 1 < n; ++e) {
        const double ua = c.param(e), ub = c.param(e + 1);
        const double* A = c.vertex(e);
        const double* B = c.vertex(e + 1);
        const double s0 = (start_u > ua) ? (start_u - ua) / (ub - ua) : 0.0;
        double qa = 0.0, qb = 0.0, qc = -R * R;
        for (uint32_t a = 0; a < d; ++a) {
            const double dE = B[a] - A[a];
            const double w = A[a] - p[a];
            qa += dE * dE;
            qb += 2.0 * dE * w;
            qc += w * w;
        }
        const double g0 = (qa * s0 + qb) * s0 + qc;
        if (g0 > 0.0) return ua + s0 * (ub - ua); // already outside at the start
        const double disc = std::max(0.0, qb * qb - 4.0 * qa * qc);
        double s_exit = (-qb + std::sqrt(disc)) / (2.0 * qa);
        if (s_exit < s0) s_exit = s0;
        if (s_exit <= 1.0) return ua + s_exit * (ub - ua);
    }
    return std::nullopt;
}

// Largest u in [u_lo, u_hi) with |curve(u) - center| > R, assuming the curve
// is inside the closed ball at u_hi. Walking backward, on each edge the
// outside set below the current position is [edge start, lower root), so the
// answer is the lower root of the first edge (backward) whose start is
// outside. Falls back to u_lo when the whole interval is inside the ball.
double last_outside_before(const Polyline& c, double u_lo, double u_hi, const double* center,
                           double R) {
    const uint32_t d = c.dim();
    const size_t n = c.vertex_count();
    if (n < 2) return u_lo;
    size_t e = static_cast<size_t>(
        std::upper_bound(c.params().begin(), c.params().end(), u_hi) - c.params().begin());
    e = (e == 0) ? 0 : e - 1;
    if (e >= n - 1) e = n - 2;
    for (;; --e) {
        const double ua = c.param(e), ub = c.param(e + 1);
        if (ub <= u_lo) break;
        const double* A = c.vertex(e);
        const double* B = c.vertex(e + 1);
        const double s_lo = (u_lo > ua) ? (u_lo - ua) / (ub - ua) : 0.0;
        const double s_hi = (u_hi < ub) ? (u_hi - ua) / (ub - ua) : 1.0;
        double qa = 0.0, qb = 0.0, qc = -R * R;
        for (uint32_t a = 0; a < d; ++a) {
            const double dE = B[a] - A[a];
            const double w = A[a] - center[a];
            qa += dE * dE;
            qb += 2.0 * dE * w;
            qc += w * w;
        }
        const double g_lo = (qa * s_lo + qb) * s_lo + qc;
        if (g_lo > 0.0) {
            const double disc = std::max(0.0, qb * qb - 4.0 * qa * qc);
            double s_cross = (-qb - std::sqrt(disc)) / (2.0 * qa);
            s_cross = std::clamp(s_cross, s_lo, s_hi);
            return ua + s_cross * (ub - ua);
        }
        if (e == 0) break;
    }
    return u_lo;
}

// The single closed s-interval {s in [0,1] : dist(E0 + s*dE, segment [a,b])
// <= R}, assembled exactly from the <= 3 quadratic pieces induced by the
// clamped projection parameter w(s) (the distance is convex in s, so the
// pieces' solutions are contiguous). Returns false when empty.
bool seg_sublevel_interval(const double* E0, const double* dE, const double* a, const double* b,
                           uint32_t d, double R, double& out_lo, double& out_hi) {
    out_lo = kInf;
    out_hi = -kInf;
    auto absorb = [&](double lo, double hi) {
        if (lo <= hi) {
            out_lo = std::min(out_lo, lo);
            out_hi = std::max(out_hi, hi);
        }
    };
    // {qa s^2 + qb s + qc <= 0} intersected with [plo, phi]
    auto solve_piece = [&](double qa, double qb, double qc, double plo, double phi) {
        if (plo > phi) return;
        if (qa > 0.0) {
            const double disc = qb * qb - 4.0 * qa * qc;
            if (disc < 0.0) return;
            const double sq = std::sqrt(disc);
            absorb(std::max((-qb - sq) / (2.0 * qa), plo),
                   std::min((-qb + sq) / (2.0 * qa), phi));
        } else if (qb > 0.0) {
            absorb(plo, std::min(phi, -qc / qb));
        } else if (qb < 0.0) {
            absorb(std::max(plo, -qc / qb), phi);
        } else if (qc <= 0.0) {
            absorb(plo, phi);
        }
    };
    const double R2 = R * R;
    double L2 = 0.0, dotEa_ba = 0.0, dotdE_ba = 0.0;
    double qa = 0.0, qb_a = 0.0, qc_a = 0.0, qb_b = 0.0, qc_b = 0.0;
    for (uint32_t i = 0; i < d; ++i) {
        const double ba = b[i] - a[i];
        const double va = E0[i] - a[i];
        const double vb = E0[i] - b[i];
        L2 += ba * ba;
        dotEa_ba += va * ba;
        dotdE_ba += dE[i] * ba;
        qa += dE[i] * dE[i];
        qb_a += 2.0 * dE[i] * va;
        qc_a += va * va;
        qb_b += 2.0 * dE[i] * vb;
        qc_b += vb * vb;
    }
    qc_a -= R2;
    qc_b -= R2;
    if (L2 == 0.0) {
        solve_piece(qa, qb_a, qc_a, 0.0, 1.0);
        return out_lo <= out_hi;
    }
    const double w0 = dotEa_ba / L2;
    const double w1 = dotdE_ba / L2;
    const double mqa = std::max(0.0, qa - L2 * w1 * w1); // >= 0 by Cauchy-Schwarz
    const double mqb = qb_a - 2.0 * L2 * w0 * w1;
    const double mqc = (qc_a + R2) - L2 * w0 * w0 - R2;
    if (w1 == 0.0) {
        if (w0 <= 0.0)
            solve_piece(qa, qb_a, qc_a, 0.0, 1.0);
        else if (w0 >= 1.0)
            solve_piece(qa, qb_b, qc_b, 0.0, 1.0);
        else
            solve_piece(mqa, mqb, mqc, 0.0, 1.0);
        return out_lo <= out_hi;
    }
    const double sA = -w0 / w1;        // w(s) = 0
    const double sB = (1.0 - w0) / w1; // w(s) = 1
    if (w1 > 0.0) {
        solve_piece(qa, qb_a, qc_a, 0.0, std::min(1.0, sA));
        solve_piece(mqa, mqb, mqc, std::max(0.0, sA), std::min(1.0, sB));
        solve_piece(qa, qb_b, qc_b, std::max(0.0, sB), 1.0);
    } else {
        solve_piece(qa, qb_b, qc_b, 0.0, std::min(1.0, sB));
        solve_piece(mqa, mqb, mqc, std::max(0.0, sB), std::min(1.0, sA));
        solve_piece(qa, qb_a, qc_a, std::max(0.0, sA), 1.0);
    }
    return out_lo <= out_hi;
}

// First u in [start_u, 1] with dist(curve(u), union of segments) > R — the
// crossing time, where the distance to the union equals R exactly — or
// nullopt when the curve stays within R of the union. Per edge, the covered
// set is the union of per-segment sublevel intervals; a sweep from the
// current position finds the first gap.
std::optional<double> first_escape_union(const Polyline& c, double start_u,
                                         const std::vector<double>& union_segs, double R) {
    const uint32_t d = c.dim();
    const size_t n = c.vertex_count();
    if (n < 2) return std::nullopt;
    const size_t n_segs = union_segs.size() / (2 * d);
    const double R2_pad = R * R * (1.0 + 1e-12); // inclusive prefilter
    constexpr double kGapEps = 1e-12;            // fp slack when chaining intervals

    std::vector<double> dE(d);
    std::vector<std::pair<double, double>> cover;
    size_t e = static_cast<size_t>(
        std::upper_bound(c.params().begin(), c.params().end(), start_u) - c.params().begin());
    e = (e == 0) ? 0 : e - 1;
    if (e >= n - 1) e = n - 2;
    for (; e + 1 < n; ++e) {
        const double ua = c.param(e), ub = c.param(e + 1);
        const double* A = c.vertex(e);
        const double* B = c.vertex(e + 1);
        for (uint32_t a = 0; a < d; ++a) dE[a] = B[a] - A[a];
        cover.clear();
        for (size_t q = 0; q < n_segs; ++q) {
            const double* qa = &union_segs[q * 2 * d];
            const double* qb = qa + d;
            if (segment_segment_sq_dist(A, B, qa, qb, d) > R2_pad) continue;
            double lo, hi;
            if (seg_sublevel_interval(A, dE.data(), qa, qb, d, R, lo, hi))
                cover.emplace_back(lo, hi);
        }
        std::sort(cover.begin(), cover.end());
        double reach = (start_u > ua) ? (start_u - ua) / (ub - ua) : 0.0;
        for (const auto& [lo, hi] : cover) {
            if (lo > reach + kGapEps) break;
            reach = std::max(reach, hi);
            if (reach >= 1.0) break;
        }
        if (reach < 1.0) return ua + reach * (ub - ua);
    }
    return std::nullopt;
}

} // namespace

// ---- Splitting procedure ----------------------------------------------------

SplitOutput split_once(const Polyline& curve, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw InvalidConfig("splitting scale alpha must lie in (0,1)");
    const double span = curve.endpoint_span();
    if (!(span > 0.0)) throw DegenerateCurve("splitting needs distinct curve endpoints");
    const uint32_t d = curve.dim();
    const double delta = alpha * span;

    SplitOutput out;
    out.span = span;
    out.delta = delta;

    std::vector<double> start(curve.vertex(0), curve.vertex(0) + d);
    const auto tau1 = first_exit_ball(curve, 0.0, start.data(), delta);
    if (!tau1)
        throw PreconditionViolated("curve never leaves the initial ball despite span > delta");

    double sigma = 0.0;
    double tau = *tau1;
    std::vector<double> union_segs; // flattened (a, b) pairs of sub-path edges
    std::vector<double> center(d);
    for (;;) {
        Polyline sub = curve.subcurve(sigma, tau);
        for (size_t i = 0; i + 1 < sub.vertex_count(); ++i) {
            union_segs.insert(union_segs.end(), sub.vertex(i), sub.vertex(i) + d);
            union_segs.insert(union_segs.end(), sub.vertex(i + 1), sub.vertex(i + 1) + d);
        }
        out.intervals.emplace_back(sigma, tau);
        out.subpaths.push_back(std::move(sub));

        const auto tnext = first_escape_union(curve, tau, union_segs, (1.0 + alpha) * delta);
        if (!tnext) break;
        curve.eval(*tnext, center.data());
        sigma = last_outside_before(curve, tau, *tnext, center.data(), delta);
        tau = *tnext;
    }
    return out;
}

DeviationReport deviation_factor(const Polyline& curve) {
    const double span = curve.endpoint_span();
    if (!(span > 0.0)) throw DegenerateCurve("deviation factor needs distinct endpoints");
    const double* a = curve.vertex(0);
    const double* b = curve.vertex(curve.vertex_count() - 1);
    double worst = 0.0;
    // distance to the chord is convex along each edge, so vertices attain the max
    for (size_t i = 0; i < curve.vertex_count(); ++i)
        worst = std::max(worst, point_segment_sq_dist(curve.vertex(i), a, b, curve.dim()));
    return DeviationReport{std::sqrt(worst) / span};
}

KappaBounds kappa_lower_bounds(double alpha, double rho) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw InvalidConfig("splitting scale alpha must lie in (0,1)");
    if (!(rho >= 0.0)) throw InvalidConfig("deviation factor must be nonnegative");
    KappaBounds kb;
    const double denom = (1.0 + alpha) * alpha;
    kb.bound_plain = (1.0 - alpha) / denom;
    kb.bound_deviating =
        (0.5 * (1.0 + std::sqrt(1.0 + 2.0 * rho * rho)) - (4.0 + alpha) * alpha) / denom;
    return kb;
}

double beta_of_alpha(double alpha) {
    const double rho = std::sqrt(18.0 * alpha);
    const KappaBounds kb = kappa_lower_bounds(alpha, rho);
    if (!(kb.bound_plain > 0.0) || !(kb.bound_deviating > 0.0))
        throw NonpositiveBound("kappa bounds are nonpositive at this alpha");
    return 1.0 / std::sqrt(kb.bound_plain * kb.bound_deviating);
}

// ---- Recursive split tree ---------------------------------------------------

std::vector<double> SplitTree::level_weight_sums() const {
    std::vector<double> sums(level_nodes.size(), 0.0);
    for (size_t l = 0; l < level_nodes.size(); ++l)
        for (uint32_t id : level_nodes[l]) sums[l] += nodes[id].weight;
    return sums;
}

std::vector<double> SplitTree::level_max_weights() const {
    std::vector<double> mx(level_nodes.size(), 0.0);
    for (size_t l = 0; l < level_nodes.size(); ++l)
        for (uint32_t id : level_nodes[l]) mx[l] = std::max(mx[l], nodes[id].weight);
    return mx;
}

SplitTree build_split_tree(const Polyline& curve, double alpha, uint32_t levels) {
    const uint32_t d = curve.dim();
    if (!(alpha > 0.0 && alpha < 1.0 / std::sqrt(static_cast<double>(d))))
        throw InvalidConfig("split tree needs 0 < alpha < dim^(-1/2)");
    size_t vi = 0, vj = 0;
    const double Delta = curve.diameter(&vi, &vj);
    if (!(Delta > 0.0)) throw DegenerateCurve("split tree needs a curve of positive diameter");

    SplitTree tree;
    tree.alpha = alpha;

    // Scale schedule delta_k = alpha^k from the first k with alpha^k <= Delta.
    uint32_t k0 = 0;
    double dk = 1.0;
    while (dk > Delta) {
        ++k0;
        dk = std::pow(alpha, static_cast<double>(k0));
        if (k0 > (1u << 20)) throw DepthInfeasible("no feasible starting scale");
    }
    tree.k0 = k0;
    tree.levels = levels;

    // Root: walk from the (lexicographically first) diameter vertex to the
    // first crossing of distance delta_k0; when the curve never strictly
    // exceeds delta_k0 (diameter == delta_k0), the far diameter vertex is the
    // crossing.
    const double t_start = curve.param(vi);
    const auto cross = first_exit_ball(curve, t_start, curve.vertex(vi), dk);
    const double t_end = cross ? *cross : curve.param(vj);

    SplitTreeNode root;
    root.t_lo = t_start;
    root.t_hi = t_end;
    root.level = 0;
    root.weight = 1.0;
    tree.nodes.push_back(root);
    tree.level_nodes.assign(levels + 1, {});
    tree.level_nodes[0].push_back(0);

    constexpr size_t kNodeBudget = size_t{1} << 22;
    for (uint32_t l = 0; l < levels; ++l) {
        for (uint32_t id : tree.level_nodes[l]) {
            const double t_lo = tree.nodes[id].t_lo;
            const double t_hi = tree.nodes[id].t_hi;
            SplitOutput split;
            try {
                split = split_once(curve.subcurve(t_lo, t_hi), alpha);
            } catch (const Error& e) {
                throw DepthInfeasible(std::string("node at level ") + std::to_string(l) +
                                      " cannot be split: " + e.what());
            }
            tree.nodes[id].kappa = split.kappa();
            const double child_weight = tree.nodes[id].weight / split.kappa();
            for (const auto& [s_lo, s_hi] : split.intervals) {
                if (tree.nodes.size() >= kNodeBudget)
                    throw DepthInfeasible("split tree exceeds the node budget");
                SplitTreeNode child;
                // both parameterizations are arc-length proportional, so the
                // sub-interval maps back affinely
                child.t_lo = t_lo + s_lo * (t_hi - t_lo);
                child.t_hi = t_lo + s_hi * (t_hi - t_lo);
                child.level = l + 1;
                child.weight = child_weight;
                const uint32_t child_id = static_cast<uint32_t>(tree.nodes.size());
                tree.nodes[id].children.push_back(child_id);
                tree.nodes.push_back(child);
                tree.level_nodes[l + 1].push_back(child_id);
            }
        }
    }
    return tree;
}

double energy_bound(const SplitTree& tree, double s, double Delta) {
    if (!(s > 0.0)) throw InvalidConfig("energy exponent must be positive");
    if (!(Delta > 0.0)) throw InvalidConfig("diameter scale must be positive");
    const auto maxw = tree.level_max_weights();
    double sum = 0.0;
    for (size_t l = 0; l < maxw.size(); ++l)
        sum += maxw[l] * std::pow(tree.alpha, -s * static_cast<double>(l));
    const double a3d = tree.alpha * tree.alpha * tree.alpha * Delta;
    return std::pow(a3d, -s) * sum;
}

} // namespace pfro
