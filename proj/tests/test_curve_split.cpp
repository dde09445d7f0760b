#include <cmath>
#include <vector>

#include "doctest.h"
#include "pfro/curve_split.hpp"
#include "pfro/geometry.hpp"
#include "pfro/rng.hpp"

using namespace pfro;

namespace {

Polyline unit_segment() {
    return Polyline(2, {0.0, 0.0, 1.0, 0.0});
}

// Exact min distance between two polylines: pairwise over edges.
double polyline_distance(const Polyline& a, const Polyline& b) {
    double best = std::numeric_limits<double>::infinity();
    const uint32_t d = a.dim();
    for (size_t i = 0; i + 1 < a.vertex_count(); ++i)
        for (size_t j = 0; j + 1 < b.vertex_count(); ++j)
            best = std::min(best, segment_segment_sq_dist(a.vertex(i), a.vertex(i + 1),
                                                          b.vertex(j), b.vertex(j + 1),
                                                          static_cast<int>(d)));
    // zero-length polylines (single vertex) never happen here: subpaths span delta
    return std::sqrt(best);
}

Polyline random_walk(Rng& r, uint32_t dim, int steps, double step_scale) {
    std::vector<double> flat(dim, 0.0);
    std::vector<double> cur(dim, 0.0);
    for (int s = 0; s < steps; ++s) {
        for (uint32_t a = 0; a < dim; ++a) cur[a] += (r.uniform01() - 0.5) * step_scale;
        flat.insert(flat.end(), cur.begin(), cur.end());
    }
    return Polyline(dim, std::move(flat));
}

void check_split_invariants(const Polyline& curve, double alpha) {
    const auto out = split_once(curve, alpha);
    const double span = out.span;
    const double delta = out.delta;
    const double Delta = curve.diameter();
    CHECK(delta == doctest::Approx(alpha * span).epsilon(1e-15));
    REQUIRE(out.kappa() >= 1);
    REQUIRE(out.intervals.size() == out.subpaths.size());

    // every sub-path spans exactly delta between its endpoints
    for (const auto& sp : out.subpaths)
        CHECK(sp.endpoint_span() == doctest::Approx(delta).epsilon(1e-9));

    // intervals are ordered and disjoint
    for (size_t i = 0; i < out.intervals.size(); ++i) {
        CHECK(out.intervals[i].first < out.intervals[i].second);
        if (i > 0) CHECK(out.intervals[i].first >= out.intervals[i - 1].second);
    }
    CHECK(out.intervals[0].first == 0.0);

    // pairwise separation is at least alpha * delta
    for (size_t i = 0; i < out.subpaths.size(); ++i)
        for (size_t j = i + 1; j < out.subpaths.size(); ++j)
            CHECK(polyline_distance(out.subpaths[i], out.subpaths[j]) >=
                  alpha * delta - 1e-9 * Delta);

    // kappa respects the guaranteed lower bounds
    const double rho = deviation_factor(curve).rho_max;
    const auto bounds = kappa_lower_bounds(alpha, rho);
    CHECK(static_cast<double>(out.kappa()) >= bounds.bound_plain - 1e-9);
    if (bounds.bound_deviating > 0.0)
        CHECK(static_cast<double>(out.kappa()) >= bounds.bound_deviating - 1e-9);
}

} // namespace

TEST_CASE("split: polyline basics") {
    Polyline p(2, {0, 0, 0.5, 0, 0.5, 0, 1, 0}); // duplicate interior vertex dropped
    CHECK(p.vertex_count() == 3);
    CHECK(p.length() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(p.param(0) == 0.0);
    CHECK(p.param(2) == 1.0);
    double mid[2];
    p.eval(0.25, mid);
    CHECK(mid[0] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(mid[1] == 0.0);
    CHECK(p.endpoint_span() == doctest::Approx(1.0).epsilon(1e-15));

    size_t vi = 99, vj = 99;
    Polyline square(2, {0, 0, 1, 0, 1, 1, 0, 1});
    CHECK(square.diameter(&vi, &vj) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(vi == 0); // lexicographically first attaining pair
    CHECK(vj == 2);

    // [0.25, 0.75] cuts edges 0 and 2 mid-way: two interpolated endpoints
    // plus the two interior corners
    const Polyline sub = square.subcurve(0.25, 0.75);
    CHECK(sub.vertex_count() == 4);
    CHECK(sub.length() == doctest::Approx(square.length() / 2).epsilon(1e-12));
    CHECK_THROWS_AS(square.subcurve(0.8, 0.2), PreconditionViolated);
}

TEST_CASE("split: unit segment at alpha 0.1 gives exactly nine sub-paths") {
    // tau_1 = 0.1, then each stop adds 0.11 of arc: tau_i = 0.1 + 0.11 (i-1),
    // so tau_9 = 0.98 < 1 and the escape after it would land at 1.09 > 1.
    const auto out = split_once(unit_segment(), 0.1);
    CHECK(out.span == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(out.delta == doctest::Approx(0.1).epsilon(1e-15));
    REQUIRE(out.kappa() == 9);
    for (size_t i = 0; i < 9; ++i) {
        const double tau = 0.1 + 0.11 * static_cast<double>(i);
        CHECK(out.intervals[i].second == doctest::Approx(tau).epsilon(1e-12));
        CHECK(out.intervals[i].first == doctest::Approx(tau - 0.1).epsilon(1e-12));
    }
    // consecutive sub-paths are exactly alpha * delta apart on a straight line
    CHECK(polyline_distance(out.subpaths[0], out.subpaths[1]) ==
          doctest::Approx(0.01).epsilon(1e-9));
    // and kappa exceeds the plain bound (1-a)/((1+a)a) = 8.1818...
    CHECK(kappa_lower_bounds(0.1, 0.0).bound_plain == doctest::Approx(90.0 / 11.0).epsilon(1e-12));
}

TEST_CASE("split: invariants hold on straight, V-shaped, and random curves") {
    Rng r(321);
    SUBCASE("straight segments, random direction") {
        for (int t = 0; t < 12; ++t) {
            std::vector<double> a(2), b(2);
            r.fill_uniform(a.data(), 2);
            r.fill_uniform(b.data(), 2);
            if (sq_dist(a.data(), b.data(), 2) < 0.01) continue;
            Polyline seg(2, {a[0], a[1], b[0], b[1]});
            for (double alpha : {0.2, 0.1, 0.05}) check_split_invariants(seg, alpha);
        }
    }
    SUBCASE("V shapes") {
        for (int t = 0; t < 12; ++t) {
            const double h = 0.1 + 0.8 * r.uniform01();
            Polyline v(2, {0, 0, 0.5, h, 1, 0});
            for (double alpha : {0.2, 0.1, 0.05}) check_split_invariants(v, alpha);
        }
    }
    SUBCASE("random walks in 2d and 3d") {
        for (uint32_t dim : {2u, 3u}) {
            for (int t = 0; t < 6; ++t) {
                const Polyline w = random_walk(r, dim, 60, 0.15);
                if (w.endpoint_span() < 1e-3) continue; // nearly closed: skip
                for (double alpha : {0.2, 0.1}) check_split_invariants(w, alpha);
            }
        }
    }
}

TEST_CASE("split: first sub-path endpoint sits exactly on the exit sphere") {
    Rng r(654);
    for (int t = 0; t < 10; ++t) {
        const Polyline w = random_walk(r, 2, 40, 0.2);
        if (w.endpoint_span() < 1e-3) continue;
        const auto out = split_once(w, 0.15);
        std::vector<double> start(2), exitp(2);
        w.eval(0.0, start.data());
        w.eval(out.intervals[0].second, exitp.data());
        const double dist = std::sqrt(sq_dist(start.data(), exitp.data(), 2));
        CHECK(dist == doctest::Approx(out.delta).epsilon(1e-9));
        // before the exit the curve stays inside the closed ball
        for (int k = 1; k < 50; ++k) {
            const double u = out.intervals[0].second * k / 50.0;
            std::vector<double> p(2);
            w.eval(u, p.data());
            CHECK(std::sqrt(sq_dist(start.data(), p.data(), 2)) <= out.delta * (1 + 1e-12));
        }
    }
}

TEST_CASE("split: errors for bad inputs") {
    CHECK_THROWS_AS(split_once(unit_segment(), 0.0), InvalidConfig);
    CHECK_THROWS_AS(split_once(unit_segment(), 1.0), InvalidConfig);
    Polyline loop(2, {0, 0, 1, 0, 1, 1, 0, 1, 0, 0}); // closed: span 0
    CHECK_THROWS_AS(split_once(loop, 0.1), DegenerateCurve);
    Polyline point(2, {0.5, 0.5}); // single vertex: constructible but unsplittable
    CHECK_THROWS_AS(split_once(point, 0.1), DegenerateCurve);
    CHECK_THROWS_AS(build_split_tree(point, 0.1, 1), DegenerateCurve);
    CHECK_THROWS_AS(Polyline(2, {0, 0, 0}), InvalidConfig); // ragged flat array
    CHECK_THROWS_AS(Polyline(0, {}), InvalidConfig);
}

TEST_CASE("split: deviation factor") {
    CHECK(deviation_factor(unit_segment()).rho_max == 0.0);
    Polyline spike(2, {0, 0, 0.5, 0.3, 1, 0});
    CHECK(deviation_factor(spike).rho_max == doctest::Approx(0.3).epsilon(1e-12));
    // deviation is measured relative to the span
    Polyline wide(2, {0, 0, 1, 0.8, 2, 0});
    CHECK(deviation_factor(wide).rho_max == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("split: kappa bounds and beta against frozen references") {
    const auto b01 = kappa_lower_bounds(0.1, std::sqrt(1.8));
    CHECK(b01.bound_plain == doctest::Approx(8.181818181818182).epsilon(1e-12));
    CHECK(b01.bound_deviating == doctest::Approx(10.56709572251237).epsilon(1e-12));
    const auto b005 = kappa_lower_bounds(0.05, std::sqrt(0.9));
    CHECK(b005.bound_plain == doctest::Approx(18.09523809523809).epsilon(1e-12));
    CHECK(b005.bound_deviating == doctest::Approx(21.603048124458578).epsilon(1e-12));

    CHECK(beta_of_alpha(0.05) == doctest::Approx(0.050577846321038816).epsilon(1e-12));
    CHECK(beta_of_alpha(0.01) == doctest::Approx(0.0099394561894955175).epsilon(1e-12));
    CHECK(beta_of_alpha(0.001) == doctest::Approx(0.00099904652276711406).epsilon(1e-12));
    // the asymptotic regime: beta/alpha -> 1 - alpha
    CHECK(beta_of_alpha(0.001) / 0.001 == doctest::Approx(0.999).epsilon(1e-4));

    // large alpha drives the deviating bound negative
    CHECK_THROWS_AS(beta_of_alpha(0.8), NonpositiveBound);
}

TEST_CASE("split: tree on the unit segment is uniform nine-way branching") {
    const auto tree = build_split_tree(unit_segment(), 0.1, 2);
    CHECK(tree.k0 == 0);
    CHECK(tree.levels == 2);
    REQUIRE(tree.nodes.size() == 1 + 9 + 81);
    CHECK(tree.level_nodes[0].size() == 1);
    CHECK(tree.level_nodes[1].size() == 9);
    CHECK(tree.level_nodes[2].size() == 81);
    for (uint32_t idx : tree.level_nodes[1]) CHECK(tree.nodes[idx].kappa == 9);
    const auto sums = tree.level_weight_sums();
    REQUIRE(sums.size() == 3);
    for (double s : sums) CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    const auto maxw = tree.level_max_weights();
    CHECK(maxw[0] == 1.0);
    CHECK(maxw[1] == doctest::Approx(1.0 / 9).epsilon(1e-12));
    CHECK(maxw[2] == doctest::Approx(1.0 / 81).epsilon(1e-12));
}

TEST_CASE("split: tree weights sum to one on irregular curves too") {
    Rng r(987);
    const Polyline w = random_walk(r, 2, 80, 0.12);
    REQUIRE(w.diameter() > 0.0);
    const auto tree = build_split_tree(w, 0.2, 2);
    const auto sums = tree.level_weight_sums();
    for (double s : sums) CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    // node intervals nest inside their parents
    for (const auto& n : tree.nodes) {
        for (uint32_t c : n.children) {
            CHECK(tree.nodes[c].t_lo >= n.t_lo - 1e-12);
            CHECK(tree.nodes[c].t_hi <= n.t_hi + 1e-12);
            CHECK(tree.nodes[c].level == n.level + 1);
        }
    }
}

TEST_CASE("split: energy bound matches the closed geometric form") {
    // uniform branching kappa = 9: weights at level l are 9^-l, so
    //   energy = (a^3 D)^-s * sum_l 9^-l a^(-s l)
    const auto tree = build_split_tree(unit_segment(), 0.1, 3);
    for (double s : {0.5, 1.0, 1.3}) {
        double want = 0.0;
        for (uint32_t l = 0; l <= 3; ++l)
            want += std::pow(9.0, -double(l)) * std::pow(0.1, -s * double(l));
        want *= std::pow(1e-3, -s);
        CHECK(energy_bound(tree, s, 1.0) == doctest::Approx(want).epsilon(1e-12));
    }
    CHECK(energy_bound(tree, 0.5, 1.0) == doctest::Approx(48.00967631931278).epsilon(1e-12));
    CHECK_THROWS_AS(energy_bound(tree, 0.0, 1.0), InvalidConfig);
    CHECK_THROWS_AS(energy_bound(tree, 0.5, 0.0), InvalidConfig);
}

TEST_CASE("split: tree rejects alpha beyond the dimension limit") {
    CHECK_THROWS_AS(build_split_tree(unit_segment(), 0.8, 1), InvalidConfig); // 1/sqrt(2) ~ .707
    const Polyline seg3(3, {0, 0, 0, 1, 0, 0});
    CHECK_THROWS_AS(build_split_tree(seg3, 0.6, 1), InvalidConfig); // 1/sqrt(3) ~ .577
    const auto t = build_split_tree(seg3, 0.5, 1);                  // just inside
    CHECK(t.nodes.size() > 1);
}

TEST_CASE("split: k0 picks the first scale at or below the diameter") {
    // diameter 0.05 with alpha = 0.3: 0.3^k <= 0.05 first at k = 3 (0.027)
    Polyline small(2, {0.4, 0.4, 0.45, 0.4});
    const auto tree = build_split_tree(small, 0.3, 1);
    CHECK(tree.k0 == 3);
}
