#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "pfro/geometry.hpp"
#include "pfro/rng.hpp"

using namespace pfro;

namespace {

// Dense-sampling lower-accuracy reference: min over k+1 evenly spaced points
// of the segment. Always an upper bound on the true distance.
double dense_point_segment(const double* x, const double* a, const double* b, int dim, int k) {
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> p(dim);
    for (int i = 0; i <= k; ++i) {
        const double t = static_cast<double>(i) / k;
        for (int d = 0; d < dim; ++d) p[d] = a[d] + t * (b[d] - a[d]);
        best = std::min(best, sq_dist(x, p.data(), dim));
    }
    return best;
}

double dense_segment_segment(const double* a, const double* b, const double* c, const double* d,
                             int dim, int k) {
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> p(dim);
    for (int i = 0; i <= k; ++i) {
        const double s = static_cast<double>(i) / k;
        for (int e = 0; e < dim; ++e) p[e] = a[e] + s * (b[e] - a[e]);
        best = std::min(best, point_segment_sq_dist(p.data(), c, d, dim));
    }
    return best;
}

} // namespace

TEST_CASE("geometry: point-segment distance against dense sampling") {
    for (int dim : {1, 2, 3}) {
        Rng r(100 + dim);
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<double> x(dim), a(dim), b(dim), closest(dim);
            r.fill_uniform(x.data(), dim);
            r.fill_uniform(a.data(), dim);
            r.fill_uniform(b.data(), dim);
            const double exact = point_segment_sq_dist(x.data(), a.data(), b.data(), dim,
                                                       closest.data());
            const double dense = dense_point_segment(x.data(), a.data(), b.data(), dim, 20000);
            CHECK(exact <= dense + 1e-15);            // sampled points are feasible
            CHECK(dense - exact <= 1e-7);             // (L/k)^2-scale sampling error
            // the witness realizes the reported distance
            CHECK(sq_dist(x.data(), closest.data(), dim) == doctest::Approx(exact).epsilon(1e-12));
        }
    }
}

TEST_CASE("geometry: point-segment handles degenerate and clamped cases") {
    const double a[2] = {0.3, 0.3}, b[2] = {0.3, 0.3};
    const double x[2] = {0.5, 0.7};
    double closest[2];
    CHECK(point_segment_sq_dist(x, a, b, 2, closest) ==
          doctest::Approx(0.04 + 0.16).epsilon(1e-15));
    CHECK(closest[0] == 0.3);
    CHECK(closest[1] == 0.3);

    // projection beyond the far end clamps to the endpoint
    const double c[2] = {0.0, 0.0}, d[2] = {1.0, 0.0}, y[2] = {2.0, 1.0};
    CHECK(point_segment_sq_dist(y, c, d, 2, closest) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(closest[0] == 1.0);
    CHECK(closest[1] == 0.0);
}

TEST_CASE("geometry: segment-segment distance is exact") {
    SUBCASE("crossing segments have zero distance") {
        const double a[2] = {0, 0}, b[2] = {1, 1}, c[2] = {1, 0}, d[2] = {0, 1};
        CHECK(segment_segment_sq_dist(a, b, c, d, 2) <= 1e-24);
    }
    SUBCASE("collinear disjoint segments: gap squared") {
        const double a[2] = {0, 0}, b[2] = {0.3, 0}, c[2] = {0.5, 0}, d[2] = {1, 0};
        CHECK(segment_segment_sq_dist(a, b, c, d, 2) == doctest::Approx(0.04).epsilon(1e-14));
    }
    SUBCASE("parallel segments: offset squared") {
        const double a[2] = {0, 0}, b[2] = {1, 0}, c[2] = {0, 0.25}, d[2] = {1, 0.25};
        CHECK(segment_segment_sq_dist(a, b, c, d, 2) == doctest::Approx(0.0625).epsilon(1e-14));
    }
    SUBCASE("random pairs against double-dense sampling") {
        for (int dim : {2, 3}) {
            Rng r(300 + dim);
            for (int trial = 0; trial < 60; ++trial) {
                std::vector<double> a(dim), b(dim), c(dim), d(dim);
                r.fill_uniform(a.data(), dim);
                r.fill_uniform(b.data(), dim);
                r.fill_uniform(c.data(), dim);
                r.fill_uniform(d.data(), dim);
                const double exact =
                    segment_segment_sq_dist(a.data(), b.data(), c.data(), d.data(), dim);
                const double dense =
                    dense_segment_segment(a.data(), b.data(), c.data(), d.data(), dim, 2000);
                CHECK(exact <= dense + 1e-15); // dense candidates are feasible points
                CHECK(dense - exact <= 1e-5);
            }
        }
    }
    SUBCASE("symmetry in the argument pair") {
        Rng r(77);
        for (int trial = 0; trial < 50; ++trial) {
            double a[3], b[3], c[3], d[3];
            r.fill_uniform(a, 3);
            r.fill_uniform(b, 3);
            r.fill_uniform(c, 3);
            r.fill_uniform(d, 3);
            const double ab = segment_segment_sq_dist(a, b, c, d, 3);
            const double ba = segment_segment_sq_dist(c, d, a, b, 3);
            CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
        }
    }
}

TEST_CASE("geometry: segment-box intersection") {
    const double lo[2] = {0.25, 0.25}, hi[2] = {0.5, 0.5};
    {
        const double a[2] = {0.0, 0.0}, b[2] = {1.0, 1.0}; // passes through the box
        CHECK(segment_intersects_box(a, b, lo, hi, 2, 0.0));
    }
    {
        const double a[2] = {0.0, 0.6}, b[2] = {1.0, 0.6}; // above the box
        CHECK_FALSE(segment_intersects_box(a, b, lo, hi, 2, 0.0));
    }
    {
        const double a[2] = {0.3, 0.3}, b[2] = {0.35, 0.4}; // fully inside
        CHECK(segment_intersects_box(a, b, lo, hi, 2, 0.0));
    }
    {
        const double a[2] = {0.5, 0.6}, b[2] = {0.6, 0.5}; // touches only the padded box
        CHECK_FALSE(segment_intersects_box(a, b, lo, hi, 2, 0.0));
        CHECK(segment_intersects_box(a, b, lo, hi, 2, 0.06));
    }
    {
        const double a[2] = {0.3, 0.0}, b[2] = {0.3, 1.0}; // vertical through
        CHECK(segment_intersects_box(a, b, lo, hi, 2, 0.0));
    }
    {
        const double a[2] = {0.3, 0.35}, b[2] = {0.3, 0.35}; // degenerate point inside
        CHECK(segment_intersects_box(a, b, lo, hi, 2, 0.0));
    }
}
