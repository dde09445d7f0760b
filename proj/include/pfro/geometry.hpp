#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace pfro {

// All comparisons throughout the library are made on *squared* distances;
// sqrt only appears when a caller needs the metric value itself. The index
// structures and the exhaustive oracles share these exact helpers, so their
// candidate distances are bit-identical by construction.

inline double sq_dist(const double* a, const double* b, int d) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
        const double t = a[i] - b[i];
        s += t * t;
    }
    return s;
}

inline double sq_norm(const double* a, int d) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += a[i] * a[i];
    return s;
}

inline double dot_diff(const double* a, const double* b, const double* c, const double* e, int d) {
    // (a-b) . (c-e)
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += (a[i] - b[i]) * (c[i] - e[i]);
    return s;
}

// Squared distance from x to segment [a,b]; writes the closest point (the
// clamped orthogonal projection) into closest[0..d) when closest != nullptr.
// A zero-length segment degrades gracefully to the point distance.
inline double point_segment_sq_dist(const double* x, const double* a, const double* b, int d,
                                    double* closest = nullptr) {
    double len2 = 0.0, proj = 0.0;
    for (int i = 0; i < d; ++i) {
        const double e = b[i] - a[i];
        len2 += e * e;
        proj += (x[i] - a[i]) * e;
    }
    double w = 0.0;
    if (len2 > 0.0) w = std::clamp(proj / len2, 0.0, 1.0);
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
        const double p = a[i] + w * (b[i] - a[i]);
        if (closest) closest[i] = p;
        const double t = x[i] - p;
        s += t * t;
    }
    return s;
}

// Minimum squared distance between segments [p0,p1] and [q0,q1] in d
// dimensions. The squared distance is a convex quadratic over the (s,t) unit
// square, so its constrained minimum is either the interior critical point or
// lies on one of the four edges of the square; each edge restriction is a
// point-to-segment problem. Taking the minimum over those five candidates is
// exact, not a heuristic.
inline double segment_segment_sq_dist(const double* p0, const double* p1, const double* q0,
                                      const double* q1, int d) {
    double best = std::min(std::min(point_segment_sq_dist(p0, q0, q1, d),
                                    point_segment_sq_dist(p1, q0, q1, d)),
                           std::min(point_segment_sq_dist(q0, p0, p1, d),
                                    point_segment_sq_dist(q1, p0, p1, d)));
    double a = 0.0, b = 0.0, c = 0.0, dd = 0.0, e = 0.0;
    for (int i = 0; i < d; ++i) {
        const double u = p1[i] - p0[i];
        const double v = q1[i] - q0[i];
        const double w = p0[i] - q0[i];
        a += u * u;
        b += u * v;
        c += v * v;
        dd += u * w;
        e += v * w;
    }
    const double denom = a * c - b * b;
    if (denom > 0.0) {
        const double s = (b * e - c * dd) / denom;
        const double t = (b * s + e) / c;
        if (s > 0.0 && s < 1.0 && t > 0.0 && t < 1.0) {
            double out = 0.0;
            for (int i = 0; i < d; ++i) {
                const double cp = p0[i] + s * (p1[i] - p0[i]);
                const double cq = q0[i] + t * (q1[i] - q0[i]);
                const double diff = cp - cq;
                out += diff * diff;
            }
            best = std::min(best, out);
        }
    }
    return best;
}

// Does segment [a,b] meet the axis box [lo,hi] (expanded by pad on every
// side)? Liang-Barsky slab clipping; used when bucketing segments into grid
// cells, where a small pad keeps boundary-grazing segments registered in
// every cell they touch.
inline bool segment_intersects_box(const double* a, const double* b, const double* lo,
                                   const double* hi, int d, double pad) {
    double t0 = 0.0, t1 = 1.0;
    for (int i = 0; i < d; ++i) {
        const double e = b[i] - a[i];
        const double l = lo[i] - pad, h = hi[i] + pad;
        if (e == 0.0) {
            if (a[i] < l || a[i] > h) return false;
            continue;
        }
        double u0 = (l - a[i]) / e;
        double u1 = (h - a[i]) / e;
        if (u0 > u1) std::swap(u0, u1);
        t0 = std::max(t0, u0);
        t1 = std::min(t1, u1);
        if (t0 > t1) return false;
    }
    return true;
}

} // namespace pfro
