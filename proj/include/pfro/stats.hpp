#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "pfro/errors.hpp"

namespace pfro {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double r2 = 1.0;
    size_t n = 0;
};

// Unweighted ordinary least squares of y on x. Needs >= 2 points (>= 3 for a
// finite slope stderr); throws DegenerateFit when x has no spread.
inline LinearFit ols_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    if (n < 2 || y.size() != n) throw DegenerateFit("ols_fit: need at least 2 points");
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0.0) throw DegenerateFit("ols_fit: no spread in x");
    LinearFit f;
    f.n = n;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ss_res += r * r;
    }
    f.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    f.slope_stderr = n > 2 ? std::sqrt(ss_res / (static_cast<double>(n) - 2.0) / sxx) : 0.0;
    return f;
}

// Wilson score interval for a binomial proportion at 95% (z = 1.96).
struct WilsonInterval {
    double p_hat = 0.0;
    double lo = 0.0;
    double hi = 1.0;
};

inline WilsonInterval wilson95(uint64_t successes, uint64_t trials) {
    if (trials == 0) throw DegenerateFit("wilson95: zero trials");
    const double z = 1.96;
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = p + z2 / (2.0 * n);
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    WilsonInterval w;
    w.p_hat = p;
    w.lo = (center - half) / denom;
    w.hi = (center + half) / denom;
    if (w.lo < 0.0) w.lo = 0.0;
    if (w.hi > 1.0) w.hi = 1.0;
    return w;
}

// Two-sided 95% Student-t critical value (exact table for small df, 1.96
// beyond it; replicate counts here are small, so the table region is what
// actually gets used).
inline double t_crit_95(size_t df) {
    static const double table[] = {0,     12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365,
                                   2.306, 2.262,  2.228, 2.201, 2.179, 2.160, 2.145, 2.131,
                                   2.120, 2.110,  2.101, 2.093, 2.086, 2.080, 2.074, 2.069,
                                   2.064, 2.060,  2.056, 2.052, 2.048, 2.045, 2.042};
    if (df == 0) throw DegenerateFit("t_crit_95: zero degrees of freedom");
    if (df <= 30) return table[df];
    return 1.96;
}

struct MeanCI {
    double mean = 0.0;
    double sd = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    size_t n = 0;
};

// Mean with a t-based 95% CI across replicates (needs n >= 2).
inline MeanCI mean_ci95(const std::vector<double>& v) {
    if (v.size() < 2) throw DegenerateFit("mean_ci95: need at least 2 values");
    MeanCI m;
    m.n = v.size();
    for (double x : v) m.mean += x;
    m.mean /= static_cast<double>(m.n);
    double ss = 0.0;
    for (double x : v) ss += (x - m.mean) * (x - m.mean);
    m.sd = std::sqrt(ss / (static_cast<double>(m.n) - 1.0));
    const double half = t_crit_95(m.n - 1) * m.sd / std::sqrt(static_cast<double>(m.n));
    m.lo = m.mean - half;
    m.hi = m.mean + half;
    return m;
}

inline double median(std::vector<double> v) {
    if (v.empty()) throw EmptySet("median: empty");
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace pfro
