#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace martlab {

struct WilsonInterval {
    double estimate = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};

// Two-sided Wilson score interval; z defaults to the 95% quantile.
inline WilsonInterval wilson(std::size_t successes, std::size_t n, double z = 1.959963984540054) {
    if (n == 0) throw std::invalid_argument("wilson: empty sample");
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(successes) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half = (z / denom) * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
    WilsonInterval w;
    w.estimate = p;
    w.lower = std::max(0.0, center - half);
    w.upper = std::min(1.0, center + half);
    return w;
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
    std::size_t n = 0;
};

inline MeanSe meanSe(const std::vector<double>& xs) {
    if (xs.empty()) throw std::invalid_argument("meanSe: empty sample");
    double s = 0.0;
    for (double x : xs) s += x;
    const double m = s / static_cast<double>(xs.size());
    double v = 0.0;
    for (double x : xs) v += (x - m) * (x - m);
    if (xs.size() > 1) v /= static_cast<double>(xs.size() - 1);
    MeanSe r;
    r.mean = m;
    r.se = std::sqrt(v / static_cast<double>(xs.size()));
    r.n = xs.size();
    return r;
}

inline double median(std::vector<double> xs) {
    if (xs.empty()) throw std::invalid_argument("median: empty sample");
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

inline double quantile(std::vector<double> xs, double q) {
    if (xs.empty()) throw std::invalid_argument("quantile: empty sample");
    std::sort(xs.begin(), xs.end());
    const double pos = q * static_cast<double>(xs.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, xs.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return xs[lo] * (1.0 - frac) + xs[hi] * frac;
}

}  // namespace martlab
