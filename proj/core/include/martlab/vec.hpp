#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace martlab {

using Vec = std::vector<double>;

inline void checkSameDim(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("vector dimension mismatch");
}

inline Vec zeros(std::size_t d) { return Vec(d, 0.0); }

inline void addInPlace(Vec& a, const Vec& b) {
    checkSameDim(a, b);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
}

inline void subInPlace(Vec& a, const Vec& b) {
    checkSameDim(a, b);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
}

inline void axpyInPlace(Vec& a, double c, const Vec& b) {
    checkSameDim(a, b);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += c * b[i];
}

inline Vec add(Vec a, const Vec& b) { addInPlace(a, b); return a; }
inline Vec sub(Vec a, const Vec& b) { subInPlace(a, b); return a; }

inline Vec scaled(Vec a, double c) {
    for (double& x : a) x *= c;
    return a;
}

inline double dot(const Vec& a, const Vec& b) {
    checkSameDim(a, b);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

inline double normInf(const Vec& a) {
    double m = 0.0;
    for (double x : a) m = std::max(m, std::abs(x));
    return m;
}

inline bool isZero(const Vec& a, double tol = 0.0) { return normInf(a) <= tol; }

}  // namespace martlab
