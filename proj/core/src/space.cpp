#include "martlab/space.hpp"

#include <cmath>
#include <stdexcept>

#include "martlab/rng.hpp"

namespace martlab {

NormedSpace::NormedSpace(int d, double normKind) : dim(d), q(normKind) {
    if (d < 1) throw std::invalid_argument("NormedSpace: dim must be >= 1");
    if (!(normKind >= 1.0)) throw std::invalid_argument("NormedSpace: q must be >= 1 or infinity");
}

double NormedSpace::norm(const Vec& v) const {
    if (static_cast<int>(v.size()) != dim) throw std::invalid_argument("norm: dimension mismatch");
    if (std::isinf(q)) return normInf(v);
    if (q == 1.0) {
        double s = 0.0;
        for (double x : v) s += std::abs(x);
        return s;
    }
    if (q == 2.0) return norm2(v);
    double s = 0.0;
    for (double x : v) s += std::pow(std::abs(x), q);
    return std::pow(s, 1.0 / q);
}

double NormedSpace::dualExponent() const {
    if (std::isinf(q)) return 1.0;
    if (q == 1.0) return infinity();
    return q / (q - 1.0);
}

DualSet separatingSet(const NormedSpace& space, int extras, std::uint64_t seed) {
    if (extras < 0) throw std::invalid_argument("separatingSet: extras must be >= 0");
    DualSet out;
    for (int i = 0; i < space.dim; ++i) {
        Vec e(space.dim, 0.0);
        e[i] = 1.0;
        out.functionals.push_back(std::move(e));
    }
    Rng rng(seed);
    for (int k = 0; k < extras; ++k) {
        Vec v(space.dim);
        double n2;
        do {
            for (double& x : v) x = rng.normal();
            n2 = norm2(v);
        } while (n2 < 1e-12);
        for (double& x : v) x /= n2;
        out.functionals.push_back(std::move(v));
    }
    return out;
}

int rank(std::vector<Vec> rows, double tol) {
    if (rows.empty()) return 0;
    const std::size_t cols = rows[0].size();
    int r = 0;
    for (std::size_t c = 0; c < cols && r < static_cast<int>(rows.size()); ++c) {
        std::size_t pivot = r;
        for (std::size_t i = r; i < rows.size(); ++i)
            if (std::abs(rows[i][c]) > std::abs(rows[pivot][c])) pivot = i;
        if (std::abs(rows[pivot][c]) <= tol) continue;
        std::swap(rows[r], rows[pivot]);
        for (std::size_t i = r + 1; i < rows.size(); ++i) {
            const double f = rows[i][c] / rows[r][c];
            for (std::size_t j = c; j < cols; ++j) rows[i][j] -= f * rows[r][j];
        }
        ++r;
    }
    return r;
}

}  // namespace martlab
