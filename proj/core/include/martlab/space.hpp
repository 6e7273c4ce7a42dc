#pragma once

#include <limits>
#include <vector>

#include "martlab/vec.hpp"

namespace martlab {

// R^d with the l_q norm. q = infinity() selects the max norm.
struct NormedSpace {
    int dim = 1;
    double q = 2.0;

    static constexpr double infinity() { return std::numeric_limits<double>::infinity(); }

    NormedSpace() = default;
    NormedSpace(int d, double normKind);

    double norm(const Vec& v) const;
    // Dual exponent q' with 1/q + 1/q' = 1.
    double dualExponent() const;
};

// Finite separating set of functionals acting by the Euclidean pairing.
struct DualSet {
    std::vector<Vec> functionals;
};

// Coordinate functionals plus `extras` seeded unit-sphere directions.
DualSet separatingSet(const NormedSpace& space, int extras, std::uint64_t seed);

// Rank over R by Gaussian elimination with partial pivoting.
int rank(std::vector<Vec> rows, double tol = 1e-10);

}  // namespace martlab
