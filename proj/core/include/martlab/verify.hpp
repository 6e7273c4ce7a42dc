#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "martlab/decompose.hpp"
#include "martlab/finprob.hpp"
#include "martlab/generators.hpp"
#include "martlab/space.hpp"
#include "martlab/stats.hpp"
#include "martlab/stochcalc.hpp"

namespace martlab {

struct CheckResult {
    std::string name;
    double bound = 0.0;     // budget side of the inequality
    double estimate = 0.0;  // adverse-endpoint value compared against bound
    double slack = 0.0;     // bound - estimate
    bool pass = false;
    bool vacuous = false;  // bound side was 0 and the estimate was forced to 0
    std::size_t sampleSize = 0;
    std::string detail;
};

struct VerificationReport {
    std::vector<CheckResult> checks;
    bool allPass() const;
};

// 40-point logarithmic grid spanning `decades` decades centered at `center`.
std::vector<double> logLambdaGrid(double center, int points = 40, double decades = 4.0);

// Empirical P(stat > level) with a 95% Wilson interval.
WilsonInterval estimateTail(const std::vector<double>& stats, double level);

// Exact distribution helpers for per-atom statistics on a tree.
double exactTailProb(const FiltrationTree& tree, const std::vector<double>& statPerAtom,
                     double level);
// sup over lambda of lambda * P(stat > lambda), attained at an atom value.
double exactWeakL1(const FiltrationTree& tree, const std::vector<double>& statPerAtom);

// Exact E||X_level|| on the tree.
double treeMeanNorm(const AdaptedProcess& proc, std::size_t level, const NormedSpace& space);
// Per-atom running sup of ||X_n|| up to the last level.
std::vector<double> atomRunningSup(const AdaptedProcess& proc, const NormedSpace& space);
// Per-atom pathwise variation ||X_0|| + sum ||dX_n|| at the last level.
std::vector<double> atomVariation(const AdaptedProcess& proc, const NormedSpace& space);

// All four level-lambda decomposition bounds (2-lambda / 5 / 4 / 7) plus exact
// additivity, evaluated at every lambda and every level; exact arithmetic.
CheckResult checkGundyBounds(const AdaptedProcess& mart, const NormedSpace& space,
                             const std::vector<double>& lambdas);

// Streamed per-path statistics of the canonical split of a composite-model ensemble.
struct CanonicalEnsembleStats {
    std::size_t n = 0;
    std::vector<double> supC, supQ, supA;  // running sup of each part per path
    std::vector<double> endNormM;          // ||M_end|| per path
    std::vector<double> pythagoras;        // ||M||^2 - ||mc||^2 - ||mq||^2 - ||ma||^2 at the end
    // index 0..3 = M, mc, mq, ma; per coordinate; at mid and terminal grid index
    double sum[4][2][8] = {};
    double sumSq[4][2][8] = {};
};

CanonicalEnsembleStats canonicalEnsembleStats(const CompositeModel& model, std::size_t nPaths,
                                              std::uint64_t seed);

// Per-part, per-coordinate z-test that ensemble means match the martingale
// start values, at `sigmas` standard errors.
CheckResult checkCanonicalMartingale(const CompositeModel& model,
                                     const CanonicalEnsembleStats& stats, double sigmas = 4.0);

// Hilbert-space orthogonality of the three parts: the squared-norm residual
// mean must vanish within `sigmas` standard errors.
CheckResult checkPythagoras(const CanonicalEnsembleStats& stats, double sigmas = 3.0);

// Weak-L1 bound for one canonical part: sup over the lambda grid of
// lambda * (Wilson upper tail bound) <= budgetC * mean ||M_end||.
CheckResult checkWeakL1Canonical(const CanonicalEnsembleStats& stats, char part,
                                 const std::vector<double>& lambdas, double budgetC);

// Exact weak-L1 bound for hit-and-freeze transforms of seeded tree martingales:
// sup_lambda lambda P((TM)* > lambda) <= budgetC * E||M||, with freeze levels
// swept over multiples of E||M||.
CheckResult checkWeakL1Transform(std::size_t nTrees, int depth, int branching,
                                 const NormedSpace& space, double budgetC, std::uint64_t seed);

enum class ProbeMode {
    SignFlip,  // coefficients in {-1, +1}; objective = Lp-norm ratio
    ZeroOne    // coefficients in {0, 1}; objective = L1-mean ratio
};

struct ProbeWitness {
    PaleyWalshSpec pw;          // f0 = 0
    std::vector<double> coeff;  // one per level
    double objective = 0.0;
};

struct ProbeResult {
    double bound = 0.0;
    ProbeWitness witness;
    std::size_t evaluations = 0;
};

double probeObjective(const ProbeWitness& w, const NormedSpace& space, double p, ProbeMode mode);

// Randomized search (restarts + single-entry hill climbing) for the largest
// transform-to-martingale norm ratio; never returns less than the warm start.
ProbeResult probeUMDLowerBound(const NormedSpace& space, double p, int depth, std::size_t budget,
                               std::uint64_t seed, ProbeMode mode = ProbeMode::SignFlip,
                               const ProbeWitness* warmStart = nullptr);

// Embed a witness into a deeper tree / higher dimension without changing its
// objective (zero-padded factors, neutral extra coefficients).
ProbeWitness padWitness(const ProbeWitness& w, int depth, int dim, ProbeMode mode);

// Explicit duality witness in l^inf_{2^depth}: the conditional-sign martingale
// of a {0,1}-transformed mass-descent martingale, normalized to E||f_N|| = 1.
// Its transform mean grows linearly in depth.
ProbeWitness haarDualWitness(int depth);

struct DivergenceRow {
    int depth = 0;
    double medianContSup = 0.0;
    double q90ContSup = 0.0;
    double meanEndNorm = 0.0;
    double leakRate = 0.0;
    double probedObjective = 0.0;
};

// Growth table of the continuous-part running sup of embedded witnesses
// across depths, with the end-norm budget column.
std::vector<DivergenceRow> divergenceDemo(const std::vector<int>& depths, std::size_t nPaths,
                                          std::uint64_t seed, std::size_t probeBudget = 0);

}  // namespace martlab
