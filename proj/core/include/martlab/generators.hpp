#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "martlab/finprob.hpp"
#include "martlab/process.hpp"
#include "martlab/rng.hpp"
#include "martlab/space.hpp"

namespace martlab {

// Predictable factors of a Paley-Walsh martingale: df_n = r_n phi_n(r_1..r_{n-1}).
// phi[n-1] is indexed by the level-(n-1) block of the dyadic tree (sign-history bits,
// first sign most significant, bit 0 encodes r = +1).
struct PaleyWalshSpec {
    Vec f0;
    std::vector<std::vector<Vec>> phi;

    int depth() const { return static_cast<int>(phi.size()); }
    int dim() const { return static_cast<int>(f0.size()); }
    // Constant-factor helper: phi_n independent of the history.
    static PaleyWalshSpec constantFactors(Vec f0, const std::vector<Vec>& factors);
    double phiSupNorm(int n, const NormedSpace& space) const;  // sup over histories, n in 1..depth
    void validate() const;
};

AdaptedProcess genPaleyWalsh(const PaleyWalshSpec& spec);

// Leaf values i.i.d. from a seeded mildly heavy-tailed distribution; interior
// levels by backward conditional averaging, so the result is an exact martingale.
AdaptedProcess genRandomTreeMartingale(std::uint64_t seed, int depth, int branching,
                                       const NormedSpace& space);

// Mark law of a jump model; finite support or isotropic Gaussian.
struct MarkLaw {
    enum class Kind { Finite, Gaussian };
    Kind kind = Kind::Finite;
    std::vector<Vec> points;      // Finite
    std::vector<double> weights;  // Finite, sums to 1
    Vec gaussMean;                // Gaussian
    double gaussStd = 1.0;        // Gaussian, per coordinate

    Vec mean() const;
    Vec sample(Rng& rng) const;
    void validate(int dim) const;
};

// Poisson jump model: rate gamma, i.i.d. marks. The per-step jump probability on
// a grid step of width dt is 1 - exp(-gamma dt) and the matching predictable
// drift increment is -(1 - exp(-gamma dt)) * mean, so jump + drift is an exact
// grid martingale.
struct CompensatorModel {
    double intensity = 0.0;
    MarkLaw marks;

    double stepJumpProb(double dt) const;
    Vec driftIncrement(double dt) const;
    void validate(int dim) const;
};

struct ContinuousDriverSpec {
    double volatility = 1.0;
    std::optional<Vec> fixedDirection;  // unit vector; random axis per step when absent
};

LabeledPath genContinuousDriver(const GridPtr& grid, const ContinuousDriverSpec& spec,
                                const NormedSpace& space, std::uint64_t seed);

// intensity * mesh must be <= 0.1 so at most one jump per step is a faithful model.
LabeledPath genCompensatedPoisson(const GridPtr& grid, const CompensatorModel& model,
                                  const NormedSpace& space, std::uint64_t seed);

// ACC_JUMP increments with zero-mean marks at the declared grid indices only.
LabeledPath genAccessibleSeries(const GridPtr& grid, const std::vector<std::size_t>& jumpIndices,
                                const MarkLaw& markLaw, const NormedSpace& space,
                                std::uint64_t seed);

// Composite grid model: independent continuous, compensated-Poisson and
// accessible-jump components on a shared grid, plus a constant initial value.
// The Poisson component takes no step (neither jump nor drift) at the declared
// accessible indices, so quasi-left-continuous jumps avoid predictable times
// and each component stays an exact martingale.
struct CompositeModel {
    GridPtr grid;
    NormedSpace space;
    Vec initial;  // empty means 0
    std::optional<ContinuousDriverSpec> cont;
    std::optional<CompensatorModel> poisson;
    std::vector<std::size_t> accIndices;
    std::optional<MarkLaw> accMarks;

    void validate() const;
};

// Path number `pathIndex` of the seeded i.i.d. ensemble.
LabeledPath genComposite(const CompositeModel& model, std::uint64_t seed, std::uint64_t pathIndex);

// ---------------------------------------------------------------------------
// Counterexample embedding: a continuous-time path on [0,1] whose block n
// (over [1 - 2^-n, 1 - 2^-n-1]) carries either a predictable jump
// sigma_n phi_n(sigma_1..sigma_{n-1}) (a_n = 0) or a stopped-walk bridge scaled
// by phi_n (a_n = 1), with sigma_n the bridge end sign in the latter case.
// ---------------------------------------------------------------------------

struct BurkholderEmbeddingSpec {
    PaleyWalshSpec pw;       // f0 must be 0
    std::vector<int> a;      // {0,1}, one entry per level 1..depth
    NormedSpace space;
    int bridgeLattice = 2;   // bridge walk step 1/m, absorbed at +-1

    void validate() const;
    // Sub-steps allotted to the bridge of block n (1-based); chosen so the exact
    // non-absorption probability stays below 2^-n / (||phi_n||_inf + 1).
    std::size_t bridgeCap(int n) const;
    double leakBudget(int n) const;
};

GridPtr embeddingGrid(const BurkholderEmbeddingSpec& spec);

LabeledPath genBurkholderEmbedding(const BurkholderEmbeddingSpec& spec, std::uint64_t seed,
                                   std::uint64_t pathIndex);

// Streaming per-path statistics for ensembles too large to materialize.
// contSup uses the convexity of s -> ||v + s w|| inside each bridge block.
struct EmbeddingPathStats {
    double contSup = 0.0;   // sup_t of the CONT-channel accumulation norm
    double endNorm = 0.0;   // ||M_1||
    int leakCount = 0;      // blocks whose bridge was not absorbed at +-1
};

EmbeddingPathStats embeddingPathStats(const BurkholderEmbeddingSpec& spec, std::uint64_t seed,
                                      std::uint64_t pathIndex);

// Exact probability that a +-1/m walk from 0 is not absorbed at +-1 within
// `cap` steps (absorbing-chain iteration). Oracle for the leak budget.
double bridgeLeakExact(int lattice, std::size_t cap);

}  // namespace martlab
