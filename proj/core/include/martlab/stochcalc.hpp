#pragma once

#include <vector>

#include "martlab/finprob.hpp"
#include "martlab/generators.hpp"
#include "martlab/process.hpp"
#include "martlab/space.hpp"

namespace martlab {

// One jump event per grid index at most; marks are nonzero.
struct JumpEvent {
    std::size_t index = 0;  // grid index in 1..K
    Vec mark;
};

struct JumpStream {
    std::vector<JumpEvent> events;  // strictly increasing indices
    void validate() const;
};

// Jump events carried by the selected channels (drift and continuous increments
// are never jumps and are ignored even when their channels are selected).
JumpStream jumpMeasure(const LabeledPath& path, ChannelSet channels);

// Sum of mark norms = variation of the jump part.
double jumpVariation(const JumpStream& stream, const NormedSpace& space);

// Compensated jump path on a grid: the stream's jumps on the QLC_JUMP channel
// plus the model's analytic drift on QLC_DRIFT. Exact martingale for the
// per-step Bernoulli jump model.
LabeledPath compensate(const JumpStream& stream, const CompensatorModel& model,
                       const GridPtr& grid, const NormedSpace& space);

// Exact tree compensation: A - discreteCompensator(A); passes isMartingale exactly.
AdaptedProcess compensate(const AdaptedProcess& jumps);

// Rebuild a purely discontinuous path (no CONT channel, M_0 = 0) from its jumps:
// QLC jumps recompensated through `model`, ACC jumps carried over as-is.
// `model` may be null when the path has no QLC content.
LabeledPath reconstructFromJumps(const LabeledPath& path, const CompensatorModel* model = nullptr);

// Exact tree reconstruction: cumulative increments recompensated; the identity
// on martingales starting at 0.
AdaptedProcess reconstructFromJumps(const AdaptedProcess& mart);

// Predictable scalar transform coefficients on a tree: a_n (applied to the
// level-n increment) is constant on level-(n-1) blocks, which makes
// predictability structural.
struct TransformCoeffs {
    double a0 = 1.0;
    // perBlock[n-1][b]: coefficient for the level-n increment on parent block b.
    std::vector<std::vector<double>> perBlock;

    void validate(const FiltrationTree& tree) const;
    double maxAbs() const;
};

TransformCoeffs constantCoeffs(const TreePtr& tree, const std::vector<double>& a, double a0);
// a_n = 1 for odd n, 0 for even n; a0 = 0.
TransformCoeffs alternatingCoeffs(const TreePtr& tree);
// a_n = 1 on blocks where sup_{j <= n-1} ||M_j|| < level, 0 after the hit; a0 = 1.
TransformCoeffs hitAndFreezeCoeffs(const AdaptedProcess& mart, double level,
                                   const NormedSpace& space);

AdaptedProcess applyTransform(const AdaptedProcess& mart, const TransformCoeffs& coeffs);

// Grid transforms use deterministic per-step coefficients (trivially predictable).
struct GridTransformCoeffs {
    double a0 = 1.0;
    std::vector<double> a;  // one per grid step
};

LabeledPath applyTransform(const LabeledPath& path, const GridTransformCoeffs& coeffs);
GridTransformCoeffs gridHitAndFreezeCoeffs(const LabeledPath& path, double level,
                                           const NormedSpace& space);

// Stepwise differential subordination of <N, x*> to <M, x*>:
// <N_0, x*>^2 <= <M_0, x*>^2 and <dN_n, x*>^2 <= <dM_n, x*>^2 pointwise.
bool isDifferentiallySubordinate(const AdaptedProcess& n, const AdaptedProcess& m,
                                 const Vec& functional, double tol);
bool isDifferentiallySubordinate(const LabeledPath& n, const LabeledPath& m,
                                 const Vec& functional, double tol);

bool isWeaklyDifferentiallySubordinate(const AdaptedProcess& n, const AdaptedProcess& m,
                                       const DualSet& duals, double tol);
bool isWeaklyDifferentiallySubordinate(const LabeledPath& n, const LabeledPath& m,
                                       const DualSet& duals, double tol);

}  // namespace martlab
