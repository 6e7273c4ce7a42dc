#pragma once

#include <vector>

#include "martlab/finprob.hpp"
#include "martlab/generators.hpp"
#include "martlab/process.hpp"
#include "martlab/space.hpp"

namespace martlab {

// Level-lambda split M = M1 + M2 + M3 (bounded / rare / integrable-variation)
// on the exact tree backend. tau/sigma are per-atom level indices with
// sentinel levelCount() for "never"; sigma is a hitting time of the
// predictable process V, hence predictable.
struct TreeGundyTriple {
    AdaptedProcess m1, m2, m3;
    AdaptedProcess n, v;  // single-jump process and its compensator
    std::vector<std::size_t> tauAtom, sigmaAtom;
};

TreeGundyTriple gundy(const AdaptedProcess& mart, double lambda, const NormedSpace& space);

// Grid variant for compensated-Poisson paths with a finite mark law, where the
// conditional law of the jump given the past is available in closed form.
struct GridGundyTriple {
    LabeledPath m1, m2, m3;
    LabeledPath n, v;
    GridStoppingTime tau, sigma;
};

GridGundyTriple gundy(const LabeledPath& path, double lambda, const NormedSpace& space,
                      const CompensatorModel& model);

// Canonical split by channel labels: continuous / quasi-left-continuous /
// accessible, with M_0 routed to the accessible part.
struct CanonicalTriple {
    LabeledPath mc, mq, ma;
};

CanonicalTriple canonicalFromLabels(const LabeledPath& path);

struct MeyerYoeurpPair {
    LabeledPath mc, md;  // continuous + purely discontinuous
};

struct YoeurpPair {
    LabeledPath mq, ma;  // quasi-left-continuous + accessible
};

MeyerYoeurpPair meyerYoeurp(const LabeledPath& path);
// Requires md without CONT content; composes with meyerYoeurp to canonicalFromLabels.
YoeurpPair yoeurp(const LabeledPath& md);

// On a discrete filtration every martingale has accessible jumps, so the
// canonical decomposition is (0, 0, mart).
struct DiscreteCanonicalTriple {
    AdaptedProcess mc, mq, ma;
};

DiscreteCanonicalTriple canonicalDiscrete(const AdaptedProcess& mart);

}  // namespace martlab
