#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "martlab/space.hpp"
#include "martlab/vec.hpp"

namespace martlab {

// Contiguous index range [begin, end) in a fixed outcome ordering.
struct Block {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t size() const { return end - begin; }
};

// Finite outcome space with a refining sequence of partitions.
// Level 0 is always the single block covering all outcomes.
class FiltrationTree {
public:
    static constexpr std::size_t kMaxOutcomes = std::size_t{1} << 20;

    FiltrationTree(std::vector<double> outcomeProb, std::vector<std::vector<Block>> levels);

    // Dyadic Rademacher tree: 2^depth equiprobable atoms, level k has 2^k blocks.
    static std::shared_ptr<const FiltrationTree> dyadic(int depth);
    // Uniform branching tree with equiprobable atoms.
    static std::shared_ptr<const FiltrationTree> uniform(int depth, int branching);

    std::size_t outcomes() const { return prob_.size(); }
    std::size_t levelCount() const { return levels_.size(); }
    const std::vector<Block>& blocks(std::size_t level) const;
    double outcomeProb(std::size_t i) const { return prob_[i]; }
    double blockProb(std::size_t level, std::size_t blockIdx) const;
    std::size_t blockOf(std::size_t level, std::size_t outcome) const;
    // Index of the level-(n-1) block containing a level-n block.
    std::size_t parentBlock(std::size_t level, std::size_t blockIdx) const;

    // Rademacher sign of the level-k refinement choice along the path to `outcome`
    // on a dyadic tree (k in 1..depth): +1 for the low half, -1 for the high half.
    int dyadicSign(std::size_t outcome, int k) const;
    int dyadicDepth() const;

private:
    std::size_t blockOfImplNoCheck(std::size_t level, std::size_t outcome) const;

    std::vector<double> prob_;
    std::vector<double> cumProb_;  // prefix sums for O(1) block probability
    std::vector<std::vector<Block>> levels_;
};

using TreePtr = std::shared_ptr<const FiltrationTree>;

// Level-indexed block-constant vector values on a FiltrationTree.
struct AdaptedProcess {
    TreePtr tree;
    int dim = 0;
    // values[level][blockIdx] is the value on that block.
    std::vector<std::vector<Vec>> values;

    std::size_t levelCount() const { return values.size(); }
    const Vec& at(std::size_t level, std::size_t blockIdx) const { return values[level][blockIdx]; }
    Vec atOutcome(std::size_t level, std::size_t outcome) const;
    void validate() const;
};

// Assemble an AdaptedProcess from per-outcome values, checking block constancy.
AdaptedProcess fromAtomValues(const TreePtr& tree, int dim,
                              const std::vector<std::vector<Vec>>& atomValues,
                              double constancyTol = 1e-9);

struct MartingaleCheck {
    bool ok = false;
    double maxViolation = 0.0;
};

// Exact conditional expectation of the level-`fromLevel` values onto level `toLevel`.
std::vector<Vec> condExpect(const AdaptedProcess& proc, std::size_t fromLevel, std::size_t toLevel);

MartingaleCheck isMartingale(const AdaptedProcess& proc, double tol,
                             const NormedSpace* space = nullptr);

// Discrete compensator V_n = sum_{k<=n} E[dA_k | F_{k-1}] of a process with A_0 = 0.
// V is predictable and A - V is a martingale up to rounding.
AdaptedProcess discreteCompensator(const AdaptedProcess& proc);

// Pointwise combinations (same tree, same level count).
AdaptedProcess apAdd(const AdaptedProcess& a, const AdaptedProcess& b);
AdaptedProcess apSub(const AdaptedProcess& a, const AdaptedProcess& b);
AdaptedProcess apScale(const AdaptedProcess& a, double c);
AdaptedProcess apZeroLike(const AdaptedProcess& a);

}  // namespace martlab
