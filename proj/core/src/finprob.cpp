#include "martlab/finprob.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace martlab {

FiltrationTree::FiltrationTree(std::vector<double> outcomeProb,
                               std::vector<std::vector<Block>> levels)
    : prob_(std::move(outcomeProb)), levels_(std::move(levels)) {
    if (prob_.empty()) throw std::invalid_argument("FiltrationTree: no outcomes");
    if (prob_.size() > kMaxOutcomes) throw std::invalid_argument("FiltrationTree: size cap exceeded");
    double total = 0.0;
    for (double p : prob_) {
        if (p <= 0.0) throw std::invalid_argument("FiltrationTree: outcome probabilities must be positive");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("FiltrationTree: probabilities must sum to 1");
    cumProb_.resize(prob_.size() + 1, 0.0);
    for (std::size_t i = 0; i < prob_.size(); ++i) cumProb_[i + 1] = cumProb_[i] + prob_[i];

    if (levels_.empty()) throw std::invalid_argument("FiltrationTree: no levels");
    if (levels_[0].size() != 1 || levels_[0][0].begin != 0 || levels_[0][0].end != prob_.size())
        throw std::invalid_argument("FiltrationTree: level 0 must be the single block");
    for (std::size_t n = 0; n < levels_.size(); ++n) {
        const auto& part = levels_[n];
        std::size_t pos = 0;
        for (const Block& b : part) {
            if (b.begin != pos || b.end <= b.begin)
                throw std::invalid_argument("FiltrationTree: blocks must tile the outcome range");
            pos = b.end;
        }
        if (pos != prob_.size())
            throw std::invalid_argument("FiltrationTree: partition does not cover all outcomes");
        if (n > 0) {
            // Refinement: every level-n block boundary must exist at level n as well,
            // i.e. each level-n block lies inside one level-(n-1) block.
            for (const Block& b : part) {
                const std::size_t parent = blockOfImplNoCheck(n - 1, b.begin);
                if (b.end > levels_[n - 1][parent].end)
                    throw std::invalid_argument("FiltrationTree: level does not refine its predecessor");
            }
        }
    }
}

std::size_t FiltrationTree::blockOfImplNoCheck(std::size_t level, std::size_t outcome) const {
    const auto& part = levels_[level];
    auto it = std::upper_bound(part.begin(), part.end(), outcome,
                               [](std::size_t o, const Block& b) { return o < b.end; });
    return static_cast<std::size_t>(it - part.begin());
}

const std::vector<Block>& FiltrationTree::blocks(std::size_t level) const {
    if (level >= levels_.size()) throw std::out_of_range("FiltrationTree: level out of range");
    return levels_[level];
}

double FiltrationTree::blockProb(std::size_t level, std::size_t blockIdx) const {
    const Block& b = blocks(level).at(blockIdx);
    return cumProb_[b.end] - cumProb_[b.begin];
}

std::size_t FiltrationTree::blockOf(std::size_t level, std::size_t outcome) const {
    if (level >= levels_.size()) throw std::out_of_range("FiltrationTree: level out of range");
    if (outcome >= prob_.size()) throw std::out_of_range("FiltrationTree: outcome out of range");
    return blockOfImplNoCheck(level, outcome);
}

std::size_t FiltrationTree::parentBlock(std::size_t level, std::size_t blockIdx) const {
    if (level == 0) throw std::out_of_range("FiltrationTree: level 0 has no parent");
    return blockOf(level - 1, blocks(level).at(blockIdx).begin);
}

std::shared_ptr<const FiltrationTree> FiltrationTree::uniform(int depth, int branching) {
    if (depth < 0) throw std::invalid_argument("uniform tree: negative depth");
    if (branching < 2) throw std::invalid_argument("uniform tree: branching must be >= 2");
    double atomsF = std::pow(static_cast<double>(branching), depth);
    if (atomsF > static_cast<double>(kMaxOutcomes))
        throw std::invalid_argument("uniform tree: size cap exceeded");
    std::size_t atoms = 1;
    for (int k = 0; k < depth; ++k) atoms *= static_cast<std::size_t>(branching);
    std::vector<double> prob(atoms, 1.0 / static_cast<double>(atoms));
    std::vector<std::vector<Block>> levels(static_cast<std::size_t>(depth) + 1);
    std::size_t blockCount = 1;
    for (int n = 0; n <= depth; ++n) {
        const std::size_t width = atoms / blockCount;
        auto& part = levels[static_cast<std::size_t>(n)];
        part.reserve(blockCount);
        for (std::size_t b = 0; b < blockCount; ++b) part.push_back({b * width, (b + 1) * width});
        blockCount *= static_cast<std::size_t>(branching);
    }
    return std::make_shared<const FiltrationTree>(std::move(prob), std::move(levels));
}

std::shared_ptr<const FiltrationTree> FiltrationTree::dyadic(int depth) {
    return uniform(depth, 2);
}

int FiltrationTree::dyadicDepth() const {
    const std::size_t atoms = prob_.size();
    int d = 0;
    while ((std::size_t{1} << d) < atoms) ++d;
    if ((std::size_t{1} << d) != atoms || levels_.size() != static_cast<std::size_t>(d) + 1)
        throw std::logic_error("FiltrationTree: not a dyadic tree");
    return d;
}

int FiltrationTree::dyadicSign(std::size_t outcome, int k) const {
    const int d = dyadicDepth();
    if (k < 1 || k > d) throw std::out_of_range("dyadicSign: level out of range");
    const std::size_t bit = (outcome >> (d - k)) & 1u;
    return bit == 0 ? 1 : -1;
}

Vec AdaptedProcess::atOutcome(std::size_t level, std::size_t outcome) const {
    return values[level][tree->blockOf(level, outcome)];
}

void AdaptedProcess::validate() const {
    if (!tree) throw std::invalid_argument("AdaptedProcess: no tree");
    if (values.size() > tree->levelCount())
        throw std::invalid_argument("AdaptedProcess: more value levels than tree levels");
    for (std::size_t n = 0; n < values.size(); ++n) {
        if (values[n].size() != tree->blocks(n).size())
            throw std::invalid_argument("AdaptedProcess: block count mismatch");
        for (const Vec& v : values[n])
            if (static_cast<int>(v.size()) != dim)
                throw std::invalid_argument("AdaptedProcess: dimension mismatch");
    }
}

AdaptedProcess fromAtomValues(const TreePtr& tree, int dim,
                              const std::vector<std::vector<Vec>>& atomValues,
                              double constancyTol) {
    AdaptedProcess out;
    out.tree = tree;
    out.dim = dim;
    out.values.resize(atomValues.size());
    for (std::size_t n = 0; n < atomValues.size(); ++n) {
        if (atomValues[n].size() != tree->outcomes())
            throw std::invalid_argument("fromAtomValues: need one value per outcome");
        const auto& part = tree->blocks(n);
        out.values[n].reserve(part.size());
        for (const Block& b : part) {
            const Vec& rep = atomValues[n][b.begin];
            for (std::size_t i = b.begin + 1; i < b.end; ++i)
                if (normInf(sub(atomValues[n][i], rep)) > constancyTol)
                    throw std::invalid_argument("fromAtomValues: values not block-constant");
            out.values[n].push_back(rep);
        }
    }
    out.validate();
    return out;
}

std::vector<Vec> condExpect(const AdaptedProcess& proc, std::size_t fromLevel, std::size_t toLevel) {
    proc.validate();
    if (fromLevel >= proc.levelCount()) throw std::out_of_range("condExpect: fromLevel out of range");
    if (toLevel > fromLevel) throw std::invalid_argument("condExpect: toLevel must be <= fromLevel");
    const FiltrationTree& tree = *proc.tree;
    const auto& coarse = tree.blocks(toLevel);
    const auto& fine = tree.blocks(fromLevel);
    std::vector<Vec> out(coarse.size(), zeros(static_cast<std::size_t>(proc.dim)));
    std::size_t c = 0;
    for (std::size_t f = 0; f < fine.size(); ++f) {
        while (fine[f].begin >= coarse[c].end) ++c;
        axpyInPlace(out[c], tree.blockProb(fromLevel, f), proc.values[fromLevel][f]);
    }
    for (std::size_t cc = 0; cc < coarse.size(); ++cc) {
        const double p = tree.blockProb(toLevel, cc);
        for (double& x : out[cc]) x /= p;
    }
    return out;
}

MartingaleCheck isMartingale(const AdaptedProcess& proc, double tol, const NormedSpace* space) {
    if (tol < 0.0) throw std::invalid_argument("isMartingale: tol must be >= 0");
    proc.validate();
    NormedSpace l2(proc.dim, 2.0);
    const NormedSpace& sp = space ? *space : l2;
    double scale = 1.0;
    for (const auto& lvl : proc.values)
        for (const Vec& v : lvl) scale = std::max(scale, sp.norm(v));
    double worst = 0.0;
    for (std::size_t n = 0; n + 1 < proc.levelCount(); ++n) {
        const std::vector<Vec> proj = condExpect(proc, n + 1, n);
        for (std::size_t b = 0; b < proj.size(); ++b)
            worst = std::max(worst, sp.norm(sub(proj[b], proc.values[n][b])));
    }
    MartingaleCheck r;
    r.maxViolation = worst;
    r.ok = worst <= tol * scale;
    return r;
}

AdaptedProcess discreteCompensator(const AdaptedProcess& proc) {
    proc.validate();
    if (proc.levelCount() == 0) throw std::invalid_argument("discreteCompensator: empty process");
    for (const Vec& v0 : proc.values[0])
        if (!isZero(v0)) throw std::invalid_argument("discreteCompensator: process must start at 0");
    const FiltrationTree& tree = *proc.tree;
    AdaptedProcess v = apZeroLike(proc);
    for (std::size_t n = 1; n < proc.levelCount(); ++n) {
        // E[dA_n | F_{n-1}] = E[A_n | F_{n-1}] - A_{n-1}, lifted back to level-n blocks.
        const std::vector<Vec> projected = condExpect(proc, n, n - 1);
        for (std::size_t b = 0; b < tree.blocks(n).size(); ++b) {
            const std::size_t parent = tree.parentBlock(n, b);
            Vec inc = sub(projected[parent], proc.values[n - 1][parent]);
            v.values[n][b] = add(v.values[n - 1][parent], inc);
        }
    }
    return v;
}

static void checkCompatible(const AdaptedProcess& a, const AdaptedProcess& b) {
    if (a.tree != b.tree || a.dim != b.dim || a.levelCount() != b.levelCount())
        throw std::invalid_argument("adapted processes are not compatible");
}

AdaptedProcess apAdd(const AdaptedProcess& a, const AdaptedProcess& b) {
    checkCompatible(a, b);
    AdaptedProcess out = a;
    for (std::size_t n = 0; n < out.levelCount(); ++n)
        for (std::size_t blk = 0; blk < out.values[n].size(); ++blk)
            addInPlace(out.values[n][blk], b.values[n][blk]);
    return out;
}

AdaptedProcess apSub(const AdaptedProcess& a, const AdaptedProcess& b) {
    checkCompatible(a, b);
    AdaptedProcess out = a;
    for (std::size_t n = 0; n < out.levelCount(); ++n)
        for (std::size_t blk = 0; blk < out.values[n].size(); ++blk)
            subInPlace(out.values[n][blk], b.values[n][blk]);
    return out;
}

AdaptedProcess apScale(const AdaptedProcess& a, double c) {
    AdaptedProcess out = a;
    for (auto& lvl : out.values)
        for (Vec& v : lvl)
            for (double& x : v) x *= c;
    return out;
}

AdaptedProcess apZeroLike(const AdaptedProcess& a) {
    AdaptedProcess out = a;
    for (auto& lvl : out.values)
        for (Vec& v : lvl) std::fill(v.begin(), v.end(), 0.0);
    return out;
}

}  // namespace martlab
