#include "martlab/stochcalc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace martlab {

void JumpStream::validate() const {
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (events[i].index < 1) throw std::invalid_argument("JumpStream: index must be >= 1");
        if (i > 0 && events[i].index <= events[i - 1].index)
            throw std::invalid_argument("JumpStream: indices must be strictly increasing");
        if (isZero(events[i].mark, 0.0))
            throw std::invalid_argument("JumpStream: marks must be nonzero");
    }
}

JumpStream jumpMeasure(const LabeledPath& path, ChannelSet channels) {
    const ChannelSet jumpChannels{static_cast<std::uint8_t>(
        channels.mask & (ChannelSet::of(Channel::QlcJump) | ChannelSet::of(Channel::AccJump)).mask)};
    JumpStream out;
    for (std::size_t j = 1; j <= path.stepCount(); ++j) {
        Vec mark = netIncrement(path, j, jumpChannels);
        if (!isZero(mark, 0.0)) out.events.push_back({j, std::move(mark)});
    }
    return out;
}

double jumpVariation(const JumpStream& stream, const NormedSpace& space) {
    double total = 0.0;
    for (const JumpEvent& e : stream.events) total += space.norm(e.mark);
    return total;
}

LabeledPath compensate(const JumpStream& stream, const CompensatorModel& model,
                       const GridPtr& grid, const NormedSpace& space) {
    stream.validate();
    model.validate(space.dim);
    LabeledPath out;
    out.grid = grid;
    out.initial = zeros(static_cast<std::size_t>(space.dim));
    out.steps.resize(grid->stepCount());
    const Vec mean = model.marks.mean();
    const bool needDrift = !isZero(mean, 0.0);
    for (const JumpEvent& e : stream.events) {
        if (e.index > grid->stepCount())
            throw std::invalid_argument("compensate: jump index beyond grid");
        out.steps[e.index - 1].push_back({Channel::QlcJump, e.mark});
    }
    if (needDrift)
        for (std::size_t k = 0; k < grid->stepCount(); ++k)
            out.steps[k].push_back(
                {Channel::QlcDrift, scaled(mean, -model.stepJumpProb(grid->dt(k)))});
    return out;
}

AdaptedProcess compensate(const AdaptedProcess& jumps) {
    return apSub(jumps, discreteCompensator(jumps));
}

LabeledPath reconstructFromJumps(const LabeledPath& path, const CompensatorModel* model) {
    path.validate();
    if (path.hasChannel(Channel::Cont))
        throw std::invalid_argument("reconstructFromJumps: CONT channel present");
    if (!isZero(path.initial, 0.0))
        throw std::invalid_argument("reconstructFromJumps: path must start at 0");
    const JumpStream qlc = jumpMeasure(path, ChannelSet::of(Channel::QlcJump));
    LabeledPath out = channelPart(path, ChannelSet::of(Channel::AccJump), false);
    if (!qlc.events.empty() || path.hasChannel(Channel::QlcDrift)) {
        if (!model)
            throw std::invalid_argument("reconstructFromJumps: QLC content needs a compensator model");
        const NormedSpace space(path.dim(), 2.0);
        out = pathAdd(out, compensate(qlc, *model, path.grid, space));
    }
    return out;
}

AdaptedProcess reconstructFromJumps(const AdaptedProcess& mart) {
    mart.validate();
    for (const Vec& v : mart.values[0])
        if (!isZero(v)) throw std::invalid_argument("reconstructFromJumps: must start at 0");
    return compensate(mart);
}

void TransformCoeffs::validate(const FiltrationTree& tree) const {
    if (perBlock.size() + 1 != tree.levelCount())
        throw std::invalid_argument("TransformCoeffs: level count mismatch");
    for (std::size_t n = 0; n < perBlock.size(); ++n)
        if (perBlock[n].size() != tree.blocks(n).size())
            throw std::invalid_argument("TransformCoeffs: block count mismatch");
}

double TransformCoeffs::maxAbs() const {
    double m = std::abs(a0);
    for (const auto& lvl : perBlock)
        for (double a : lvl) m = std::max(m, std::abs(a));
    return m;
}

TransformCoeffs constantCoeffs(const TreePtr& tree, const std::vector<double>& a, double a0) {
    if (a.size() + 1 != tree->levelCount())
        throw std::invalid_argument("constantCoeffs: need one coefficient per increment level");
    TransformCoeffs out;
    out.a0 = a0;
    out.perBlock.resize(a.size());
    for (std::size_t n = 0; n < a.size(); ++n)
        out.perBlock[n].assign(tree->blocks(n).size(), a[n]);
    return out;
}

TransformCoeffs alternatingCoeffs(const TreePtr& tree) {
    std::vector<double> a(tree->levelCount() - 1);
    for (std::size_t n = 0; n < a.size(); ++n) a[n] = (n + 1) % 2 == 1 ? 1.0 : 0.0;
    return constantCoeffs(tree, a, 0.0);
}

TransformCoeffs hitAndFreezeCoeffs(const AdaptedProcess& mart, double level,
                                   const NormedSpace& space) {
    if (!(level > 0.0)) throw std::invalid_argument("hitAndFreezeCoeffs: level must be positive");
    mart.validate();
    const FiltrationTree& tree = *mart.tree;
    TransformCoeffs out;
    out.a0 = 1.0;
    out.perBlock.resize(mart.levelCount() - 1);
    // runningSup[b] = sup_{j <= n} ||M_j|| on the level-n block b
    std::vector<double> runningSup(1, space.norm(mart.values[0][0]));
    for (std::size_t n = 0; n + 1 < mart.levelCount(); ++n) {
        out.perBlock[n].resize(runningSup.size());
        for (std::size_t b = 0; b < runningSup.size(); ++b)
            out.perBlock[n][b] = runningSup[b] < level ? 1.0 : 0.0;
        const auto& next = tree.blocks(n + 1);
        std::vector<double> nextSup(next.size());
        for (std::size_t b = 0; b < next.size(); ++b)
            nextSup[b] = std::max(runningSup[tree.parentBlock(n + 1, b)],
                                  space.norm(mart.values[n + 1][b]));
        runningSup = std::move(nextSup);
    }
    return out;
}

AdaptedProcess applyTransform(const AdaptedProcess& mart, const TransformCoeffs& coeffs) {
    mart.validate();
    coeffs.validate(*mart.tree);
    const FiltrationTree& tree = *mart.tree;
    AdaptedProcess out = apZeroLike(mart);
    for (std::size_t b = 0; b < out.values[0].size(); ++b)
        out.values[0][b] = scaled(mart.values[0][b], coeffs.a0);
    for (std::size_t n = 1; n < mart.levelCount(); ++n)
        for (std::size_t b = 0; b < mart.values[n].size(); ++b) {
            const std::size_t parent = tree.parentBlock(n, b);
            Vec v = out.values[n - 1][parent];
            axpyInPlace(v, coeffs.perBlock[n - 1][parent],
                        sub(mart.values[n][b], mart.values[n - 1][parent]));
            out.values[n][b] = std::move(v);
        }
    return out;
}

LabeledPath applyTransform(const LabeledPath& path, const GridTransformCoeffs& coeffs) {
    if (coeffs.a.size() != path.stepCount())
        throw std::invalid_argument("applyTransform: coefficient count mismatch");
    LabeledPath out = path;
    for (double& x : out.initial) x *= coeffs.a0;
    for (std::size_t k = 0; k < out.steps.size(); ++k)
        for (LabeledIncrement& inc : out.steps[k])
            for (double& x : inc.delta) x *= coeffs.a[k];
    return out;
}

GridTransformCoeffs gridHitAndFreezeCoeffs(const LabeledPath& path, double level,
                                           const NormedSpace& space) {
    if (!(level > 0.0)) throw std::invalid_argument("gridHitAndFreezeCoeffs: level must be positive");
    GridTransformCoeffs out;
    out.a0 = 1.0;
    out.a.resize(path.stepCount());
    Vec cur = path.initial;
    double sup = space.norm(cur);
    for (std::size_t k = 0; k < path.stepCount(); ++k) {
        out.a[k] = sup < level ? 1.0 : 0.0;
        addInPlace(cur, netIncrement(path, k + 1));
        sup = std::max(sup, space.norm(cur));
    }
    return out;
}

bool isDifferentiallySubordinate(const AdaptedProcess& n, const AdaptedProcess& m,
                                 const Vec& functional, double tol) {
    if (n.tree != m.tree || n.levelCount() != m.levelCount())
        throw std::invalid_argument("isDifferentiallySubordinate: incompatible processes");
    const FiltrationTree& tree = *n.tree;
    const double n0 = dot(n.values[0][0], functional);
    const double m0 = dot(m.values[0][0], functional);
    if (n0 * n0 > m0 * m0 + tol) return false;
    for (std::size_t lvl = 1; lvl < n.levelCount(); ++lvl)
        for (std::size_t b = 0; b < n.values[lvl].size(); ++b) {
            const std::size_t parent = tree.parentBlock(lvl, b);
            const double dn = dot(sub(n.values[lvl][b], n.values[lvl - 1][parent]), functional);
            const double dm = dot(sub(m.values[lvl][b], m.values[lvl - 1][parent]), functional);
            if (dn * dn > dm * dm + tol) return false;
        }
    return true;
}

bool isDifferentiallySubordinate(const LabeledPath& n, const LabeledPath& m,
                                 const Vec& functional, double tol) {
    if (n.grid != m.grid) throw std::invalid_argument("isDifferentiallySubordinate: grid mismatch");
    const double n0 = dot(n.initial, functional);
    const double m0 = dot(m.initial, functional);
    if (n0 * n0 > m0 * m0 + tol) return false;
    for (std::size_t j = 1; j <= n.stepCount(); ++j) {
        const double dn = dot(netIncrement(n, j), functional);
        const double dm = dot(netIncrement(m, j), functional);
        if (dn * dn > dm * dm + tol) return false;
    }
    return true;
}

bool isWeaklyDifferentiallySubordinate(const AdaptedProcess& n, const AdaptedProcess& m,
                                       const DualSet& duals, double tol) {
    for (const Vec& f : duals.functionals)
        if (!isDifferentiallySubordinate(n, m, f, tol)) return false;
    return true;
}

bool isWeaklyDifferentiallySubordinate(const LabeledPath& n, const LabeledPath& m,
                                       const DualSet& duals, double tol) {
    for (const Vec& f : duals.functionals)
        if (!isDifferentiallySubordinate(n, m, f, tol)) return false;
    return true;
}

}  // namespace martlab
