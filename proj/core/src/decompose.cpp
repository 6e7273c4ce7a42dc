#include "martlab/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace martlab {

namespace {

// x[min(n, stop - 1)] with x[-1] = 0; the "never" sentinel leaves x untouched.
const Vec& preStopVal(const std::vector<Vec>& x, std::size_t stopLevel, std::size_t n,
                      const Vec& zero) {
    if (stopLevel == 0) return zero;
    return x[std::min(n, stopLevel - 1)];
}

const Vec& stopVal(const std::vector<Vec>& x, std::size_t stopLevel, std::size_t n) {
    return x[std::min(n, stopLevel)];
}

LabeledPath constPath(const GridPtr& grid, Vec v) {
    LabeledPath out;
    out.grid = grid;
    out.initial = std::move(v);
    out.steps.resize(grid->stepCount());
    return out;
}

}  // namespace

TreeGundyTriple gundy(const AdaptedProcess& mart, double lambda, const NormedSpace& space) {
    if (!(lambda > 0.0)) throw std::invalid_argument("gundy: lambda must be positive");
    mart.validate();
    const FiltrationTree& tree = *mart.tree;
    const std::size_t levels = mart.levelCount();
    const std::size_t atoms = tree.outcomes();
    const std::size_t never = levels;  // sentinel
    const Vec zero = zeros(static_cast<std::size_t>(mart.dim));

    TreeGundyTriple out;
    out.tauAtom.assign(atoms, never);

    // tau = first level with ||M|| >= lambda/2; N = jump of M at tau.
    std::vector<std::vector<Vec>> nAtom(levels, std::vector<Vec>(atoms));
    for (std::size_t w = 0; w < atoms; ++w) {
        std::vector<Vec> m(levels);
        for (std::size_t n = 0; n < levels; ++n) m[n] = mart.atOutcome(n, w);
        for (std::size_t n = 0; n < levels; ++n)
            if (space.norm(m[n]) >= lambda / 2.0) {
                out.tauAtom[w] = n;
                break;
            }
        const std::size_t tau = out.tauAtom[w];
        Vec jump = zero;
        if (tau < levels) jump = tau == 0 ? m[0] : sub(m[tau], m[tau - 1]);
        for (std::size_t n = 0; n < levels; ++n) nAtom[n][w] = n >= tau ? jump : zero;
    }
    out.n = fromAtomValues(mart.tree, mart.dim, nAtom);

    // V = compensator of N. N_0 is deterministic (tau = 0 is a level-0 event),
    // so shift it out, compensate exactly, and shift it back.
    const Vec n0 = out.n.values[0][0];
    AdaptedProcess shifted = out.n;
    for (auto& lvl : shifted.values)
        for (Vec& v : lvl) subInPlace(v, n0);
    out.v = discreteCompensator(shifted);
    for (auto& lvl : out.v.values)
        for (Vec& v : lvl) addInPlace(v, n0);

    out.sigmaAtom.assign(atoms, never);
    std::vector<std::vector<Vec>> m1Atom(levels, std::vector<Vec>(atoms));
    std::vector<std::vector<Vec>> m2Atom(levels, std::vector<Vec>(atoms));
    std::vector<std::vector<Vec>> m3Atom(levels, std::vector<Vec>(atoms));
    for (std::size_t w = 0; w < atoms; ++w) {
        std::vector<Vec> m(levels), nv(levels), vv(levels);
        for (std::size_t n = 0; n < levels; ++n) {
            m[n] = mart.atOutcome(n, w);
            nv[n] = out.n.atOutcome(n, w);
            vv[n] = out.v.atOutcome(n, w);
        }
        for (std::size_t n = 0; n < levels; ++n)
            if (space.norm(vv[n]) >= lambda) {
                out.sigmaAtom[w] = n;
                break;
            }
        const std::size_t tau = out.tauAtom[w];
        const std::size_t sigma = out.sigmaAtom[w];
        const Vec m0TauMinus = tau > 0 ? m[0] : zero;
        // (M^{tau-} + V)^{sigma-} needs the combined process before pre-stopping.
        std::vector<Vec> mTauMinusPlusV(levels);
        for (std::size_t n = 0; n < levels; ++n)
            mTauMinusPlusV[n] = add(preStopVal(m, tau, n, zero), vv[n]);
        for (std::size_t n = 0; n < levels; ++n) {
            Vec m1 = preStopVal(m, std::min(sigma, tau), n, zero);
            addInPlace(m1, preStopVal(vv, sigma, n, zero));
            subInPlace(m1, m0TauMinus);
            m1Atom[n][w] = std::move(m1);

            Vec m2 = sub(m[n], stopVal(m, tau, n));
            addInPlace(m2, mTauMinusPlusV[n]);
            subInPlace(m2, preStopVal(mTauMinusPlusV, sigma, n, zero));
            m2Atom[n][w] = std::move(m2);

            Vec m3 = add(m0TauMinus, nv[n]);
            subInPlace(m3, vv[n]);
            m3Atom[n][w] = std::move(m3);
        }
    }
    out.m1 = fromAtomValues(mart.tree, mart.dim, m1Atom);
    out.m2 = fromAtomValues(mart.tree, mart.dim, m2Atom);
    out.m3 = fromAtomValues(mart.tree, mart.dim, m3Atom);
    return out;
}

GridGundyTriple gundy(const LabeledPath& path, double lambda, const NormedSpace& space,
                      const CompensatorModel& model) {
    if (!(lambda > 0.0)) throw std::invalid_argument("gundy: lambda must be positive");
    path.validate();
    if (path.hasChannel(Channel::Cont) || path.hasChannel(Channel::AccJump))
        throw std::invalid_argument(
            "gundy: grid backend supports compensated-Poisson paths only (no CONT/ACC channels)");
    if (model.marks.kind != MarkLaw::Kind::Finite)
        throw std::invalid_argument("gundy: grid backend needs a finite mark law");
    model.validate(path.dim());
    const GridPtr& grid = path.grid;
    const std::size_t K = path.stepCount();
    const Vec zero = zeros(path.initial.size());
    const Vec mean = model.marks.mean();
    const bool needDrift = !isZero(mean, 0.0);

    GridGundyTriple out;
    out.tau = GridStoppingTime::never(path);
    // Pathwise analytic compensator of the single-jump process N: before tau,
    // E[dN_k | F_{k-1}] averages the mark law over the crossing event.
    std::vector<Vec> vvals(K + 1);
    Vec cur = path.initial;
    if (space.norm(cur) >= lambda / 2.0) out.tau = {0, false};
    vvals[0] = out.tau.index == 0 ? cur : zero;
    for (std::size_t k = 1; k <= K; ++k) {
        Vec dv = zero;
        if (k <= out.tau.index) {  // tau >= k is known at k-1
            const double p = model.stepJumpProb(grid->dt(k - 1));
            const Vec drift = needDrift ? scaled(mean, -p) : zero;
            for (std::size_t i = 0; i < model.marks.points.size(); ++i) {
                Vec delta = add(model.marks.points[i], drift);
                if (space.norm(add(cur, delta)) >= lambda / 2.0)
                    axpyInPlace(dv, p * model.marks.weights[i], delta);
            }
            if (needDrift && space.norm(add(cur, drift)) >= lambda / 2.0)
                axpyInPlace(dv, 1.0 - p, drift);
        }
        vvals[k] = add(vvals[k - 1], dv);
        addInPlace(cur, netIncrement(path, k));
        if (out.tau.isInfinite(path) && space.norm(cur) >= lambda / 2.0) out.tau = {k, false};
    }
    out.sigma = GridStoppingTime::never(path);
    for (std::size_t k = 0; k <= K; ++k)
        if (space.norm(vvals[k]) >= lambda) {
            out.sigma = {k, true};
            break;
        }

    out.v = constPath(grid, vvals[0]);
    for (std::size_t k = 1; k <= K; ++k) {
        Vec dv = sub(vvals[k], vvals[k - 1]);
        if (!isZero(dv, 0.0)) out.v.steps[k - 1].push_back({Channel::QlcDrift, std::move(dv)});
    }
    out.n = constPath(grid, out.tau.index == 0 ? path.initial : zero);
    if (out.tau.index >= 1 && !out.tau.isInfinite(path)) {
        Vec jump = jumpAt(path, out.tau);
        if (!isZero(jump, 0.0))
            out.n.steps[out.tau.index - 1].push_back({Channel::QlcJump, std::move(jump)});
    }

    const LabeledPath m0TauMinus =
        constPath(grid, out.tau.index > 0 ? path.initial : zero);
    const GridStoppingTime sigmaAndTau = minStop(out.sigma, out.tau);
    out.m1 = pathSub(pathAdd(preStop(path, sigmaAndTau), preStop(out.v, out.sigma)), m0TauMinus);
    const LabeledPath mTauMinusPlusV = pathAdd(preStop(path, out.tau), out.v);
    out.m2 = pathSub(pathAdd(pathSub(path, stop(path, out.tau)), mTauMinusPlusV),
                     preStop(mTauMinusPlusV, out.sigma));
    out.m3 = pathSub(pathAdd(m0TauMinus, out.n), out.v);
    return out;
}

CanonicalTriple canonicalFromLabels(const LabeledPath& path) {
    path.validate();
    CanonicalTriple out;
    out.mc = channelPart(path, ChannelSet::of(Channel::Cont), false);
    out.mq = channelPart(path, kQlcChannels, false);
    out.ma = channelPart(path, ChannelSet::of(Channel::AccJump), true);
    return out;
}

MeyerYoeurpPair meyerYoeurp(const LabeledPath& path) {
    path.validate();
    MeyerYoeurpPair out;
    out.mc = channelPart(path, ChannelSet::of(Channel::Cont), false);
    out.md = channelPart(path, kQlcChannels | ChannelSet::of(Channel::AccJump), true);
    return out;
}

YoeurpPair yoeurp(const LabeledPath& md) {
    md.validate();
    if (md.hasChannel(Channel::Cont))
        throw std::invalid_argument("yoeurp: input must be purely discontinuous (no CONT channel)");
    YoeurpPair out;
    out.mq = channelPart(md, kQlcChannels, false);
    out.ma = channelPart(md, ChannelSet::of(Channel::AccJump), true);
    return out;
}

DiscreteCanonicalTriple canonicalDiscrete(const AdaptedProcess& mart) {
    mart.validate();
    DiscreteCanonicalTriple out;
    out.mc = apZeroLike(mart);
    out.mq = apZeroLike(mart);
    out.ma = mart;
    return out;
}

}  // namespace martlab
