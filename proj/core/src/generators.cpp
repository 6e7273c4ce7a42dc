#include "martlab/generators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace martlab {

PaleyWalshSpec PaleyWalshSpec::constantFactors(Vec f0, const std::vector<Vec>& factors) {
    PaleyWalshSpec s;
    s.f0 = std::move(f0);
    s.phi.resize(factors.size());
    for (std::size_t n = 0; n < factors.size(); ++n)
        s.phi[n].assign(std::size_t{1} << n, factors[n]);
    s.validate();
    return s;
}

void PaleyWalshSpec::validate() const {
    for (std::size_t n = 0; n < phi.size(); ++n) {
        if (phi[n].size() != (std::size_t{1} << n))
            throw std::invalid_argument("PaleyWalshSpec: phi table size mismatch");
        for (const Vec& v : phi[n])
            if (v.size() != f0.size())
                throw std::invalid_argument("PaleyWalshSpec: phi dimension mismatch");
    }
}

double PaleyWalshSpec::phiSupNorm(int n, const NormedSpace& space) const {
    if (n < 1 || n > depth()) throw std::out_of_range("phiSupNorm: level out of range");
    double m = 0.0;
    for (const Vec& v : phi[static_cast<std::size_t>(n) - 1]) m = std::max(m, space.norm(v));
    return m;
}

AdaptedProcess genPaleyWalsh(const PaleyWalshSpec& spec) {
    spec.validate();
    const int depth = spec.depth();
    AdaptedProcess out;
    out.tree = FiltrationTree::dyadic(depth);
    out.dim = spec.dim();
    out.values.resize(static_cast<std::size_t>(depth) + 1);
    out.values[0] = {spec.f0};
    for (int n = 1; n <= depth; ++n) {
        const std::size_t blocks = std::size_t{1} << n;
        out.values[n].resize(blocks);
        for (std::size_t b = 0; b < blocks; ++b) {
            const std::size_t parent = b >> 1;
            const double r = (b & 1u) == 0 ? 1.0 : -1.0;
            Vec v = out.values[n - 1][parent];
            axpyInPlace(v, r, spec.phi[static_cast<std::size_t>(n) - 1][parent]);
            out.values[n][b] = std::move(v);
        }
    }
    out.validate();
    return out;
}

AdaptedProcess genRandomTreeMartingale(std::uint64_t seed, int depth, int branching,
                                       const NormedSpace& space) {
    TreePtr tree = FiltrationTree::uniform(depth, branching);
    const std::size_t atoms = tree->outcomes();
    Rng rng(seed);
    AdaptedProcess out;
    out.tree = tree;
    out.dim = space.dim;
    out.values.resize(static_cast<std::size_t>(depth) + 1);
    // leaves: mildly heavy-tailed i.i.d. coordinates
    auto& leafLevel = out.values[static_cast<std::size_t>(depth)];
    leafLevel.resize(atoms);
    for (std::size_t i = 0; i < atoms; ++i) {
        Vec v(static_cast<std::size_t>(space.dim));
        for (double& x : v) {
            x = rng.normal();
            if (rng.uniform() < 0.1) x *= 10.0;
        }
        leafLevel[i] = std::move(v);
    }
    for (int n = depth - 1; n >= 0; --n) {
        const auto& part = tree->blocks(static_cast<std::size_t>(n));
        auto& lvl = out.values[static_cast<std::size_t>(n)];
        lvl.resize(part.size());
        const auto& child = out.values[static_cast<std::size_t>(n) + 1];
        const std::size_t b = static_cast<std::size_t>(branching);
        for (std::size_t blk = 0; blk < part.size(); ++blk) {
            Vec v = zeros(static_cast<std::size_t>(space.dim));
            for (std::size_t c = 0; c < b; ++c) addInPlace(v, child[blk * b + c]);
            for (double& x : v) x /= static_cast<double>(b);
            lvl[blk] = std::move(v);
        }
    }
    out.validate();
    return out;
}

Vec MarkLaw::mean() const {
    if (kind == Kind::Gaussian) return gaussMean;
    Vec m = zeros(points.empty() ? 0 : points[0].size());
    for (std::size_t i = 0; i < points.size(); ++i) axpyInPlace(m, weights[i], points[i]);
    return m;
}

Vec MarkLaw::sample(Rng& rng) const {
    if (kind == Kind::Gaussian) {
        Vec v = gaussMean;
        for (double& x : v) x += gaussStd * rng.normal();
        return v;
    }
    double u = rng.uniform();
    for (std::size_t i = 0; i < points.size(); ++i) {
        u -= weights[i];
        if (u <= 0.0) return points[i];
    }
    return points.back();
}

void MarkLaw::validate(int dim) const {
    if (kind == Kind::Gaussian) {
        if (static_cast<int>(gaussMean.size()) != dim)
            throw std::invalid_argument("MarkLaw: Gaussian mean dimension mismatch");
        if (!(gaussStd >= 0.0)) throw std::invalid_argument("MarkLaw: negative std");
        return;
    }
    if (points.empty() || points.size() != weights.size())
        throw std::invalid_argument("MarkLaw: bad finite support");
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (static_cast<int>(points[i].size()) != dim)
            throw std::invalid_argument("MarkLaw: point dimension mismatch");
        if (weights[i] < 0.0) throw std::invalid_argument("MarkLaw: negative weight");
        total += weights[i];
    }
    if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("MarkLaw: weights must sum to 1");
}

double CompensatorModel::stepJumpProb(double dt) const { return -std::expm1(-intensity * dt); }

Vec CompensatorModel::driftIncrement(double dt) const {
    return scaled(marks.mean(), -stepJumpProb(dt));
}

void CompensatorModel::validate(int dim) const {
    if (!(intensity >= 0.0)) throw std::invalid_argument("CompensatorModel: intensity must be >= 0");
    marks.validate(dim);
}

LabeledPath genContinuousDriver(const GridPtr& grid, const ContinuousDriverSpec& spec,
                                const NormedSpace& space, std::uint64_t seed) {
    LabeledPath out;
    out.grid = grid;
    out.initial = zeros(static_cast<std::size_t>(space.dim));
    out.steps.resize(grid->stepCount());
    if (spec.fixedDirection && static_cast<int>(spec.fixedDirection->size()) != space.dim)
        throw std::invalid_argument("genContinuousDriver: direction dimension mismatch");
    Rng rng(seed);
    if (spec.volatility == 0.0) return out;
    for (std::size_t k = 0; k < grid->stepCount(); ++k) {
        const double scale =
            static_cast<double>(rng.rademacher()) * spec.volatility * std::sqrt(grid->dt(k));
        Vec delta;
        if (spec.fixedDirection) {
            delta = scaled(*spec.fixedDirection, scale);
        } else {
            delta = zeros(static_cast<std::size_t>(space.dim));
            delta[rng.index(static_cast<std::size_t>(space.dim))] = scale;
        }
        out.steps[k].push_back({Channel::Cont, std::move(delta)});
    }
    return out;
}

LabeledPath genCompensatedPoisson(const GridPtr& grid, const CompensatorModel& model,
                                  const NormedSpace& space, std::uint64_t seed) {
    model.validate(space.dim);
    double maxDt = 0.0;
    for (std::size_t k = 0; k < grid->stepCount(); ++k) maxDt = std::max(maxDt, grid->dt(k));
    if (model.intensity * maxDt > 0.1)
        throw std::invalid_argument("genCompensatedPoisson: intensity * mesh exceeds 0.1");
    const Vec mean = model.marks.mean();
    const bool needDrift = !isZero(mean, 0.0);
    LabeledPath out;
    out.grid = grid;
    out.initial = zeros(static_cast<std::size_t>(space.dim));
    out.steps.resize(grid->stepCount());
    Rng rng(seed);
    for (std::size_t k = 0; k < grid->stepCount(); ++k) {
        const double dt = grid->dt(k);
        const double p = model.stepJumpProb(dt);
        if (rng.uniform() < p) {
            Vec mark = model.marks.sample(rng);
            if (!isZero(mark, 0.0)) out.steps[k].push_back({Channel::QlcJump, std::move(mark)});
        }
        if (needDrift) out.steps[k].push_back({Channel::QlcDrift, scaled(mean, -p)});
    }
    return out;
}

LabeledPath genAccessibleSeries(const GridPtr& grid, const std::vector<std::size_t>& jumpIndices,
                                const MarkLaw& markLaw, const NormedSpace& space,
                                std::uint64_t seed) {
    markLaw.validate(space.dim);
    const NormedSpace l2(space.dim, 2.0);
    if (l2.norm(markLaw.mean()) > 1e-12)
        throw std::invalid_argument("genAccessibleSeries: mark law must have zero mean");
    LabeledPath out;
    out.grid = grid;
    out.initial = zeros(static_cast<std::size_t>(space.dim));
    out.steps.resize(grid->stepCount());
    out.accJumpIndices = jumpIndices;
    std::sort(out.accJumpIndices.begin(), out.accJumpIndices.end());
    for (std::size_t idx : out.accJumpIndices)
        if (idx < 1 || idx > grid->stepCount())
            throw std::invalid_argument("genAccessibleSeries: jump time not on grid");
    Rng rng(seed);
    for (std::size_t idx : out.accJumpIndices) {
        Vec mark = markLaw.sample(rng);
        if (!isZero(mark, 0.0)) out.steps[idx - 1].push_back({Channel::AccJump, std::move(mark)});
    }
    return out;
}

void CompositeModel::validate() const {
    if (!grid) throw std::invalid_argument("CompositeModel: no grid");
    if (!initial.empty() && static_cast<int>(initial.size()) != space.dim)
        throw std::invalid_argument("CompositeModel: initial dimension mismatch");
    if (poisson) poisson->validate(space.dim);
    if (!accIndices.empty() && !accMarks)
        throw std::invalid_argument("CompositeModel: accessible jumps need a mark law");
    if (accMarks) accMarks->validate(space.dim);
}

LabeledPath genComposite(const CompositeModel& model, std::uint64_t seed,
                         std::uint64_t pathIndex) {
    model.validate();
    const std::uint64_t pathSeed = deriveSeed(seed, pathIndex);
    LabeledPath out;
    out.grid = model.grid;
    out.initial = model.initial.empty() ? zeros(static_cast<std::size_t>(model.space.dim))
                                        : model.initial;
    out.steps.resize(model.grid->stepCount());
    if (!model.accIndices.empty()) {
        out.accJumpIndices = model.accIndices;
        std::sort(out.accJumpIndices.begin(), out.accJumpIndices.end());
    }
    if (model.cont)
        out = pathAdd(out, genContinuousDriver(model.grid, *model.cont, model.space,
                                               deriveSeed(pathSeed, 1)));
    if (model.poisson) {
        LabeledPath pois = genCompensatedPoisson(model.grid, *model.poisson, model.space,
                                                 deriveSeed(pathSeed, 2));
        // quasi-left-continuous content never charges the declared predictable
        // times; dropping both the jump and its drift keeps the part centered
        for (std::size_t idx : out.accJumpIndices) {
            auto& step = pois.steps[idx - 1];
            step.erase(std::remove_if(step.begin(), step.end(),
                                      [](const LabeledIncrement& inc) {
                                          return inc.channel == Channel::QlcJump ||
                                                 inc.channel == Channel::QlcDrift;
                                      }),
                       step.end());
        }
        out = pathAdd(out, pois);
    }
    if (!model.accIndices.empty() && model.accMarks)
        out = pathAdd(out, genAccessibleSeries(model.grid, model.accIndices, *model.accMarks,
                                               model.space, deriveSeed(pathSeed, 3)));
    return out;
}

// ---------------------------------------------------------------------------
// Counterexample embedding
// ---------------------------------------------------------------------------

void BurkholderEmbeddingSpec::validate() const {
    pw.validate();
    if (!isZero(pw.f0, 0.0))
        throw std::invalid_argument("BurkholderEmbeddingSpec: f0 must be 0");
    if (static_cast<int>(a.size()) != pw.depth())
        throw std::invalid_argument("BurkholderEmbeddingSpec: a length mismatch");
    for (int v : a)
        if (v != 0 && v != 1) throw std::invalid_argument("BurkholderEmbeddingSpec: a must be 0/1");
    if (bridgeLattice < 1) throw std::invalid_argument("BurkholderEmbeddingSpec: bad lattice");
    if (space.dim != pw.dim())
        throw std::invalid_argument("BurkholderEmbeddingSpec: space dimension mismatch");
    for (int n = 1; n <= pw.depth(); ++n)
        if (a[static_cast<std::size_t>(n) - 1] == 1 &&
            bridgeLeakExact(bridgeLattice, bridgeCap(n)) >= leakBudget(n))
            throw std::invalid_argument("BurkholderEmbeddingSpec: bridge cap violates leak budget");
}

double BurkholderEmbeddingSpec::leakBudget(int n) const {
    return std::pow(2.0, -n) / (pw.phiSupNorm(n, space) + 1.0);
}

std::size_t BurkholderEmbeddingSpec::bridgeCap(int n) const {
    // P(not absorbed within 2 m^2 j steps) <= 2^-j for the +-1/m walk, so j is
    // chosen to push the exact leak below 2^-n / (||phi_n|| + 1).
    const double phiSup = pw.phiSupNorm(n, space);
    const int j = n + static_cast<int>(std::ceil(std::log2(phiSup + 1.0))) + 1;
    return static_cast<std::size_t>(2 * bridgeLattice * bridgeLattice * j);
}

double bridgeLeakExact(int lattice, std::size_t cap) {
    const int m = lattice;
    std::vector<double> p(static_cast<std::size_t>(2 * m + 1), 0.0);  // states -m..m
    p[static_cast<std::size_t>(m)] = 1.0;                             // start at 0
    std::vector<double> q(p.size());
    for (std::size_t step = 0; step < cap; ++step) {
        std::fill(q.begin(), q.end(), 0.0);
        q.front() = p.front();
        q.back() = p.back();
        for (int s = 1; s < 2 * m; ++s) {
            q[static_cast<std::size_t>(s) - 1] += 0.5 * p[static_cast<std::size_t>(s)];
            q[static_cast<std::size_t>(s) + 1] += 0.5 * p[static_cast<std::size_t>(s)];
        }
        std::swap(p, q);
    }
    double interior = 0.0;
    for (int s = 1; s < 2 * m; ++s) interior += p[static_cast<std::size_t>(s)];
    return interior;
}

GridPtr embeddingGrid(const BurkholderEmbeddingSpec& spec) {
    std::vector<double> times{0.0, 0.5};
    for (int n = 1; n <= spec.pw.depth(); ++n) {
        const double start = 1.0 - std::pow(2.0, -n);
        const double width = std::pow(2.0, -n - 1);
        if (spec.a[static_cast<std::size_t>(n) - 1] == 1) {
            const std::size_t sub = spec.bridgeCap(n);
            for (std::size_t j = 1; j <= sub; ++j)
                times.push_back(start + width * static_cast<double>(j) / static_cast<double>(sub));
        } else {
            times.push_back(start + width);
        }
    }
    times.push_back(1.0);
    return std::make_shared<const TimeGrid>(std::move(times));
}

namespace {

struct BlockOutcome {
    int sigma = 0;
    bool leaked = false;
    // bridge trajectory in lattice units (positions after each sub-step); empty for a = 0
    std::vector<int> positions;
};

// One block's randomness; identical draw order for the materialized and the
// streaming variants.
BlockOutcome simulateBlock(const BurkholderEmbeddingSpec& spec, int n, Rng& rng) {
    BlockOutcome out;
    if (spec.a[static_cast<std::size_t>(n) - 1] == 0) {
        out.sigma = rng.rademacher();
        return out;
    }
    const int m = spec.bridgeLattice;
    const std::size_t cap = spec.bridgeCap(n);
    out.positions.reserve(cap);
    int pos = 0;
    for (std::size_t j = 0; j < cap; ++j) {
        if (std::abs(pos) < m) {
            pos += rng.rademacher();
            if (j + 1 == cap && pos == 0) pos += rng.rademacher();  // forced nudge off 0
        }
        out.positions.push_back(pos);
    }
    out.leaked = std::abs(pos) < m;
    out.sigma = pos > 0 ? 1 : -1;
    return out;
}

}  // namespace

LabeledPath genBurkholderEmbedding(const BurkholderEmbeddingSpec& spec, std::uint64_t seed,
                                   std::uint64_t pathIndex) {
    spec.validate();
    GridPtr grid = embeddingGrid(spec);
    LabeledPath out;
    out.grid = grid;
    out.initial = zeros(static_cast<std::size_t>(spec.space.dim));
    out.steps.resize(grid->stepCount());
    Rng rng(seed, pathIndex);
    const double m = static_cast<double>(spec.bridgeLattice);
    std::size_t histIdx = 0;
    std::size_t step = 1;  // step 0 covers [0, 0.5]
    for (int n = 1; n <= spec.pw.depth(); ++n) {
        const Vec& phi = spec.pw.phi[static_cast<std::size_t>(n) - 1][histIdx];
        const BlockOutcome blk = simulateBlock(spec, n, rng);
        if (spec.a[static_cast<std::size_t>(n) - 1] == 0) {
            out.accJumpIndices.push_back(step + 1);
            if (!isZero(phi, 0.0))
                out.steps[step].push_back(
                    {Channel::AccJump, scaled(phi, static_cast<double>(blk.sigma))});
            ++step;
        } else {
            int prev = 0;
            for (int pos : blk.positions) {
                if (pos != prev && !isZero(phi, 0.0))
                    out.steps[step].push_back(
                        {Channel::Cont, scaled(phi, static_cast<double>(pos - prev) / m)});
                prev = pos;
                ++step;
            }
        }
        histIdx = (histIdx << 1) | (blk.sigma > 0 ? 0u : 1u);
    }
    // final step up to t = 1 is flat
    return out;
}

EmbeddingPathStats embeddingPathStats(const BurkholderEmbeddingSpec& spec, std::uint64_t seed,
                                      std::uint64_t pathIndex) {
    Rng rng(seed, pathIndex);
    const double m = static_cast<double>(spec.bridgeLattice);
    EmbeddingPathStats stats;
    Vec total = zeros(static_cast<std::size_t>(spec.space.dim));
    Vec cont = zeros(static_cast<std::size_t>(spec.space.dim));
    std::size_t histIdx = 0;
    for (int n = 1; n <= spec.pw.depth(); ++n) {
        const Vec& phi = spec.pw.phi[static_cast<std::size_t>(n) - 1][histIdx];
        const BlockOutcome blk = simulateBlock(spec, n, rng);
        if (spec.a[static_cast<std::size_t>(n) - 1] == 0) {
            axpyInPlace(total, static_cast<double>(blk.sigma), phi);
        } else {
            int lo = 0, hi = 0, end = 0;
            for (int pos : blk.positions) {
                lo = std::min(lo, pos);
                hi = std::max(hi, pos);
                end = pos;
            }
            // s -> ||cont + s phi|| is convex, so the in-block sup is at an endpoint.
            Vec atLo = cont, atHi = cont;
            axpyInPlace(atLo, static_cast<double>(lo) / m, phi);
            axpyInPlace(atHi, static_cast<double>(hi) / m, phi);
            stats.contSup = std::max({stats.contSup, spec.space.norm(atLo), spec.space.norm(atHi)});
            axpyInPlace(cont, static_cast<double>(end) / m, phi);
            axpyInPlace(total, static_cast<double>(end) / m, phi);
            if (blk.leaked) ++stats.leakCount;
        }
        histIdx = (histIdx << 1) | (blk.sigma > 0 ? 0u : 1u);
    }
    stats.contSup = std::max(stats.contSup, spec.space.norm(cont));
    stats.endNorm = spec.space.norm(total);
    return stats;
}

}  // namespace martlab
