#include "martlab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "martlab/rng.hpp"

namespace martlab {

bool VerificationReport::allPass() const {
    for (const CheckResult& c : checks)
        if (!c.pass) return false;
    return true;
}

std::vector<double> logLambdaGrid(double center, int points, double decades) {
    if (!(center > 0.0)) throw std::invalid_argument("logLambdaGrid: center must be positive");
    if (points < 2) throw std::invalid_argument("logLambdaGrid: need at least two points");
    std::vector<double> out(static_cast<std::size_t>(points));
    const double lo = std::log10(center) - decades / 2.0;
    for (int i = 0; i < points; ++i)
        out[static_cast<std::size_t>(i)] =
            std::pow(10.0, lo + decades * static_cast<double>(i) / static_cast<double>(points - 1));
    return out;
}

WilsonInterval estimateTail(const std::vector<double>& stats, double level) {
    if (stats.empty()) throw std::invalid_argument("estimateTail: empty ensemble");
    std::size_t hits = 0;
    for (double s : stats)
        if (s > level) ++hits;
    return wilson(hits, stats.size());
}

double exactTailProb(const FiltrationTree& tree, const std::vector<double>& statPerAtom,
                     double level) {
    if (statPerAtom.size() != tree.outcomes())
        throw std::invalid_argument("exactTailProb: need one statistic per atom");
    double p = 0.0;
    for (std::size_t w = 0; w < statPerAtom.size(); ++w)
        if (statPerAtom[w] > level) p += tree.outcomeProb(w);
    return p;
}

double exactWeakL1(const FiltrationTree& tree, const std::vector<double>& statPerAtom) {
    if (statPerAtom.size() != tree.outcomes())
        throw std::invalid_argument("exactWeakL1: need one statistic per atom");
    // sup_l l P(X > l) is approached as l increases to an atom value v, where the
    // tail is P(X >= v); so the sup is max over atom values v of v * P(X >= v).
    std::vector<std::pair<double, double>> vp(statPerAtom.size());
    for (std::size_t w = 0; w < statPerAtom.size(); ++w)
        vp[w] = {statPerAtom[w], tree.outcomeProb(w)};
    std::sort(vp.begin(), vp.end());
    double best = 0.0;
    double tailInclusive = 1.0;
    for (std::size_t i = 0; i < vp.size();) {
        std::size_t j = i;
        while (j < vp.size() && vp[j].first == vp[i].first) ++j;
        best = std::max(best, vp[i].first * tailInclusive);
        for (std::size_t k = i; k < j; ++k) tailInclusive -= vp[k].second;
        i = j;
    }
    return best;
}

double treeMeanNorm(const AdaptedProcess& proc, std::size_t level, const NormedSpace& space) {
    const FiltrationTree& tree = *proc.tree;
    double e = 0.0;
    for (std::size_t b = 0; b < proc.values[level].size(); ++b)
        e += tree.blockProb(level, b) * space.norm(proc.values[level][b]);
    return e;
}

std::vector<double> atomRunningSup(const AdaptedProcess& proc, const NormedSpace& space) {
    const FiltrationTree& tree = *proc.tree;
    std::vector<double> out(tree.outcomes(), 0.0);
    for (std::size_t w = 0; w < tree.outcomes(); ++w) {
        double sup = 0.0;
        for (std::size_t n = 0; n < proc.levelCount(); ++n)
            sup = std::max(sup, space.norm(proc.atOutcome(n, w)));
        out[w] = sup;
    }
    return out;
}

std::vector<double> atomVariation(const AdaptedProcess& proc, const NormedSpace& space) {
    const FiltrationTree& tree = *proc.tree;
    std::vector<double> out(tree.outcomes(), 0.0);
    for (std::size_t w = 0; w < tree.outcomes(); ++w) {
        Vec prev = proc.atOutcome(0, w);
        double var = space.norm(prev);
        for (std::size_t n = 1; n < proc.levelCount(); ++n) {
            Vec cur = proc.atOutcome(n, w);
            var += space.norm(sub(cur, prev));
            prev = std::move(cur);
        }
        out[w] = var;
    }
    return out;
}

CheckResult checkGundyBounds(const AdaptedProcess& mart, const NormedSpace& space,
                             const std::vector<double>& lambdas) {
    mart.validate();
    const FiltrationTree& tree = *mart.tree;
    const std::size_t levels = mart.levelCount();
    const std::size_t atoms = tree.outcomes();
    double scale = 1.0;
    for (const auto& lvl : mart.values)
        for (const Vec& v : lvl) scale = std::max(scale, normInf(v));
    const double tiny = 1e-12 * scale;

    CheckResult r;
    r.name = "gundy-bounds";
    r.bound = 1.0;
    r.sampleSize = lambdas.size();
    double worstRatio = 0.0;
    double worstAdditivity = 0.0;
    bool allVacuous = true;
    bool ok = true;
    for (double lambda : lambdas) {
        const TreeGundyTriple g = gundy(mart, lambda, space);
        std::vector<double> eM(levels, 0.0), eM1(levels, 0.0), tail2(levels, 0.0),
            var3(levels, 0.0);
        double supM1 = 0.0;
        for (std::size_t w = 0; w < atoms; ++w) {
            const double pw = tree.outcomeProb(w);
            double runSup2 = 0.0, runVar3 = 0.0;
            Vec prev3;
            for (std::size_t n = 0; n < levels; ++n) {
                const Vec m = mart.atOutcome(n, w);
                const Vec v1 = g.m1.atOutcome(n, w);
                const Vec v2 = g.m2.atOutcome(n, w);
                const Vec v3 = g.m3.atOutcome(n, w);
                worstAdditivity =
                    std::max(worstAdditivity, normInf(sub(add(add(v1, v2), v3), m)));
                eM[n] += pw * space.norm(m);
                eM1[n] += pw * space.norm(v1);
                supM1 = std::max(supM1, space.norm(v1));
                runSup2 = std::max(runSup2, space.norm(v2));
                if (runSup2 > tiny) tail2[n] += pw;
                runVar3 += n == 0 ? space.norm(v3) : space.norm(sub(v3, prev3));
                prev3 = v3;
                var3[n] += pw * runVar3;
            }
        }
        // (i) ||M1||_inf <= 2 lambda
        worstRatio = std::max(worstRatio, supM1 / (2.0 * lambda));
        ok = ok && supM1 <= 2.0 * lambda + tiny;
        for (std::size_t n = 0; n < levels; ++n) {
            if (eM[n] <= tiny) {
                // vacuous level: all left-hand sides must vanish
                ok = ok && eM1[n] <= tiny && lambda * tail2[n] <= tiny && var3[n] <= tiny;
                continue;
            }
            allVacuous = false;
            worstRatio = std::max({worstRatio, eM1[n] / (5.0 * eM[n]),
                                   lambda * tail2[n] / (4.0 * eM[n]), var3[n] / (7.0 * eM[n])});
            ok = ok && eM1[n] <= 5.0 * eM[n] + tiny && lambda * tail2[n] <= 4.0 * eM[n] + tiny &&
                 var3[n] <= 7.0 * eM[n] + tiny;
        }
    }
    ok = ok && worstAdditivity <= 1e-12 * scale;
    r.estimate = worstRatio;
    r.slack = 1.0 - worstRatio;
    r.pass = ok;
    r.vacuous = allVacuous;
    std::ostringstream detail;
    detail << "worst LHS/RHS ratio " << worstRatio << ", additivity residual " << worstAdditivity;
    r.detail = detail.str();
    return r;
}

CanonicalEnsembleStats canonicalEnsembleStats(const CompositeModel& model, std::size_t nPaths,
                                              std::uint64_t seed) {
    model.validate();
    if (model.space.dim > 8)
        throw std::invalid_argument("canonicalEnsembleStats: dimension cap is 8");
    CanonicalEnsembleStats st;
    st.n = nPaths;
    st.supC.reserve(nPaths);
    st.supQ.reserve(nPaths);
    st.supA.reserve(nPaths);
    st.endNormM.reserve(nPaths);
    st.pythagoras.reserve(nPaths);
    const std::size_t d = static_cast<std::size_t>(model.space.dim);
    for (std::size_t i = 0; i < nPaths; ++i) {
        const LabeledPath path = genComposite(model, seed, i);
        const std::size_t K = path.stepCount();
        const std::size_t mid = K / 2;
        Vec c = zeros(d), q = zeros(d), a = path.initial;
        double supC = model.space.norm(c), supQ = model.space.norm(q), supA = model.space.norm(a);
        auto record = [&](std::size_t t) {
            Vec m = add(add(c, q), a);
            const Vec* parts[4] = {&m, &c, &q, &a};
            for (int p = 0; p < 4; ++p)
                for (std::size_t j = 0; j < d; ++j) {
                    const double x = (*parts[p])[j];
                    st.sum[p][t][j] += x;
                    st.sumSq[p][t][j] += x * x;
                }
        };
        if (mid == 0) record(0);
        for (std::size_t k = 1; k <= K; ++k) {
            for (const LabeledIncrement& inc : path.steps[k - 1]) {
                if (inc.channel == Channel::Cont) addInPlace(c, inc.delta);
                else if (inc.channel == Channel::AccJump) addInPlace(a, inc.delta);
                else addInPlace(q, inc.delta);
            }
            supC = std::max(supC, model.space.norm(c));
            supQ = std::max(supQ, model.space.norm(q));
            supA = std::max(supA, model.space.norm(a));
            if (k == mid) record(0);
        }
        record(1);
        st.supC.push_back(supC);
        st.supQ.push_back(supQ);
        st.supA.push_back(supA);
        const Vec m = add(add(c, q), a);
        st.endNormM.push_back(model.space.norm(m));
        const double n2 = [](const Vec& v) { return dot(v, v); }(m);
        st.pythagoras.push_back(n2 - dot(c, c) - dot(q, q) - dot(a, a));
    }
    return st;
}

CheckResult checkCanonicalMartingale(const CompositeModel& model,
                                     const CanonicalEnsembleStats& stats, double sigmas) {
    CheckResult r;
    r.name = "canonical-martingale-ztest";
    r.bound = sigmas;
    r.sampleSize = stats.n;
    const std::size_t d = static_cast<std::size_t>(model.space.dim);
    const double nn = static_cast<double>(stats.n);
    double worstZ = 0.0;
    for (int p = 0; p < 4; ++p)
        for (int t = 0; t < 2; ++t)
            for (std::size_t j = 0; j < d; ++j) {
                // martingale means: whole process and accessible part start at
                // M_0, continuous and quasi-left-continuous parts at 0
                const double expected =
                    (p == 0 || p == 3) && !model.initial.empty() ? model.initial[j] : 0.0;
                const double mean = stats.sum[p][t][j] / nn;
                double var = stats.sumSq[p][t][j] / nn - mean * mean;
                var = std::max(var, 0.0);
                const double se = std::sqrt(var / nn);
                if (se == 0.0) {
                    if (std::abs(mean - expected) > 1e-12) worstZ = std::max(worstZ, sigmas + 1.0);
                    continue;
                }
                worstZ = std::max(worstZ, std::abs(mean - expected) / se);
            }
    r.estimate = worstZ;
    r.slack = sigmas - worstZ;
    r.pass = worstZ <= sigmas;
    r.detail = "worst |z| over parts, times, coordinates";
    return r;
}

CheckResult checkPythagoras(const CanonicalEnsembleStats& stats, double sigmas) {
    const MeanSe ms = meanSe(stats.pythagoras);
    CheckResult r;
    r.name = "hilbert-pythagoras";
    r.estimate = std::abs(ms.mean);
    r.bound = sigmas * ms.se;
    r.slack = r.bound - r.estimate;
    r.pass = r.estimate <= r.bound || (ms.se == 0.0 && ms.mean == 0.0);
    r.vacuous = ms.se == 0.0 && ms.mean == 0.0;
    r.sampleSize = stats.n;
    r.detail = "squared-norm residual mean vs MC standard error";
    return r;
}

CheckResult checkWeakL1Canonical(const CanonicalEnsembleStats& stats, char part,
                                 const std::vector<double>& lambdas, double budgetC) {
    const std::vector<double>* sup = nullptr;
    switch (part) {
        case 'c': sup = &stats.supC; break;
        case 'q': sup = &stats.supQ; break;
        case 'a': sup = &stats.supA; break;
        default: throw std::invalid_argument("checkWeakL1Canonical: part must be c, q or a");
    }
    CheckResult r;
    r.name = std::string("weak-l1-canonical-") + part;
    r.sampleSize = stats.n;
    const MeanSe e = meanSe(stats.endNormM);
    r.bound = budgetC * e.mean;
    double worst = 0.0;
    for (double lambda : lambdas)
        worst = std::max(worst, lambda * estimateTail(*sup, lambda).upper);
    r.estimate = worst;
    r.slack = r.bound - r.estimate;
    if (e.mean == 0.0) {
        r.vacuous = true;
        r.pass = worst == 0.0;
    } else {
        r.pass = worst <= r.bound;
    }
    r.detail = "sup over lambda grid of lambda * Wilson-upper tail";
    return r;
}

CheckResult checkWeakL1Transform(std::size_t nTrees, int depth, int branching,
                                 const NormedSpace& space, double budgetC, std::uint64_t seed) {
    CheckResult r;
    r.name = "weak-l1-transform";
    r.bound = 1.0;
    r.sampleSize = nTrees;
    const double freezeFactors[3] = {0.25, 1.0, 4.0};
    double worst = 0.0;
    for (std::size_t i = 0; i < nTrees; ++i) {
        const AdaptedProcess m =
            genRandomTreeMartingale(deriveSeed(seed, i), depth, branching, space);
        const double e = treeMeanNorm(m, m.levelCount() - 1, space);
        if (e == 0.0) continue;
        for (double f : freezeFactors) {
            const TransformCoeffs coeffs = hitAndFreezeCoeffs(m, f * e, space);
            const AdaptedProcess tm = applyTransform(m, coeffs);
            const double wl1 = exactWeakL1(*m.tree, atomRunningSup(tm, space));
            worst = std::max(worst, wl1 / (budgetC * e));
        }
    }
    r.estimate = worst;
    r.slack = 1.0 - worst;
    r.pass = worst <= 1.0;
    r.detail = "worst exact weak-L1 ratio over seeds and freeze levels";
    return r;
}

double probeObjective(const ProbeWitness& w, const NormedSpace& space, double p, ProbeMode mode) {
    const int depth = w.pw.depth();
    if (static_cast<int>(w.coeff.size()) != depth)
        throw std::invalid_argument("probeObjective: coefficient count mismatch");
    const std::size_t atoms = std::size_t{1} << depth;
    const double weight = 1.0 / static_cast<double>(atoms);
    const std::size_t d = static_cast<std::size_t>(w.pw.dim());
    double num = 0.0, den = 0.0;
    Vec f(d), t(d);
    for (std::size_t atom = 0; atom < atoms; ++atom) {
        std::fill(f.begin(), f.end(), 0.0);
        std::fill(t.begin(), t.end(), 0.0);
        for (int n = 1; n <= depth; ++n) {
            const std::size_t parent = atom >> (depth - n + 1);
            const double rsign = ((atom >> (depth - n)) & 1u) == 0 ? 1.0 : -1.0;
            const Vec& phi = w.pw.phi[static_cast<std::size_t>(n) - 1][parent];
            axpyInPlace(f, rsign, phi);
            axpyInPlace(t, rsign * w.coeff[static_cast<std::size_t>(n) - 1], phi);
        }
        if (mode == ProbeMode::SignFlip) {
            num += weight * std::pow(space.norm(t), p);
            den += weight * std::pow(space.norm(f), p);
        } else {
            num += weight * space.norm(t);
            den += weight * space.norm(f);
        }
    }
    if (den == 0.0) return 0.0;
    if (mode == ProbeMode::SignFlip) return std::pow(num / den, 1.0 / p);
    return num / den;
}

namespace {

ProbeWitness randomWitness(int depth, int dim, ProbeMode mode, Rng& rng) {
    ProbeWitness w;
    w.pw.f0 = zeros(static_cast<std::size_t>(dim));
    w.pw.phi.resize(static_cast<std::size_t>(depth));
    for (int n = 0; n < depth; ++n) {
        w.pw.phi[static_cast<std::size_t>(n)].resize(std::size_t{1} << n);
        for (Vec& v : w.pw.phi[static_cast<std::size_t>(n)]) {
            v.resize(static_cast<std::size_t>(dim));
            for (double& x : v) x = rng.normal();
        }
    }
    w.coeff.resize(static_cast<std::size_t>(depth));
    for (double& a : w.coeff)
        a = mode == ProbeMode::SignFlip ? static_cast<double>(rng.rademacher())
                                        : (rng.uniform() < 0.5 ? 0.0 : 1.0);
    return w;
}

}  // namespace

ProbeResult probeUMDLowerBound(const NormedSpace& space, double p, int depth, std::size_t budget,
                               std::uint64_t seed, ProbeMode mode, const ProbeWitness* warmStart) {
    if (depth < 1 || depth > 20) throw std::out_of_range("probeUMDLowerBound: depth out of range");
    if ((std::size_t{1} << depth) > FiltrationTree::kMaxOutcomes)
        throw std::out_of_range("probeUMDLowerBound: tree cap exceeded");
    Rng rng(seed);
    ProbeResult res;
    ProbeWitness cur =
        warmStart ? *warmStart : randomWitness(depth, space.dim, mode, rng);
    if (cur.pw.depth() != depth || cur.pw.dim() != space.dim)
        throw std::invalid_argument("probeUMDLowerBound: warm start shape mismatch");
    cur.objective = probeObjective(cur, space, p, mode);
    res.evaluations = 1;
    ProbeWitness best = cur;
    const std::size_t restartEvery = std::max<std::size_t>(budget / 8, 50);
    for (std::size_t it = 0; it < budget; ++it) {
        if (it > 0 && it % restartEvery == 0) {
            cur = randomWitness(depth, space.dim, mode, rng);
            cur.objective = probeObjective(cur, space, p, mode);
            ++res.evaluations;
            if (cur.objective > best.objective) best = cur;
            continue;
        }
        // single-entry proposal: flip one coefficient or nudge one factor entry
        const bool flipCoeff = rng.uniform() < 0.3;
        std::size_t cn = 0, cb = 0, ci = 0;
        double old = 0.0;
        if (flipCoeff) {
            cn = rng.index(cur.coeff.size());
            old = cur.coeff[cn];
            cur.coeff[cn] = mode == ProbeMode::SignFlip ? -old : 1.0 - old;
        } else {
            cn = rng.index(cur.pw.phi.size());
            cb = rng.index(cur.pw.phi[cn].size());
            ci = rng.index(static_cast<std::size_t>(space.dim));
            old = cur.pw.phi[cn][cb][ci];
            cur.pw.phi[cn][cb][ci] += (0.3 + 0.3 * std::abs(old)) * rng.normal();
        }
        const double obj = probeObjective(cur, space, p, mode);
        ++res.evaluations;
        if (obj > cur.objective) {
            cur.objective = obj;
            if (obj > best.objective) best = cur;
        } else {
            if (flipCoeff) cur.coeff[cn] = old;
            else cur.pw.phi[cn][cb][ci] = old;
        }
    }
    res.bound = best.objective;
    res.witness = std::move(best);
    return res;
}

ProbeWitness padWitness(const ProbeWitness& w, int depth, int dim, ProbeMode mode) {
    if (depth < w.pw.depth() || dim < w.pw.dim())
        throw std::invalid_argument("padWitness: target must be at least as large");
    ProbeWitness out;
    out.pw.f0 = zeros(static_cast<std::size_t>(dim));
    out.pw.phi.resize(static_cast<std::size_t>(depth));
    for (int n = 0; n < depth; ++n) {
        out.pw.phi[static_cast<std::size_t>(n)].assign(std::size_t{1} << n,
                                                       zeros(static_cast<std::size_t>(dim)));
        if (n < w.pw.depth())
            for (std::size_t b = 0; b < w.pw.phi[static_cast<std::size_t>(n)].size(); ++b) {
                const Vec& src = w.pw.phi[static_cast<std::size_t>(n)][b];
                std::copy(src.begin(), src.end(),
                          out.pw.phi[static_cast<std::size_t>(n)][b].begin());
            }
    }
    out.coeff.assign(static_cast<std::size_t>(depth),
                     mode == ProbeMode::SignFlip ? 1.0 : 0.0);
    std::copy(w.coeff.begin(), w.coeff.end(), out.coeff.begin());
    out.objective = w.objective;
    return out;
}

ProbeWitness haarDualWitness(int depth) {
    if (depth < 1 || depth > 14) throw std::out_of_range("haarDualWitness: depth out of range");
    const int N = depth;
    const std::size_t atoms = std::size_t{1} << N;
    const std::size_t d = atoms;  // one coordinate per leaf interval
    const double weight = 1.0 / static_cast<double>(atoms);

    // Mass-descent martingale f_n = 1_{B_n} * 2^n / d on coordinates = leaves;
    // {0,1}-transform g keeps the odd-level increments. s = sign(g_N) per atom.
    std::vector<Vec> s(atoms);
    for (std::size_t w = 0; w < atoms; ++w) {
        Vec g = zeros(d);
        for (int n = 1; n <= N; n += 2) {
            const std::size_t parent = w >> (N - n + 1);
            const std::size_t width = std::size_t{1} << (N - n + 1);
            const std::size_t begin = parent * width;
            const double rsign = ((w >> (N - n)) & 1u) == 0 ? 1.0 : -1.0;
            const double mag = std::pow(2.0, n - 1) / static_cast<double>(d);
            for (std::size_t j = 0; j < width / 2; ++j) {
                g[begin + j] += rsign * mag;
                g[begin + width / 2 + j] -= rsign * mag;
            }
        }
        Vec& row = s[w];
        row.resize(d);
        for (std::size_t j = 0; j < d; ++j) row[j] = g[j] > 0.0 ? 1.0 : (g[j] < 0.0 ? -1.0 : 0.0);
    }

    // h_n = E(s | level n); emit the predictable factors on the way up.
    ProbeWitness out;
    out.pw.f0 = zeros(d);
    out.pw.phi.resize(static_cast<std::size_t>(N));
    std::vector<Vec> cur = s;
    for (int n = N; n >= 1; --n) {
        const std::size_t parents = std::size_t{1} << (n - 1);
        std::vector<Vec> up(parents);
        auto& phiLevel = out.pw.phi[static_cast<std::size_t>(n) - 1];
        phiLevel.resize(parents);
        for (std::size_t b = 0; b < parents; ++b) {
            up[b].resize(d);
            phiLevel[b].resize(d);
            const Vec& lo = cur[2 * b];
            const Vec& hi = cur[2 * b + 1];
            for (std::size_t j = 0; j < d; ++j) {
                up[b][j] = 0.5 * (lo[j] + hi[j]);
                phiLevel[b][j] = 0.5 * (lo[j] - hi[j]);
            }
        }
        cur = std::move(up);
    }
    const Vec h0 = cur[0];

    // Normalize so E||f_N||_inf = 1 for the centered martingale h - h_0.
    double c = 0.0;
    for (std::size_t w = 0; w < atoms; ++w) {
        double m = 0.0;
        for (std::size_t j = 0; j < d; ++j) m = std::max(m, std::abs(s[w][j] - h0[j]));
        c += weight * m;
    }
    if (c > 0.0)
        for (auto& lvl : out.pw.phi)
            for (Vec& v : lvl)
                for (double& x : v) x /= c;

    out.coeff.resize(static_cast<std::size_t>(N));
    for (int n = 1; n <= N; ++n) out.coeff[static_cast<std::size_t>(n) - 1] = n % 2 == 1 ? 1.0 : 0.0;
    out.objective = probeObjective(out, NormedSpace(static_cast<int>(d), NormedSpace::infinity()),
                                   1.0, ProbeMode::ZeroOne);
    return out;
}

std::vector<DivergenceRow> divergenceDemo(const std::vector<int>& depths, std::size_t nPaths,
                                          std::uint64_t seed, std::size_t probeBudget) {
    std::vector<DivergenceRow> rows;
    for (int depth : depths) {
        const std::size_t d = std::size_t{1} << depth;
        const NormedSpace space(static_cast<int>(d), NormedSpace::infinity());
        const ProbeWitness warm = haarDualWitness(depth);
        const ProbeResult probed = probeUMDLowerBound(
            space, 1.0, depth, probeBudget, deriveSeed(seed, static_cast<std::uint64_t>(depth)),
            ProbeMode::ZeroOne, &warm);
        // re-normalize the (possibly refined) witness so E||f_N|| = 1
        ProbeWitness w = probed.witness;
        {
            const std::size_t atoms = std::size_t{1} << depth;
            double c = 0.0;
            Vec f(d);
            for (std::size_t atom = 0; atom < atoms; ++atom) {
                std::fill(f.begin(), f.end(), 0.0);
                for (int n = 1; n <= depth; ++n)
                    axpyInPlace(f, ((atom >> (depth - n)) & 1u) == 0 ? 1.0 : -1.0,
                                w.pw.phi[static_cast<std::size_t>(n) - 1][atom >> (depth - n + 1)]);
                c += space.norm(f) / static_cast<double>(atoms);
            }
            if (c > 0.0)
                for (auto& lvl : w.pw.phi)
                    for (Vec& v : lvl)
                        for (double& x : v) x /= c;
        }
        BurkholderEmbeddingSpec spec;
        spec.pw = w.pw;
        spec.space = space;
        spec.a.resize(w.coeff.size());
        for (std::size_t n = 0; n < w.coeff.size(); ++n)
            spec.a[n] = w.coeff[n] >= 0.5 ? 1 : 0;
        spec.validate();
        const std::uint64_t pathSeed = deriveSeed(seed, 1000 + static_cast<std::uint64_t>(depth));
        std::vector<double> contSup;
        contSup.reserve(nPaths);
        double endSum = 0.0;
        double leaks = 0.0;
        for (std::size_t i = 0; i < nPaths; ++i) {
            const EmbeddingPathStats st = embeddingPathStats(spec, pathSeed, i);
            contSup.push_back(st.contSup);
            endSum += st.endNorm;
            leaks += st.leakCount;
        }
        DivergenceRow row;
        row.depth = depth;
        row.medianContSup = median(contSup);
        row.q90ContSup = quantile(contSup, 0.9);
        row.meanEndNorm = endSum / static_cast<double>(nPaths);
        row.leakRate = leaks / static_cast<double>(nPaths);
        row.probedObjective = probed.bound;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace martlab
