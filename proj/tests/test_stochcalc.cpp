#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "martlab/stochcalc.hpp"
#include "martlab/verify.hpp"

using namespace martlab;

namespace {

CompensatorModel unitMarkModel(double gamma) {
    MarkLaw marks;
    marks.points = {{1.0}};
    marks.weights = {1.0};
    return CompensatorModel{gamma, marks};
}

}  // namespace

TEST_CASE("jump measure extracts exactly the jump-channel events") {
    LabeledPath p;
    p.grid = TimeGrid::regular(1.0, 4);
    p.initial = Vec{0.0};
    p.accJumpIndices = {3};
    p.steps = {
        {{Channel::Cont, Vec{0.5}}},
        {{Channel::QlcJump, Vec{1.0}}, {Channel::QlcDrift, Vec{-0.1}}},
        {{Channel::AccJump, Vec{-2.0}}},
        {},
    };
    p.validate();
    const JumpStream all = jumpMeasure(p, ChannelSet::all());
    REQUIRE(all.events.size() == 2);
    CHECK(all.events[0].index == 2);
    CHECK(all.events[0].mark[0] == doctest::Approx(1.0));
    CHECK(all.events[1].index == 3);
    const JumpStream qlcOnly = jumpMeasure(p, kQlcChannels);
    CHECK(qlcOnly.events.size() == 1);
    // continuous and drift increments are never jumps
    CHECK(jumpMeasure(p, ChannelSet::of(Channel::Cont)).events.empty());
    const NormedSpace space(1, 2.0);
    CHECK(jumpVariation(all, space) == doctest::Approx(3.0));
    // identity: sum of mark norms equals the variation of the jump part
    const LabeledPath jumpsOnly =
        channelPart(p, ChannelSet::of(Channel::QlcJump) | ChannelSet::of(Channel::AccJump), false);
    CHECK(jumpVariation(all, space) ==
          doctest::Approx(variation(jumpsOnly, 4, space)).epsilon(1e-15));
}

TEST_CASE("grid compensation of a jump stream is an exact Bernoulli martingale") {
    const GridPtr grid = TimeGrid::regular(1.0, 20);
    const NormedSpace space(1, 2.0);
    const CompensatorModel model = unitMarkModel(1.5);
    JumpStream s;
    s.events = {{4, Vec{1.0}}, {11, Vec{1.0}}};
    const LabeledPath c = compensate(s, model, grid, space);
    c.validate();
    // drift channel carries -(1 - exp(-gamma dt)) per step
    const double p = model.stepJumpProb(grid->dt(0));
    for (std::size_t k = 1; k <= 20; ++k) {
        const Vec d = netIncrement(c, k, ChannelSet::of(Channel::QlcDrift));
        CHECK(d[0] == doctest::Approx(-p).epsilon(1e-15));
    }
    CHECK(valueAt(c, 20, ChannelSet::of(Channel::QlcJump), false)[0] == doctest::Approx(2.0));
    // empty stream, zero-rate model: zero path
    const LabeledPath z = compensate(JumpStream{}, unitMarkModel(0.0), grid, space);
    CHECK(space.norm(valueAt(z, 20)) == doctest::Approx(0.0));
}

TEST_CASE("tree compensation: worked single-jump example") {
    const TreePtr t = FiltrationTree::dyadic(2);
    AdaptedProcess n;
    n.tree = t;
    n.dim = 1;
    n.values = {{Vec{0.0}}, {Vec{0.0}, Vec{0.0}}, {Vec{0.8}, Vec{0.0}, Vec{0.0}, Vec{-0.8}}};
    const AdaptedProcess m = compensate(n);
    CHECK(isMartingale(m, 1e-14).ok);
    // N - V with V_2 = 0.4 r1
    CHECK(m.values[2][0][0] == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(m.values[2][1][0] == doctest::Approx(-0.4).epsilon(1e-15));
    CHECK(m.values[2][2][0] == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(m.values[2][3][0] == doctest::Approx(-0.4).epsilon(1e-15));
}

TEST_CASE("reconstruction identity on purely discontinuous paths") {
    const NormedSpace space(2, 2.0);
    const GridPtr grid = TimeGrid::regular(1.0, 60);
    MarkLaw marks;
    marks.points = {{1.0, 0.0}, {0.0, -1.0}};
    marks.weights = {0.5, 0.5};
    const CompensatorModel model{2.0, marks};
    const LabeledPath pois = genCompensatedPoisson(grid, model, space, 17);
    const LabeledPath r = reconstructFromJumps(pois, &model);
    for (std::size_t k = 0; k <= pois.stepCount(); ++k)
        CHECK(space.norm(sub(valueAt(r, k), valueAt(pois, k))) <= 1e-12);

    MarkLaw acc;
    acc.points = {{0.5, 0.0}, {-0.5, 0.0}};
    acc.weights = {0.5, 0.5};
    const LabeledPath series = genAccessibleSeries(grid, {7, 30}, acc, space, 5);
    const LabeledPath r2 = reconstructFromJumps(series);
    for (std::size_t k = 0; k <= series.stepCount(); ++k)
        CHECK(space.norm(sub(valueAt(r2, k), valueAt(series, k))) <= 1e-15);

    LabeledPath withCont = pois;
    withCont.steps[0].push_back({Channel::Cont, Vec{0.1, 0.0}});
    CHECK_THROWS(reconstructFromJumps(withCont));
}

TEST_CASE("reconstruction identity on tree martingales") {
    const NormedSpace space(3, 2.0);
    AdaptedProcess m = genRandomTreeMartingale(23, 5, 2, space);
    const Vec shift = m.values[0][0];
    for (auto& lvl : m.values)
        for (auto& v : lvl) subInPlace(v, shift);  // start at 0
    const AdaptedProcess r = reconstructFromJumps(m);
    for (std::size_t n = 0; n < m.levelCount(); ++n)
        for (std::size_t b = 0; b < m.values[n].size(); ++b)
            CHECK(normInf(sub(r.values[n][b], m.values[n][b])) <= 1e-12);
}

TEST_CASE("tree transforms: identity, zero, linearity") {
    const NormedSpace space(2, 2.0);
    const AdaptedProcess m = genRandomTreeMartingale(31, 4, 2, space);
    const TreePtr t = m.tree;
    const TransformCoeffs one = constantCoeffs(t, {1, 1, 1, 1}, 1.0);
    const TransformCoeffs zero = constantCoeffs(t, {0, 0, 0, 0}, 0.0);
    const AdaptedProcess mid = applyTransform(m, one);
    const AdaptedProcess mz = applyTransform(m, zero);
    for (std::size_t n = 0; n < m.levelCount(); ++n)
        for (std::size_t b = 0; b < m.values[n].size(); ++b) {
            CHECK(normInf(sub(mid.values[n][b], m.values[n][b])) <= 1e-14);
            CHECK(normInf(mz.values[n][b]) == 0.0);
        }
    // linearity: T_{a+b} = T_a + T_b
    const TransformCoeffs ca = constantCoeffs(t, {0.5, -1, 0.25, 1}, 0.5);
    const TransformCoeffs cb = constantCoeffs(t, {0.5, 2, 0.75, -1}, 0.5);
    TransformCoeffs cab = ca;
    cab.a0 = 1.0;
    for (std::size_t n = 0; n < cab.perBlock.size(); ++n)
        for (std::size_t b = 0; b < cab.perBlock[n].size(); ++b)
            cab.perBlock[n][b] += cb.perBlock[n][b];
    const AdaptedProcess lhs = applyTransform(m, cab);
    const AdaptedProcess rhs = apAdd(applyTransform(m, ca), applyTransform(m, cb));
    for (std::size_t n = 0; n < m.levelCount(); ++n)
        for (std::size_t b = 0; b < m.values[n].size(); ++b)
            CHECK(normInf(sub(lhs.values[n][b], rhs.values[n][b])) <= 1e-12);
    // transforms of martingales are martingales
    CHECK(isMartingale(applyTransform(m, ca), 1e-12).ok);
}

TEST_CASE("alternating coefficients pick the odd-level increments") {
    const PaleyWalshSpec spec = PaleyWalshSpec::constantFactors(Vec{0.0}, {Vec{0.4}, Vec{0.8}});
    const AdaptedProcess f = genPaleyWalsh(spec);
    const AdaptedProcess g = applyTransform(f, alternatingCoeffs(f.tree));
    // g = df_1 = 0.4 r1 at every later level
    CHECK(g.values[2][0][0] == doctest::Approx(0.4));
    CHECK(g.values[2][1][0] == doctest::Approx(0.4));
    CHECK(g.values[2][2][0] == doctest::Approx(-0.4));
    CHECK(g.values[2][3][0] == doctest::Approx(-0.4));
}

TEST_CASE("hit-and-freeze coefficients freeze after the first crossing") {
    const NormedSpace space(1, 2.0);
    const PaleyWalshSpec spec =
        PaleyWalshSpec::constantFactors(Vec{0.0}, {Vec{0.4}, Vec{0.8}, Vec{0.2}});
    const AdaptedProcess f = genPaleyWalsh(spec);
    const TransformCoeffs c = hitAndFreezeCoeffs(f, 0.5, space);
    c.validate(*f.tree);
    CHECK(c.a0 == doctest::Approx(1.0));
    // level-1 and level-2 increments always taken (sup before them is 0 or 0.4 < 0.5)
    for (double a : c.perBlock[0]) CHECK(a == doctest::Approx(1.0));
    for (double a : c.perBlock[1]) CHECK(a == doctest::Approx(1.0));
    // level-3 increment frozen exactly on the histories where |f_2| = 1.2 >= 0.5
    CHECK(c.perBlock[2][0] == doctest::Approx(0.0));  // ++
    CHECK(c.perBlock[2][1] == doctest::Approx(1.0));  // +-
    CHECK(c.perBlock[2][2] == doctest::Approx(1.0));  // -+
    CHECK(c.perBlock[2][3] == doctest::Approx(0.0));  // --
    CHECK(c.maxAbs() <= 1.0);
}

TEST_CASE("grid transforms") {
    LabeledPath p;
    p.grid = TimeGrid::regular(1.0, 3);
    p.initial = Vec{1.0};
    p.steps = {{{Channel::Cont, Vec{1.0}}}, {{Channel::Cont, Vec{-2.0}}}, {{Channel::Cont, Vec{4.0}}}};
    const GridTransformCoeffs c{0.5, {1.0, 0.0, -1.0}};
    const LabeledPath tp = applyTransform(p, c);
    CHECK(valueAt(tp, 0)[0] == doctest::Approx(0.5));
    CHECK(valueAt(tp, 1)[0] == doctest::Approx(1.5));
    CHECK(valueAt(tp, 2)[0] == doctest::Approx(1.5));
    CHECK(valueAt(tp, 3)[0] == doctest::Approx(-2.5));
    const NormedSpace space(1, 2.0);
    const GridTransformCoeffs hf = gridHitAndFreezeCoeffs(p, 2.0, space);
    // running sup hits 2 at index 1 (value 2.0), so increments from step 2 are frozen
    CHECK(hf.a[0] == doctest::Approx(1.0));
    CHECK(hf.a[1] == doctest::Approx(0.0));
    CHECK(hf.a[2] == doctest::Approx(0.0));
}

TEST_CASE("differential subordination: positive and negative cases") {
    const NormedSpace space(3, 2.0);
    const AdaptedProcess m = genRandomTreeMartingale(37, 4, 2, space);
    const DualSet duals = separatingSet(space, 4, 2);
    CHECK(isDifferentiallySubordinate(m, m, Vec{1.0, 0.0, 0.0}, 1e-12));
    CHECK(isWeaklyDifferentiallySubordinate(m, m, duals, 1e-12));
    CHECK_FALSE(isWeaklyDifferentiallySubordinate(apScale(m, 2.0), m, duals, 1e-12));
    // any transform with |a| <= 1 is subordinate against every functional
    const TransformCoeffs c = hitAndFreezeCoeffs(m, 0.5, space);
    const AdaptedProcess tm = applyTransform(m, c);
    for (const Vec& f : duals.functionals) CHECK(isDifferentiallySubordinate(tm, m, f, 1e-12));
    // scaling one increment up breaks it
    AdaptedProcess big = m;
    for (std::size_t b = 0; b < big.values[2].size(); ++b) {
        const std::size_t parent = big.tree->parentBlock(2, b);
        const Vec d = sub(m.values[2][b], m.values[1][parent]);
        big.values[2][b] = add(m.values[1][parent], scaled(d, 3.0));
    }
    for (std::size_t b = 0; b < big.values[3].size(); ++b) {
        const std::size_t parent2 = big.tree->parentBlock(3, b);
        const Vec d = sub(m.values[3][b], m.values[2][parent2]);
        big.values[3][b] = add(big.values[2][parent2], d);
    }
    CHECK_FALSE(isWeaklyDifferentiallySubordinate(big, m, duals, 1e-12));
}

TEST_CASE("grid differential subordination") {
    LabeledPath p;
    p.grid = TimeGrid::regular(1.0, 2);
    p.initial = Vec{0.0, 0.0};
    p.steps = {{{Channel::Cont, Vec{1.0, 0.0}}}, {{Channel::Cont, Vec{0.0, -2.0}}}};
    const LabeledPath half = applyTransform(p, GridTransformCoeffs{1.0, {0.5, -0.5}});
    const DualSet duals = separatingSet(NormedSpace(2, 2.0), 3, 9);
    CHECK(isWeaklyDifferentiallySubordinate(half, p, duals, 1e-12));
    CHECK_FALSE(isWeaklyDifferentiallySubordinate(
        applyTransform(p, GridTransformCoeffs{1.0, {2.0, 1.0}}), p, duals, 1e-12));
}

TEST_CASE("transform coefficient validation") {
    const TreePtr t = FiltrationTree::dyadic(3);
    TransformCoeffs c = constantCoeffs(t, {1, 1, 1}, 1.0);
    CHECK_NOTHROW(c.validate(*t));
    c.perBlock.pop_back();
    CHECK_THROWS(c.validate(*t));
    CHECK_THROWS(constantCoeffs(t, {1, 1}, 1.0));  // one entry per level required
}
