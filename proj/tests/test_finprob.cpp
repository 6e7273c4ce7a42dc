#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "martlab/finprob.hpp"
#include "martlab/generators.hpp"

using namespace martlab;

namespace {

// Two-level tree over 4 outcomes with non-uniform probabilities.
TreePtr weightedTree() {
    std::vector<double> probs{0.1, 0.2, 0.3, 0.4};
    std::vector<std::vector<Block>> levels{
        {{0, 4}},
        {{0, 2}, {2, 4}},
        {{0, 1}, {1, 2}, {2, 3}, {3, 4}},
    };
    return std::make_shared<const FiltrationTree>(probs, levels);
}

AdaptedProcess leafProcess(const TreePtr& tree, const std::vector<double>& leaves) {
    AdaptedProcess p;
    p.tree = tree;
    p.dim = 1;
    p.values.resize(tree->levelCount());
    for (std::size_t n = 0; n < tree->levelCount(); ++n)
        p.values[n].assign(tree->blocks(n).size(), Vec{0.0});
    for (std::size_t b = 0; b < leaves.size(); ++b) p.values.back()[b] = Vec{leaves[b]};
    return p;
}

}  // namespace

TEST_CASE("dyadic tree structure and signs") {
    const TreePtr t = FiltrationTree::dyadic(3);
    REQUIRE(t->outcomes() == 8);
    REQUIRE(t->levelCount() == 4);
    CHECK(t->blocks(0).size() == 1);
    CHECK(t->blocks(2).size() == 4);
    CHECK(t->blockProb(1, 0) == doctest::Approx(0.5));
    CHECK(t->blockProb(3, 5) == doctest::Approx(0.125));
    // first sign is the most significant bit; low half = +1
    CHECK(t->dyadicSign(0, 1) == 1);
    CHECK(t->dyadicSign(0, 3) == 1);
    CHECK(t->dyadicSign(7, 1) == -1);
    CHECK(t->dyadicSign(7, 3) == -1);
    CHECK(t->dyadicSign(4, 1) == -1);  // 4 = 100b: -,+,+
    CHECK(t->dyadicSign(4, 2) == 1);
    CHECK(t->parentBlock(3, 5) == 2);
    CHECK(t->blockOf(2, 7) == 3);
}

TEST_CASE("conditional expectation: weighted-sum oracle") {
    const TreePtr t = weightedTree();
    const AdaptedProcess p = leafProcess(t, {1, 2, 3, 4});
    const std::vector<Vec> toRoot = condExpect(p, 2, 0);
    REQUIRE(toRoot.size() == 1);
    CHECK(toRoot[0][0] == doctest::Approx(3.0).epsilon(1e-15));  // .1+.4+.9+1.6
    const std::vector<Vec> toMid = condExpect(p, 2, 1);
    CHECK(toMid[0][0] == doctest::Approx(0.5 / 0.3).epsilon(1e-14));
    CHECK(toMid[1][0] == doctest::Approx(2.5 / 0.7).epsilon(1e-14));
}

TEST_CASE("conditional expectation: constants and symmetry") {
    const TreePtr t = FiltrationTree::dyadic(2);
    AdaptedProcess c = leafProcess(t, {7, 7, 7, 7});
    CHECK(condExpect(c, 2, 0)[0][0] == doctest::Approx(7.0));
    // r1 at level 1 averages to 0
    AdaptedProcess r;
    r.tree = t;
    r.dim = 1;
    r.values = {{Vec{0.0}}, {Vec{1.0}, Vec{-1.0}}};
    CHECK(condExpect(r, 1, 0)[0][0] == doctest::Approx(0.0));
}

TEST_CASE("tower property, exact") {
    const NormedSpace space(2, 2.0);
    const AdaptedProcess p = genRandomTreeMartingale(5, 4, 3, space);
    const std::size_t n = 4, m = 2, k = 1;
    const std::vector<Vec> direct = condExpect(p, n, k);
    AdaptedProcess mid = p;
    mid.values[m] = condExpect(p, n, m);
    const std::vector<Vec> twoStep = condExpect(mid, m, k);
    REQUIRE(direct.size() == twoStep.size());
    for (std::size_t b = 0; b < direct.size(); ++b)
        for (std::size_t j = 0; j < direct[b].size(); ++j)
            CHECK(direct[b][j] == doctest::Approx(twoStep[b][j]).epsilon(1e-13));
}

TEST_CASE("martingale predicate") {
    const PaleyWalshSpec spec =
        PaleyWalshSpec::constantFactors(Vec{0.0}, {Vec{0.4}, Vec{0.8}, Vec{0.3}});
    AdaptedProcess f = genPaleyWalsh(spec);
    CHECK(isMartingale(f, 1e-14).ok);
    f.values.back()[0][0] += 0.1;  // break one leaf
    const MartingaleCheck bad = isMartingale(f, 1e-10);
    CHECK_FALSE(bad.ok);
    CHECK(bad.maxViolation > 1e-3);
}

TEST_CASE("compensator of a martingale vanishes") {
    const NormedSpace space(3, 2.0);
    const AdaptedProcess m = genRandomTreeMartingale(11, 5, 2, space);
    AdaptedProcess m0 = m;  // shift so the process starts at 0
    for (auto& lvl : m0.values)
        for (auto& v : lvl) subInPlace(v, m.values[0][0]);
    const AdaptedProcess v = discreteCompensator(m0);
    for (const auto& lvl : v.values)
        for (const auto& val : lvl) CHECK(normInf(val) <= 1e-14);
}

TEST_CASE("compensator of a predictable process is the process itself") {
    const TreePtr t = FiltrationTree::dyadic(3);
    AdaptedProcess a;
    a.tree = t;
    a.dim = 1;
    a.values.resize(4);
    a.values[0] = {Vec{0.0}};
    // dA_n is a function of the level-(n-1) block, hence predictable
    for (std::size_t n = 1; n < 4; ++n) {
        a.values[n].resize(t->blocks(n).size());
        for (std::size_t b = 0; b < a.values[n].size(); ++b) {
            const std::size_t parent = t->parentBlock(n, b);
            a.values[n][b] = Vec{a.values[n - 1][parent][0] + 0.1 * static_cast<double>(n) +
                                 0.01 * static_cast<double>(parent)};
        }
    }
    const AdaptedProcess v = discreteCompensator(a);
    for (std::size_t n = 0; n < 4; ++n)
        for (std::size_t b = 0; b < a.values[n].size(); ++b)
            CHECK(v.values[n][b][0] == doctest::Approx(a.values[n][b][0]).epsilon(1e-14));
}

TEST_CASE("single-jump compensator: enumeration oracle") {
    // N_2 = 0.8 r1 on {r1 = r2}: atoms (++, +-, -+, --) -> (0.8, 0, 0, -0.8)
    const TreePtr t = FiltrationTree::dyadic(2);
    AdaptedProcess n;
    n.tree = t;
    n.dim = 1;
    n.values = {{Vec{0.0}}, {Vec{0.0}, Vec{0.0}}, {Vec{0.8}, Vec{0.0}, Vec{0.0}, Vec{-0.8}}};
    const AdaptedProcess v = discreteCompensator(n);
    CHECK(v.values[1][0][0] == doctest::Approx(0.0));
    CHECK(v.values[1][1][0] == doctest::Approx(0.0));
    // V_2 = 0.4 r1
    CHECK(v.values[2][0][0] == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(v.values[2][1][0] == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(v.values[2][2][0] == doctest::Approx(-0.4).epsilon(1e-15));
    CHECK(v.values[2][3][0] == doctest::Approx(-0.4).epsilon(1e-15));
    // N - V must be an exact martingale
    CHECK(isMartingale(apSub(n, v), 1e-12).ok);
}

TEST_CASE("compensator requires a zero start") {
    const TreePtr t = FiltrationTree::dyadic(1);
    AdaptedProcess a;
    a.tree = t;
    a.dim = 1;
    a.values = {{Vec{1.0}}, {Vec{1.0}, Vec{1.0}}};
    CHECK_THROWS_AS(discreteCompensator(a), std::invalid_argument);
}

TEST_CASE("fromAtomValues enforces block constancy") {
    const TreePtr t = FiltrationTree::dyadic(2);
    std::vector<std::vector<Vec>> atomVals(3, std::vector<Vec>(4, Vec{1.0}));
    CHECK_NOTHROW(fromAtomValues(t, 1, atomVals));
    atomVals[1][1][0] = 2.0;  // level-1 block {0,1} no longer constant
    CHECK_THROWS(fromAtomValues(t, 1, atomVals));
}

TEST_CASE("tree construction rejects malformed input") {
    // probabilities not summing to 1
    CHECK_THROWS(FiltrationTree({0.5, 0.6}, {{{0, 2}}, {{0, 1}, {1, 2}}}));
    // first level must be the single all-outcome block
    CHECK_THROWS(FiltrationTree({0.5, 0.5}, {{{0, 1}, {1, 2}}}));
    // zero-probability outcome
    CHECK_THROWS(FiltrationTree({1.0, 0.0}, {{{0, 2}}, {{0, 1}, {1, 2}}}));
}
