#include "doctest.h"

#include <cmath>

#include "martlab/verify.hpp"

using namespace martlab;

TEST_CASE("lambda grid shape") {
    const std::vector<double> grid = logLambdaGrid(1.0, 40, 4.0);
    REQUIRE(grid.size() == 40);
    CHECK(grid.front() == doctest::Approx(1e-2).epsilon(1e-12));
    CHECK(grid.back() == doctest::Approx(1e2).epsilon(1e-12));
    for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);
}

TEST_CASE("tail estimation: Wilson interval sanity") {
    std::vector<double> stats(100, 0.0);
    const WilsonInterval w = estimateTail(stats, 0.5);
    CHECK(w.estimate == doctest::Approx(0.0));
    // rule-of-three-flavoured upper bound for an all-zero sample
    CHECK(w.upper <= 3.7 / 100.0);
    std::vector<double> half(200, 0.0);
    for (std::size_t i = 0; i < 100; ++i) half[i] = 1.0;
    const WilsonInterval h = estimateTail(half, 0.5);
    CHECK(h.estimate == doctest::Approx(0.5));
    CHECK(h.lower < 0.5);
    CHECK(h.upper > 0.5);
    CHECK(h.upper - h.lower < 0.15);
}

TEST_CASE("exact tail and weak-L1 statistics") {
    std::vector<double> probs{0.25, 0.25, 0.25, 0.25};
    std::vector<std::vector<Block>> levels{
        {{0, 4}}, {{0, 1}, {1, 2}, {2, 3}, {3, 4}}};
    const FiltrationTree tree(probs, levels);
    const std::vector<double> stat{1.0, 2.0, 4.0, 0.5};
    CHECK(exactTailProb(tree, stat, 1.5) == doctest::Approx(0.5));
    CHECK(exactTailProb(tree, stat, 4.0) == doctest::Approx(0.0));  // strict tail
    CHECK(exactTailProb(tree, stat, 3.9) == doctest::Approx(0.25));
    // sup_v v P(X >= v): candidates 0.5*1, 1*0.75, 2*0.5, 4*0.25 -> 1
    CHECK(exactWeakL1(tree, stat) == doctest::Approx(1.0).epsilon(1e-14));
    const std::vector<double> skew{3.0, 0.0, 0.0, 0.0};
    CHECK(exactWeakL1(tree, skew) == doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("running sup of a Rademacher walk: enumeration oracle") {
    const PaleyWalshSpec spec =
        PaleyWalshSpec::constantFactors(Vec{0.0}, {Vec{1.0}, Vec{1.0}, Vec{1.0}});
    const AdaptedProcess m = genPaleyWalsh(spec);
    const NormedSpace space(1, 2.0);
    const std::vector<double> sups = atomRunningSup(m, space);
    // P(sup |walk_3| >= 3) = 2/8
    CHECK(exactTailProb(*m.tree, sups, 2.9) == doctest::Approx(0.25));
    CHECK(treeMeanNorm(m, 1, space) == doctest::Approx(1.0));
    // E|walk_3| = (3 + 1 + 1 + 1)/4 = 1.5 by symmetry
    CHECK(treeMeanNorm(m, 3, space) == doctest::Approx(1.5));
    const std::vector<double> var = atomVariation(m, space);
    for (double v : var) CHECK(v == doctest::Approx(3.0));
}

TEST_CASE("level-split bounds hold on random trees") {
    const NormedSpace space(2, NormedSpace::infinity());
    const AdaptedProcess m = genRandomTreeMartingale(101, 5, 2, space);
    const double scale = treeMeanNorm(m, m.levelCount() - 1, space);
    const CheckResult r = checkGundyBounds(m, space, logLambdaGrid(scale, 20, 3.0));
    CHECK(r.pass);
    CHECK(r.slack >= 0.0);
    CHECK_FALSE(r.vacuous);
    // zero martingale: all bounds vacuous but passing
    AdaptedProcess z = m;
    for (auto& lvl : z.values)
        for (auto& v : lvl) v.assign(v.size(), 0.0);
    const CheckResult rz = checkGundyBounds(z, space, logLambdaGrid(1.0, 10, 2.0));
    CHECK(rz.pass);
    CHECK(rz.vacuous);
}

TEST_CASE("hit-and-freeze transform weak-L1 check") {
    const NormedSpace space(2, 2.0);
    const CheckResult r = checkWeakL1Transform(200, 5, 2, space, 80.0, 7);
    CHECK(r.pass);
    CHECK(r.estimate <= r.bound);
    CHECK(r.sampleSize == 200);
    // an absurdly small budget must fail
    const CheckResult bad = checkWeakL1Transform(200, 5, 2, space, 1e-6, 7);
    CHECK_FALSE(bad.pass);
}

TEST_CASE("probe objective: Hilbert space with p = 2 is exactly 1") {
    for (int depth : {2, 5}) {
        const NormedSpace space(3, 2.0);
        const ProbeResult r = probeUMDLowerBound(space, 2.0, depth, 400, 13, ProbeMode::SignFlip);
        CHECK(std::abs(r.bound - 1.0) <= 1e-12);
        CHECK(r.evaluations > 0);
    }
}

TEST_CASE("probe search never loses its warm start and padding is neutral") {
    const NormedSpace small(2, NormedSpace::infinity());
    const ProbeResult base = probeUMDLowerBound(small, 2.0, 3, 300, 5, ProbeMode::SignFlip);
    const NormedSpace big(4, NormedSpace::infinity());
    const ProbeWitness padded = padWitness(base.witness, 5, 4, ProbeMode::SignFlip);
    CHECK(probeObjective(padded, big, 2.0, ProbeMode::SignFlip) ==
          doctest::Approx(base.bound).epsilon(1e-12));
    const ProbeResult next =
        probeUMDLowerBound(big, 2.0, 5, 300, 6, ProbeMode::SignFlip, &padded);
    CHECK(next.bound >= base.bound - 1e-12);
}

TEST_CASE("dual witness: normalized mass and linear transform growth") {
    for (int depth : {4, 6}) {
        const ProbeWitness w = haarDualWitness(depth);
        const NormedSpace space(w.pw.dim(), NormedSpace::infinity());
        // normalization: E max-norm of the witness martingale increments is 1
        const AdaptedProcess h = genPaleyWalsh(w.pw);
        AdaptedProcess centered = h;
        for (auto& lvl : centered.values)
            for (auto& v : lvl) subInPlace(v, h.values[0][0]);
        CHECK(treeMeanNorm(centered, centered.levelCount() - 1, space) ==
              doctest::Approx(1.0).epsilon(1e-12));
        CHECK(w.objective ==
              doctest::Approx(probeObjective(w, space, 2.0, ProbeMode::ZeroOne)).epsilon(1e-12));
    }
    // the objective grows with depth
    CHECK(haarDualWitness(6).objective > haarDualWitness(4).objective);
    CHECK(haarDualWitness(8).objective > haarDualWitness(6).objective);
}

TEST_CASE("divergence table: growth across depths at small scale") {
    const std::vector<DivergenceRow> rows = divergenceDemo({2, 4}, 200, 3);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].depth == 2);
    CHECK(rows[1].medianContSup > rows[0].medianContSup);
    for (const DivergenceRow& r : rows) {
        CHECK(r.meanEndNorm <= 3.0);
        CHECK(r.leakRate == doctest::Approx(0.0));
    }
}

TEST_CASE("canonical ensemble statistics are internally consistent") {
    CompositeModel model;
    model.grid = TimeGrid::regular(1.0, 60);
    model.space = NormedSpace(3, 2.0);
    model.initial = Vec{0.5, 0.0, 0.0};
    model.cont = ContinuousDriverSpec{1.0, std::nullopt};
    MarkLaw marks;
    marks.points = {{0.0, 1.0, 0.0}, {0.0, -1.0, 0.0}};
    marks.weights = {0.5, 0.5};
    model.poisson = CompensatorModel{2.0, marks};
    model.accIndices = {30};
    MarkLaw acc;
    acc.points = {{0.0, 0.0, 1.0}, {0.0, 0.0, -1.0}};
    acc.weights = {0.5, 0.5};
    model.accMarks = acc;
    const CanonicalEnsembleStats stats = canonicalEnsembleStats(model, 4000, 21);
    CHECK(stats.n == 4000);
    REQUIRE(stats.supC.size() == 4000);
    const CheckResult mart = checkCanonicalMartingale(model, stats, 4.0);
    CHECK(mart.pass);
    const CheckResult pyth = checkPythagoras(stats, 3.5);
    CHECK(pyth.pass);
    for (char part : {'c', 'q', 'a'}) {
        const CheckResult w = checkWeakL1Canonical(stats, part, logLambdaGrid(1.0, 30, 3.0), 80.0);
        CHECK(w.pass);
    }
    // shifting every sampled mean must break the z-test
    CanonicalEnsembleStats broken = stats;
    for (int part = 0; part < 4; ++part)
        for (int t = 0; t < 2; ++t) broken.sum[part][t][0] += 5000.0;
    CHECK_FALSE(checkCanonicalMartingale(model, broken, 4.0).pass);
}
