#include "doctest.h"

#include <stdexcept>

#include "martlab/process.hpp"

using namespace martlab;

namespace {

// Scalar two-step path with increments 0.4 r1, 0.8 r2 for chosen signs.
LabeledPath twoStepPath(int r1, int r2) {
    LabeledPath p;
    p.grid = TimeGrid::regular(1.0, 2);
    p.initial = Vec{0.0};
    p.steps = {{{Channel::Cont, Vec{0.4 * r1}}}, {{Channel::Cont, Vec{0.8 * r2}}}};
    return p;
}

}  // namespace

TEST_CASE("time grid") {
    const GridPtr g = TimeGrid::regular(2.0, 4);
    CHECK(g->stepCount() == 4);
    CHECK(g->horizon() == doctest::Approx(2.0));
    CHECK(g->dt(1) == doctest::Approx(0.5));
    CHECK_THROWS(TimeGrid({0.0, 0.5, 0.5}));  // not strictly increasing
    CHECK_THROWS(TimeGrid({0.1, 0.5}));       // must start at 0
}

TEST_CASE("path validation rejects undeclared accessible jumps") {
    LabeledPath p = twoStepPath(1, 1);
    CHECK_NOTHROW(p.validate());
    p.steps[0].push_back({Channel::AccJump, Vec{1.0}});
    CHECK_THROWS(p.validate());  // index 1 not declared
    p.accJumpIndices = {1};
    CHECK_NOTHROW(p.validate());
}

TEST_CASE("values, increments and channel parts") {
    LabeledPath p = twoStepPath(1, -1);
    p.steps[1].push_back({Channel::QlcJump, Vec{0.5}});
    CHECK(valueAt(p, 0)[0] == doctest::Approx(0.0));
    CHECK(valueAt(p, 1)[0] == doctest::Approx(0.4));
    CHECK(valueAt(p, 2)[0] == doctest::Approx(0.1));  // 0.4 - 0.8 + 0.5
    CHECK(netIncrement(p, 2)[0] == doctest::Approx(-0.3));
    CHECK(netIncrement(p, 2, ChannelSet::of(Channel::QlcJump))[0] == doctest::Approx(0.5));
    // channel parts recombine to the whole path
    const LabeledPath cont = channelPart(p, ChannelSet::of(Channel::Cont), true);
    const LabeledPath rest = channelPart(p, kQlcChannels | ChannelSet::of(Channel::AccJump), false);
    const LabeledPath sum = pathAdd(cont, rest);
    for (std::size_t k = 0; k <= 2; ++k)
        CHECK(valueAt(sum, k)[0] == doctest::Approx(valueAt(p, k)[0]).epsilon(1e-15));
}

TEST_CASE("variation and quadratic variation") {
    LabeledPath p = twoStepPath(1, -1);
    const NormedSpace space(1, 2.0);
    CHECK(variation(p, 2, space) == doctest::Approx(1.2));
    CHECK(runningSup(p, 2, space) == doctest::Approx(0.4));
    CHECK(quadraticVariation(p, Vec{1.0}, 2) == doctest::Approx(0.16 + 0.64));
}

TEST_CASE("hit time: two-step enumeration oracle") {
    const NormedSpace space(1, 2.0);
    // level 0.5: hit at step 2 iff the increments reinforce (|0.4 r1 + 0.8 r2| = 1.2)
    CHECK(hitTime(twoStepPath(1, 1), 0.5, space).index == 2);
    CHECK(hitTime(twoStepPath(-1, -1), 0.5, space).index == 2);
    CHECK(hitTime(twoStepPath(1, -1), 0.5, space).isInfinite(twoStepPath(1, -1)));
    CHECK(hitTime(twoStepPath(-1, 1), 0.5, space).isInfinite(twoStepPath(-1, 1)));
    // inclusive tie-break at the exact level
    CHECK(hitTime(twoStepPath(1, 1), 0.4, space).index == 1);
    // immediate hit when the initial value already reaches the level
    LabeledPath p = twoStepPath(1, 1);
    p.initial = Vec{2.0};
    CHECK(hitTime(p, 1.0, space).index == 0);
}

TEST_CASE("stop and pre-stop conventions") {
    const LabeledPath p = twoStepPath(1, 1);
    const GridStoppingTime tau{1, false};
    const LabeledPath stopped = stop(p, tau);
    const LabeledPath pre = preStop(p, tau);
    CHECK(valueAt(stopped, 2)[0] == doctest::Approx(0.4));
    CHECK(valueAt(pre, 2)[0] == doctest::Approx(0.0));  // frozen strictly before tau
    // difference at tau is the jump
    CHECK(jumpAt(p, tau)[0] == doctest::Approx(0.4));
    // tau = 0 freezes the pre-stopped path at zero even with a nonzero start
    LabeledPath q = p;
    q.initial = Vec{3.0};
    const LabeledPath preZero = preStop(q, GridStoppingTime{0, false});
    for (std::size_t k = 0; k <= 2; ++k) CHECK(valueAt(preZero, k)[0] == doctest::Approx(0.0));
    CHECK(jumpAt(q, GridStoppingTime{0, false})[0] == doctest::Approx(3.0));  // M_0 at tau = 0
    // infinite tau never stops and carries no jump
    const GridStoppingTime inf = GridStoppingTime::never(p);
    CHECK(valueAt(stop(p, inf), 2)[0] == doctest::Approx(1.2));
    CHECK(jumpAt(p, inf)[0] == doctest::Approx(0.0));
}

TEST_CASE("pre-stop composes through the minimum of stopping times") {
    const LabeledPath p = twoStepPath(1, 1);
    const GridStoppingTime a{1, false}, b{2, false};
    const LabeledPath viaMin = preStop(p, minStop(a, b));
    const LabeledPath direct = preStop(p, a);
    for (std::size_t k = 0; k <= 2; ++k)
        CHECK(valueAt(viaMin, k)[0] == doctest::Approx(valueAt(direct, k)[0]));
}
