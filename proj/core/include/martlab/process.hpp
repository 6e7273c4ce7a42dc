#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "martlab/space.hpp"
#include "martlab/vec.hpp"

namespace martlab {

struct TimeGrid {
    std::vector<double> times;  // t_0 = 0 < t_1 < ... < t_K

    explicit TimeGrid(std::vector<double> ts);
    std::size_t stepCount() const { return times.size() - 1; }
    double horizon() const { return times.back(); }
    double dt(std::size_t step) const { return times[step + 1] - times[step]; }

    static std::shared_ptr<const TimeGrid> regular(double horizon, std::size_t steps);
};

using GridPtr = std::shared_ptr<const TimeGrid>;

enum class Channel : std::uint8_t { Cont = 0, QlcJump = 1, QlcDrift = 2, AccJump = 3 };

struct ChannelSet {
    std::uint8_t mask = 0;

    static ChannelSet all() { return {0x0f}; }
    static ChannelSet none() { return {0}; }
    static ChannelSet of(Channel c) { return {static_cast<std::uint8_t>(1u << static_cast<int>(c))}; }
    ChannelSet operator|(ChannelSet o) const { return {static_cast<std::uint8_t>(mask | o.mask)}; }
    bool contains(Channel c) const { return (mask >> static_cast<int>(c)) & 1u; }
};

inline const ChannelSet kQlcChannels = ChannelSet::of(Channel::QlcJump) | ChannelSet::of(Channel::QlcDrift);

struct LabeledIncrement {
    Channel channel;
    Vec delta;
};

// Grid-time cadlag path. steps[k] holds the labeled increments arriving at
// time t_{k+1}; the path value at t_j is initial + sum of steps[0..j-1].
struct LabeledPath {
    GridPtr grid;
    Vec initial;
    std::vector<std::vector<LabeledIncrement>> steps;
    // Grid indices (in 1..K) declared predictable; ACC_JUMP may occur only there.
    std::vector<std::size_t> accJumpIndices;

    std::size_t stepCount() const { return steps.size(); }
    int dim() const { return static_cast<int>(initial.size()); }
    void validate() const;
    bool hasChannel(Channel c) const;
};

struct GridStoppingTime {
    std::size_t index = 0;  // grid index in 0..K, or K+1 for "never"
    bool predictable = false;

    static GridStoppingTime never(const LabeledPath& p) {
        return {p.stepCount() + 1, false};
    }
    bool isInfinite(const LabeledPath& p) const { return index > p.stepCount(); }
};

// Net increment (sum over selected channels) arriving at grid index j >= 1.
Vec netIncrement(const LabeledPath& path, std::size_t j, ChannelSet channels = ChannelSet::all());

// Path value at grid index k restricted to the selected channels.
// The initial value is included only when includeInitial is set.
Vec valueAt(const LabeledPath& path, std::size_t k, ChannelSet channels = ChannelSet::all(),
            bool includeInitial = true);

double runningSup(const LabeledPath& path, std::size_t k, const NormedSpace& space);

// ||M_0|| + sum of net increment norms up to index k.
double variation(const LabeledPath& path, std::size_t k, const NormedSpace& space);

// Sum over j <= k of <net increment at j, functional>^2.
double quadraticVariation(const LabeledPath& path, const Vec& functional, std::size_t k);

// First grid index with ||M_{t_k}|| >= level (inclusive tie-break).
GridStoppingTime hitTime(const LabeledPath& path, double level, const NormedSpace& space);

// Path frozen strictly before tau; identically zero when tau = 0.
LabeledPath preStop(const LabeledPath& path, const GridStoppingTime& tau);

// Path frozen at tau inclusive.
LabeledPath stop(const LabeledPath& path, const GridStoppingTime& tau);

// M_tau - M_{tau-} with the boundary conventions M_0 at tau = 0 and 0 at tau = infinity.
Vec jumpAt(const LabeledPath& path, const GridStoppingTime& tau);

// Restrict the path to the selected channels (drops the initial value unless kept).
LabeledPath channelPart(const LabeledPath& path, ChannelSet channels, bool keepInitial);

LabeledPath pathAdd(const LabeledPath& a, const LabeledPath& b);
LabeledPath pathSub(const LabeledPath& a, const LabeledPath& b);

GridStoppingTime minStop(const GridStoppingTime& a, const GridStoppingTime& b);

}  // namespace martlab
