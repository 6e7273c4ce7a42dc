#include "martlab/process.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace martlab {

TimeGrid::TimeGrid(std::vector<double> ts) : times(std::move(ts)) {
    if (times.size() < 2) throw std::invalid_argument("TimeGrid: need at least two time points");
    if (times[0] != 0.0) throw std::invalid_argument("TimeGrid: t_0 must be 0");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw std::invalid_argument("TimeGrid: times must be strictly increasing");
}

std::shared_ptr<const TimeGrid> TimeGrid::regular(double horizon, std::size_t steps) {
    if (!(horizon > 0.0) || steps == 0) throw std::invalid_argument("TimeGrid: bad horizon/steps");
    std::vector<double> ts(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i)
        ts[i] = horizon * static_cast<double>(i) / static_cast<double>(steps);
    return std::make_shared<const TimeGrid>(std::move(ts));
}

void LabeledPath::validate() const {
    if (!grid) throw std::invalid_argument("LabeledPath: no grid");
    if (steps.size() != grid->stepCount())
        throw std::invalid_argument("LabeledPath: step count does not match grid");
    for (std::size_t idx : accJumpIndices)
        if (idx < 1 || idx > stepCount())
            throw std::invalid_argument("LabeledPath: accJumpIndices out of range");
    for (std::size_t k = 0; k < steps.size(); ++k) {
        const std::size_t arrival = k + 1;
        const bool predictableTime =
            std::find(accJumpIndices.begin(), accJumpIndices.end(), arrival) != accJumpIndices.end();
        int qlcJumps = 0;
        for (const LabeledIncrement& inc : steps[k]) {
            if (inc.delta.size() != initial.size())
                throw std::invalid_argument("LabeledPath: increment dimension mismatch");
            if (inc.channel == Channel::AccJump && !predictableTime)
                throw std::invalid_argument("LabeledPath: ACC_JUMP outside declared predictable times");
            if (inc.channel == Channel::QlcJump) {
                if (predictableTime)
                    throw std::invalid_argument("LabeledPath: QLC_JUMP at a predictable time");
                ++qlcJumps;
            }
        }
        if (qlcJumps > 1) throw std::invalid_argument("LabeledPath: more than one QLC_JUMP in a step");
    }
}

bool LabeledPath::hasChannel(Channel c) const {
    for (const auto& step : steps)
        for (const LabeledIncrement& inc : step)
            if (inc.channel == c && !isZero(inc.delta)) return true;
    return false;
}

Vec netIncrement(const LabeledPath& path, std::size_t j, ChannelSet channels) {
    if (j < 1 || j > path.stepCount()) throw std::out_of_range("netIncrement: index out of range");
    Vec out = zeros(path.initial.size());
    for (const LabeledIncrement& inc : path.steps[j - 1])
        if (channels.contains(inc.channel)) addInPlace(out, inc.delta);
    return out;
}

Vec valueAt(const LabeledPath& path, std::size_t k, ChannelSet channels, bool includeInitial) {
    if (k > path.stepCount()) throw std::out_of_range("valueAt: index out of range");
    Vec out = includeInitial ? path.initial : zeros(path.initial.size());
    for (std::size_t j = 1; j <= k; ++j)
        for (const LabeledIncrement& inc : path.steps[j - 1])
            if (channels.contains(inc.channel)) addInPlace(out, inc.delta);
    return out;
}

double runningSup(const LabeledPath& path, std::size_t k, const NormedSpace& space) {
    if (k > path.stepCount()) throw std::out_of_range("runningSup: index out of range");
    Vec cur = path.initial;
    double sup = space.norm(cur);
    for (std::size_t j = 1; j <= k; ++j) {
        addInPlace(cur, netIncrement(path, j));
        sup = std::max(sup, space.norm(cur));
    }
    return sup;
}

double variation(const LabeledPath& path, std::size_t k, const NormedSpace& space) {
    if (k > path.stepCount()) throw std::out_of_range("variation: index out of range");
    double var = space.norm(path.initial);
    for (std::size_t j = 1; j <= k; ++j) var += space.norm(netIncrement(path, j));
    return var;
}

double quadraticVariation(const LabeledPath& path, const Vec& functional, std::size_t k) {
    if (k > path.stepCount()) throw std::out_of_range("quadraticVariation: index out of range");
    double qv = 0.0;
    for (std::size_t j = 1; j <= k; ++j) {
        const double d = dot(netIncrement(path, j), functional);
        qv += d * d;
    }
    return qv;
}

GridStoppingTime hitTime(const LabeledPath& path, double level, const NormedSpace& space) {
    if (!(level > 0.0)) throw std::invalid_argument("hitTime: level must be positive");
    Vec cur = path.initial;
    if (space.norm(cur) >= level) return {0, false};
    for (std::size_t j = 1; j <= path.stepCount(); ++j) {
        addInPlace(cur, netIncrement(path, j));
        if (space.norm(cur) >= level) return {j, false};
    }
    return GridStoppingTime::never(path);
}

LabeledPath preStop(const LabeledPath& path, const GridStoppingTime& tau) {
    LabeledPath out = path;
    if (tau.isInfinite(path)) return out;
    if (tau.index == 0) {
        std::fill(out.initial.begin(), out.initial.end(), 0.0);
        for (auto& step : out.steps) step.clear();
        return out;
    }
    for (std::size_t k = tau.index - 1; k < out.steps.size(); ++k) out.steps[k].clear();
    return out;
}

LabeledPath stop(const LabeledPath& path, const GridStoppingTime& tau) {
    LabeledPath out = path;
    if (tau.isInfinite(path)) return out;
    for (std::size_t k = tau.index; k < out.steps.size(); ++k) out.steps[k].clear();
    return out;
}

Vec jumpAt(const LabeledPath& path, const GridStoppingTime& tau) {
    if (tau.isInfinite(path)) return zeros(path.initial.size());
    if (tau.index == 0) return path.initial;
    return netIncrement(path, tau.index);
}

LabeledPath channelPart(const LabeledPath& path, ChannelSet channels, bool keepInitial) {
    LabeledPath out;
    out.grid = path.grid;
    out.initial = keepInitial ? path.initial : zeros(path.initial.size());
    out.accJumpIndices = path.accJumpIndices;
    out.steps.resize(path.steps.size());
    for (std::size_t k = 0; k < path.steps.size(); ++k)
        for (const LabeledIncrement& inc : path.steps[k])
            if (channels.contains(inc.channel)) out.steps[k].push_back(inc);
    return out;
}

LabeledPath pathAdd(const LabeledPath& a, const LabeledPath& b) {
    if (a.grid != b.grid || a.initial.size() != b.initial.size())
        throw std::invalid_argument("pathAdd: incompatible paths");
    LabeledPath out = a;
    addInPlace(out.initial, b.initial);
    for (std::size_t k = 0; k < out.steps.size(); ++k)
        for (const LabeledIncrement& inc : b.steps[k]) out.steps[k].push_back(inc);
    std::vector<std::size_t> merged = a.accJumpIndices;
    for (std::size_t idx : b.accJumpIndices)
        if (std::find(merged.begin(), merged.end(), idx) == merged.end()) merged.push_back(idx);
    std::sort(merged.begin(), merged.end());
    out.accJumpIndices = std::move(merged);
    return out;
}

LabeledPath pathSub(const LabeledPath& a, const LabeledPath& b) {
    LabeledPath neg = b;
    for (double& x : neg.initial) x = -x;
    for (auto& step : neg.steps)
        for (LabeledIncrement& inc : step)
            for (double& x : inc.delta) x = -x;
    return pathAdd(a, neg);
}

GridStoppingTime minStop(const GridStoppingTime& a, const GridStoppingTime& b) {
    if (a.index <= b.index) return a;
    return b;
}

}  // namespace martlab
