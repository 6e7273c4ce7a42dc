#include "scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "martlab/rng.hpp"

namespace martlab::cli {

namespace {

class Diagnostics {
public:
    void add(const std::string& path, const std::string& message) {
        errors_.push_back({path, message});
    }
    bool empty() const { return errors_.empty(); }
    [[noreturn]] void raise() const {
        std::ostringstream out;
        out << "invalid scenario:";
        for (const ParseError& e : errors_) out << "\n  " << e.path << ": " << e.message;
        throw std::runtime_error(out.str());
    }

private:
    std::vector<ParseError> errors_;
};

double parseQ(const Json& j, const std::string& path, Diagnostics& diag) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return NormedSpace::infinity();
        diag.add(path, "norm exponent must be a number >= 1 or \"inf\"");
        return 2.0;
    }
    if (!j.is_number() || j.get<double>() < 1.0) {
        diag.add(path, "norm exponent must be a number >= 1 or \"inf\"");
        return 2.0;
    }
    return j.get<double>();
}

Json qToJson(double q) {
    if (std::isinf(q)) return Json("inf");
    return Json(q);
}

Vec parseVec(const Json& j, const std::string& path, Diagnostics& diag) {
    Vec out;
    if (!j.is_array()) {
        diag.add(path, "expected an array of numbers");
        return out;
    }
    for (const auto& x : j) {
        if (!x.is_number()) {
            diag.add(path, "expected an array of numbers");
            return {};
        }
        out.push_back(x.get<double>());
    }
    return out;
}

MarkLaw parseMarks(const Json& j, const std::string& path, int dim, Diagnostics& diag) {
    MarkLaw law;
    const std::string type = j.value("type", "finite");
    if (type == "finite") {
        law.kind = MarkLaw::Kind::Finite;
        if (!j.contains("points") || !j.contains("weights")) {
            diag.add(path, "finite mark law needs points and weights");
            return law;
        }
        for (std::size_t i = 0; i < j["points"].size(); ++i)
            law.points.push_back(
                parseVec(j["points"][i], path + ".points[" + std::to_string(i) + "]", diag));
        for (const auto& w : j["weights"]) law.weights.push_back(w.get<double>());
    } else if (type == "gaussian") {
        law.kind = MarkLaw::Kind::Gaussian;
        law.gaussMean = parseVec(j.value("mean", Json::array()), path + ".mean", diag);
        law.gaussStd = j.value("std", 1.0);
    } else {
        diag.add(path + ".type", "mark law type must be finite or gaussian");
        return law;
    }
    try {
        law.validate(dim);
    } catch (const std::exception& e) {
        diag.add(path, e.what());
    }
    return law;
}

Json marksToJson(const MarkLaw& law) {
    Json j;
    if (law.kind == MarkLaw::Kind::Finite) {
        j["type"] = "finite";
        j["points"] = law.points;
        j["weights"] = law.weights;
    } else {
        j["type"] = "gaussian";
        j["mean"] = law.gaussMean;
        j["std"] = law.gaussStd;
    }
    return j;
}

std::uint64_t fnv1a(const std::string& text, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex(std::uint64_t v) {
    std::ostringstream out;
    out << std::hex << v;
    return out.str();
}

Json checkToJson(const CheckResult& c) {
    Json j;
    j["name"] = c.name;
    j["bound"] = c.bound;
    j["estimate"] = c.estimate;
    j["slack"] = c.slack;
    j["pass"] = c.pass;
    j["vacuous"] = c.vacuous;
    j["sampleSize"] = c.sampleSize;
    j["detail"] = c.detail;
    return j;
}

}  // namespace

NormedSpace Scenario::space() const { return NormedSpace(dim, q); }

CompositeModel Scenario::compositeModel() const {
    CompositeModel model;
    model.grid = TimeGrid::regular(horizon, steps);
    model.space = space();
    model.initial = generator.initial;
    model.cont = generator.cont;
    model.poisson = generator.poisson;
    model.accIndices = generator.accIndices;
    model.accMarks = generator.accMarks;
    return model;
}

Scenario parseScenario(const std::string& text) {
    Diagnostics diag;
    Json j;
    try {
        j = Json::parse(text);
    } catch (const std::exception& e) {
        diag.add("$", e.what());
        diag.raise();
    }
    Scenario s;
    if (j.contains("space")) {
        s.dim = j["space"].value("dim", 3);
        if (s.dim < 1 || s.dim > 8) diag.add("space.dim", "dimension must be in 1..8");
        if (j["space"].contains("q")) s.q = parseQ(j["space"]["q"], "space.q", diag);
    }
    s.backend = j.value("backend", "grid");
    if (s.backend != "grid" && s.backend != "tree")
        diag.add("backend", "backend must be grid or tree");
    s.seed = j.value("seed", std::uint64_t{1});
    s.ensemble = j.value("ensemble", std::size_t{100000});
    if (s.ensemble < 1) diag.add("ensemble", "ensemble size must be >= 1");
    if (j.contains("grid")) {
        s.horizon = j["grid"].value("horizon", 1.0);
        s.steps = j["grid"].value("steps", std::size_t{200});
        if (!(s.horizon > 0.0)) diag.add("grid.horizon", "horizon must be positive");
        if (s.steps < 1) diag.add("grid.steps", "steps must be >= 1");
    }
    if (j.contains("generator")) {
        const Json& g = j["generator"];
        if (g.contains("initial")) s.generator.initial = parseVec(g["initial"], "generator.initial", diag);
        if (!s.generator.initial.empty() && static_cast<int>(s.generator.initial.size()) != s.dim)
            diag.add("generator.initial", "dimension mismatch with space.dim");
        if (g.contains("continuous")) {
            ContinuousDriverSpec c;
            c.volatility = g["continuous"].value("volatility", 1.0);
            if (c.volatility < 0.0) diag.add("generator.continuous.volatility", "must be >= 0");
            if (g["continuous"].contains("direction"))
                c.fixedDirection =
                    parseVec(g["continuous"]["direction"], "generator.continuous.direction", diag);
            s.generator.cont = c;
        }
        if (g.contains("poisson")) {
            CompensatorModel p;
            p.intensity = g["poisson"].value("intensity", 1.0);
            if (!(p.intensity > 0.0)) diag.add("generator.poisson.intensity", "must be positive");
            if (g["poisson"].contains("marks"))
                p.marks = parseMarks(g["poisson"]["marks"], "generator.poisson.marks", s.dim, diag);
            else
                diag.add("generator.poisson.marks", "mark law is required");
            if (s.steps >= 1 && p.intensity * (s.horizon / static_cast<double>(s.steps)) > 0.1)
                diag.add("generator.poisson.intensity",
                         "intensity * mesh exceeds 0.1; refine the grid");
            s.generator.poisson = p;
        }
        if (g.contains("accessible")) {
            for (const auto& idx : g["accessible"].value("indices", std::vector<std::size_t>{})) {
                if (idx < 1 || idx > s.steps)
                    diag.add("generator.accessible.indices", "index outside 1..steps");
                s.generator.accIndices.push_back(idx);
            }
            if (g["accessible"].contains("marks"))
                s.generator.accMarks =
                    parseMarks(g["accessible"]["marks"], "generator.accessible.marks", s.dim, diag);
            else
                diag.add("generator.accessible.marks", "mark law is required");
        }
    }
    if (j.contains("analyses")) {
        const Json& a = j["analyses"];
        if (a.contains("gundy")) {
            GundyAnalysis g;
            g.trees = a["gundy"].value("trees", g.trees);
            g.maxDepth = a["gundy"].value("maxDepth", g.maxDepth);
            g.maxDim = a["gundy"].value("maxDim", g.maxDim);
            g.lambdaPoints = a["gundy"].value("lambdaPoints", g.lambdaPoints);
            g.lambdaDecades = a["gundy"].value("lambdaDecades", g.lambdaDecades);
            if (g.maxDepth < 3 || g.maxDepth > 12)
                diag.add("analyses.gundy.maxDepth", "must be in 3..12");
            if (g.maxDim < 1 || g.maxDim > 8) diag.add("analyses.gundy.maxDim", "must be in 1..8");
            if (g.lambdaPoints < 2) diag.add("analyses.gundy.lambdaPoints", "must be >= 2");
            s.gundy = g;
        }
        if (a.contains("canonical")) {
            CanonicalAnalysis c;
            c.martingaleSigmas = a["canonical"].value("martingaleSigmas", c.martingaleSigmas);
            c.pythagorasSigmas = a["canonical"].value("pythagorasSigmas", c.pythagorasSigmas);
            c.budgetC = a["canonical"].value("budgetC", c.budgetC);
            c.lambdaPoints = a["canonical"].value("lambdaPoints", c.lambdaPoints);
            c.lambdaDecades = a["canonical"].value("lambdaDecades", c.lambdaDecades);
            if (a["canonical"].contains("weakL1Parts"))
                c.weakL1Parts = a["canonical"]["weakL1Parts"].get<std::vector<std::string>>();
            for (const std::string& part : c.weakL1Parts)
                if (part != "c" && part != "q" && part != "a")
                    diag.add("analyses.canonical.weakL1Parts", "parts must be c, q or a");
            if (!(c.budgetC > 0.0)) diag.add("analyses.canonical.budgetC", "must be positive");
            if (s.backend != "grid")
                diag.add("analyses.canonical", "canonical analysis needs the grid backend");
            s.canonical = c;
        }
        if (a.contains("transform")) {
            TransformAnalysis t;
            t.trees = a["transform"].value("trees", t.trees);
            t.depth = a["transform"].value("depth", t.depth);
            t.branching = a["transform"].value("branching", t.branching);
            t.budgetC = a["transform"].value("budgetC", t.budgetC);
            if (t.depth < 1 || t.depth > 12) diag.add("analyses.transform.depth", "must be in 1..12");
            if (t.branching < 2) diag.add("analyses.transform.branching", "must be >= 2");
            if (!(t.budgetC > 0.0)) diag.add("analyses.transform.budgetC", "must be positive");
            s.transform = t;
        }
        if (a.contains("probe")) {
            const Json probeList = a["probe"].is_array() ? a["probe"] : Json::array({a["probe"]});
            for (std::size_t pi = 0; pi < probeList.size(); ++pi) {
                const Json& pj = probeList[pi];
                const std::string where = "analyses.probe[" + std::to_string(pi) + "]";
                ProbeAnalysis p;
                p.mode = pj.value("mode", p.mode);
                p.q = pj.contains("q") ? parseQ(pj["q"], where + ".q", diag) : s.q;
                p.p = pj.value("p", p.p);
                if (pj.contains("depths")) p.depths = pj["depths"].get<std::vector<int>>();
                p.budget = pj.value("budget", p.budget);
                p.sanityCeiling = pj.value("sanityCeiling", p.sanityCeiling);
                if (p.mode != "sign" && p.mode != "zero-one")
                    diag.add(where + ".mode", "mode must be sign or zero-one");
                if (!(p.p > 1.0)) diag.add(where + ".p", "must be > 1");
                for (std::size_t i = 0; i < p.depths.size(); ++i) {
                    if (p.depths[i] < 1 || p.depths[i] > 14)
                        diag.add(where + ".depths", "depths must be in 1..14");
                    if (i > 0 && p.depths[i] < p.depths[i - 1])
                        diag.add(where + ".depths",
                                 "depths must be nondecreasing (nested search)");
                }
                if (p.depths.empty()) diag.add(where + ".depths", "need at least one depth");
                s.probes.push_back(p);
            }
        }
        if (a.contains("divergence")) {
            DivergenceAnalysis d;
            if (a["divergence"].contains("depths"))
                d.depths = a["divergence"]["depths"].get<std::vector<int>>();
            d.paths = a["divergence"].value("paths", d.paths);
            d.probeBudget = a["divergence"].value("probeBudget", d.probeBudget);
            for (std::size_t i = 0; i < d.depths.size(); ++i) {
                if (d.depths[i] < 1 || d.depths[i] > 14)
                    diag.add("analyses.divergence.depths", "depths must be in 1..14");
                if (i > 0 && d.depths[i] <= d.depths[i - 1])
                    diag.add("analyses.divergence.depths", "depths must be strictly increasing");
            }
            if (d.depths.empty()) diag.add("analyses.divergence.depths", "need at least one depth");
            if (d.paths < 1) diag.add("analyses.divergence.paths", "must be >= 1");
            s.divergence = d;
        }
    }
    if (!diag.empty()) diag.raise();
    return s;
}

std::string serializeScenario(const Scenario& s) {
    Json j;
    j["space"] = {{"dim", s.dim}, {"q", qToJson(s.q)}};
    j["backend"] = s.backend;
    j["seed"] = s.seed;
    j["ensemble"] = s.ensemble;
    j["grid"] = {{"horizon", s.horizon}, {"steps", s.steps}};
    Json g = Json::object();
    if (!s.generator.initial.empty()) g["initial"] = s.generator.initial;
    if (s.generator.cont) {
        g["continuous"] = Json{{"volatility", s.generator.cont->volatility}};
        if (s.generator.cont->fixedDirection)
            g["continuous"]["direction"] = *s.generator.cont->fixedDirection;
    }
    if (s.generator.poisson)
        g["poisson"] = Json{{"intensity", s.generator.poisson->intensity},
                            {"marks", marksToJson(s.generator.poisson->marks)}};
    if (!s.generator.accIndices.empty())
        g["accessible"] = Json{{"indices", s.generator.accIndices},
                               {"marks", marksToJson(*s.generator.accMarks)}};
    j["generator"] = g;
    Json a = Json::object();
    if (s.gundy)
        a["gundy"] = Json{{"trees", s.gundy->trees},
                          {"maxDepth", s.gundy->maxDepth},
                          {"maxDim", s.gundy->maxDim},
                          {"lambdaPoints", s.gundy->lambdaPoints},
                          {"lambdaDecades", s.gundy->lambdaDecades}};
    if (s.canonical)
        a["canonical"] = Json{{"martingaleSigmas", s.canonical->martingaleSigmas},
                              {"pythagorasSigmas", s.canonical->pythagorasSigmas},
                              {"weakL1Parts", s.canonical->weakL1Parts},
                              {"budgetC", s.canonical->budgetC},
                              {"lambdaPoints", s.canonical->lambdaPoints},
                              {"lambdaDecades", s.canonical->lambdaDecades}};
    if (s.transform)
        a["transform"] = Json{{"trees", s.transform->trees},
                              {"depth", s.transform->depth},
                              {"branching", s.transform->branching},
                              {"budgetC", s.transform->budgetC}};
    if (!s.probes.empty()) {
        Json probes = Json::array();
        for (const ProbeAnalysis& p : s.probes)
            probes.push_back(Json{{"mode", p.mode},
                                  {"q", qToJson(p.q)},
                                  {"p", p.p},
                                  {"depths", p.depths},
                                  {"budget", p.budget},
                                  {"sanityCeiling", p.sanityCeiling}});
        a["probe"] = probes;
    }
    if (s.divergence)
        a["divergence"] = Json{{"depths", s.divergence->depths},
                               {"paths", s.divergence->paths},
                               {"probeBudget", s.divergence->probeBudget}};
    j["analyses"] = a;
    return j.dump(2) + "\n";
}

RunOutcome runScenario(const Scenario& s, const RunOptions& opts) {
    const std::uint64_t seed = opts.seedOverride.value_or(s.seed);
    const double scale = opts.unsafeBudgetScale;
    VerificationReport report;
    Json probeRows = Json::array();
    Json divergenceRows = Json::array();

    if (s.gundy) {
        const GundyAnalysis& g = *s.gundy;
        CheckResult agg;
        agg.name = "gundy-sweep";
        agg.bound = 1.0;
        agg.pass = true;
        agg.sampleSize = g.trees;
        const double qs[3] = {1.0, 2.0, NormedSpace::infinity()};
        for (std::size_t i = 0; i < g.trees; ++i) {
            const int depth = 3 + static_cast<int>(i % static_cast<std::size_t>(g.maxDepth - 2));
            const NormedSpace space(1 + static_cast<int>(i % static_cast<std::size_t>(g.maxDim)),
                                    qs[(i / 7) % 3]);
            const AdaptedProcess m =
                genRandomTreeMartingale(deriveSeed(seed, 10000 + i), depth, 2, space);
            const double e = treeMeanNorm(m, m.levelCount() - 1, space);
            if (e == 0.0) continue;
            const CheckResult c = checkGundyBounds(
                m, space, logLambdaGrid(e, g.lambdaPoints, g.lambdaDecades));
            agg.estimate = std::max(agg.estimate, c.estimate);
            agg.pass = agg.pass && c.pass;
        }
        agg.slack = 1.0 - agg.estimate;
        agg.detail = "worst exact LHS/RHS ratio over the tree sweep";
        report.checks.push_back(agg);
    }

    if (s.canonical) {
        const CanonicalAnalysis& c = *s.canonical;
        const CompositeModel model = s.compositeModel();
        const CanonicalEnsembleStats stats =
            canonicalEnsembleStats(model, s.ensemble, deriveSeed(seed, 1));
        report.checks.push_back(checkCanonicalMartingale(model, stats, c.martingaleSigmas));
        report.checks.push_back(checkPythagoras(stats, c.pythagorasSigmas));
        const MeanSe e = meanSe(stats.endNormM);
        if (e.mean > 0.0) {
            const std::vector<double> lambdas =
                logLambdaGrid(e.mean, c.lambdaPoints, c.lambdaDecades);
            for (const std::string& part : c.weakL1Parts)
                report.checks.push_back(
                    checkWeakL1Canonical(stats, part[0], lambdas, c.budgetC * scale));
        }
    }

    if (s.transform) {
        const TransformAnalysis& t = *s.transform;
        report.checks.push_back(checkWeakL1Transform(t.trees, t.depth, t.branching,
                                                     NormedSpace(s.dim, 2.0), t.budgetC * scale,
                                                     deriveSeed(seed, 2)));
    }

    for (std::size_t pi = 0; pi < s.probes.size(); ++pi) {
        const ProbeAnalysis& p = s.probes[pi];
        const ProbeMode mode = p.mode == "sign" ? ProbeMode::SignFlip : ProbeMode::ZeroOne;
        CheckResult mono;
        mono.name = "probe-monotone-" + std::to_string(pi);
        mono.pass = true;
        mono.bound = p.sanityCeiling;
        mono.sampleSize = p.depths.size();
        ProbeWitness warm;
        bool haveWarm = false;
        double prev = 0.0;
        const bool hilbert = p.q == 2.0 && p.p == 2.0;
        for (int depth : p.depths) {
            const NormedSpace space(depth, p.q);
            ProbeWitness padded;
            if (haveWarm) padded = padWitness(warm, depth, space.dim, mode);
            const ProbeResult r = probeUMDLowerBound(
                space, p.p, depth, p.budget,
                deriveSeed(seed, 100 + 64 * pi + static_cast<std::uint64_t>(depth)), mode,
                haveWarm ? &padded : nullptr);
            probeRows.push_back(
                Json{{"probe", pi}, {"depth", depth}, {"dim", space.dim}, {"bound", r.bound}});
            if (r.bound < prev - 1e-12 || r.bound > p.sanityCeiling) mono.pass = false;
            if (hilbert && std::abs(r.bound - 1.0) > 1e-12) mono.pass = false;
            prev = r.bound;
            mono.estimate = r.bound;
            warm = r.witness;
            haveWarm = true;
        }
        mono.slack = mono.bound - mono.estimate;
        mono.detail = hilbert ? "probed bounds (Hilbert case: must equal 1 to 1e-12)"
                              : "probed bounds must be nondecreasing and below the ceiling";
        report.checks.push_back(mono);
    }

    if (s.divergence) {
        const DivergenceAnalysis& d = *s.divergence;
        const std::vector<DivergenceRow> rows =
            divergenceDemo(d.depths, d.paths, deriveSeed(seed, 3), d.probeBudget);
        CheckResult endNorm;
        endNorm.name = "divergence-end-norm";
        endNorm.bound = 3.0 * scale;
        endNorm.pass = true;
        endNorm.sampleSize = d.paths;
        CheckResult growth;
        growth.name = "divergence-growth";
        growth.pass = true;
        growth.sampleSize = d.paths;
        double prevMedian = -1.0;
        for (const DivergenceRow& row : rows) {
            divergenceRows.push_back(Json{{"depth", row.depth},
                                          {"medianContSup", row.medianContSup},
                                          {"q90ContSup", row.q90ContSup},
                                          {"meanEndNorm", row.meanEndNorm},
                                          {"leakRate", row.leakRate},
                                          {"probedObjective", row.probedObjective}});
            endNorm.estimate = std::max(endNorm.estimate, row.meanEndNorm);
            if (row.meanEndNorm > endNorm.bound) endNorm.pass = false;
            if (row.medianContSup <= prevMedian) growth.pass = false;
            prevMedian = row.medianContSup;
            growth.estimate = row.medianContSup;
        }
        endNorm.slack = endNorm.bound - endNorm.estimate;
        endNorm.detail = "max over depths of mean ||M_end||";
        growth.bound = growth.estimate;
        growth.detail = "median continuous-part running sup must strictly increase with depth";
        report.checks.push_back(endNorm);
        report.checks.push_back(growth);
    }

    const std::string canonical = serializeScenario(s);
    RunOutcome out;
    out.report["version"] = "1";
    out.report["configHash"] = hex(fnv1a(canonical, fnv1a(std::to_string(seed))));
    out.report["seed"] = seed;
    if (scale != 1.0) out.report["unsafeBudgetScale"] = scale;
    out.report["scenario"] = Json::parse(canonical);
    Json checks = Json::array();
    for (const CheckResult& c : report.checks) checks.push_back(checkToJson(c));
    out.report["checks"] = checks;
    if (!s.probes.empty()) out.report["probe"] = probeRows;
    if (s.divergence) out.report["divergence"] = divergenceRows;
    out.report["allPass"] = report.allPass();
    out.exitCode = report.allPass() ? 0 : 1;
    out.reportPath = opts.outDir + "/report.json";
    std::ofstream file(out.reportPath, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write " + out.reportPath);
    file << out.report.dump(2) << "\n";
    return out;
}

std::string pathToCsv(const LabeledPath& path, std::size_t pathIndex) {
    static const char* names[4] = {"CONT", "QLC_JUMP", "QLC_DRIFT", "ACC_JUMP"};
    std::ostringstream out;
    out.precision(17);
    auto row = [&](std::size_t step, double time, const char* channel, const Vec& v) {
        out << pathIndex << "," << step << "," << time << "," << channel;
        for (double x : v) out << "," << x;
        out << "\n";
    };
    row(0, 0.0, "INIT", path.initial);
    for (std::size_t k = 0; k < path.stepCount(); ++k)
        for (const LabeledIncrement& inc : path.steps[k])
            row(k + 1, path.grid->times[k + 1], names[static_cast<int>(inc.channel)], inc.delta);
    return out.str();
}

}  // namespace martlab::cli
