#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "martlab/generators.hpp"
#include "martlab/space.hpp"
#include "martlab/verify.hpp"

namespace martlab::cli {

using Json = nlohmann::ordered_json;

// Level-lambda decomposition sweep over seeded random tree martingales.
struct GundyAnalysis {
    std::size_t trees = 1000;
    int maxDepth = 8;
    int maxDim = 4;
    int lambdaPoints = 40;
    double lambdaDecades = 4.0;
};

// Canonical split of the composite grid ensemble: martingale z-test,
// Pythagoras, and the weak-L1 bound for the chosen parts.
struct CanonicalAnalysis {
    double martingaleSigmas = 4.0;
    double pythagorasSigmas = 3.0;
    std::vector<std::string> weakL1Parts{"c", "q", "a"};
    double budgetC = 80.0;
    int lambdaPoints = 40;
    double lambdaDecades = 4.0;
};

struct TransformAnalysis {
    std::size_t trees = 10000;
    int depth = 6;
    int branching = 2;
    double budgetC = 80.0;
};

struct ProbeAnalysis {
    std::string mode = "sign";  // "sign" | "zero-one"
    double q = 2.0;             // norm exponent of the probed space (defaults to the scenario's)
    double p = 2.0;
    std::vector<int> depths{2, 4, 8};  // chained with nested warm starts
    std::size_t budget = 100000;
    double sanityCeiling = 1e6;
};

struct DivergenceAnalysis {
    std::vector<int> depths{4, 8, 12};
    std::size_t paths = 10000;
    std::size_t probeBudget = 0;
};

struct GeneratorSpec {
    Vec initial;  // empty = 0
    std::optional<ContinuousDriverSpec> cont;
    std::optional<CompensatorModel> poisson;
    std::vector<std::size_t> accIndices;
    std::optional<MarkLaw> accMarks;
};

struct Scenario {
    int dim = 3;
    double q = 2.0;  // 0 encodes "inf" on the wire
    std::string backend = "grid";
    std::uint64_t seed = 1;
    std::size_t ensemble = 100000;
    double horizon = 1.0;
    std::size_t steps = 200;
    GeneratorSpec generator;
    std::optional<GundyAnalysis> gundy;
    std::optional<CanonicalAnalysis> canonical;
    std::optional<TransformAnalysis> transform;
    std::vector<ProbeAnalysis> probes;
    std::optional<DivergenceAnalysis> divergence;

    NormedSpace space() const;
    CompositeModel compositeModel() const;
};

struct ParseError {
    std::string path;     // JSON path of the offending field
    std::string message;  // what constraint was violated
};

// Throws std::runtime_error carrying all diagnostics joined by newlines.
Scenario parseScenario(const std::string& text);
std::string serializeScenario(const Scenario& s);

struct RunOptions {
    std::string outDir = ".";
    std::optional<std::uint64_t> seedOverride;
    double unsafeBudgetScale = 1.0;  // testing hook: scales every budget C
};

struct RunOutcome {
    int exitCode = 0;
    Json report;
    std::string reportPath;
};

// Executes every configured analysis, writes <outDir>/report.json (byte-stable
// for a fixed scenario + seed; no wall-clock data in the file) and returns
// exit code 0 iff all non-vacuous checks pass.
RunOutcome runScenario(const Scenario& s, const RunOptions& opts);

// One CSV row per labeled increment: path,step,time,channel,c0..c{d-1};
// an "init" row carries the initial value.
std::string pathToCsv(const LabeledPath& path, std::size_t pathIndex);

}  // namespace martlab::cli
