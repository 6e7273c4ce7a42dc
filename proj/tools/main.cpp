#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "martlab/rng.hpp"
#include "scenario.hpp"

namespace {

using namespace martlab;
using namespace martlab::cli;

std::string readFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

int cmdRun(const std::string& scenarioPath, const RunOptions& opts) {
    const Scenario s = parseScenario(readFile(scenarioPath));
    const auto start = std::chrono::steady_clock::now();
    const RunOutcome outcome = runScenario(s, opts);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    // runtime goes to the log, never into the report, so reruns are byte-identical
    std::cerr << "wrote " << outcome.reportPath << " in " << ms << " ms\n";
    for (const auto& c : outcome.report["checks"])
        std::cout << (c["pass"].get<bool>() ? "PASS" : "FAIL") << "  "
                  << c["name"].get<std::string>() << "  (estimate "
                  << c["estimate"].get<double>() << ", bound " << c["bound"].get<double>()
                  << ")\n";
    return outcome.exitCode;
}

int cmdProbe(double q, int dim, double p, int depth, std::size_t budget, std::uint64_t seed,
             const std::string& mode) {
    const NormedSpace space(dim, q);
    const ProbeMode m = mode == "zero-one" ? ProbeMode::ZeroOne : ProbeMode::SignFlip;
    const ProbeResult r = probeUMDLowerBound(space, p, depth, budget, seed, m);
    Json out;
    out["bound"] = r.bound;
    out["depth"] = depth;
    out["dim"] = dim;
    out["evaluations"] = r.evaluations;
    out["coeff"] = r.witness.coeff;
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmdSimulate(const std::string& scenarioPath, std::size_t paths, const std::string& csvPath) {
    const Scenario s = parseScenario(readFile(scenarioPath));
    const CompositeModel model = s.compositeModel();
    std::ofstream out(csvPath, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + csvPath);
    out << "path,step,time,channel";
    for (int j = 0; j < s.dim; ++j) out << ",c" << j;
    out << "\n";
    for (std::size_t i = 0; i < paths; ++i)
        out << pathToCsv(genComposite(model, deriveSeed(s.seed, 1), i), i);
    std::cerr << "wrote " << paths << " paths to " << csvPath << "\n";
    return 0;
}

int cmdReport(const std::string& reportPath) {
    const Json report = Json::parse(readFile(reportPath));
    std::cout << "seed " << report["seed"] << ", config " << report["configHash"] << "\n";
    for (const auto& c : report["checks"])
        std::cout << (c["pass"].get<bool>() ? "PASS" : "FAIL") << "  "
                  << c["name"].get<std::string>() << "  estimate=" << c["estimate"]
                  << " bound=" << c["bound"] << " slack=" << c["slack"] << "\n";
    std::cout << (report["allPass"].get<bool>() ? "all checks passed" : "FAILURES present")
              << "\n";
    return report["allPass"].get<bool>() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"martlab: martingale decomposition and inequality laboratory"};
    app.require_subcommand(1);

    std::string scenarioPath, outDir = ".", csvPath = "paths.csv", reportPath, mode = "sign";
    std::uint64_t seed = 1;
    bool haveSeed = false;
    double unsafeScale = 1.0, q = 2.0, p = 2.0;
    int dim = 2, depth = 4, jobs = 1;
    std::size_t budget = 10000, paths = 10;

    CLI::App* run = app.add_subcommand("run", "run a scenario and write report.json");
    run->add_option("scenario", scenarioPath, "scenario JSON file")->required();
    run->add_option("--seed", seed, "override the scenario seed")->each([&](const std::string&) {
        haveSeed = true;
    });
    run->add_option("--out", outDir, "output directory");
    run->add_option("--jobs", jobs, "reserved; analyses run in a deterministic order");
    run->add_option("--unsafe-budget-scale", unsafeScale,
                    "testing hook: scale every bound budget (failure-path testing only)");

    CLI::App* probe = app.add_subcommand("probe", "search for an unconditionality-constant witness");
    probe->add_option("--q", q, "norm exponent (use inf via --q-inf)");
    bool qInf = false;
    probe->add_flag("--q-inf", qInf, "use the max norm");
    probe->add_option("--dim", dim, "space dimension")->required();
    probe->add_option("--p", p, "moment exponent");
    probe->add_option("--depth", depth, "tree depth")->required();
    probe->add_option("--budget", budget, "search iterations");
    probe->add_option("--seed", seed, "search seed");
    probe->add_option("--mode", mode, "sign | zero-one");

    CLI::App* simulate = app.add_subcommand("simulate", "export ensemble paths as CSV");
    simulate->add_option("scenario", scenarioPath, "scenario JSON file")->required();
    simulate->add_option("--paths", paths, "number of paths");
    simulate->add_option("--csv", csvPath, "output CSV file");

    CLI::App* report = app.add_subcommand("report", "summarize a report.json");
    report->add_option("report", reportPath, "report JSON file")->required();

    CLI11_PARSE(app, argc, argv);
    try {
        if (run->parsed()) {
            martlab::cli::RunOptions opts;
            opts.outDir = outDir;
            if (haveSeed) opts.seedOverride = seed;
            opts.unsafeBudgetScale = unsafeScale;
            return cmdRun(scenarioPath, opts);
        }
        if (probe->parsed())
            return cmdProbe(qInf ? martlab::NormedSpace::infinity() : q, dim, p, depth, budget,
                            seed, mode);
        if (simulate->parsed()) return cmdSimulate(scenarioPath, paths, csvPath);
        if (report->parsed()) return cmdReport(reportPath);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
