// netprice: simulate, calibrate, bound and oracle subcommands over a JSON run config.
#include <netprice/config.hpp>
#include <netprice/harness.hpp>
#include <netprice/oracle/brute_force.hpp>
#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

using namespace netprice;

namespace {

constexpr int exit_validation = 2;
constexpr int exit_runtime = 3;

int print_suite(const oracle::OracleSuite& suite) {
    std::cout << std::setprecision(10);
    for (const auto& c : suite.cases)
        std::cout << (c.pass ? "PASS " : "FAIL ") << suite.name << " " << c.label << ": value " << c.value
                  << " reference " << c.reference << "\n";
    std::cout << suite.name << ": " << (suite.cases.size() - suite.failures()) << "/" << suite.cases.size()
              << " passed\n";
    return suite.passed() ? 0 : exit_runtime;
}

int cmd_simulate(const std::string& config, const std::string& out) {
    const RunConfig cfg = load_config(config);
    const std::string dir = out.empty() ? cfg.output_path : out;
    const BatchResult res = run_batch(cfg, dir);
    const SummaryRow& last = res.summary.back();
    std::cout << "wrote " << res.traces.size() << " traces to " << dir << "\n"
              << "T=" << last.checkpoint << " median cum_regret " << last.median_cum_regret << " coverage "
              << last.coverage << "\n";
    return 0;
}

int cmd_calibrate(const std::string& config, double coverage, int pilot) {
    const RunConfig cfg = load_config(config);
    const CalibrationResult res = calibrate(cfg, coverage, pilot);
    for (const auto& s : res.steps)
        std::cerr << "factor " << s.factor << (s.passed ? " pass" : " fail") << " (" << s.failures << " misses in "
                  << s.episodes_run << " episodes)\n";
    RunConfig out = cfg;
    out.confidence.constants = res.constants;
    std::cout << to_json(out).at("confidence").dump(2) << "\n";
    return 0;
}

int cmd_bound(const std::string& config, const std::string& traces_dir) {
    const RunConfig cfg = load_config(config);
    const auto traces = read_traces(traces_dir);
    const auto rows = bound_report(cfg, traces);
    const std::string path = (std::filesystem::path(traces_dir) / "bound_report.csv").string();
    write_bound_csv(path, rows);
    std::cout << std::setprecision(6);
    std::cout << "checkpoint median_regret theorem_bound lemma1_realized exceedances(covered)/allowed\n";
    bool flagged = false;
    for (const auto& r : rows) {
        std::cout << r.checkpoint << " " << r.median_regret << " " << r.theorem_bound << " " << r.lemma1_realized_median
                  << " " << r.exceedances << "(" << r.covered_exceedances << ")/" << r.allowed_exceedances << "\n";
        flagged = flagged || r.covered_exceedances > 0;
    }
    if (flagged) std::cout << "warning: realized regret exceeded the Lemma-1 bound in a covered replication\n";
    std::cout << "wrote " << path << "\n";
    return 0;
}

int cmd_oracle(const std::string& check, const std::string& config) {
    const RunConfig cfg = load_config(config);
    const std::uint64_t seed = cfg.base_seed;
    if (check == "clairvoyant") return print_suite(oracle::clairvoyant_suite(20, seed));
    if (check == "theta-step") return print_suite(oracle::theta_step_suite(20, seed));
    if (check == "ofu") return print_suite(oracle::ofu_suite(10, seed, cfg.policy));
    const Scenario sc = build_scenario(cfg, 0);
    SamplerConfig chain = cfg.sampler;
    chain.chain_length = std::max(chain.chain_length, 200000);
    chain.burn_in = std::min(chain.burn_in, chain.chain_length / 10);
    return print_suite(oracle::prior_recovery_suite(sc.prior, sc.embeddings, chain, 200000, seed));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dynamic network pricing with PAC-Bayesian demand learning"};
    app.require_subcommand(1);

    std::string config, out, traces, check;
    double coverage = 0.95;
    int pilot = 20;

    auto* sim = app.add_subcommand("simulate", "Run a batch of seeded replications and write traces");
    sim->add_option("--config", config, "Run config (JSON)")->required()->check(CLI::ExistingFile);
    sim->add_option("--out", out, "Output directory (defaults to output_path in the config)");

    auto* cal = app.add_subcommand("calibrate", "Fit the radius scale to a target pilot coverage");
    cal->add_option("--config", config, "Run config (JSON)")->required()->check(CLI::ExistingFile);
    cal->add_option("--coverage", coverage, "Target coverage")->check(CLI::Range(0.0, 1.0));
    cal->add_option("--pilot", pilot, "Pilot replications")->check(CLI::PositiveNumber);

    auto* bnd = app.add_subcommand("bound", "Compare realized regret with the theoretical bounds");
    bnd->add_option("--config", config, "Run config (JSON)")->required()->check(CLI::ExistingFile);
    bnd->add_option("--traces", traces, "Directory of trace_{id}.csv files")->required()->check(CLI::ExistingDirectory);

    auto* orc = app.add_subcommand("oracle", "Run a brute-force oracle suite");
    orc->add_option("--check", check, "Suite to run")
        ->required()
        ->check(CLI::IsMember({"clairvoyant", "theta-step", "ofu", "posterior"}));
    orc->add_option("--config", config, "Run config (JSON)")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_validation;
    }

    try {
        if (*sim) return cmd_simulate(config, out);
        if (*cal) return cmd_calibrate(config, coverage, pilot);
        if (*bnd) return cmd_bound(config, traces);
        return cmd_oracle(check, config);
    } catch (const ParameterError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return exit_validation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_runtime;
    }
}
