// Command-line front end: single-point evaluation with any engine, parameter
// sweeps and the three-way validation harness.
//
//   retrial analytic <config> [--format csv|json] [--output path] [--engines a,s,o] [--seed n]
//   retrial simulate <config> ...
//   retrial oracle   <config> ...
//   retrial sweep    <config> ...
//   retrial validate <config> ...
//
// Exit status: 0 success, 1 validation failure, 2 config error (including an
// unstable or unsupported model), 3 numeric error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "retrial/cli/config.hpp"
#include "retrial/cli/report.hpp"
#include "retrial/cli/runner.hpp"

namespace {

using namespace retrial;

enum ExitCode { ok = 0, validation_failed = 1, config_error = 2, numeric_error = 3 };

struct Options {
    std::string config_path;
    std::string output;
    std::string format;
    std::string engines;
    std::optional<std::uint64_t> seed;
};

cli::RunConfig load(const Options& o) {
    std::ifstream in(o.config_path);
    if (!in) throw ConfigError("", "cannot read config file '" + o.config_path + "'");
    std::stringstream text;
    text << in.rdbuf();
    cli::RunConfig cfg = cli::parse_config(text.str());
    if (!o.format.empty()) {
        cli::check_format(o.format, "--format");
        cfg.format = o.format;
    }
    if (!o.output.empty()) cfg.output = o.output;
    if (o.seed) {
        if (!cfg.sim) cfg.sim = sim::SimConfig{};
        cfg.sim->seed = *o.seed;
    }
    return cfg;
}

template <class Writer>
void emit(const cli::RunConfig& cfg, Writer&& write) {
    if (cfg.output.empty()) {
        write(std::cout);
        return;
    }
    std::ofstream out(cfg.output);
    if (!out) throw ConfigError("output", "cannot open '" + cfg.output + "' for writing");
    write(out);
}

int run(const std::string& command, const Options& o) {
    const cli::RunConfig cfg = load(o);
    if (command == "validate") {
        const auto report = cli::validate(cfg);
        emit(cfg, [&](std::ostream& os) { cli::write_report(os, report, cfg.format); });
        return report.passed() ? ok : validation_failed;
    }

    std::vector<cli::ResultRow> rows;
    if (command == "sweep") {
        if (!cfg.sweep) throw ConfigError("sweep", "sweep block missing");
        cli::SweepSpec spec = *cfg.sweep;
        if (!o.engines.empty()) spec.engines = cli::parse_engine_list(o.engines);
        rows = cli::run_sweep(cfg, spec);
    } else {
        std::vector<cli::Engine> engines{cli::parse_engine(command, command)};
        if (!o.engines.empty()) engines = cli::parse_engine_list(o.engines);
        rows = cli::run_point(cfg, engines);
    }
    emit(cfg, [&](std::ostream& os) { cli::write_rows(os, rows, cfg.format); });
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Steady-state analysis of an unreliable M/G/1 retrial queue with coupled switching"};
    app.require_subcommand(1);

    Options opts;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"analytic", "closed-form metrics"},
        {"simulate", "discrete-event simulation with confidence intervals"},
        {"oracle", "truncated CTMC solution (exponential laws only)"},
        {"sweep", "evaluate the engines over the config's sweep grid"},
        {"validate", "cross-check analytic, oracle and simulation results"}};
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("config", opts.config_path, "JSON run configuration")->required();
        sub->add_option("--output", opts.output, "write results to this path instead of stdout");
        sub->add_option("--format", opts.format, "csv or json");
        sub->add_option("--engines", opts.engines, "comma-separated subset of a,s,o");
        sub->add_option("--seed", opts.seed, "simulation base seed (overrides the config)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : config_error;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return run(command, opts);
    } catch (const StabilityError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return config_error;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const UnsupportedModelError& e) {
        std::cerr << "unsupported model: " << e.what() << '\n';
        return config_error;
    } catch (const ParameterError& e) {
        std::cerr << "parameter error: " << e.what() << '\n';
        return config_error;
    } catch (const Error& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return numeric_error;
    }
}
