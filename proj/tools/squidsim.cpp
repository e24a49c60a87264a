// squidsim command-line front end.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "squidsim/scenarios.hpp"

namespace {

enum Exit { ok = 0, failure = 1, config_error = 2, convergence_failure = 3, io_failure = 4 };

struct Options {
    std::string config;
    long dim = 0;
    std::string out;
    std::string format;
};

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--config", o.config, "flat key = value config or a metadata.json");
    cmd->add_option("--dim", o.dim, "fixed Fock dimension (disables convergence search)")->check(CLI::PositiveNumber);
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--format", o.format, "csv or json-bundle")->check(CLI::IsMember({"csv", "json-bundle"}));
}

int run(const std::string& name, const Options& o) {
    squid::ConfigMap config;
    if (!o.config.empty()) config = squid::load_config(o.config);
    squid::ScenarioSpec spec = squid::make_spec(name, config);
    if (o.dim > 0) {
        spec.dim = o.dim;
        spec.converge = false;
    }
    if (!o.out.empty()) spec.out_dir = o.out;
    if (!o.format.empty()) spec.format = o.format;
    squid::validate_spec(spec);

    const squid::Dataset data = squid::run_scenario(spec);
    for (const auto& w : data.metadata["warnings"]) std::cerr << "warning: " << w.get<std::string>() << '\n';
    const auto written = squid::emit_dataset(data, spec.format, spec.out_dir);
    std::cout << spec.name << ": wrote " << written.size() << " files to " << spec.out_dir << '\n';
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum SQUID ring simulator"};
    app.require_subcommand(1);

    Options opts;
    std::string scenario;
    auto* sc = app.add_subcommand("scenario", "run a named scenario");
    sc->add_option("name", scenario, "scenario name")->required()->check(CLI::IsMember(squid::scenario_names()));
    add_common(sc, opts);

    for (const auto& c : squid::command_names()) add_common(app.add_subcommand(c, c + " run"), opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : config_error;
    }

    const CLI::App* chosen = app.get_subcommands().front();
    const std::string name = chosen->get_name() == "scenario" ? scenario : chosen->get_name();
    try {
        return run(name, opts);
    } catch (const squid::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const squid::ParameterError& e) {
        std::cerr << "parameter error: " << e.what() << '\n';
        return config_error;
    } catch (const squid::DomainError& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return config_error;
    } catch (const squid::GridError& e) {
        std::cerr << "grid error: " << e.what() << '\n';
        return config_error;
    } catch (const squid::ConvergenceError& e) {
        std::cerr << "convergence failure: " << e.what() << '\n';
        return convergence_failure;
    } catch (const squid::TruncationError& e) {
        std::cerr << "truncation failure: " << e.what() << '\n';
        return convergence_failure;
    } catch (const squid::DegeneracyError& e) {
        std::cerr << "degeneracy: " << e.what() << '\n';
        return convergence_failure;
    } catch (const squid::StepSizeError& e) {
        std::cerr << "integration failure: " << e.what() << '\n';
        return convergence_failure;
    } catch (const squid::IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return io_failure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return failure;
    }
}
