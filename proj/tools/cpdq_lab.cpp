#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cpdq/acceptance.hpp"
#include "cpdq/scenario.hpp"

namespace {

using namespace cpdq;

void print_checks(const std::vector<acceptance::Check>& checks)
{
    for (const auto& c : checks) {
        std::printf("  %-4s %-64s %-12.6g %s %-10.3g\n", c.pass ? "ok" : "FAIL", c.name.c_str(), c.value,
                    acceptance::relation_symbol(c.relation).c_str(), c.tolerance);
    }
}

int suite_command(const std::string& filter, const std::string& out, const std::vector<std::string>& overrides)
{
    auto tol = acceptance::default_tolerances();
    for (const auto& o : overrides) {
        acceptance::apply_override(tol, o);
    }
    const auto res = scenario::run_suite(filter, tol, out.empty() ? "cpdq-lab-out/suite" : out);
    std::printf("%-4s %-6s %-64s %-12s    %-10s\n", "id", "result", "criterion / check", "measured", "tolerance");
    for (const auto& crit : res.report.at("criteria")) {
        const bool pass = crit.at("pass").get<bool>();
        std::printf("c%-3d %-6s %s\n", crit.at("id").get<int>(), pass ? "PASS" : "FAIL",
                    crit.at("name").get<std::string>().c_str());
        if (!crit.at("error").get<std::string>().empty()) {
            std::printf("  error: %s\n", crit.at("error").get<std::string>().c_str());
        }
        for (const auto& k : crit.at("checks")) {
            std::printf("  %-4s %-64s %-12.6g %s %-10.3g\n", k.at("pass").get<bool>() ? "ok" : "FAIL",
                        k.at("name").get<std::string>().c_str(), k.at("value").get<double>(),
                        k.at("relation").get<std::string>().c_str(), k.at("tolerance").get<double>());
        }
    }
    for (const auto& t : res.timing.at("criteria")) {
        if (!t.at("runtime_ok").get<bool>()) {
            std::printf("c%-3d FAIL runtime %.3f s exceeds %.3f s\n", t.at("id").get<int>(), t.at("seconds").get<double>(),
                        t.at("runtime_limit").get<double>());
        }
    }
    const std::size_t n = res.report.at("criteria").size();
    if (n == 0) {
        std::fprintf(stderr, "no criterion matches filter '%s'\n", filter.c_str());
        return scenario::exit_config;
    }
    std::printf("%s: %zu criteria, report in %s\n", res.pass ? "PASS" : "FAIL", n, res.out_dir.string().c_str());
    return res.pass ? scenario::exit_pass : scenario::exit_check;
}

int run_command(const std::string& path, const std::string& out, const std::vector<std::string>& overrides)
{
    const auto cfg = scenario::load_config(path);
    scenario::RunOptions opts;
    opts.out_dir = out;
    opts.tolerance_overrides = overrides;
    const auto res = scenario::run_config(cfg, opts);
    if (cfg.at("kind") == "suite") {
        for (const auto& crit : res.report.at("criteria")) {
            std::printf("c%-3d %-6s %s\n", crit.at("id").get<int>(), crit.at("pass").get<bool>() ? "PASS" : "FAIL",
                        crit.at("name").get<std::string>().c_str());
        }
    } else {
        print_checks(res.checks);
    }
    std::printf("%s: %s, report in %s\n", res.pass ? "PASS" : "FAIL", cfg.at("kind").get<std::string>().c_str(),
                res.out_dir.string().c_str());
    return res.pass ? scenario::exit_pass : scenario::exit_check;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"cpdq-lab: scenario runner for the constant p delta_q formulation of mechanics"};
    app.require_subcommand(1);

    std::string config;
    std::string out;
    std::string filter;
    std::vector<std::string> overrides;

    auto* run = app.add_subcommand("run", "run one scenario config");
    run->add_option("config", config, "scenario JSON file")->required();
    run->add_option("--out", out, "output directory");
    run->add_option("--tolerance-override", overrides, "NAME=VALUE, repeatable");

    auto* suite = app.add_subcommand("suite", "run the acceptance criteria");
    suite->add_option("--filter", filter, "tag (variational, dynamics, thermo, quantum, info) or id (c1..c12)");
    suite->add_option("--out", out, "output directory");
    suite->add_option("--tolerance-override", overrides, "NAME=VALUE, repeatable");

    app.add_subcommand("schema", "print the config schema");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return scenario::exit_config;
    }

    try {
        if (run->parsed()) {
            return run_command(config, out, overrides);
        }
        if (suite->parsed()) {
            return suite_command(filter, out, overrides);
        }
        std::cout << scenario::schema().dump(2) << "\n";
        return scenario::exit_pass;
    } catch (const scenario::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return scenario::exit_config;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return scenario::exit_config;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "computation error: %s\n", e.what());
        return scenario::exit_computation;
    }
}
