#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hmc/config.hpp"
#include "hmc/errors.hpp"
#include "hmc/experiments.hpp"

namespace {

struct SubcommandArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::string seed;  // empty means "not given on the command line"
    std::vector<std::string> overrides;
};

using Runner = void (*)(hmc::RunConfig&, const std::filesystem::path&);

void add_subcommand(CLI::App& app, std::map<std::string, SubcommandArgs>& args,
                    const std::string& name, const std::string& description) {
    SubcommandArgs& a = args[name];
    CLI::App* sub = app.add_subcommand(name, description);
    sub->add_option("--config", a.config_path, "key = value config file");
    sub->add_option("--seed", a.seed, "seed override (same as a seed=N override)");
    sub->add_option("--out", a.out_dir, "output directory (default: current directory)");
    sub->add_option("overrides", a.overrides, "key=value overrides applied after the file");
}

int dispatch(Runner runner, const SubcommandArgs& a) {
    try {
        std::vector<std::string> overrides = a.overrides;
        if (!a.seed.empty()) overrides.push_back("seed=" + a.seed);
        hmc::RunConfig cfg = hmc::RunConfig::load(a.config_path, overrides);
        runner(cfg, a.out_dir);
        return 0;
    } catch (const hmc::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const hmc::ContractViolation& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const hmc::DomainError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const hmc::UnsupportedOperation& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const hmc::UnstableRegime& e) {
        std::fprintf(stderr, "statistical precondition failed: %s\n", e.what());
        return 3;
    } catch (const hmc::InsufficientSignal& e) {
        std::fprintf(stderr, "statistical precondition failed: %s\n", e.what());
        return 3;
    } catch (const hmc::DegenerateVariance& e) {
        std::fprintf(stderr, "statistical precondition failed: %s\n", e.what());
        return 3;
    } catch (const hmc::TargetExhaustion& e) {
        std::fprintf(stderr, "statistical precondition failed: %s\n", e.what());
        for (const auto& [target, divergences] : e.trace)
            std::fprintf(stderr, "  target %.4f: %ld divergent transitions\n", target,
                         divergences);
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"HMC step-size tuning experiments"};
    app.require_subcommand(1);

    std::map<std::string, SubcommandArgs> args;
    const std::vector<std::pair<std::string, std::pair<std::string, Runner>>> commands = {
        {"delta-scan",
         {"Monte Carlo vs closed-form mean energy error on the 1-D Gaussian",
          &hmc::run_delta_scan}},
        {"constraint-check",
         {"E[e^delta] = 1 identity and cumulant pair check over a step-size grid",
          &hmc::run_constraint_check}},
        {"bounds", {"cost bound tables and their optimal acceptance targets", &hmc::run_bounds}},
        {"gauss-experiment",
         {"acceptance curve and cost squeeze on a product Gaussian",
          &hmc::run_gauss_experiment}},
        {"funnel-scan",
         {"divergence scan and robust target search on the funnel", &hmc::run_funnel_scan}},
        {"sample", {"run HMC chains and write draws and transition records", &hmc::run_sample}},
        {"scaling", {"error-moment scaling exponents and alpha fits", &hmc::run_scaling}},
    };
    for (const auto& [name, cmd] : commands) add_subcommand(app, args, name, cmd.first);

    CLI11_PARSE(app, argc, argv);

    for (const auto& [name, cmd] : commands)
        if (app.got_subcommand(name)) return dispatch(cmd.second, args[name]);
    return 2;  // unreachable with require_subcommand(1)
}
