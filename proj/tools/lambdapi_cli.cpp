// Command-line harness: problem and basis generation, config validation and
// experiment sweeps.
//
// Exit codes: 0 success, 2 config or usage error, 3 every cell failed,
// 1 other runtime failure.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "lambdapi/lambdapi.hpp"

namespace {

constexpr int kExitConfig = 2;

void apply_overrides(lambdapi::ExperimentConfig& cfg, const std::optional<std::uint64_t>& seed,
                     const std::optional<std::size_t>& workers, const std::string& out_dir) {
    if (seed) cfg.seeds = {*seed};
    if (workers) cfg.workers = *workers;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lambdapi: approximate lambda-policy-iteration experiments"};
    app.require_subcommand(1);
    app.fallthrough();

    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
    std::string out_dir;
    app.add_option("--seed", seed, "Seed (run: replaces the seed list; gen-mdp: problem seed)");
    app.add_option("--workers", workers, "Parallel experiment cells");
    app.add_option("--out-dir", out_dir, "Output directory for run");

    std::string config_path;
    auto* run = app.add_subcommand("run", "Run an experiment config");
    run->add_option("config", config_path, "Config file")->required();

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "Check a config without running it");
    validate->add_option("config", validate_path, "Config file")->required();

    std::string kind, params, mdp_out;
    auto* gen_mdp = app.add_subcommand("gen-mdp", "Generate a benchmark MDP file");
    gen_mdp->add_option("kind", kind, "garnet | chain")->required();
    gen_mdp->add_option("params", params, "e.g. n=50,controls=4,branching=3,alpha=0.9")->required();
    gen_mdp->add_option("-o,--output", mdp_out, "Output file")->required();

    std::string spec, basis_out, basis_mdp;
    std::size_t basis_n = 0;
    auto* gen_basis = app.add_subcommand("gen-basis", "Write a feature basis file");
    gen_basis->add_option("spec", spec, "identity | poly:<d> | indicator:<k> | random:<seed>[:<s>]")
        ->required();
    gen_basis->add_option("--n", basis_n, "Number of states");
    gen_basis->add_option("--mdp", basis_mdp, "Take the number of states from an MDP file");
    gen_basis->add_option("-o,--output", basis_out, "Output file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*run || *validate) {
            const auto& path = *run ? config_path : validate_path;
            auto cfg = lambdapi::load_experiment_config(path);
            apply_overrides(cfg, seed, workers, out_dir);
            cfg.validate();
            if (*validate) {
                std::cout << "ok: " << cfg.lambdas.size() * cfg.betas.size() * cfg.seeds.size()
                          << " cells\n";
                return 0;
            }
            const auto res = lambdapi::run_experiment(cfg);
            std::size_t failed = 0;
            for (const auto& c : res.cells)
                if (c.error) {
                    ++failed;
                    std::cerr << "cell lambda=" << c.lambda << " beta=" << c.beta
                              << " seed=" << c.seed << ": " << *c.error << '\n';
                }
            std::cout << res.cells.size() - failed << "/" << res.cells.size()
                      << " cells ok, output in " << cfg.out_dir << '\n';
            return res.exit_code;
        }
        if (*gen_mdp) {
            auto problem = lambdapi::parse_problem_params(kind, params);
            if (seed) problem.seed = *seed;
            const auto mdp = lambdapi::generate_problem(problem);
            lambdapi::write_file_atomic(mdp_out, lambdapi::to_string(mdp));
            return 0;
        }
        if (*gen_basis) {
            std::size_t n = basis_n;
            if (!basis_mdp.empty()) n = lambdapi::load_mdp(basis_mdp).num_states();
            if (n == 0) throw lambdapi::ConfigError("gen-basis needs --n or --mdp");
            std::ostringstream text;
            lambdapi::write_basis(text, lambdapi::make_basis(spec, n));
            lambdapi::write_file_atomic(basis_out, text.str());
            return 0;
        }
    } catch (const lambdapi::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const lambdapi::ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const lambdapi::DomainError& e) {
        std::cerr << "invalid parameters: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
