/**
 * @file bench.hpp
 * @brief Benchmark problems (garnet, chain, file), the experiment config
 *        format and the sweep runner that writes per-cell CSV traces and a
 *        summary.
 *
 * Config format: `key = value` lines grouped under `[section]` headers,
 * `#` comments, comma-separated grids.
 *
 *     [problem]   kind = garnet|chain|file, n, controls, branching, slip,
 *                 alpha, seed, file
 *     [basis]     spec = <generator spec> | file = <path>
 *     [method]    evaluator, lambda, beta, iters, gamma, trajectory_budget,
 *                 long_trajectory_length, source = simulated|exact
 *     [run]       seeds, workers, out_dir
 */
#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "lambdapi/basis.hpp"
#include "lambdapi/bellman.hpp"
#include "lambdapi/error.hpp"
#include "lambdapi/evaluators.hpp"
#include "lambdapi/mdp.hpp"
#include "lambdapi/pi_driver.hpp"
#include "lambdapi/projection.hpp"
#include "lambdapi/rng.hpp"
#include "lambdapi/text.hpp"

namespace lambdapi {

// ---------------------------------------------------------------------------
// Problems

struct ProblemSpec {
    std::string kind = "garnet";  // garnet | chain | file
    std::size_t n = 20;
    std::size_t controls = 2;
    std::size_t branching = 3;
    double slip = 0.1;
    double alpha = 0.9;
    std::uint64_t seed = 1;
    std::string file;
};

/// Random garnet: every (i,u) gets `branching` distinct successors chosen
/// uniformly, Dirichlet(1) probabilities and standard normal costs.
inline Mdp garnet(std::size_t n, std::size_t controls, std::size_t branching, double alpha,
                  std::uint64_t seed) {
    if (n < 1 || controls < 1) throw DomainError("garnet needs n >= 1 and controls >= 1");
    if (branching < 1 || branching > n) throw DomainError("garnet needs 1 <= branching <= n");
    auto eng = RngStream{seed, 0x6761726e6574ULL}.engine();
    std::exponential_distribution<double> expo(1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<std::size_t> states(n);
    std::vector<std::vector<Control>> model(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t u = 0; u < controls; ++u) {
            for (std::size_t k = 0; k < n; ++k) states[k] = k;
            // partial Fisher-Yates: the first `branching` entries are the successors
            for (std::size_t k = 0; k < branching; ++k) {
                const std::size_t pick =
                    k + static_cast<std::size_t>(uniform01(eng) * double(n - k));
                std::swap(states[k], states[std::min(pick, n - 1)]);
            }
            std::vector<double> w(branching);
            double total = 0.0;
            for (auto& x : w) total += (x = expo(eng));
            Control c{static_cast<int>(u + 1), {}};
            for (std::size_t k = 0; k < branching; ++k)
                c.successors.push_back({states[k], w[k] / total, normal(eng)});
            // absorb the rounding into the largest entry so rows sum to 1
            double sum = 0.0;
            for (const auto& s : c.successors) sum += s.prob;
            auto big = std::max_element(c.successors.begin(), c.successors.end(),
                                        [](const Successor& a, const Successor& b) {
                                            return a.prob < b.prob;
                                        });
            big->prob += 1.0 - sum;
            model[i].push_back(std::move(c));
        }
    }
    return Mdp(std::move(model), alpha, std::max(n, kDefaultMaxStates));
}

/// Birth-death walk on 1..n: control 1 moves left, control 2 moves right,
/// with probability `slip` of moving the other way; moves are clamped at
/// the ends. Each transition costs 1 except arriving at state n, which is free.
inline Mdp chain(std::size_t n, double slip, double alpha) {
    if (n < 2) throw DomainError("chain needs n >= 2");
    if (!(slip >= 0.0 && slip <= 1.0)) throw DomainError("chain slip must lie in [0,1]");
    std::vector<std::vector<Control>> model(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t left = i == 0 ? 0 : i - 1;
        const std::size_t right = i + 1 == n ? i : i + 1;
        for (int label : {1, 2}) {
            const std::size_t to = label == 1 ? left : right;
            const std::size_t away = label == 1 ? right : left;
            std::map<std::size_t, double> row;
            if (slip < 1.0) row[to] += 1.0 - slip;
            if (slip > 0.0) row[away] += slip;
            Control c{label, {}};
            for (const auto& [j, p] : row) c.successors.push_back({j, p, j + 1 == n ? 0.0 : 1.0});
            model[i].push_back(std::move(c));
        }
    }
    return Mdp(std::move(model), alpha, std::max(n, kDefaultMaxStates));
}

inline Mdp generate_problem(const ProblemSpec& spec) {
    if (spec.kind == "garnet")
        return garnet(spec.n, spec.controls, spec.branching, spec.alpha, spec.seed);
    if (spec.kind == "chain") return chain(spec.n, spec.slip, spec.alpha);
    if (spec.kind == "file") return load_mdp(spec.file);
    throw DomainError("unknown problem kind '" + spec.kind + "'");
}

namespace detail {

inline std::size_t to_count(std::string_view v, const std::string& key) {
    const auto x = text::to_int(v);
    if (!x || *x < 0) throw ConfigError("'" + key + "' needs a non-negative integer, got '" +
                                        std::string(v) + "'");
    return static_cast<std::size_t>(*x);
}

inline double to_real(std::string_view v, const std::string& key) {
    const auto x = text::to_double(v);
    if (!x) throw ConfigError("'" + key + "' needs a number, got '" + std::string(v) + "'");
    return *x;
}

/// Applies one problem parameter; false if the key is unknown.
inline bool set_problem_param(ProblemSpec& spec, const std::string& key, std::string_view v) {
    if (key == "kind") spec.kind = std::string(v);
    else if (key == "n") spec.n = to_count(v, key);
    else if (key == "controls") spec.controls = to_count(v, key);
    else if (key == "branching") spec.branching = to_count(v, key);
    else if (key == "slip") spec.slip = to_real(v, key);
    else if (key == "alpha") spec.alpha = to_real(v, key);
    else if (key == "seed") spec.seed = to_count(v, key);
    else if (key == "file") spec.file = std::string(v);
    else return false;
    return true;
}

}  // namespace detail

/// Parameters for the gen-mdp command: `n=50,controls=4,branching=3,alpha=0.9`
/// for garnets, `n=10,slip=0.1` for chains, or a path for `file`.
inline ProblemSpec parse_problem_params(const std::string& kind, const std::string& params) {
    ProblemSpec spec;
    spec.kind = kind;
    if (kind == "file") {
        spec.file = params;
        return spec;
    }
    if (kind != "garnet" && kind != "chain") throw ConfigError("unknown problem kind '" + kind + "'");
    for (const auto part : text::split(params, ',')) {
        const auto item = text::trim(part);
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string_view::npos) throw ConfigError("expected key=value, got '" + std::string(item) + "'");
        const std::string key(text::trim(item.substr(0, eq)));
        if (key == "kind" || key == "file" || !detail::set_problem_param(spec, key, text::trim(item.substr(eq + 1))))
            throw ConfigError("unknown problem parameter '" + key + "'");
    }
    return spec;
}

// ---------------------------------------------------------------------------
// Experiment config

struct ExperimentConfig {
    ProblemSpec problem;
    std::string basis_spec = "identity";
    std::string basis_file;
    std::string evaluator = "lambda-pi-1";  // any evaluator key, or `lspi`
    std::vector<double> lambdas;
    std::vector<double> betas{0.0};
    std::vector<std::uint64_t> seeds{1};
    std::size_t iters = 20;
    double gamma = 1.0;
    std::size_t trajectory_budget = 10'000;
    std::size_t long_trajectory_length = 100'000;
    CoefficientSource source = CoefficientSource::Simulated;
    std::size_t workers = 1;
    std::string out_dir = "results";

    /// Throws ConfigError on any inconsistency.
    void validate() const {
        if (lambdas.empty()) throw ConfigError("lambda grid is empty");
        if (betas.empty()) throw ConfigError("beta grid is empty");
        if (seeds.empty()) throw ConfigError("seed list is empty");
        for (double l : lambdas)
            if (!(l >= 0.0 && l < 1.0))
                throw ConfigError("lambda values must lie in [0,1), got " + text::format_double(l));
        for (double b : betas)
            if (!(b >= 0.0 && b < 1.0))
                throw ConfigError("beta values must lie in [0,1), got " + text::format_double(b));
        if (evaluator != "lspi" && !parse_evaluator_key(evaluator))
            throw ConfigError("unknown evaluator '" + evaluator + "'");
        if (iters < 1) throw ConfigError("iters must be at least 1");
        if (!(gamma > 0.0 && gamma < 2.0)) throw ConfigError("gamma must lie in (0,2)");
        if (trajectory_budget < 1 || long_trajectory_length < 1)
            throw ConfigError("sample budgets must be positive");
        if (workers < 1) throw ConfigError("workers must be at least 1");
        if (out_dir.empty()) throw ConfigError("out_dir is empty");
        const auto& p = problem;
        if (p.kind == "file") {
            if (p.file.empty()) throw ConfigError("problem kind 'file' needs 'file'");
            if (!std::filesystem::is_regular_file(p.file))
                throw ConfigError("problem file '" + p.file + "' does not exist");
        } else if (p.kind == "garnet" || p.kind == "chain") {
            if (!(p.alpha > 0.0 && p.alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
            if (p.n < (p.kind == "chain" ? 2u : 1u)) throw ConfigError("n is too small");
            if (p.n > kDefaultMaxStates) throw ConfigError("n is above the state cap");
            if (p.kind == "garnet" && (p.controls < 1 || p.branching < 1 || p.branching > p.n))
                throw ConfigError("garnet needs controls >= 1 and 1 <= branching <= n");
            if (p.kind == "chain" && !(p.slip >= 0.0 && p.slip <= 1.0))
                throw ConfigError("chain slip must lie in [0,1]");
        } else {
            throw ConfigError("unknown problem kind '" + p.kind + "'");
        }
        if (!basis_file.empty() && !std::filesystem::is_regular_file(basis_file))
            throw ConfigError("basis file '" + basis_file + "' does not exist");
    }
};

namespace detail {

template <class T, class F>
std::vector<T> parse_grid(std::string_view v, const std::string& key, F conv) {
    std::vector<T> out;
    for (const auto part : text::split(v, ',')) {
        const auto item = text::trim(part);
        if (item.empty()) continue;
        out.push_back(conv(item, key));
    }
    return out;
}

}  // namespace detail

/// Parses the config text; relative file paths resolve against `base_dir`.
inline ExperimentConfig parse_experiment_config(std::istream& in,
                                                const std::filesystem::path& base_dir = {}) {
    ExperimentConfig cfg;
    std::string raw, section;
    std::size_t lineno = 0;
    std::set<std::string> seen;
    bool have_lambda = false;
    const auto where = [&] { return " (line " + std::to_string(lineno) + ")"; };
    const auto resolve = [&](std::string_view p) {
        const std::filesystem::path path{std::string(p)};
        return (path.is_absolute() || base_dir.empty() ? path : base_dir / path).string();
    };
    while (std::getline(in, raw)) {
        ++lineno;
        const auto line = text::strip_comment(raw);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("malformed section header" + where());
            section = std::string(text::trim(line.substr(1, line.size() - 2)));
            if (section != "problem" && section != "basis" && section != "method" && section != "run")
                throw ConfigError("unknown section [" + section + "]" + where());
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError("expected key = value" + where());
        if (section.empty()) throw ConfigError("key outside any section" + where());
        const std::string key(text::trim(line.substr(0, eq)));
        const auto v = text::trim(line.substr(eq + 1));
        const std::string full = section + "." + key;
        if (!seen.insert(full).second) throw ConfigError("duplicate key " + full + where());
        try {
            if (section == "problem") {
                if (key == "file") cfg.problem.file = resolve(v);
                else if (!detail::set_problem_param(cfg.problem, key, v))
                    throw ConfigError("unknown key " + full);
            } else if (section == "basis") {
                if (key == "spec") cfg.basis_spec = std::string(v);
                else if (key == "file") cfg.basis_file = resolve(v);
                else throw ConfigError("unknown key " + full);
            } else if (section == "method") {
                if (key == "evaluator") cfg.evaluator = std::string(v);
                else if (key == "lambda") {
                    cfg.lambdas = detail::parse_grid<double>(v, key, detail::to_real);
                    have_lambda = true;
                } else if (key == "beta") cfg.betas = detail::parse_grid<double>(v, key, detail::to_real);
                else if (key == "iters") cfg.iters = detail::to_count(v, key);
                else if (key == "gamma") cfg.gamma = detail::to_real(v, key);
                else if (key == "trajectory_budget") cfg.trajectory_budget = detail::to_count(v, key);
                else if (key == "long_trajectory_length") cfg.long_trajectory_length = detail::to_count(v, key);
                else if (key == "source") {
                    if (v == "simulated") cfg.source = CoefficientSource::Simulated;
                    else if (v == "exact") cfg.source = CoefficientSource::Exact;
                    else throw ConfigError("source must be 'simulated' or 'exact'");
                } else throw ConfigError("unknown key " + full);
            } else {
                if (key == "seeds")
                    cfg.seeds = detail::parse_grid<std::uint64_t>(v, key, detail::to_count);
                else if (key == "workers") cfg.workers = detail::to_count(v, key);
                else if (key == "out_dir") cfg.out_dir = std::string(v);
                else throw ConfigError("unknown key " + full);
            }
        } catch (const ConfigError& e) {
            throw ConfigError(e.what() + where());
        }
    }
    if (!have_lambda) throw ConfigError("missing [method] lambda grid");
    return cfg;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    return parse_experiment_config(in, std::filesystem::path(path).parent_path());
}

// ---------------------------------------------------------------------------
// Runner

struct CellResult {
    double lambda = 0.0;
    double beta = 0.0;
    std::uint64_t seed = 0;
    std::string file;  // CSV name inside out_dir
    PiTrace trace;
    std::optional<std::string> error;
};

struct ExperimentResult {
    std::vector<CellResult> cells;  // lambda-major, then beta, then seed
    int exit_code = 0;
};

inline std::string cell_file_name(double lambda, double beta, std::uint64_t seed) {
    return "cell_lambda" + text::format_double(lambda) + "_beta" + text::format_double(beta) +
           "_seed" + std::to_string(seed) + ".csv";
}

/// Writes via a temporary file and a rename so readers never see partial output.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write '" + tmp.string() + "'");
        out << contents;
        if (!out.flush()) throw Error("write to '" + tmp.string() + "' failed");
    }
    std::filesystem::rename(tmp, path);
}

namespace detail {

inline std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

inline bool samples_on_policy_chain(EvaluatorKey key) {
    return key == EvaluatorKey::Lstd || key == EvaluatorKey::LspeIter ||
           key == EvaluatorKey::LspeBatch || key == EvaluatorKey::LspeLs;
}

/// (1 - beta) xi_mu + beta uniform. A reducible chain has no strictly
/// positive xi_mu; uniform stands in for it then.
inline StateDistribution exploration_mixture(const Mdp& mdp, const Policy& mu, double beta) {
    const auto uniform = StateDistribution::uniform(mdp.num_states());
    std::optional<StateDistribution> found;
    try {
        found = stationary_distribution(mdp, mu);
    } catch (const ReducibleChainError&) {
        return uniform;
    }
    const auto& xi = *found;
    if (beta == 0.0) return xi;
    return mixture_distribution(xi, uniform, beta);
}

inline PiTrace run_cell(const Mdp& mdp, const FeatureBasis& basis, const CostVector& j_star,
                        const ExperimentConfig& cfg, double lambda, double beta,
                        std::uint64_t seed) {
    EvaluatorConfig ec;
    ec.lambda = lambda;
    ec.gamma = cfg.gamma;
    ec.trajectory_budget = cfg.trajectory_budget;
    ec.long_trajectory_length = cfg.long_trajectory_length;
    ec.source = cfg.source;
    ec.rng = RngStream{seed, 0};
    const WeightVector r0 = Vector::Zero(static_cast<Eigen::Index>(basis.dim()));

    // Methods that reuse one sample set draw it from the mixture of the first policy.
    if (cfg.evaluator == "lspi" || cfg.evaluator == "lambda-pi-0") {
        const auto dist = exploration_mixture(mdp, greedy_policy_from_weights(mdp, basis, r0), beta);
        if (cfg.evaluator == "lspi") {
            ec.restart_dist = dist;
            return lspi_preset(mdp, basis, ec, cfg.iters, j_star);
        }
        ec.explore_dist = dist;
        return approximate_pi(mdp, basis, EvaluatorKey::LambdaPiZero, ec, r0, cfg.iters, j_star);
    }
    const EvaluatorKey key = *parse_evaluator_key(cfg.evaluator);
    const auto eval = [&](const Policy& mu, const WeightVector& r, std::size_t k) {
        EvaluatorConfig local = ec;
        local.rng = ec.rng.substream(k);
        if (samples_on_policy_chain(key)) {
            if (beta > 0.0) local.explore_dist = exploration_mixture(mdp, mu, beta);
        } else {
            local.restart_dist = exploration_mixture(mdp, mu, beta);
        }
        return evaluate(key, mdp, mu, basis, local, r);
    };
    return run_policy_iteration(mdp, basis, eval, cfg.evaluator, r0, cfg.iters, j_star);
}

}  // namespace detail

inline constexpr const char* kSummaryCsvHeader =
    "lambda,beta,seed,evaluator,iterations,final_subopt_inf,best_subopt_inf,best_k,"
    "final_bellman_residual_inf,oscillation,status,error,file";

inline std::string summary_csv(const ExperimentConfig& cfg, const std::vector<CellResult>& cells) {
    std::ostringstream out;
    out << kSummaryCsvHeader << '\n';
    for (const auto& c : cells) {
        const auto& recs = c.trace.records;
        const auto* best = c.trace.best();
        out << text::format_double(c.lambda) << ',' << text::format_double(c.beta) << ','
            << c.seed << ',' << cfg.evaluator << ',' << recs.size() << ','
            << (recs.empty() ? "" : text::format_double(recs.back().subopt_inf)) << ','
            << (best ? text::format_double(best->subopt_inf) : "") << ','
            << (best ? std::to_string(best->k) : "") << ','
            << (recs.empty() ? "" : text::format_double(recs.back().bellman_residual_inf)) << ','
            << (c.trace.oscillation ? 1 : 0) << ',' << (c.error ? "error" : "ok") << ','
            << (c.error ? detail::csv_quote(*c.error) : "") << ',' << c.file << '\n';
    }
    return out.str();
}

/// Runs every (lambda, beta, seed) cell, writes one trace CSV per cell and
/// summary.csv into cfg.out_dir. Exit code 3 when every cell failed, else 0.
/// Config errors are thrown as ConfigError before any cell runs.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    std::optional<Mdp> mdp;
    std::optional<FeatureBasis> basis;
    try {
        mdp.emplace(generate_problem(cfg.problem));
        basis.emplace(cfg.basis_file.empty() ? make_basis(cfg.basis_spec, mdp->num_states())
                                             : load_basis(cfg.basis_file));
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    if (basis->num_states() != mdp->num_states())
        throw ConfigError("basis has n=" + std::to_string(basis->num_states()) + ", problem has " +
                          std::to_string(mdp->num_states()) + " states");
    const CostVector j_star = solve_optimal(*mdp).J;

    ExperimentResult result;
    for (double l : cfg.lambdas)
        for (double b : cfg.betas)
            for (auto s : cfg.seeds) {
                CellResult c;
                c.lambda = l;
                c.beta = b;
                c.seed = s;
                c.file = cell_file_name(l, b, s);
                result.cells.push_back(std::move(c));
            }
    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);

    std::atomic<std::size_t> next{0};
    const auto work = [&] {
        for (std::size_t idx = next++; idx < result.cells.size(); idx = next++) {
            auto& c = result.cells[idx];
            try {
                c.trace = detail::run_cell(*mdp, *basis, j_star, cfg, c.lambda, c.beta, c.seed);
                c.trace.evaluator = cfg.evaluator;
                c.error = c.trace.error;
            } catch (const std::exception& e) {
                c.trace.evaluator = cfg.evaluator;
                c.error = e.what();
            }
            std::ostringstream csv;
            write_trace_csv(csv, c.trace, c.lambda, c.beta, c.seed);
            try {
                write_file_atomic(dir / c.file, csv.str());
            } catch (const std::exception& e) {
                c.error = std::string(c.error ? *c.error + "; " : "") + e.what();
            }
        }
    };
    const std::size_t workers = std::min(cfg.workers, result.cells.size());
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    write_file_atomic(dir / "summary.csv", summary_csv(cfg, result.cells));
    const bool all_failed = std::all_of(result.cells.begin(), result.cells.end(),
                                        [](const CellResult& c) { return c.error.has_value(); });
    result.exit_code = all_failed ? 3 : 0;
    return result;
}

}  // namespace lambdapi
