/**
 * @file pi_driver.hpp
 * @brief Approximate policy iteration: greedy improvement from Phi r, a
 *        pluggable evaluator, exact-cost diagnostics per iteration, cycle
 *        detection and the LSPI preset.
 */
#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lambdapi/basis.hpp"
#include "lambdapi/bellman.hpp"
#include "lambdapi/error.hpp"
#include "lambdapi/evaluators.hpp"
#include "lambdapi/linalg.hpp"
#include "lambdapi/mdp.hpp"
#include "lambdapi/text.hpp"
#include "lambdapi/trajectory.hpp"

namespace lambdapi {

/// mu(i) in argmin_u sum_j p_ij(u) (g(i,u,j) + alpha phi(j)'r), lowest index on ties.
inline Policy greedy_policy_from_weights(const Mdp& mdp, const FeatureBasis& basis,
                                         const WeightVector& r) {
    detail::require_basis(basis, mdp);
    return apply_T(mdp, basis.values(r)).mu;
}

struct PiRecord {
    std::size_t k = 0;  // 1-based
    Policy mu;          // mu_k, greedy from r_{k-1}
    WeightVector r;     // r_k, evaluation of mu_k
    CostVector J_mu;    // exact cost of mu_k
    double exact_residual = 0.0;    // |(I - alpha P) J_mu - g|_inf
    double subopt_inf = 0.0;        // |J_mu - J*|_inf
    double bellman_residual_inf = 0.0;  // |T(Phi r_k) - Phi r_k|_inf
    bool policy_changed = true;     // mu_k != mu_{k-1}; true for k = 1
    EvaluationDiagnostics diagnostics;
};

struct PiTrace {
    std::string evaluator;
    WeightVector r0;
    std::vector<PiRecord> records;
    bool oscillation = false;
    /// first (k, k') with mu_k == mu_k' and k' - k >= 2
    std::optional<std::pair<std::size_t, std::size_t>> cycle;
    std::optional<std::size_t> best_index;  // index into records
    std::optional<std::string> error;       // evaluator failure that ended the loop

    const PiRecord* best() const { return best_index ? &records[*best_index] : nullptr; }
};

/// Policy evaluation step: (mu_k, r_{k-1}, k) -> result.
using PolicyEvaluator =
    std::function<EvaluationResult(const Policy&, const WeightVector&, std::size_t)>;

/// Generic loop: mu_{k+1} = greedy(r_k), r_{k+1} = evaluate(mu_{k+1}, r_k).
inline PiTrace run_policy_iteration(const Mdp& mdp, const FeatureBasis& basis,
                                    const PolicyEvaluator& evaluate_policy, std::string name,
                                    const WeightVector& r0, std::size_t iters,
                                    const std::optional<CostVector>& j_star = std::nullopt) {
    detail::require_basis(basis, mdp);
    detail::check_weights(basis, r0, "r0");
    const CostVector opt = j_star ? *j_star : solve_optimal(mdp).J;
    check_cost_vector(mdp, opt, "J*");
    PiTrace trace;
    trace.evaluator = std::move(name);
    trace.r0 = r0;
    std::map<std::vector<std::size_t>, std::size_t> seen;  // policy -> first k
    WeightVector r = r0;
    for (std::size_t k = 1; k <= iters; ++k) {
        PiRecord rec;
        rec.k = k;
        rec.mu = greedy_policy_from_weights(mdp, basis, r);
        rec.policy_changed = trace.records.empty() || !(trace.records.back().mu == rec.mu);
        const auto [it, inserted] = seen.emplace(rec.mu.choices(), k);
        if (!inserted && k - it->second >= 2 && !trace.cycle) {
            trace.oscillation = true;
            trace.cycle = std::make_pair(it->second, k);
        }
        EvaluationResult res;
        try {
            res = evaluate_policy(rec.mu, r, k);
        } catch (const Error& e) {
            trace.error = "iteration " + std::to_string(k) + ": " + e.what();
            break;
        }
        r = res.r;
        rec.r = res.r;
        const auto pm = policy_matrices(mdp, rec.mu);
        rec.J_mu = policy_cost(pm, mdp.alpha());
        rec.exact_residual = sup_norm(rec.J_mu - mdp.alpha() * (pm.P * rec.J_mu) - pm.gbar);
        rec.subopt_inf = sup_norm(rec.J_mu - opt);
        const Vector values = basis.values(r);
        rec.bellman_residual_inf = sup_norm(apply_T(mdp, values).J - values);
        rec.diagnostics = std::move(res.diagnostics);
        if (!trace.best_index || rec.subopt_inf < trace.records[*trace.best_index].subopt_inf)
            trace.best_index = trace.records.size();
        trace.records.push_back(std::move(rec));
    }
    return trace;
}

/// Approximate PI with a registered evaluator. Iteration k draws from
/// cfg.rng.substream(k); lambda-pi-0 freezes one transition sample set for
/// the whole run unless the caller supplied one.
inline PiTrace approximate_pi(const Mdp& mdp, const FeatureBasis& basis, EvaluatorKey key,
                              const EvaluatorConfig& cfg, std::optional<WeightVector> r0,
                              std::size_t iters,
                              const std::optional<CostVector>& j_star = std::nullopt) {
    cfg.validate();
    const WeightVector start =
        r0 ? *r0 : WeightVector(Vector::Zero(static_cast<Eigen::Index>(basis.dim())));
    std::optional<TransitionSampleSet> frozen;
    if (key == EvaluatorKey::LambdaPiZero && cfg.source == CoefficientSource::Simulated &&
        !cfg.frozen_samples)
        frozen = sample_transition_set(mdp, detail::or_uniform(cfg.explore_dist, mdp.num_states()),
                                       cfg.trajectory_budget, cfg.rng.substream(0));
    const auto eval = [&](const Policy& mu, const WeightVector& r, std::size_t k) {
        EvaluatorConfig local = cfg;
        local.rng = cfg.rng.substream(k);
        if (frozen) local.frozen_samples = &*frozen;
        return evaluate(key, mdp, mu, basis, local, r);
    };
    return run_policy_iteration(mdp, basis, eval, std::string(evaluator_name(key)), start, iters,
                                j_star);
}

/// Approximate PI with LSTD(0) on one frozen transition set drawn from the
/// restart distribution: each policy selects its own single-transition
/// restarts from the same stored samples.
inline PiTrace lspi_preset(const Mdp& mdp, const FeatureBasis& basis, const EvaluatorConfig& cfg,
                           std::size_t iters,
                           const std::optional<CostVector>& j_star = std::nullopt) {
    cfg.validate();
    if (!cfg.restart_dist) throw DomainError("LSPI needs a restart distribution");
    const TransitionSampleSet owned =
        cfg.frozen_samples ? TransitionSampleSet{}
                           : sample_transition_set(mdp, *cfg.restart_dist, cfg.trajectory_budget,
                                                   cfg.rng.substream(0));
    const TransitionSampleSet& set = cfg.frozen_samples ? *cfg.frozen_samples : owned;
    const auto eval = [&](const Policy& mu, const WeightVector&, std::size_t) {
        auto res = explore_lstd_on_batch(set.batch_for(mdp, mu), basis, mdp.alpha());
        res.diagnostics.sample_fingerprint = set.fingerprint();
        return res;
    };
    return run_policy_iteration(mdp, basis, eval, "lspi",
                                Vector::Zero(static_cast<Eigen::Index>(basis.dim())), iters, j_star);
}

inline constexpr const char* kTraceCsvHeader =
    "k,lambda,beta,seed,evaluator,bellman_residual_inf,exact_subopt_inf,policy_changed,"
    "cond_estimate,samples_used";

/// One CSV row per iteration; samples_used is the per-iteration sample count.
inline void write_trace_csv(std::ostream& out, const PiTrace& trace, double lambda, double beta,
                            std::uint64_t seed) {
    out << kTraceCsvHeader << '\n';
    for (const auto& rec : trace.records)
        out << rec.k << ',' << text::format_double(lambda) << ',' << text::format_double(beta)
            << ',' << seed << ',' << trace.evaluator << ','
            << text::format_double(rec.bellman_residual_inf) << ','
            << text::format_double(rec.subopt_inf) << ',' << (rec.policy_changed ? 1 : 0) << ','
            << text::format_double(rec.diagnostics.condition_estimate) << ','
            << rec.diagnostics.sample_count << '\n';
}

}  // namespace lambdapi
