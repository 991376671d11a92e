/**
 * @file evaluators.hpp
 * @brief Simulation-based policy evaluation: LSTD(lambda), LSPE(lambda)
 *        (iterative, single batch, least-squares form), lambda-PI(0),
 *        lambda-PI(1) with geometric sampling, and exploration-enhanced
 *        LSTD(lambda).
 *
 * Every evaluator also has a model-based variant (CoefficientSource::Exact)
 * that substitutes the exact expectations for the sampled ones; it exists so
 * the simulation paths can be checked against the projection oracle.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lambdapi/basis.hpp"
#include "lambdapi/bellman.hpp"
#include "lambdapi/distribution.hpp"
#include "lambdapi/error.hpp"
#include "lambdapi/estimators.hpp"
#include "lambdapi/linalg.hpp"
#include "lambdapi/mdp.hpp"
#include "lambdapi/projection.hpp"
#include "lambdapi/rng.hpp"
#include "lambdapi/trajectory.hpp"

namespace lambdapi {

enum class CoefficientSource { Simulated, Exact };

/// Divergence threshold factor for iterative LSPE: |r| > 1e8 (1 + |r_0|).
inline constexpr double kDivergenceFactor = 1e8;

struct EvaluatorConfig {
    double lambda = 0.0;
    double gamma = 1.0;                         // LSPE stepsize
    std::size_t trajectory_budget = 10'000;     // geometric trajectories / transition samples
    std::size_t long_trajectory_length = 100'000;
    std::optional<StateDistribution> restart_dist;  // geometric sampling, default uniform
    std::optional<StateDistribution> start_dist;    // long trajectory start, default uniform
    /// Long trajectory: origins resampled i.i.d. from this distribution.
    /// Transition samples (lambda-PI(0)): origin distribution, default uniform.
    std::optional<StateDistribution> explore_dist;
    RngStream rng;
    std::size_t workers = 1;
    CoefficientSource source = CoefficientSource::Simulated;
    const std::vector<std::size_t>* frozen_restarts = nullptr;
    const TransitionSampleSet* frozen_samples = nullptr;
    std::size_t exact_iterations = 10'000;  // lspe-iter with exact coefficients
    std::size_t trace_stride = 0;           // 0: about 1000 trace points

    void validate() const {
        check_lambda(lambda);
        if (!(gamma > 0.0 && gamma < 2.0))
            throw DomainError("LSPE stepsize gamma must lie in (0,2), got " + std::to_string(gamma));
        if (trajectory_budget < 1 || long_trajectory_length < 1)
            throw DomainError("sample budgets must be positive");
    }
};

struct EvaluationDiagnostics {
    double condition_estimate = 1.0;
    std::size_t sample_count = 0;
    bool used_qr = false;
    /// |C r - d| along the iterate trace (iterative methods)
    std::vector<double> residuals;
    std::optional<Vector> occupancy;  // geometric sampling: zeta~
    std::vector<std::size_t> unvisited;
    std::optional<std::uint64_t> sample_fingerprint;
    std::optional<ContractionCheck> contraction;
    std::vector<std::string> warnings;
};

struct EvaluationResult {
    WeightVector r;
    EvaluationDiagnostics diagnostics;
    std::vector<WeightVector> trace;  // iterative methods only
};

namespace detail {

inline StateDistribution or_uniform(const std::optional<StateDistribution>& d, std::size_t n) {
    if (d) {
        if (d->size() != n) throw DimensionError("distribution does not match the number of states");
        return *d;
    }
    return StateDistribution::uniform(n);
}

inline void check_weights(const FeatureBasis& basis, const WeightVector& r, const char* what) {
    if (static_cast<std::size_t>(r.size()) != basis.dim())
        throw DimensionError(std::string(what) + " has length " + std::to_string(r.size()) +
                             ", basis has s=" + std::to_string(basis.dim()));
    if (!r.allFinite()) throw DomainError(std::string(what) + " has non-finite entries");
}

/// State weights the long-trajectory estimators converge to.
inline StateDistribution long_run_weights(const PolicyMatrices& pm, const EvaluatorConfig& cfg) {
    return cfg.explore_dist ? *cfg.explore_dist : stationary_distribution(pm);
}

inline TrajectoryBatch simulate_long(const Mdp& mdp, const Policy& mu, const EvaluatorConfig& cfg) {
    LongTrajectoryOptions opts;
    opts.origin_dist = cfg.explore_dist;
    return simulate_long_trajectory(mdp, mu, cfg.long_trajectory_length,
                                    or_uniform(cfg.start_dist, mdp.num_states()), cfg.rng, opts);
}

inline TrajectoryBatch simulate_geometric(const Mdp& mdp, const Policy& mu,
                                          const EvaluatorConfig& cfg) {
    GeometricOptions opts;
    opts.workers = cfg.workers;
    opts.restarts = cfg.frozen_restarts;
    return simulate_geometric_batch(mdp, mu, cfg.lambda,
                                    or_uniform(cfg.restart_dist, mdp.num_states()),
                                    cfg.trajectory_budget, cfg.rng, opts);
}

/// Normal-equation solve; a singular moment matrix is reported as a coverage
/// failure listing the unvisited states.
inline CheckedSolve solve_moments(const Matrix& m, const Vector& b, std::vector<std::size_t> unvisited,
                                  const char* what) {
    try {
        return solve_checked(m, b, what);
    } catch (const NearSingularError& e) {
        throw CoverageError(std::string(e.what()) + "; insufficient state coverage",
                            std::move(unvisited));
    }
}

inline std::vector<std::size_t> unvisited_states(const TrajectoryBatch& batch, std::size_t n) {
    std::vector<bool> seen(n, false);
    for (const auto& tr : batch.trajectories)
        for (const auto& st : tr.steps) seen[st.from] = true;
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n; ++i)
        if (!seen[i]) out.push_back(i);
    return out;
}

}  // namespace detail

/// r_1 = r_0 - gamma G (C r_0 - d)
inline WeightVector lspe_update(const Matrix& C, const Vector& d, const Matrix& G,
                                const WeightVector& r0, double gamma) {
    return r0 - gamma * (G * (C * r0 - d));
}

// ---------------------------------------------------------------------------
// LSTD(lambda)

/// r = C_t^{-1} d_t from one long trajectory.
inline EvaluationResult lstd_lambda(const Mdp& mdp, const Policy& mu, const FeatureBasis& basis,
                                    const EvaluatorConfig& cfg) {
    cfg.validate();
    detail::require_basis(basis, mdp);
    EvaluationResult res;
    if (cfg.source == CoefficientSource::Exact) {
        const auto pm = policy_matrices(mdp, mu);
        const auto coeff = build_projected_coefficients(pm, mdp.alpha(), basis,
                                                        detail::long_run_weights(pm, cfg), cfg.lambda);
        res.r = solve_projected_equation(coeff);
        res.diagnostics.condition_estimate = coeff.condition_estimate;
        return res;
    }
    if (cfg.long_trajectory_length < basis.dim())
        throw DomainError("LSTD needs a trajectory at least as long as the basis dimension");
    const auto batch = detail::simulate_long(mdp, mu, cfg);
    LstdAccumulator acc(basis, mdp.alpha(), cfg.lambda);
    for (const auto& st : batch.trajectories[0].steps) acc.add(st);
    const auto sol = solve_checked(acc.C(), acc.d(), "LSTD matrix C_t");
    res.r = sol.x;
    res.diagnostics.condition_estimate = sol.condition;
    res.diagnostics.used_qr = sol.used_qr;
    res.diagnostics.sample_count = acc.count();
    res.diagnostics.unvisited = acc.unvisited();
    return res;
}

// ---------------------------------------------------------------------------
// LSPE(lambda)

/// r_{l+1} = r_l - gamma G_l (C_l r_l - d_l) along the trajectory, starting
/// once the sampled feature covariance is invertible. Throws DivergenceError
/// when |r_l| exceeds 1e8 (1 + |r_0|).
inline EvaluationResult lspe_lambda_iterative(const Mdp& mdp, const Policy& mu,
                                              const FeatureBasis& basis, const EvaluatorConfig& cfg,
                                              const WeightVector& r0) {
    cfg.validate();
    detail::require_basis(basis, mdp);
    detail::check_weights(basis, r0, "r0");
    const auto pm = policy_matrices(mdp, mu);
    EvaluationResult res;
    res.r = r0;
    const double threshold = kDivergenceFactor * (1.0 + r0.norm());

    std::optional<StateDistribution> weights;
    try {
        weights = detail::long_run_weights(pm, cfg);
    } catch (const ReducibleChainError&) {
        res.diagnostics.warnings.push_back("contraction not checked: chain is reducible");
    }
    if (weights) {
        res.diagnostics.contraction =
            check_projected_contraction(pm, mdp.alpha(), basis, *weights, cfg.lambda);
        if (!res.diagnostics.contraction->is_contraction)
            res.diagnostics.warnings.push_back(
                "projected mapping is not a contraction in the sampling norm; LSPE may diverge");
    }

    if (cfg.source == CoefficientSource::Exact) {
        if (!weights) throw DomainError("exact LSPE needs the steady-state distribution");
        const auto coeff = build_projected_coefficients(pm, mdp.alpha(), basis, *weights, cfg.lambda);
        const Matrix gram = weighted_gram(basis, *weights);
        const Matrix G = gram.ldlt().solve(Matrix::Identity(gram.rows(), gram.cols()));
        res.diagnostics.condition_estimate = coeff.condition_estimate;
        for (std::size_t k = 1; k <= cfg.exact_iterations; ++k) {
            WeightVector next = lspe_update(coeff.C, coeff.d, G, res.r, cfg.gamma);
            const double change = (next - res.r).norm();
            res.r = std::move(next);
            res.diagnostics.residuals.push_back((coeff.C * res.r - coeff.d).norm());
            res.trace.push_back(res.r);
            if (res.r.norm() > threshold) throw DivergenceError(k, res.r.norm(), threshold);
            if (change <= 1e-15 * (1.0 + res.r.norm())) break;
        }
        return res;
    }

    const auto batch = detail::simulate_long(mdp, mu, cfg);
    const auto& steps = batch.trajectories[0].steps;
    const std::size_t stride =
        cfg.trace_stride ? cfg.trace_stride : std::max<std::size_t>(1, steps.size() / 1000);
    LstdAccumulator acc(basis, mdp.alpha(), cfg.lambda);
    bool started = false;
    for (std::size_t l = 0; l < steps.size(); ++l) {
        acc.add(steps[l]);
        if (!started) started = acc.covariance_invertible();
        if (!started) continue;
        const Eigen::LDLT<Matrix> ldlt(acc.sum_phi_phi());
        // G_l (C_l r - d_l) with the 1/l factors cancelled
        const Vector resid = acc.sum_C() * res.r - acc.sum_d();
        res.r -= cfg.gamma * ldlt.solve(resid);
        const double norm = res.r.norm();
        if (!(norm <= threshold)) throw DivergenceError(l + 1, norm, threshold);
        if ((l + 1) % stride == 0 || l + 1 == steps.size()) {
            res.trace.push_back(res.r);
            res.diagnostics.residuals.push_back(resid.norm() / double(acc.count()));
        }
    }
    if (!started)
        throw CoverageError("sampled feature covariance never became invertible; use a longer "
                            "run or fewer basis functions",
                            acc.unvisited());
    res.diagnostics.sample_count = acc.count();
    res.diagnostics.condition_estimate = condition_estimate(acc.C());
    res.diagnostics.unvisited = acc.unvisited();
    return res;
}

/// One LSPE update from the whole batch: r_1 = r_0 - gamma G_t (C_t r_0 - d_t).
inline EvaluationResult lspe_single_batch(const Mdp& mdp, const Policy& mu,
                                          const FeatureBasis& basis, const EvaluatorConfig& cfg,
                                          const WeightVector& r0) {
    cfg.validate();
    detail::require_basis(basis, mdp);
    detail::check_weights(basis, r0, "r0");
    EvaluationResult res;
    if (cfg.source == CoefficientSource::Exact) {
        const auto pm = policy_matrices(mdp, mu);
        const auto xi = detail::long_run_weights(pm, cfg);
        const auto coeff = build_projected_coefficients(pm, mdp.alpha(), basis, xi, cfg.lambda);
        const Matrix gram = weighted_gram(basis, xi);
        const Matrix G = gram.ldlt().solve(Matrix::Identity(gram.rows(), gram.cols()));
        res.r = lspe_update(coeff.C, coeff.d, G, r0, cfg.gamma);
        res.diagnostics.condition_estimate = condition_estimate(gram);
        return res;
    }
    const auto batch = detail::simulate_long(mdp, mu, cfg);
    const auto est = estimate_lstd_coefficients(batch, mdp, mu, basis, cfg.lambda);
    res.r = lspe_update(est.C_t, est.d_t, est.G_t, r0, cfg.gamma);
    res.diagnostics.sample_count = est.sample_count;
    res.diagnostics.condition_estimate = condition_estimate(est.G_t);
    res.diagnostics.unvisited = detail::unvisited_states(batch, mdp.num_states());
    return res;
}

/// argmin_r sum_l (phi(i_l)'r - phi(i_l)'r_k - sum_{m>=l} (lambda alpha)^{m-l} q_m)^2 with
/// temporal differences q_m = g_m + alpha phi(i_{m+1})'r_k - phi(i_m)'r_k, on a given batch.
/// The discounted sums stop where the trajectory does not link up.
inline EvaluationResult lspe_least_squares_on_batch(const TrajectoryBatch& batch,
                                                    const FeatureBasis& basis, double alpha,
                                                    double lambda, const WeightVector& r_k) {
    detail::require_mode(batch, SamplingMode::LongTrajectory, "lspe_least_squares_form");
    check_lambda(lambda);
    detail::check_weights(basis, r_k, "r_k");
    const auto& steps = batch.trajectories.at(0).steps;
    if (steps.empty()) throw DomainError("empty trajectory");
    const Vector values = basis.values(r_k);
    const Matrix& phi = basis.matrix();
    const auto s = static_cast<Eigen::Index>(basis.dim());
    Matrix m = Matrix::Zero(s, s);
    Vector b = Vector::Zero(s);
    double tail = 0.0;
    for (std::size_t l = steps.size(); l-- > 0;) {
        const auto& st = steps[l];
        const auto i = static_cast<Eigen::Index>(st.from);
        const double q = st.cost + alpha * values[static_cast<Eigen::Index>(st.to)] - values[i];
        const bool linked = l + 1 < steps.size() && steps[l + 1].from == st.to;
        tail = q + (linked ? lambda * alpha * tail : 0.0);
        m.noalias() += phi.row(i).transpose() * phi.row(i);
        b += phi.row(i).transpose() * (values[i] + tail);
    }
    const auto sol = detail::solve_moments(m, b, detail::unvisited_states(batch, basis.num_states()),
                                           "LSPE least-squares normal equations");
    EvaluationResult res;
    res.r = sol.x;
    res.diagnostics.condition_estimate = sol.condition;
    res.diagnostics.used_qr = sol.used_qr;
    res.diagnostics.sample_count = steps.size();
    return res;
}

inline EvaluationResult lspe_least_squares_form(const Mdp& mdp, const Policy& mu,
                                                const FeatureBasis& basis,
                                                const EvaluatorConfig& cfg,
                                                const WeightVector& r_k) {
    cfg.validate();
    detail::require_basis(basis, mdp);
    if (cfg.source == CoefficientSource::Exact) {
        // gamma = 1 single batch update in expectation
        EvaluatorConfig unit = cfg;
        unit.gamma = 1.0;
        return lspe_single_batch(mdp, mu, basis, unit, r_k);
    }
    const auto batch = detail::simulate_long(mdp, mu, cfg);
    auto res = lspe_least_squares_on_batch(batch, basis, mdp.alpha(), cfg.lambda, r_k);
    res.diagnostics.unvisited = detail::unvisited_states(batch, mdp.num_states());
    return res;
}

// ---------------------------------------------------------------------------
// lambda-PI(0): projected equation of W_k, C r = d(k) with
//   C    = Phi' Xi (I - lambda alpha P) Phi
//   d(k) = Phi' Xi (g + (1 - lambda) alpha P Phi r_k)

/// Sampled C, d(k) from the transitions mu selects in a policy-independent sample set.
inline EvaluationResult lambda_pi_zero_on_samples(const TransitionSampleSet& set, const Mdp& mdp,
                                                  const Policy& mu, const FeatureBasis& basis,
                                                  double lambda, const WeightVector& r_k) {
    check_lambda(lambda);
    check_policy(mdp, mu);
    detail::require_basis(basis, mdp);
    detail::check_weights(basis, r_k, "r_k");
    if (set.size() == 0) throw DomainError("empty transition sample set");
    const Matrix& phi = basis.matrix();
    const Vector values = basis.values(r_k);
    const double a = mdp.alpha();
    const auto s = static_cast<Eigen::Index>(basis.dim());
    Matrix c = Matrix::Zero(s, s);
    Vector d = Vector::Zero(s);
    std::vector<bool> seen(mdp.num_states(), false);
    for (std::size_t k = 0; k < set.size(); ++k) {
        const std::size_t i = set.origins[k];
        const auto& st = set.steps[k][mu[i]];
        const auto fi = static_cast<Eigen::Index>(i);
        const auto fj = static_cast<Eigen::Index>(st.to);
        c.noalias() += phi.row(fi).transpose() * (phi.row(fi) - lambda * a * phi.row(fj));
        d += phi.row(fi).transpose() * (st.cost + (1.0 - lambda) * a * values[fj]);
        seen[i] = true;
    }
    c /= double(set.size());
    d /= double(set.size());
    std::vector<std::size_t> unvisited;
    for (std::size_t i = 0; i < seen.size(); ++i)
        if (!seen[i]) unvisited.push_back(i);
    const auto sol = solve_checked(c, d, "lambda-PI(0) matrix C_t");
    EvaluationResult res;
    res.r = sol.x;
    res.diagnostics.condition_estimate = sol.condition;
    res.diagnostics.used_qr = sol.used_qr;
    res.diagnostics.sample_count = set.size();
    res.diagnostics.unvisited = std::move(unvisited);
    res.diagnostics.sample_fingerprint = set.fingerprint();
    return res;
}

/// Exact C, d(k) under state weights xi.
inline EvaluationResult lambda_pi_zero_exact(const PolicyMatrices& pm, double alpha,
                                             const FeatureBasis& basis, const StateDistribution& xi,
                                             double lambda, const WeightVector& r_k) {
    check_lambda(lambda);
    detail::check_weights(basis, r_k, "r_k");
    const Matrix& phi = basis.matrix();
    const auto n = pm.P.rows();
    const Matrix weighted = phi.transpose() * xi.values().asDiagonal();
    const Matrix c = weighted * (Matrix::Identity(n, n) - lambda * alpha * pm.P) * phi;
    const Vector d = weighted * (pm.gbar + (1.0 - lambda) * alpha * (pm.P * basis.values(r_k)));
    const auto sol = solve_checked(c, d, "lambda-PI(0) matrix C");
    EvaluationResult res;
    res.r = sol.x;
    res.diagnostics.condition_estimate = sol.condition;
    return res;
}

inline EvaluationResult lambda_pi_zero_eval(const Mdp& mdp, const Policy& mu,
                                            const FeatureBasis& basis, const EvaluatorConfig& cfg,
                                            const WeightVector& r_k) {
    cfg.validate();
    detail::require_basis(basis, mdp);
    if (cfg.source == CoefficientSource::Exact)
        return lambda_pi_zero_exact(policy_matrices(mdp, mu), mdp.alpha(), basis,
                                    detail::or_uniform(cfg.explore_dist, mdp.num_states()),
                                    cfg.lambda, r_k);
    if (cfg.frozen_samples)
        return lambda_pi_zero_on_samples(*cfg.frozen_samples, mdp, mu, basis, cfg.lambda, r_k);
    const auto set = sample_transition_set(
        mdp, detail::or_uniform(cfg.explore_dist, mdp.num_states()), cfg.trajectory_budget, cfg.rng);
    return lambda_pi_zero_on_samples(set, mdp, mu, basis, cfg.lambda, r_k);
}

// ---------------------------------------------------------------------------
// Geometric sampling evaluators

/// lambda-PI(1) update on a given geometric batch: least-squares fit of the
/// cost samples c_{l,m}(r_k).
inline EvaluationResult lambda_pi_one_on_batch(const TrajectoryBatch& batch,
                                               const FeatureBasis& basis, double alpha,
                                               const WeightVector& r_k) {
    detail::check_weights(basis, r_k, "r_k");
    const auto c = cost_samples(batch, basis, r_k, alpha);
    const Matrix& phi = basis.matrix();
    const auto s = static_cast<Eigen::Index>(basis.dim());
    Matrix m = Matrix::Zero(s, s);
    Vector b = Vector::Zero(s);
    for (std::size_t k = 0; k < c.size(); ++k) {
        const auto& steps = batch.trajectories[k].steps;
        for (std::size_t l = 0; l < steps.size(); ++l) {
            const auto i = static_cast<Eigen::Index>(steps[l].from);
            m.noalias() += phi.row(i).transpose() * phi.row(i);
            b += phi.row(i).transpose() * c[k][l];
        }
    }
    auto unvisited = detail::unvisited_states(batch, basis.num_states());
    const auto sol = detail::solve_moments(m, b, unvisited, "lambda-PI(1) feature moments");
    EvaluationResult res;
    res.r = sol.x;
    res.diagnostics.condition_estimate = sol.condition;
    res.diagnostics.used_qr = sol.used_qr;
    res.diagnostics.sample_count = batch.total_transitions();
    res.diagnostics.occupancy = empirical_occupancy(batch, basis.num_states());
    res.diagnostics.unvisited = std::move(unvisited);
    return res;
}

inline EvaluationResult lambda_pi_one_eval(const Mdp& mdp, const Policy& mu,
                                           const FeatureBasis& basis, const EvaluatorConfig& cfg,
                                           const WeightVector& r_k) {
    cfg.validate();
    detail::require_basis(basis, mdp);
    detail::check_weights(basis, r_k, "r_k");
    if (cfg.source == CoefficientSource::Exact) {
        const auto pm = policy_matrices(mdp, mu);
        const auto zeta = occupancy_distribution(
            pm, detail::or_uniform(cfg.restart_dist, mdp.num_states()), cfg.lambda);
        EvaluationResult res;
        res.r = project(apply_T_mu_lambda(pm, mdp.alpha(), cfg.lambda, basis.values(r_k)), basis,
                        zeta);
        res.diagnostics.occupancy = zeta.values();
        res.diagnostics.condition_estimate = condition_estimate(weighted_gram(basis, zeta));
        return res;
    }
    return lambda_pi_one_on_batch(detail::simulate_geometric(mdp, mu, cfg), basis, mdp.alpha(), r_k);
}

/// Exploration-enhanced LSTD(lambda) on a given geometric batch:
///   C^ = sum phi(i_l) (phi(i_l) - alpha^{N-l} phi(i_N))',  d^ = sum phi(i_l) (discounted cost tail)
inline EvaluationResult explore_lstd_on_batch(const TrajectoryBatch& batch,
                                              const FeatureBasis& basis, double alpha) {
    detail::require_mode(batch, SamplingMode::Geometric, "explore_lstd_lambda");
    const Matrix& phi = basis.matrix();
    const auto s = static_cast<Eigen::Index>(basis.dim());
    Matrix c = Matrix::Zero(s, s);
    Vector d = Vector::Zero(s);
    for (const auto& tr : batch.trajectories) {
        const auto& steps = tr.steps;
        if (steps.empty()) continue;
        const auto last = static_cast<Eigen::Index>(steps.back().to);
        double discount = 1.0;  // alpha^{N-l}
        double cost_tail = 0.0;
        for (std::size_t l = steps.size(); l-- > 0;) {
            discount *= alpha;
            cost_tail = steps[l].cost + alpha * cost_tail;
            const auto i = static_cast<Eigen::Index>(steps[l].from);
            c.noalias() += phi.row(i).transpose() * (phi.row(i) - discount * phi.row(last));
            d += phi.row(i).transpose() * cost_tail;
        }
    }
    const auto sol = solve_checked(c, d, "exploration-enhanced LSTD matrix");
    EvaluationResult res;
    res.r = sol.x;
    res.diagnostics.condition_estimate = sol.condition;
    res.diagnostics.used_qr = sol.used_qr;
    res.diagnostics.sample_count = batch.total_transitions();
    res.diagnostics.occupancy = empirical_occupancy(batch, basis.num_states());
    res.diagnostics.unvisited = detail::unvisited_states(batch, basis.num_states());

    // r^ must be a stationary point of its own least-squares problem:
    // sum phi (phi' r^ - c(r^)) = 0.
    const auto samples = cost_samples(batch, basis, res.r, alpha);
    Vector grad = Vector::Zero(s);
    double scale = 0.0;
    for (std::size_t m = 0; m < samples.size(); ++m) {
        const auto& steps = batch.trajectories[m].steps;
        for (std::size_t l = 0; l < steps.size(); ++l) {
            const auto i = static_cast<Eigen::Index>(steps[l].from);
            const double fit = phi.row(i).dot(res.r);
            grad += phi.row(i).transpose() * (fit - samples[m][l]);
            scale += phi.row(i).norm() * (std::abs(fit) + std::abs(samples[m][l]));
        }
    }
    if (grad.norm() > 1e-8 * (1.0 + scale))
        throw SolverError("exploration-enhanced LSTD solution fails its optimality condition");
    res.diagnostics.residuals.push_back(grad.norm() / (1.0 + scale));
    return res;
}

inline EvaluationResult explore_lstd_lambda(const Mdp& mdp, const Policy& mu,
                                            const FeatureBasis& basis, const EvaluatorConfig& cfg) {
    cfg.validate();
    detail::require_basis(basis, mdp);
    if (cfg.source == CoefficientSource::Exact) {
        const auto pm = policy_matrices(mdp, mu);
        const auto zeta = occupancy_distribution(
            pm, detail::or_uniform(cfg.restart_dist, mdp.num_states()), cfg.lambda);
        const auto coeff = build_projected_coefficients(pm, mdp.alpha(), basis, zeta, cfg.lambda);
        EvaluationResult res;
        res.r = solve_projected_equation(coeff);
        res.diagnostics.condition_estimate = coeff.condition_estimate;
        res.diagnostics.occupancy = zeta.values();
        return res;
    }
    return explore_lstd_on_batch(detail::simulate_geometric(mdp, mu, cfg), basis, mdp.alpha());
}

// ---------------------------------------------------------------------------
// Registry

enum class EvaluatorKey { Lstd, LspeIter, LspeBatch, LspeLs, LambdaPiZero, LambdaPiOne, ExploreLstd };

inline constexpr std::string_view evaluator_name(EvaluatorKey key) {
    switch (key) {
        case EvaluatorKey::Lstd: return "lstd";
        case EvaluatorKey::LspeIter: return "lspe-iter";
        case EvaluatorKey::LspeBatch: return "lspe-batch";
        case EvaluatorKey::LspeLs: return "lspe-ls";
        case EvaluatorKey::LambdaPiZero: return "lambda-pi-0";
        case EvaluatorKey::LambdaPiOne: return "lambda-pi-1";
        case EvaluatorKey::ExploreLstd: return "explore-lstd";
    }
    return "?";
}

inline constexpr EvaluatorKey kAllEvaluators[] = {
    EvaluatorKey::Lstd,         EvaluatorKey::LspeIter,    EvaluatorKey::LspeBatch,
    EvaluatorKey::LspeLs,       EvaluatorKey::LambdaPiZero, EvaluatorKey::LambdaPiOne,
    EvaluatorKey::ExploreLstd};

inline std::optional<EvaluatorKey> parse_evaluator_key(std::string_view name) {
    for (auto key : kAllEvaluators)
        if (evaluator_name(key) == name) return key;
    return std::nullopt;
}

/// Whether the evaluator's output depends on the previous weights r_k.
inline constexpr bool is_iterative(EvaluatorKey key) {
    return key != EvaluatorKey::Lstd && key != EvaluatorKey::ExploreLstd;
}

/// Dispatch by key; r_k is the warm start / previous evaluation.
inline EvaluationResult evaluate(EvaluatorKey key, const Mdp& mdp, const Policy& mu,
                                 const FeatureBasis& basis, const EvaluatorConfig& cfg,
                                 const WeightVector& r_k) {
    switch (key) {
        case EvaluatorKey::Lstd: return lstd_lambda(mdp, mu, basis, cfg);
        case EvaluatorKey::LspeIter: return lspe_lambda_iterative(mdp, mu, basis, cfg, r_k);
        case EvaluatorKey::LspeBatch: return lspe_single_batch(mdp, mu, basis, cfg, r_k);
        case EvaluatorKey::LspeLs: return lspe_least_squares_form(mdp, mu, basis, cfg, r_k);
        case EvaluatorKey::LambdaPiZero: return lambda_pi_zero_eval(mdp, mu, basis, cfg, r_k);
        case EvaluatorKey::LambdaPiOne: return lambda_pi_one_eval(mdp, mu, basis, cfg, r_k);
        case EvaluatorKey::ExploreLstd: return explore_lstd_lambda(mdp, mu, basis, cfg);
    }
    throw DomainError("unknown evaluator");
}

}  // namespace lambdapi
