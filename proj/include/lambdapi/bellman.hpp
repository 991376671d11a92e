/**
 * @file bellman.hpp
 * @brief Bellman operators T_mu, T and T_mu^(lambda) plus the exact solvers
 *        (value iteration, policy iteration, optimistic PI, lambda-PI) that
 *        serve as ground truth for the approximate methods.
 *
 * Everything here is a pure function of its arguments.
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "lambdapi/distribution.hpp"
#include "lambdapi/error.hpp"
#include "lambdapi/linalg.hpp"
#include "lambdapi/mdp.hpp"

namespace lambdapi {

/// (T_mu J)(i) = sum_j p_ij(mu(i)) (g(i,mu(i),j) + alpha J(j))
inline CostVector apply_T_mu(const Mdp& mdp, const Policy& mu, const CostVector& J) {
    check_policy(mdp, mu);
    check_cost_vector(mdp, J);
    CostVector out(J.size());
    for (std::size_t i = 0; i < mdp.num_states(); ++i)
        out[static_cast<Eigen::Index>(i)] = mdp.q_value(i, mu[i], J);
    return out;
}

struct GreedyStep {
    CostVector J;  // TJ
    Policy mu;     // attaining policy
};

/// TJ and a greedy policy; ties go to the lowest control index.
inline GreedyStep apply_T(const Mdp& mdp, const CostVector& J) {
    check_cost_vector(mdp, J);
    const std::size_t n = mdp.num_states();
    GreedyStep out{CostVector(J.size()), Policy(std::vector<std::size_t>(n, 0))};
    for (std::size_t i = 0; i < n; ++i) {
        double best = mdp.q_value(i, 0, J);
        std::size_t arg = 0;
        for (std::size_t u = 1; u < mdp.num_controls(i); ++u) {
            const double q = mdp.q_value(i, u, J);
            if (q < best) {
                best = q;
                arg = u;
            }
        }
        out.J[static_cast<Eigen::Index>(i)] = best;
        out.mu[i] = arg;
    }
    return out;
}

/// Solution of (I - alpha P) J = g.
inline CostVector policy_cost(const PolicyMatrices& pm, double alpha) {
    const auto n = pm.P.rows();
    const Matrix a = Matrix::Identity(n, n) - alpha * pm.P;
    CostVector J = a.partialPivLu().solve(pm.gbar);
    const double residual = sup_norm(J - (pm.gbar + alpha * pm.P * J));
    if (!J.allFinite() || residual > 1e-9 * (1.0 + sup_norm(J)))
        throw SolverError("policy evaluation residual " + std::to_string(residual) +
                          " exceeds tolerance");
    return J;
}

/// J_mu, the unique fixed point of T_mu, by a dense linear solve.
inline CostVector policy_cost(const Mdp& mdp, const Policy& mu) {
    return policy_cost(policy_matrices(mdp, mu), mdp.alpha());
}

struct ValueIterationResult {
    CostVector J;
    Policy mu;
    std::size_t iterations = 0;
    bool converged = false;
};

inline constexpr double kDefaultViTolerance = 1e-8;
inline constexpr std::size_t kDefaultViMaxIter = 1'000'000;

/// J <- TJ until successive iterates differ by at most tol in sup-norm.
/// Hitting max_iter returns the last iterate with converged = false.
inline ValueIterationResult value_iteration(const Mdp& mdp, const CostVector& J0,
                                            double tol = kDefaultViTolerance,
                                            std::size_t max_iter = kDefaultViMaxIter) {
    if (!(tol > 0.0)) throw DomainError("value iteration tolerance must be positive");
    check_cost_vector(mdp, J0, "J0");
    ValueIterationResult res{J0, Policy::first_controls(mdp), 0, false};
    while (res.iterations < max_iter) {
        auto step = apply_T(mdp, res.J);
        ++res.iterations;
        const double delta = sup_norm(step.J - res.J);
        res.J = std::move(step.J);
        res.mu = std::move(step.mu);
        if (delta <= tol) {
            res.converged = true;
            break;
        }
    }
    return res;
}

struct PolicyIterationResult {
    CostVector J;
    Policy mu;
    std::size_t iterations = 0;  // number of policy evaluations
};

/// Greedy improvement that keeps the incumbent control unless another one is
/// better by more than round-off, so exact PI cannot cycle between ties.
inline Policy improve_policy(const Mdp& mdp, const Policy& current, const CostVector& J) {
    auto greedy = apply_T(mdp, J);
    Policy next = current;
    for (std::size_t i = 0; i < mdp.num_states(); ++i) {
        const double best = greedy.J[static_cast<Eigen::Index>(i)];
        const double incumbent = mdp.q_value(i, current[i], J);
        if (incumbent > best + 1e-12 * (1.0 + std::abs(best))) next[i] = greedy.mu[i];
    }
    return next;
}

/// Alternates exact evaluation and greedy improvement until the policy repeats.
inline PolicyIterationResult exact_policy_iteration(const Mdp& mdp, const Policy& mu0,
                                                    std::size_t max_iter = 100'000) {
    check_policy(mdp, mu0);
    PolicyIterationResult res{CostVector(), mu0, 0};
    while (true) {
        res.J = policy_cost(mdp, res.mu);
        ++res.iterations;
        Policy next = improve_policy(mdp, res.mu, res.J);
        if (next == res.mu) break;
        if (res.iterations >= max_iter) throw SolverError("policy iteration did not terminate");
        res.mu = std::move(next);
    }
    return res;
}

/// Optimal cost J* and an optimal policy, starting PI from the first controls.
inline PolicyIterationResult solve_optimal(const Mdp& mdp) {
    return exact_policy_iteration(mdp, Policy::first_controls(mdp));
}

/// One iterate of an exact method: the greedy policy mu_{k+1} chosen from J_k
/// and the resulting J_{k+1}.
struct ExactIterate {
    Policy mu;
    CostVector J;
    std::optional<double> error_to_optimum;  // |J_{k+1} - J*|_inf when J* was supplied
};

struct ExactTrace {
    CostVector J0;
    std::optional<double> initial_error;
    std::vector<ExactIterate> steps;
};

/// Optimistic (modified) PI: mu_{k+1} greedy from J_k, J_{k+1} = T_{mu_{k+1}}^{m_k} J_k.
/// The schedule's last entry repeats once it is exhausted.
inline ExactTrace optimistic_pi(const Mdp& mdp, const CostVector& J0,
                                const std::vector<std::size_t>& m_schedule, std::size_t iters,
                                const std::optional<CostVector>& j_star = std::nullopt) {
    check_cost_vector(mdp, J0, "J0");
    if (m_schedule.empty()) throw DomainError("optimistic PI needs a nonempty m schedule");
    for (auto m : m_schedule)
        if (m < 1) throw DomainError("optimistic PI step counts must be >= 1");
    ExactTrace trace{J0, {}, {}};
    if (j_star) trace.initial_error = sup_norm(J0 - *j_star);
    CostVector J = J0;
    for (std::size_t k = 0; k < iters; ++k) {
        const std::size_t m = m_schedule[std::min(k, m_schedule.size() - 1)];
        auto greedy = apply_T(mdp, J);
        J = std::move(greedy.J);  // first application of T_{mu_{k+1}}
        for (std::size_t q = 1; q < m; ++q) J = apply_T_mu(mdp, greedy.mu, J);
        ExactIterate it{std::move(greedy.mu), J, std::nullopt};
        if (j_star) it.error_to_optimum = sup_norm(J - *j_star);
        trace.steps.push_back(std::move(it));
    }
    return trace;
}

inline void check_lambda(double lambda) {
    if (!(lambda >= 0.0 && lambda < 1.0))
        throw DomainError("lambda must lie in [0,1), got " + std::to_string(lambda));
}

/// T_mu^(lambda) J as the fixed point of W J' = (1-lambda) T_mu J + lambda T_mu J':
/// (I - lambda alpha P) J' = g + (1-lambda) alpha P J.
inline CostVector apply_T_mu_lambda(const PolicyMatrices& pm, double alpha, double lambda,
                                    const CostVector& J) {
    check_lambda(lambda);
    const auto n = pm.P.rows();
    if (J.size() != n) throw DimensionError("J length does not match the policy matrices");
    const Vector tmu_j = pm.gbar + alpha * (pm.P * J);
    const Vector rhs = pm.gbar + (1.0 - lambda) * alpha * (pm.P * J);
    const Matrix a = Matrix::Identity(n, n) - lambda * alpha * pm.P;
    CostVector out = a.partialPivLu().solve(rhs);
    // W-fixed-point postcondition
    const Vector w = (1.0 - lambda) * tmu_j + lambda * (pm.gbar + alpha * (pm.P * out));
    const double residual = sup_norm(out - w);
    if (!out.allFinite() || residual > 1e-9 * (1.0 + sup_norm(out)))
        throw SolverError("T_mu^(lambda) solve residual " + std::to_string(residual));
    return out;
}

inline CostVector apply_T_mu_lambda(const Mdp& mdp, const Policy& mu, double lambda,
                                    const CostVector& J) {
    check_lambda(lambda);
    check_cost_vector(mdp, J);
    return apply_T_mu_lambda(policy_matrices(mdp, mu), mdp.alpha(), lambda, J);
}

/// Exact lambda-PI: mu_{k+1} greedy from J_k, J_{k+1} = T_{mu_{k+1}}^(lambda) J_k.
inline ExactTrace exact_lambda_pi(const Mdp& mdp, const CostVector& J0, double lambda,
                                  std::size_t iters,
                                  const std::optional<CostVector>& j_star = std::nullopt) {
    check_lambda(lambda);
    check_cost_vector(mdp, J0, "J0");
    ExactTrace trace{J0, {}, {}};
    if (j_star) trace.initial_error = sup_norm(J0 - *j_star);
    CostVector J = J0;
    for (std::size_t k = 0; k < iters; ++k) {
        auto greedy = apply_T(mdp, J);
        J = apply_T_mu_lambda(mdp, greedy.mu, lambda, J);
        ExactIterate it{std::move(greedy.mu), J, std::nullopt};
        if (j_star) it.error_to_optimum = sup_norm(J - *j_star);
        trace.steps.push_back(std::move(it));
    }
    return trace;
}

namespace detail {

inline std::vector<bool> reachable(const Matrix& P, bool transpose) {
    const auto n = P.rows();
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    std::deque<Eigen::Index> queue{0};
    seen[0] = true;
    while (!queue.empty()) {
        const auto i = queue.front();
        queue.pop_front();
        for (Eigen::Index j = 0; j < n; ++j) {
            const double p = transpose ? P(j, i) : P(i, j);
            if (p > 0.0 && !seen[static_cast<std::size_t>(j)]) {
                seen[static_cast<std::size_t>(j)] = true;
                queue.push_back(j);
            }
        }
    }
    return seen;
}

}  // namespace detail

/// Steady-state distribution of an irreducible chain. Irreducibility is
/// checked structurally on the positive entries of P.
inline StateDistribution stationary_distribution(const PolicyMatrices& pm) {
    const Matrix& P = pm.P;
    const auto n = P.rows();
    const auto fwd = detail::reachable(P, false);
    const auto bwd = detail::reachable(P, true);
    std::vector<std::size_t> outside;
    for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i)
        if (!fwd[i] || !bwd[i]) outside.push_back(i);
    if (!outside.empty()) throw ReducibleChainError(std::move(outside));

    // xi' (P - I) = 0 with the normalization row sum(xi) = 1 appended.
    Matrix a(n + 1, n);
    a.topRows(n) = P.transpose() - Matrix::Identity(n, n);
    a.row(n).setOnes();
    Vector b = Vector::Zero(n + 1);
    b[n] = 1.0;
    Vector xi = a.colPivHouseholderQr().solve(b);
    xi /= xi.sum();
    const double residual = (P.transpose() * xi - xi).cwiseAbs().sum();
    if (!xi.allFinite() || residual > 1e-10 || !(xi.minCoeff() > 0.0))
        throw SolverError("stationary distribution solve failed (residual " +
                          std::to_string(residual) + ")");
    return StateDistribution(xi);
}

inline StateDistribution stationary_distribution(const Mdp& mdp, const Policy& mu) {
    return stationary_distribution(policy_matrices(mdp, mu));
}

}  // namespace lambdapi
