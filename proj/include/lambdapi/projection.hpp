/**
 * @file projection.hpp
 * @brief Weighted Euclidean projection onto span(Phi) and the exact,
 *        model-based projected equation C^(lambda) r = d^(lambda).
 *
 * These routines are the oracle every simulation-based evaluator is checked
 * against, so they use closed forms and dense solves only.
 */
#pragma once

#include <cmath>
#include <string>

#include "lambdapi/basis.hpp"
#include "lambdapi/bellman.hpp"
#include "lambdapi/distribution.hpp"
#include "lambdapi/error.hpp"
#include "lambdapi/linalg.hpp"
#include "lambdapi/mdp.hpp"

namespace lambdapi {

namespace detail {

inline void check_xi(const FeatureBasis& basis, const StateDistribution& xi) {
    if (xi.size() != basis.num_states())
        throw DimensionError("distribution has " + std::to_string(xi.size()) +
                             " states, basis has " + std::to_string(basis.num_states()));
}

}  // namespace detail

/// Phi' Xi Phi
inline Matrix weighted_gram(const FeatureBasis& basis, const StateDistribution& xi) {
    detail::check_xi(basis, xi);
    const Matrix& phi = basis.matrix();
    return phi.transpose() * xi.values().asDiagonal() * phi;
}

/// argmin_r sum_i xi(i) (phi(i)'r - J(i))^2 via the normal equations.
inline WeightVector project(const CostVector& J, const FeatureBasis& basis,
                            const StateDistribution& xi) {
    detail::check_xi(basis, xi);
    if (static_cast<std::size_t>(J.size()) != basis.num_states())
        throw DimensionError("J has length " + std::to_string(J.size()) + ", basis has n=" +
                             std::to_string(basis.num_states()));
    const Matrix& phi = basis.matrix();
    const Matrix gram = weighted_gram(basis, xi);
    const Vector rhs = phi.transpose() * (xi.values().cwiseProduct(J));
    const auto sol = solve_checked(gram, rhs, "projection normal equations");
    const double residual = (gram * sol.x - rhs).norm();
    if (residual > 1e-10 * (gram.norm() * sol.x.norm() + rhs.norm()))
        throw SolverError("projection normal equations residual " + std::to_string(residual));
    return sol.x;
}

/// n x n matrix Phi (Phi' Xi Phi)^{-1} Phi' Xi.
inline Matrix projection_matrix(const FeatureBasis& basis, const StateDistribution& xi) {
    const Matrix& phi = basis.matrix();
    const Matrix gram = weighted_gram(basis, xi);
    return phi * gram.ldlt().solve(phi.transpose() * xi.values().asDiagonal());
}

/// P^(lambda) = alpha (1-lambda) P (I - lambda alpha P)^{-1} and
/// g^(lambda) = (I - lambda alpha P)^{-1} g: the sums of the geometric series
/// (1-lambda) sum_l lambda^l alpha^{l+1} P^{l+1} and sum_l lambda^l alpha^l P^l g.
struct LambdaModel {
    Matrix P;
    Vector g;
};

inline LambdaModel lambda_model(const PolicyMatrices& pm, double alpha, double lambda) {
    check_lambda(lambda);
    const auto n = pm.P.rows();
    const Matrix b = Matrix::Identity(n, n) - lambda * alpha * pm.P;
    const Eigen::PartialPivLU<Matrix> lu(b);
    LambdaModel out;
    out.g = lu.solve(pm.gbar);
    // X B = c P  <=>  B' X' = c P'
    const Matrix bt = b.transpose();
    out.P = (alpha * (1.0 - lambda)) * bt.partialPivLu().solve(pm.P.transpose()).transpose();
    return out;
}

struct ProjectedEqCoefficients {
    Matrix C;
    Vector d;
    double lambda = 0.0;
    double condition_estimate = 1.0;
};

/// C = Phi' Xi (I - P^(lambda)) Phi, d = Phi' Xi g^(lambda).
inline ProjectedEqCoefficients build_projected_coefficients(const PolicyMatrices& pm, double alpha,
                                                            const FeatureBasis& basis,
                                                            const StateDistribution& xi,
                                                            double lambda) {
    detail::check_xi(basis, xi);
    if (static_cast<std::size_t>(pm.P.rows()) != basis.num_states())
        throw DimensionError("basis and model disagree on the number of states");
    const auto lm = lambda_model(pm, alpha, lambda);
    const Matrix& phi = basis.matrix();
    const auto n = pm.P.rows();
    const Matrix weighted = phi.transpose() * xi.values().asDiagonal();
    ProjectedEqCoefficients out;
    out.C = weighted * (Matrix::Identity(n, n) - lm.P) * phi;
    out.d = weighted * lm.g;
    out.lambda = lambda;
    out.condition_estimate = condition_estimate(out.C);
    return out;
}

inline ProjectedEqCoefficients build_projected_coefficients(const Mdp& mdp, const Policy& mu,
                                                            const FeatureBasis& basis,
                                                            const StateDistribution& xi,
                                                            double lambda) {
    return build_projected_coefficients(policy_matrices(mdp, mu), mdp.alpha(), basis, xi, lambda);
}

/// r(lambda) = C^{-1} d. Condition estimates above 1e12 raise NearSingularError.
inline WeightVector solve_projected_equation(const ProjectedEqCoefficients& coeff) {
    if (!(coeff.condition_estimate <= kNearSingularCondition))
        throw NearSingularError("projected equation matrix C is nearly singular",
                                coeff.condition_estimate);
    const auto sol = solve_checked(coeff.C, coeff.d, "projected equation");
    const double residual = (coeff.C * sol.x - coeff.d).norm();
    if (residual > 1e-10 * (coeff.C.norm() * sol.x.norm() + coeff.d.norm()))
        throw SolverError("projected equation residual " + std::to_string(residual));
    return sol.x;
}

/// alpha_lambda = alpha (1 - lambda) / (1 - lambda alpha)
inline double contraction_modulus(double alpha, double lambda) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
    check_lambda(lambda);
    return alpha * (1.0 - lambda) / (1.0 - lambda * alpha);
}

struct ContractionCheck {
    bool is_contraction = false;
    /// xi-weighted induced 2-norm of Pi P^(lambda)
    double norm_bound = 0.0;
    /// spectral radius of the same map restricted to span(Phi); above 1 the
    /// projected value iteration diverges
    double spectral_radius = 0.0;
};

inline ContractionCheck check_projected_contraction(const PolicyMatrices& pm, double alpha,
                                                    const FeatureBasis& basis,
                                                    const StateDistribution& xi, double lambda) {
    detail::check_xi(basis, xi);
    const auto lm = lambda_model(pm, alpha, lambda);
    const Matrix M = projection_matrix(basis, xi) * lm.P;
    const Vector sq = xi.values().cwiseSqrt();
    const Matrix similar = sq.asDiagonal() * M * sq.cwiseInverse().asDiagonal();
    ContractionCheck out;
    out.norm_bound = Eigen::JacobiSVD<Matrix>(similar).singularValues()[0];
    out.is_contraction = out.norm_bound < 1.0;
    // On span(Phi) the map acts as r -> (Phi'Xi Phi)^{-1} Phi' Xi P^(lambda) Phi r.
    const Matrix& phi = basis.matrix();
    const Matrix reduced = weighted_gram(basis, xi)
                               .ldlt()
                               .solve(phi.transpose() * xi.values().asDiagonal() * lm.P * phi);
    out.spectral_radius = Eigen::EigenSolver<Matrix>(reduced, false).eigenvalues().cwiseAbs().maxCoeff();
    return out;
}

inline ContractionCheck check_projected_contraction(const Mdp& mdp, const Policy& mu,
                                                    const FeatureBasis& basis,
                                                    const StateDistribution& xi, double lambda) {
    return check_projected_contraction(policy_matrices(mdp, mu), mdp.alpha(), basis, xi, lambda);
}

/// (1 - beta) xi_mu + beta xi_off
inline StateDistribution mixture_distribution(const StateDistribution& xi_mu,
                                              const StateDistribution& xi_off, double beta) {
    if (!(beta >= 0.0 && beta < 1.0))
        throw DomainError("mixture weight beta must lie in [0,1), got " + std::to_string(beta));
    if (xi_mu.size() != xi_off.size()) throw DimensionError("mixture of distributions of unequal size");
    Vector mix = (1.0 - beta) * xi_mu.values() + beta * xi_off.values();
    mix /= mix.sum();
    return StateDistribution(std::move(mix));
}

/// Normalized occupancy of geometric sampling: zeta' proportional to
/// zeta_0' (I - lambda P)^{-1}, the sum over l of zeta_0' (lambda P)^l.
inline StateDistribution occupancy_distribution(const PolicyMatrices& pm,
                                                const StateDistribution& restart_dist,
                                                double lambda) {
    check_lambda(lambda);
    const auto n = pm.P.rows();
    if (static_cast<Eigen::Index>(restart_dist.size()) != n)
        throw DimensionError("restart distribution does not match the number of states");
    const Matrix bt = (Matrix::Identity(n, n) - lambda * pm.P).transpose();
    const Vector z = bt.partialPivLu().solve(restart_dist.values());
    return StateDistribution(z / z.sum());
}

struct ErrorBound {
    double lhs = 0.0;  // |J_mu - Phi r_mu(lambda)|_xi_mu
    double rhs = 0.0;  // |J_mu - Pi J_mu|_xi_mu / sqrt(1 - alpha_lambda^2)
};

/// The bound only holds for the steady-state distribution, so xi_mu is
/// computed here rather than accepted from the caller.
inline ErrorBound error_bound(const Mdp& mdp, const Policy& mu, const FeatureBasis& basis,
                              double lambda) {
    const auto pm = policy_matrices(mdp, mu);
    const auto xi = stationary_distribution(pm);
    const CostVector j_mu = policy_cost(pm, mdp.alpha());
    const auto coeff = build_projected_coefficients(pm, mdp.alpha(), basis, xi, lambda);
    const Vector approx = basis.values(solve_projected_equation(coeff));
    const Vector best = basis.values(project(j_mu, basis, xi));
    const double a = contraction_modulus(mdp.alpha(), lambda);
    ErrorBound out;
    out.lhs = weighted_norm(j_mu - approx, xi.values());
    out.rhs = weighted_norm(j_mu - best, xi.values()) / std::sqrt(1.0 - a * a);
    return out;
}

/// Variant that rejects any xi other than the steady-state distribution of mu.
inline ErrorBound error_bound(const Mdp& mdp, const Policy& mu, const FeatureBasis& basis,
                              const StateDistribution& xi, double lambda) {
    const auto xi_mu = stationary_distribution(mdp, mu);
    if (xi.size() != xi_mu.size() || sup_norm(xi.values() - xi_mu.values()) > 1e-9)
        throw DomainError("the error bound is only stated for xi equal to the steady-state "
                          "distribution of the evaluated policy");
    return error_bound(mdp, mu, basis, lambda);
}

}  // namespace lambdapi
