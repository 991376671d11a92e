/**
 * @file estimators.hpp
 * @brief Empirical quantities computed from simulated batches: the
 *        eligibility-trace estimates C_t, d_t, G_t of a long trajectory, and
 *        for geometric batches the cost samples c_{l,m}(r), occupancy
 *        frequencies, Monte Carlo state costs D_t(i) and their split by
 *        remaining trajectory length.
 */
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "lambdapi/basis.hpp"
#include "lambdapi/error.hpp"
#include "lambdapi/linalg.hpp"
#include "lambdapi/mdp.hpp"
#include "lambdapi/trajectory.hpp"

namespace lambdapi {

struct SimEstimates {
    Matrix C_t;
    Vector d_t;
    Matrix G_t;
    std::size_t sample_count = 0;
};

/// Running sums for LSTD(lambda)/LSPE(lambda) along one trajectory:
///
///   z_l = lambda alpha z_{l-1} + phi(i_l)
///   C_l = (1/l) sum z_m (phi(i_m) - alpha phi(i_{m+1}))'
///   d_l = (1/l) sum z_m g_m
///   G_l = ((1/l) sum phi(i_m) phi(i_m)')^{-1}
///
/// The trace restarts wherever a step does not start at the previous arrival
/// (resampled origins).
class LstdAccumulator {
public:
    LstdAccumulator(const FeatureBasis& basis, double alpha, double lambda)
        : basis_(&basis), alpha_(alpha), lambda_(lambda),
          z_(Vector::Zero(static_cast<Eigen::Index>(basis.dim()))),
          a_(Matrix::Zero(z_.size(), z_.size())), b_(Vector::Zero(z_.size())),
          m_(Matrix::Zero(z_.size(), z_.size())), visits_(basis.num_states(), 0) {}

    void add(const Step& st) {
        const Matrix& phi = basis_->matrix();
        const auto from = static_cast<Eigen::Index>(st.from);
        const auto to = static_cast<Eigen::Index>(st.to);
        if (count_ > 0 && st.from != last_to_) z_.setZero();
        z_ = (lambda_ * alpha_) * z_ + phi.row(from).transpose();
        a_.noalias() += z_ * (phi.row(from) - alpha_ * phi.row(to));
        b_ += st.cost * z_;
        m_.noalias() += phi.row(from).transpose() * phi.row(from);
        ++visits_[st.from];
        last_to_ = st.to;
        ++count_;
    }

    std::size_t count() const noexcept { return count_; }
    Matrix C() const { return a_ / double(count_); }
    Vector d() const { return b_ / double(count_); }
    Matrix covariance() const { return m_ / double(count_); }
    /// Unnormalized sums: sum z (phi - alpha phi')', sum z g, sum phi phi'.
    const Matrix& sum_C() const noexcept { return a_; }
    const Vector& sum_d() const noexcept { return b_; }
    const Matrix& sum_phi_phi() const noexcept { return m_; }

    std::vector<std::size_t> unvisited() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < visits_.size(); ++i)
            if (visits_[i] == 0) out.push_back(i);
        return out;
    }

    /// Whether the sampled feature covariance is safely invertible.
    bool covariance_invertible() const {
        return count_ > 0 && condition_estimate(covariance()) <= kNearSingularCondition;
    }

    Matrix G() const {
        if (count_ == 0) throw CoverageError("no samples; G is undefined", unvisited());
        const Matrix cov = covariance();
        const double cond = condition_estimate(cov);
        if (!(cond <= kNearSingularCondition))
            throw CoverageError("sampled feature covariance is singular (condition " +
                                    std::to_string(cond) +
                                    "); use a longer run or fewer basis functions",
                                unvisited());
        const Eigen::Index s = cov.rows();
        Matrix g = cov.ldlt().solve(Matrix::Identity(s, s));
        return 0.5 * (g + g.transpose());
    }

private:
    const FeatureBasis* basis_;
    double alpha_;
    double lambda_;
    Vector z_;
    Matrix a_;
    Vector b_;
    Matrix m_;
    std::vector<std::size_t> visits_;
    std::size_t last_to_ = 0;
    std::size_t count_ = 0;
};

namespace detail {

inline void require_mode(const TrajectoryBatch& batch, SamplingMode mode, const char* op) {
    if (batch.mode != mode)
        throw DomainError(std::string(op) + " needs a " +
                          (mode == SamplingMode::Geometric ? "geometric" : "long-trajectory") +
                          " batch");
}

inline void require_basis(const FeatureBasis& basis, const Mdp& mdp) {
    if (basis.num_states() != mdp.num_states())
        throw DimensionError("basis has n=" + std::to_string(basis.num_states()) +
                             ", model has " + std::to_string(mdp.num_states()) + " states");
}

}  // namespace detail

/// C_t, d_t, G_t from a long-trajectory batch generated under mu.
inline SimEstimates estimate_lstd_coefficients(const TrajectoryBatch& batch, const Mdp& mdp,
                                               const Policy& mu, const FeatureBasis& basis,
                                               double lambda) {
    detail::require_mode(batch, SamplingMode::LongTrajectory, "estimate_lstd_coefficients");
    detail::require_basis(basis, mdp);
    check_policy(mdp, mu);
    check_lambda(lambda);
    if (batch.trajectories.size() != 1 || batch.trajectories[0].steps.empty())
        throw DomainError("long-trajectory batch must hold one nonempty trajectory");
    LstdAccumulator acc(basis, mdp.alpha(), lambda);
    for (const auto& st : batch.trajectories[0].steps) {
        if (st.control != mdp.control(st.from, mu[st.from]).label)
            throw DomainError("batch was not generated by the evaluated policy");
        acc.add(st);
    }
    return {acc.C(), acc.d(), acc.G(), acc.count()};
}

using CostSamples = std::vector<std::vector<double>>;

/// c_{l,m}(r) = alpha^{N_m-l} phi(i_{N_m,m})'r + sum_{q=l}^{N_m-1} alpha^{q-l} g_q
/// by one backward pass per trajectory.
inline CostSamples cost_samples(const TrajectoryBatch& batch, const FeatureBasis& basis,
                                const WeightVector& r, double alpha) {
    detail::require_mode(batch, SamplingMode::Geometric, "cost_samples");
    const Vector values = basis.values(r);
    CostSamples out(batch.trajectories.size());
    for (std::size_t m = 0; m < batch.trajectories.size(); ++m) {
        const auto& steps = batch.trajectories[m].steps;
        auto& c = out[m];
        c.resize(steps.size());
        double tail = steps.empty() ? 0.0 : values[static_cast<Eigen::Index>(steps.back().to)];
        for (std::size_t l = steps.size(); l-- > 0;) {
            tail = steps[l].cost + alpha * tail;
            c[l] = tail;
        }
    }
    return out;
}

/// Relative visit frequency over the sample origins l = 0..N_m-1.
inline Vector empirical_occupancy(const TrajectoryBatch& batch, std::size_t n) {
    detail::require_mode(batch, SamplingMode::Geometric, "empirical_occupancy");
    Vector counts = Vector::Zero(static_cast<Eigen::Index>(n));
    std::size_t total = 0;
    for (const auto& tr : batch.trajectories)
        for (const auto& st : tr.steps) {
            counts[static_cast<Eigen::Index>(st.from)] += 1.0;
            ++total;
        }
    if (total == 0) throw DomainError("empty batch");
    return counts / double(total);
}

/// D_t(i): mean of the cost samples that start at i; absent for unvisited states.
inline std::vector<std::optional<double>> monte_carlo_cost_estimate(const TrajectoryBatch& batch,
                                                                    const FeatureBasis& basis,
                                                                    const WeightVector& r,
                                                                    double alpha) {
    const auto c = cost_samples(batch, basis, r, alpha);
    const std::size_t n = basis.num_states();
    std::vector<double> sum(n, 0.0);
    std::vector<std::size_t> count(n, 0);
    for (std::size_t m = 0; m < c.size(); ++m)
        for (std::size_t l = 0; l < c[m].size(); ++l) {
            const auto i = batch.trajectories[m].steps[l].from;
            sum[i] += c[m][l];
            ++count[i];
        }
    std::vector<std::optional<double>> out(n);
    for (std::size_t i = 0; i < n; ++i)
        if (count[i]) out[i] = sum[i] / double(count[i]);
    return out;
}

/// One term of D_t(i) = sum_l f_l(i) E_l(i): samples at state i whose
/// remaining trajectory has exactly l+1 transitions.
struct LengthTerm {
    double frequency = 0.0;   // f_l(i)
    double mean_cost = 0.0;   // E_l(i), 0 when count == 0
    std::size_t count = 0;
};

/// Per state, terms indexed by l = (remaining transitions) - 1. Unvisited
/// states get an empty list.
inline std::vector<std::vector<LengthTerm>> empirical_decomposition(const TrajectoryBatch& batch,
                                                                    const FeatureBasis& basis,
                                                                    const WeightVector& r,
                                                                    double alpha) {
    const auto c = cost_samples(batch, basis, r, alpha);
    const std::size_t n = basis.num_states();
    std::vector<std::vector<double>> sums(n);
    std::vector<std::vector<std::size_t>> counts(n);
    std::vector<std::size_t> totals(n, 0);
    for (std::size_t m = 0; m < c.size(); ++m) {
        const auto& steps = batch.trajectories[m].steps;
        for (std::size_t l = 0; l < steps.size(); ++l) {
            const auto i = steps[l].from;
            const std::size_t len = steps.size() - l - 1;
            if (counts[i].size() <= len) {
                counts[i].resize(len + 1, 0);
                sums[i].resize(len + 1, 0.0);
            }
            ++counts[i][len];
            sums[i][len] += c[m][l];
            ++totals[i];
        }
    }
    std::vector<std::vector<LengthTerm>> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i].resize(counts[i].size());
        for (std::size_t l = 0; l < counts[i].size(); ++l) {
            auto& term = out[i][l];
            term.count = counts[i][l];
            term.frequency = double(counts[i][l]) / double(totals[i]);
            term.mean_cost = counts[i][l] ? sums[i][l] / double(counts[i][l]) : 0.0;
        }
    }
    return out;
}

}  // namespace lambdapi
