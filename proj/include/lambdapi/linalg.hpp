/**
 * @file linalg.hpp
 * @brief Dense linear-algebra helpers: norms, 1-norm condition estimates and
 *        condition-checked solves.
 */
#pragma once

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "lambdapi/error.hpp"

namespace lambdapi {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Cost vector J over the n states.
using CostVector = Vector;
/// Feature weights r over the s basis columns.
using WeightVector = Vector;

/// Condition estimates above this are reported as near-singular.
inline constexpr double kNearSingularCondition = 1e12;
/// Above this, square solves switch from LU to a column-pivoted QR.
inline constexpr double kQrFallbackCondition = 1e8;

inline double sup_norm(const Vector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

/// sqrt(sum_i w_i v_i^2)
inline double weighted_norm(const Vector& v, const Vector& w) {
    return std::sqrt((w.array() * v.array().square()).sum());
}

/// Higham/Hager 1-norm condition estimate from the LU factors of a square matrix.
inline double condition_estimate(const Matrix& a) {
    if (a.rows() == 0) return 1.0;
    const Eigen::PartialPivLU<Matrix> lu(a);
    const double rc = lu.rcond();
    if (!(rc > 0.0) || !std::isfinite(rc)) return std::numeric_limits<double>::infinity();
    return std::max(1.0, 1.0 / rc);
}

struct CheckedSolve {
    Vector x;
    double condition = 1.0;
    bool used_qr = false;
};

/// Solves a x = b, refusing systems whose condition estimate exceeds
/// kNearSingularCondition and falling back to QR above kQrFallbackCondition.
inline CheckedSolve solve_checked(const Matrix& a, const Vector& b, const std::string& what) {
    if (a.rows() != a.cols() || a.rows() != b.size())
        throw DimensionError(what + ": system is " + std::to_string(a.rows()) + "x" +
                             std::to_string(a.cols()) + " with rhs of length " +
                             std::to_string(b.size()));
    CheckedSolve out;
    const Eigen::PartialPivLU<Matrix> lu(a);
    const double rc = lu.rcond();
    out.condition = (rc > 0.0 && std::isfinite(rc)) ? std::max(1.0, 1.0 / rc)
                                                    : std::numeric_limits<double>::infinity();
    if (!(out.condition <= kNearSingularCondition))
        throw NearSingularError(what + " is numerically singular", out.condition);
    if (out.condition > kQrFallbackCondition) {
        out.x = a.colPivHouseholderQr().solve(b);
        out.used_qr = true;
    } else {
        out.x = lu.solve(b);
    }
    if (!out.x.allFinite()) throw SolverError(what + ": non-finite solution");
    return out;
}

/// max_i |a_i - b_i| / (1 + max_i |b_i|)
inline double relative_sup_error(const Vector& a, const Vector& b) {
    return sup_norm(a - b) / (1.0 + sup_norm(b));
}

}  // namespace lambdapi
