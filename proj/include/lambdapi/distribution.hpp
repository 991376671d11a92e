#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "lambdapi/error.hpp"
#include "lambdapi/linalg.hpp"

namespace lambdapi {

/// Strictly positive probability vector over the states (xi, zeta_0, ...).
class StateDistribution {
public:
    explicit StateDistribution(Vector xi) : xi_(std::move(xi)) {
        if (xi_.size() == 0) throw DimensionError("empty state distribution");
        if (!xi_.allFinite()) throw DomainError("state distribution has non-finite entries");
        if (!(xi_.minCoeff() > 0.0))
            throw DomainError("state distribution must be strictly positive (min entry " +
                              std::to_string(xi_.minCoeff()) + ")");
        if (std::abs(xi_.sum() - 1.0) > 1e-12)
            throw DomainError("state distribution sums to " + std::to_string(xi_.sum()));
    }

    /// Normalizes positive weights into a distribution.
    static StateDistribution from_weights(const Vector& w) {
        if (w.size() == 0 || !(w.minCoeff() > 0.0))
            throw DomainError("weights must be strictly positive");
        return StateDistribution(w / w.sum());
    }

    static StateDistribution uniform(std::size_t n) {
        return StateDistribution(Vector::Constant(static_cast<Eigen::Index>(n), 1.0 / double(n)));
    }

    std::size_t size() const noexcept { return static_cast<std::size_t>(xi_.size()); }
    double operator[](std::size_t i) const { return xi_[static_cast<Eigen::Index>(i)]; }
    const Vector& values() const noexcept { return xi_; }

private:
    Vector xi_;
};

}  // namespace lambdapi
