// Seeded problem instances shared by the unit and acceptance suites. Seeds
// marked "searched" were found by scanning seeds for the stated property and
// are frozen here.
#pragma once

#include <cstdint>
#include <vector>

#include "lambdapi/lambdapi.hpp"

namespace fixtures {

using namespace lambdapi;

/// Single-control model with row i of P and stage cost g(i) on every transition.
inline Mdp from_matrix(const Matrix& P, const Vector& g, double alpha) {
    std::vector<std::vector<Control>> model(std::size_t(P.rows()));
    for (Eigen::Index i = 0; i < P.rows(); ++i) {
        Control c{1, {}};
        for (Eigen::Index j = 0; j < P.cols(); ++j)
            if (P(i, j) > 0.0) c.successors.push_back({std::size_t(j), P(i, j), g[i]});
        model[std::size_t(i)].push_back(std::move(c));
    }
    return Mdp(std::move(model), alpha);
}

/// P = [[0.5,0.5],[0.8,0.2]], g = (1,2)
inline Mdp two_state(double alpha = 0.9) {
    Matrix P(2, 2);
    P << 0.5, 0.5, 0.8, 0.2;
    return from_matrix(P, Vector{{1.0, 2.0}}, alpha);
}

inline Mdp self_loop(double g, double alpha) {
    return Mdp({{Control{1, {{0, 1.0, g}}}}}, alpha);
}

/// Garnet with an irreducible first-control chain, scanning seeds upward from `seed`.
inline Mdp irreducible_garnet(std::size_t n, std::size_t controls, std::size_t branching,
                              double alpha, std::uint64_t& seed) {
    for (;; ++seed) {
        auto mdp = garnet(n, controls, branching, alpha, seed);
        try {
            stationary_distribution(mdp, Policy::first_controls(mdp));
            return mdp;
        } catch (const ReducibleChainError&) {
        }
    }
}

// searched: spectral radius of the projected map about 1.149 under the
// beta = 0.9 uniform mixture, lambda = 0
struct NonContraction {
    static constexpr std::uint64_t seed = 612;
    static constexpr double beta = 0.9;
    Mdp mdp = garnet(4, 1, 2, 0.95, seed);
    FeatureBasis basis = random_basis(4, 1, seed);
    StateDistribution xi() const {
        return mixture_distribution(stationary_distribution(mdp, Policy::first_controls(mdp)),
                                    StateDistribution::uniform(4), beta);
    }
};

// searched: exact lambda-PI(1) at lambda = 0.5 enters a 2-cycle
struct Oscillation {
    static constexpr std::uint64_t seed = 1;
    static constexpr double lambda = 0.5;
    Mdp mdp = garnet(10, 2, 3, 0.9, seed);
    FeatureBasis basis = random_basis(10, 2, seed);
};

// searched: exact lambda-PI(1), 30 iterations; best policy at lambda = 0.9
// is optimal, best at lambda = 0 is not
struct LambdaHelps {
    static constexpr std::uint64_t seed = 16;
    Mdp mdp = garnet(10, 2, 3, 0.9, seed);
    FeatureBasis basis = random_basis(10, 3, seed);
};

}  // namespace fixtures
