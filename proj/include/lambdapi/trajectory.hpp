/**
 * @file trajectory.hpp
 * @brief Seeded trajectory simulation: one long trajectory, geometric
 *        sampling with restarts, and policy-independent transition sample
 *        sets; plus the batch dump format.
 *
 * Dump format, one block per trajectory:
 *
 *     traj m=<m> N=<N_m>
 *     <i> <u> <j> <g>        N_m transition lines, 1-based states, control label
 */
#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "lambdapi/distribution.hpp"
#include "lambdapi/error.hpp"
#include "lambdapi/mdp.hpp"
#include "lambdapi/rng.hpp"
#include "lambdapi/text.hpp"

namespace lambdapi {

struct Step {
    std::size_t from;
    int control;  // control label
    std::size_t to;
    double cost;

    friend bool operator==(const Step&, const Step&) = default;
};

/// States i_0..i_N and the N transitions between them. In long-trajectory
/// mode with resampled origins consecutive steps need not link up.
struct Trajectory {
    std::vector<Step> steps;

    std::size_t num_transitions() const noexcept { return steps.size(); }
    /// i_l for l = 0..N
    std::size_t state(std::size_t l) const { return l < steps.size() ? steps[l].from : steps.back().to; }

    friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

enum class SamplingMode { LongTrajectory, Geometric };

struct TrajectoryBatch {
    SamplingMode mode = SamplingMode::LongTrajectory;
    double lambda = 0.0;                           // geometric mode
    std::optional<StateDistribution> restart_dist;  // geometric mode
    std::vector<Trajectory> trajectories;

    std::size_t total_transitions() const noexcept {
        std::size_t total = 0;
        for (const auto& tr : trajectories) total += tr.num_transitions();
        return total;
    }
};

/// Throws unless every recorded transition has positive model probability
/// and the mode-specific shape invariants hold.
inline void check_batch(const TrajectoryBatch& batch, const Mdp& mdp) {
    if (batch.mode == SamplingMode::LongTrajectory && batch.trajectories.size() != 1)
        throw DomainError("long-trajectory batch must hold exactly one trajectory");
    for (const auto& tr : batch.trajectories) {
        if (batch.mode == SamplingMode::Geometric && tr.steps.empty())
            throw DomainError("geometric trajectories need at least one transition");
        for (const auto& st : tr.steps) {
            if (st.from >= mdp.num_states() || st.to >= mdp.num_states())
                throw DimensionError("batch references a state outside the model");
            const auto& us = mdp.controls(st.from);
            const auto u = std::find_if(us.begin(), us.end(),
                                        [&](const Control& c) { return c.label == st.control; });
            if (u == us.end())
                throw DomainError("batch uses control " + std::to_string(st.control) +
                                  " not admissible at state " + std::to_string(st.from + 1));
            const auto s = std::find_if(u->successors.begin(), u->successors.end(),
                                        [&](const Successor& x) { return x.state == st.to; });
            if (s == u->successors.end() || !(s->prob > 0.0))
                throw DomainError("batch transition " + std::to_string(st.from + 1) + " -> " +
                                  std::to_string(st.to + 1) + " has zero model probability");
        }
    }
}

/// Per-state successor tables for one policy.
class PolicySampler {
public:
    PolicySampler(const Mdp& mdp, const Policy& mu) : mdp_(&mdp), mu_(mu) {
        check_policy(mdp, mu);
        tables_.reserve(mdp.num_states());
        for (std::size_t i = 0; i < mdp.num_states(); ++i) tables_.push_back(table(mdp, i, mu[i]));
    }

    Step step(Engine& eng, std::size_t i) const {
        const auto& c = mdp_->control(i, mu_[i]);
        const auto& s = c.successors[tables_[i].draw(eng)];
        return {i, c.label, s.state, s.cost};
    }

    static CategoricalTable table(const Mdp& mdp, std::size_t i, std::size_t u) {
        const auto& succ = mdp.control(i, u).successors;
        Vector p(static_cast<Eigen::Index>(succ.size()));
        for (std::size_t k = 0; k < succ.size(); ++k) p[static_cast<Eigen::Index>(k)] = succ[k].prob;
        return CategoricalTable(p);
    }

private:
    const Mdp* mdp_;
    Policy mu_;
    std::vector<CategoricalTable> tables_;
};

struct LongTrajectoryOptions {
    /// When set, each origin i_l is drawn independently from this distribution
    /// (exploration by state resampling) instead of following the chain.
    std::optional<StateDistribution> origin_dist;
};

/// One trajectory of `length` transitions under mu, starting from start_dist.
inline TrajectoryBatch simulate_long_trajectory(const Mdp& mdp, const Policy& mu,
                                                std::size_t length,
                                                const StateDistribution& start_dist,
                                                const RngStream& rng,
                                                const LongTrajectoryOptions& opts = {}) {
    if (length < 1) throw DomainError("trajectory length must be at least 1");
    if (start_dist.size() != mdp.num_states())
        throw DimensionError("start distribution does not match the number of states");
    if (opts.origin_dist && opts.origin_dist->size() != mdp.num_states())
        throw DimensionError("origin distribution does not match the number of states");
    const PolicySampler sampler(mdp, mu);
    auto eng = rng.engine();
    TrajectoryBatch batch;
    batch.mode = SamplingMode::LongTrajectory;
    batch.trajectories.resize(1);
    auto& steps = batch.trajectories[0].steps;
    steps.reserve(length);
    std::optional<CategoricalTable> origin;
    if (opts.origin_dist) origin.emplace(opts.origin_dist->values());
    std::size_t i = CategoricalTable(start_dist.values()).draw(eng);
    for (std::size_t l = 0; l < length; ++l) {
        steps.push_back(sampler.step(eng, i));
        i = origin ? origin->draw(eng) : steps.back().to;
    }
    return batch;
}

/// Restart states i_{0,m} for m = 0..t-1, drawn once and reusable across policies.
inline std::vector<std::size_t> restart_sequence(const StateDistribution& restart_dist,
                                                 std::size_t t, const RngStream& rng) {
    const CategoricalTable table(restart_dist.values());
    auto eng = rng.substream(0x7265737461727473ULL).engine();
    std::vector<std::size_t> out(t);
    for (auto& s : out) s = table.draw(eng);
    return out;
}

struct GeometricOptions {
    std::size_t workers = 1;
    /// Frozen restart states, one per trajectory; default draws fresh ones.
    const std::vector<std::size_t>* restarts = nullptr;
};

/// Trajectory m of a geometric batch: start from zeta_0 (or the frozen
/// restart), transition, then continue with probability lambda after each
/// arrival. Uses only rng.substream(m).
inline Trajectory simulate_geometric_trajectory(const PolicySampler& sampler,
                                                const CategoricalTable& restart, double lambda,
                                                const RngStream& rng, std::size_t m,
                                                std::optional<std::size_t> frozen_start = {}) {
    auto eng = rng.substream(m).engine();
    std::size_t i = frozen_start ? *frozen_start : restart.draw(eng);
    Trajectory tr;
    while (true) {
        tr.steps.push_back(sampler.step(eng, i));
        i = tr.steps.back().to;
        if (!(uniform01(eng) < lambda)) break;
    }
    return tr;
}

inline TrajectoryBatch simulate_geometric_batch(const Mdp& mdp, const Policy& mu, double lambda,
                                                const StateDistribution& restart_dist,
                                                std::size_t t, const RngStream& rng,
                                                const GeometricOptions& opts = {}) {
    if (!(lambda >= 0.0 && lambda < 1.0))
        throw DomainError("lambda must lie in [0,1), got " + std::to_string(lambda));
    if (t < 1) throw DomainError("geometric batch needs at least one trajectory");
    if (restart_dist.size() != mdp.num_states())
        throw DimensionError("restart distribution does not match the number of states");
    if (opts.restarts && opts.restarts->size() < t)
        throw DimensionError("frozen restart sequence is shorter than the batch");
    const PolicySampler sampler(mdp, mu);
    const CategoricalTable restart(restart_dist.values());
    TrajectoryBatch batch;
    batch.mode = SamplingMode::Geometric;
    batch.lambda = lambda;
    batch.restart_dist = restart_dist;
    batch.trajectories.resize(t);
    const auto run = [&](std::size_t first, std::size_t stride) {
        for (std::size_t m = first; m < t; m += stride) {
            std::optional<std::size_t> start;
            if (opts.restarts) start = (*opts.restarts)[m];
            batch.trajectories[m] = simulate_geometric_trajectory(sampler, restart, lambda, rng, m, start);
        }
    };
    const std::size_t workers = std::max<std::size_t>(1, std::min(opts.workers, t));
    if (workers == 1) {
        run(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w, workers);
        for (auto& th : pool) th.join();
    }
    return batch;
}

// ---------------------------------------------------------------------------
// Policy-independent transition samples: origins i ~ dist, and for every
// control u in U(i) one successor j ~ p_i.(u). Any policy selects its own
// transitions from the same stored set.

struct TransitionSampleSet {
    std::vector<std::size_t> origins;
    /// per origin, one sampled step for each control position
    std::vector<std::vector<Step>> steps;
    std::optional<StateDistribution> origin_dist;

    std::size_t size() const noexcept { return origins.size(); }

    /// FNV-1a over the stored transitions.
    std::uint64_t fingerprint() const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        const auto feed = [&h](const void* p, std::size_t len) {
            const auto* b = static_cast<const unsigned char*>(p);
            for (std::size_t k = 0; k < len; ++k) {
                h ^= b[k];
                h *= 0x100000001b3ULL;
            }
        };
        for (const auto& row : steps)
            for (const auto& st : row) {
                feed(&st.from, sizeof st.from);
                feed(&st.control, sizeof st.control);
                feed(&st.to, sizeof st.to);
                feed(&st.cost, sizeof st.cost);
            }
        return h;
    }

    /// The single-transition geometric batch (lambda = 0) that mu selects.
    TrajectoryBatch batch_for(const Mdp& mdp, const Policy& mu) const {
        check_policy(mdp, mu);
        TrajectoryBatch batch;
        batch.mode = SamplingMode::Geometric;
        batch.lambda = 0.0;
        batch.restart_dist = origin_dist;
        batch.trajectories.reserve(origins.size());
        for (std::size_t k = 0; k < origins.size(); ++k)
            batch.trajectories.push_back(Trajectory{{steps[k][mu[origins[k]]]}});
        return batch;
    }
};

inline TransitionSampleSet sample_transition_set(const Mdp& mdp, const StateDistribution& dist,
                                                 std::size_t t, const RngStream& rng) {
    if (t < 1) throw DomainError("transition sample set needs at least one sample");
    if (dist.size() != mdp.num_states())
        throw DimensionError("origin distribution does not match the number of states");
    std::vector<std::vector<CategoricalTable>> tables(mdp.num_states());
    for (std::size_t i = 0; i < mdp.num_states(); ++i)
        for (std::size_t u = 0; u < mdp.num_controls(i); ++u)
            tables[i].push_back(PolicySampler::table(mdp, i, u));
    const CategoricalTable origin(dist.values());
    auto eng = rng.engine();
    TransitionSampleSet set;
    set.origin_dist = dist;
    set.origins.reserve(t);
    set.steps.reserve(t);
    for (std::size_t k = 0; k < t; ++k) {
        const std::size_t i = origin.draw(eng);
        std::vector<Step> row;
        row.reserve(mdp.num_controls(i));
        for (std::size_t u = 0; u < mdp.num_controls(i); ++u) {
            const auto& c = mdp.control(i, u);
            const auto& s = c.successors[tables[i][u].draw(eng)];
            row.push_back({i, c.label, s.state, s.cost});
        }
        set.origins.push_back(i);
        set.steps.push_back(std::move(row));
    }
    return set;
}

// ---------------------------------------------------------------------------
// Dump format

inline void write_batch(std::ostream& out, const TrajectoryBatch& batch) {
    for (std::size_t m = 0; m < batch.trajectories.size(); ++m) {
        const auto& tr = batch.trajectories[m];
        out << "traj m=" << m + 1 << " N=" << tr.num_transitions() << '\n';
        for (const auto& st : tr.steps)
            out << st.from + 1 << ' ' << st.control << ' ' << st.to + 1 << ' '
                << text::format_double(st.cost) << '\n';
    }
}

inline std::string to_string(const TrajectoryBatch& batch) {
    std::ostringstream out;
    write_batch(out, batch);
    return out.str();
}

/// Reads a dump back; mode, lambda and restart distribution are not part of
/// the dump and come from the caller.
inline TrajectoryBatch parse_batch(std::istream& in, SamplingMode mode, double lambda = 0.0,
                                   std::optional<StateDistribution> restart_dist = std::nullopt) {
    TrajectoryBatch batch;
    batch.mode = mode;
    batch.lambda = lambda;
    batch.restart_dist = std::move(restart_dist);
    std::string raw;
    std::size_t lineno = 0, expected = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto line = text::strip_comment(raw);
        if (line.empty()) continue;
        const auto tok = text::split_ws(line);
        if (tok[0] == "traj") {
            if (expected != 0) throw ParseError("trajectory ended early", lineno);
            if (tok.size() != 3) throw ParseError("expected 'traj m=<m> N=<N>'", lineno);
            const auto m = text::parse_int(text::field(tok[1], "m", lineno), lineno, "m");
            const auto N = text::parse_int(text::field(tok[2], "N", lineno), lineno, "N");
            if (m != static_cast<std::int64_t>(batch.trajectories.size()) + 1)
                throw ParseError("trajectories must be numbered consecutively from 1", lineno);
            if (N < 0) throw ParseError("N must be non-negative", lineno);
            batch.trajectories.emplace_back();
            batch.trajectories.back().steps.reserve(static_cast<std::size_t>(N));
            expected = static_cast<std::size_t>(N);
            continue;
        }
        if (expected == 0) throw ParseError("transition line outside a trajectory", lineno);
        if (tok.size() != 4) throw ParseError("expected '<i> <u> <j> <g>'", lineno);
        const auto i = text::parse_int(tok[0], lineno, "i");
        const auto u = text::parse_int(tok[1], lineno, "u");
        const auto j = text::parse_int(tok[2], lineno, "j");
        const double g = text::parse_double(tok[3], lineno, "g");
        if (i < 1 || j < 1) throw ParseError("states are 1-based", lineno);
        batch.trajectories.back().steps.push_back(
            {static_cast<std::size_t>(i - 1), static_cast<int>(u), static_cast<std::size_t>(j - 1), g});
        --expected;
    }
    if (expected != 0) throw ParseError("last trajectory is truncated", lineno);
    return batch;
}

inline TrajectoryBatch parse_batch(const std::string& contents, SamplingMode mode,
                                   double lambda = 0.0,
                                   std::optional<StateDistribution> restart_dist = std::nullopt) {
    std::istringstream in(contents);
    return parse_batch(in, mode, lambda, std::move(restart_dist));
}

}  // namespace lambdapi
