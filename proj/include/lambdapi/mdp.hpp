/**
 * @file mdp.hpp
 * @brief Finite discounted MDP model, stationary policies, the induced
 *        Markov chain (P_mu, g_mu) and the line-oriented MDP file format.
 *
 * States are 0-based internally and 1-based in every text format. A control
 * is addressed by its position in U(i); controls are kept sorted by their
 * file label, so "lowest control index" means lowest position.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lambdapi/error.hpp"
#include "lambdapi/linalg.hpp"
#include "lambdapi/text.hpp"

namespace lambdapi {

/// Default cap on the number of states accepted by constructors and parsers.
inline constexpr std::size_t kDefaultMaxStates = 2000;

struct Successor {
    std::size_t state;
    double prob;
    double cost;  // g(i, u, j)
};

struct Control {
    int label;  // control id as written in files
    std::vector<Successor> successors;
};

class Mdp {
public:
    Mdp(std::vector<std::vector<Control>> controls, double alpha,
        std::size_t max_states = kDefaultMaxStates)
        : controls_(std::move(controls)), alpha_(alpha) {
        if (!(alpha_ > 0.0 && alpha_ < 1.0))
            throw DomainError("discount factor must lie in (0,1), got " + std::to_string(alpha_));
        const std::size_t n = controls_.size();
        if (n == 0) throw DomainError("MDP needs at least one state");
        if (n > max_states)
            throw DomainError("MDP has " + std::to_string(n) + " states, above the cap of " +
                              std::to_string(max_states));
        expected_cost_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            auto& us = controls_[i];
            if (us.empty()) throw DomainError("state " + std::to_string(i + 1) + " has no controls");
            std::sort(us.begin(), us.end(),
                      [](const Control& a, const Control& b) { return a.label < b.label; });
            for (std::size_t k = 1; k < us.size(); ++k)
                if (us[k].label == us[k - 1].label)
                    throw DomainError("state " + std::to_string(i + 1) + " repeats control " +
                                      std::to_string(us[k].label));
            expected_cost_[i].reserve(us.size());
            for (auto& u : us) {
                double total = 0.0, gbar = 0.0;
                std::sort(u.successors.begin(), u.successors.end(),
                          [](const Successor& a, const Successor& b) { return a.state < b.state; });
                for (std::size_t k = 0; k < u.successors.size(); ++k) {
                    const auto& s = u.successors[k];
                    if (s.state >= n)
                        throw DimensionError("successor state " + std::to_string(s.state + 1) +
                                             " out of range");
                    if (k && s.state == u.successors[k - 1].state)
                        throw DomainError("duplicate successor in row (" + std::to_string(i + 1) +
                                          "," + std::to_string(u.label) + ")");
                    if (!(s.prob >= 0.0) || !std::isfinite(s.cost))
                        throw DomainError("negative probability or non-finite cost in row (" +
                                          std::to_string(i + 1) + "," + std::to_string(u.label) +
                                          ")");
                    total += s.prob;
                    gbar += s.prob * s.cost;
                }
                if (std::abs(total - 1.0) > 1e-12)
                    throw DomainError("row (" + std::to_string(i + 1) + "," +
                                      std::to_string(u.label) + ") sums to " +
                                      text::format_double(total));
                expected_cost_[i].push_back(gbar);
            }
        }
    }

    std::size_t num_states() const noexcept { return controls_.size(); }
    double alpha() const noexcept { return alpha_; }
    std::size_t num_controls(std::size_t i) const { return controls_.at(i).size(); }
    const std::vector<Control>& controls(std::size_t i) const { return controls_.at(i); }
    const Control& control(std::size_t i, std::size_t u) const { return controls_.at(i).at(u); }
    const std::vector<std::vector<Control>>& all_controls() const noexcept { return controls_; }

    /// sum_j p_ij(u) g(i,u,j)
    double expected_cost(std::size_t i, std::size_t u) const { return expected_cost_[i][u]; }

    /// sum_j p_ij(u) (g(i,u,j) + alpha J(j))
    double q_value(std::size_t i, std::size_t u, const Vector& j_values) const {
        double v = expected_cost_[i][u];
        for (const auto& s : controls_[i][u].successors) v += alpha_ * s.prob * j_values[s.state];
        return v;
    }

    /// Same model under another discount factor.
    Mdp with_alpha(double alpha) const { return Mdp(controls_, alpha, controls_.size()); }

    friend bool operator==(const Mdp& a, const Mdp& b) {
        if (a.alpha_ != b.alpha_ || a.controls_.size() != b.controls_.size()) return false;
        for (std::size_t i = 0; i < a.controls_.size(); ++i) {
            const auto& x = a.controls_[i];
            const auto& y = b.controls_[i];
            if (x.size() != y.size()) return false;
            for (std::size_t u = 0; u < x.size(); ++u) {
                if (x[u].label != y[u].label || x[u].successors.size() != y[u].successors.size())
                    return false;
                for (std::size_t k = 0; k < x[u].successors.size(); ++k) {
                    const auto& p = x[u].successors[k];
                    const auto& q = y[u].successors[k];
                    if (p.state != q.state || p.prob != q.prob || p.cost != q.cost) return false;
                }
            }
        }
        return true;
    }

private:
    std::vector<std::vector<Control>> controls_;
    std::vector<std::vector<double>> expected_cost_;
    double alpha_;
};

/// Stationary policy: mu[i] is a position in U(i).
class Policy {
public:
    Policy() = default;
    explicit Policy(std::vector<std::size_t> choice) : choice_(std::move(choice)) {}

    /// mu(i) = first control for every state.
    static Policy first_controls(const Mdp& mdp) {
        return Policy(std::vector<std::size_t>(mdp.num_states(), 0));
    }

    std::size_t size() const noexcept { return choice_.size(); }
    std::size_t operator[](std::size_t i) const { return choice_[i]; }
    std::size_t& operator[](std::size_t i) { return choice_[i]; }
    const std::vector<std::size_t>& choices() const noexcept { return choice_; }

    friend bool operator==(const Policy&, const Policy&) = default;

private:
    std::vector<std::size_t> choice_;
};

inline void check_policy(const Mdp& mdp, const Policy& mu) {
    if (mu.size() != mdp.num_states())
        throw DimensionError("policy has " + std::to_string(mu.size()) + " entries for " +
                             std::to_string(mdp.num_states()) + " states");
    for (std::size_t i = 0; i < mu.size(); ++i)
        if (mu[i] >= mdp.num_controls(i))
            throw DomainError("policy picks control position " + std::to_string(mu[i]) +
                              " at state " + std::to_string(i + 1) + " which has only " +
                              std::to_string(mdp.num_controls(i)) + " controls");
}

inline void check_cost_vector(const Mdp& mdp, const Vector& j_values, const char* what = "J") {
    if (static_cast<std::size_t>(j_values.size()) != mdp.num_states())
        throw DimensionError(std::string(what) + " has length " + std::to_string(j_values.size()) +
                             ", expected " + std::to_string(mdp.num_states()));
    if (!j_values.allFinite()) throw DomainError(std::string(what) + " has non-finite entries");
}

/// Transition matrix P_mu and expected stage cost g_mu of a policy.
struct PolicyMatrices {
    Matrix P;
    Vector gbar;
};

inline PolicyMatrices policy_matrices(const Mdp& mdp, const Policy& mu) {
    check_policy(mdp, mu);
    const auto n = static_cast<Eigen::Index>(mdp.num_states());
    PolicyMatrices pm{Matrix::Zero(n, n), Vector::Zero(n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto ui = mu[static_cast<std::size_t>(i)];
        for (const auto& s : mdp.control(static_cast<std::size_t>(i), ui).successors)
            pm.P(i, static_cast<Eigen::Index>(s.state)) += s.prob;
        pm.gbar[i] = mdp.expected_cost(static_cast<std::size_t>(i), ui);
    }
    return pm;
}

// ---------------------------------------------------------------------------
// MDP file format
//
//   mdp n=<n> alpha=<float>
//   t <i> <u> <j> <p> <g>      one line per positive-probability triple
//
// '#' starts a comment. Rows are accepted when they sum to 1 within 1e-9;
// rows off by more than 1e-12 are renormalized.

inline Mdp parse_mdp(std::istream& in, std::size_t max_states = kDefaultMaxStates) {
    std::string raw;
    std::size_t lineno = 0;
    std::size_t n = 0;
    double alpha = 0.0;
    bool have_header = false;
    // (state, label) -> successors, ordered for a deterministic layout
    std::vector<std::map<int, std::vector<Successor>>> rows;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto line = text::strip_comment(raw);
        if (line.empty()) continue;
        const auto tok = text::split_ws(line);
        if (!have_header) {
            if (tok.size() != 3 || tok[0] != "mdp")
                throw ParseError("expected header 'mdp n=<n> alpha=<float>'", lineno);
            const auto nn = text::parse_int(text::field(tok[1], "n", lineno), lineno, "n");
            alpha = text::parse_double(text::field(tok[2], "alpha", lineno), lineno, "alpha");
            if (nn < 1) throw ParseError("n must be positive", lineno);
            if (static_cast<std::size_t>(nn) > max_states)
                throw ParseError("n=" + std::to_string(nn) + " exceeds the state cap " +
                                     std::to_string(max_states),
                                 lineno);
            n = static_cast<std::size_t>(nn);
            rows.resize(n);
            have_header = true;
            continue;
        }
        if (tok.size() != 6 || tok[0] != "t")
            throw ParseError("expected 't <i> <u> <j> <p> <g>'", lineno);
        const auto i = text::parse_int(tok[1], lineno, "i");
        const auto u = text::parse_int(tok[2], lineno, "u");
        const auto j = text::parse_int(tok[3], lineno, "j");
        const double p = text::parse_double(tok[4], lineno, "p");
        const double g = text::parse_double(tok[5], lineno, "g");
        if (i < 1 || static_cast<std::size_t>(i) > n || j < 1 || static_cast<std::size_t>(j) > n)
            throw ParseError("state index out of range 1.." + std::to_string(n), lineno);
        if (u < 1) throw ParseError("control indices are 1-based", lineno);
        if (!(p > 0.0) || p > 1.0 + 1e-9)
            throw ParseError("probability must lie in (0,1]", lineno);
        if (!std::isfinite(g)) throw ParseError("cost must be finite", lineno);
        auto& succ = rows[static_cast<std::size_t>(i - 1)][static_cast<int>(u)];
        for (const auto& s : succ)
            if (s.state == static_cast<std::size_t>(j - 1))
                throw ParseError("duplicate triple (" + std::to_string(i) + "," + std::to_string(u) +
                                     "," + std::to_string(j) + ")",
                                 lineno);
        succ.push_back({static_cast<std::size_t>(j - 1), p, g});
    }
    if (!have_header) throw ParseError("missing 'mdp' header", 0);

    std::vector<std::vector<Control>> controls(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].empty())
            throw ParseError("state " + std::to_string(i + 1) + " has no transitions", 0);
        for (auto& [label, succ] : rows[i]) {
            double total = 0.0;
            for (const auto& s : succ) total += s.prob;
            if (std::abs(total - 1.0) > 1e-9)
                throw ParseError("probabilities of (" + std::to_string(i + 1) + "," +
                                     std::to_string(label) + ") sum to " +
                                     text::format_double(total),
                                 0);
            if (std::abs(total - 1.0) > 1e-12)
                for (auto& s : succ) s.prob /= total;
            controls[i].push_back({label, std::move(succ)});
        }
    }
    try {
        return Mdp(std::move(controls), alpha, max_states);
    } catch (const DomainError& e) {
        throw ParseError(e.what(), 0);
    }
}

inline Mdp parse_mdp(const std::string& contents, std::size_t max_states = kDefaultMaxStates) {
    std::istringstream in(contents);
    return parse_mdp(in, max_states);
}

inline Mdp load_mdp(const std::string& path, std::size_t max_states = kDefaultMaxStates) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open MDP file '" + path + "'", 0);
    return parse_mdp(in, max_states);
}

inline void write_mdp(std::ostream& out, const Mdp& mdp) {
    out << "mdp n=" << mdp.num_states() << " alpha=" << text::format_double(mdp.alpha()) << '\n';
    for (std::size_t i = 0; i < mdp.num_states(); ++i)
        for (const auto& u : mdp.controls(i))
            for (const auto& s : u.successors)
                if (s.prob > 0.0)
                    out << "t " << i + 1 << ' ' << u.label << ' ' << s.state + 1 << ' '
                        << text::format_double(s.prob) << ' ' << text::format_double(s.cost)
                        << '\n';
}

inline std::string to_string(const Mdp& mdp) {
    std::ostringstream out;
    write_mdp(out, mdp);
    return out.str();
}

}  // namespace lambdapi
