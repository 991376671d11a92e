/**
 * @file error.hpp
 * @brief Exception hierarchy shared by every lambdapi module.
 */
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace lambdapi {

/// Base of everything the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Vector/matrix sizes that do not agree with the model.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Parameter outside its admissible range (lambda, alpha, beta, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed input text (MDP file, basis file, batch dump, config).
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A dense solve failed its residual check.
class SolverError : public Error {
public:
    using Error::Error;
};

/// Linear system whose condition estimate exceeds the near-singular threshold.
class NearSingularError : public Error {
public:
    NearSingularError(const std::string& what, double condition)
        : Error(what + " (condition estimate " + std::to_string(condition) + ")"),
          condition_(condition) {}
    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

/// Markov chain with states not reachable from every other state.
class ReducibleChainError : public Error {
public:
    explicit ReducibleChainError(std::vector<std::size_t> unreachable)
        : Error(describe(unreachable)), unreachable_(std::move(unreachable)) {}
    /// 0-based indices of states that cannot be reached from state 0 or cannot reach it.
    const std::vector<std::size_t>& unreachable() const noexcept { return unreachable_; }

private:
    static std::string describe(const std::vector<std::size_t>& states) {
        std::string s = "reducible chain; states outside the communicating class of state 1: {";
        for (std::size_t k = 0; k < states.size(); ++k) {
            if (k) s += ", ";
            s += std::to_string(states[k] + 1);
        }
        return s + "}";
    }
    std::vector<std::size_t> unreachable_;
};

/// Sampled feature moments are singular: some states were never visited.
class CoverageError : public Error {
public:
    CoverageError(const std::string& what, std::vector<std::size_t> unvisited)
        : Error(what), unvisited_(std::move(unvisited)) {}
    const std::vector<std::size_t>& unvisited() const noexcept { return unvisited_; }

private:
    std::vector<std::size_t> unvisited_;
};

/// Iterative evaluator whose weights blew past the divergence threshold.
class DivergenceError : public Error {
public:
    DivergenceError(std::size_t step, double norm, double threshold)
        : Error("iterates diverged at step " + std::to_string(step) + ": |r| = " +
                std::to_string(norm) + " > " + std::to_string(threshold)),
          step_(step), norm_(norm), threshold_(threshold) {}
    std::size_t step() const noexcept { return step_; }
    double norm() const noexcept { return norm_; }
    double threshold() const noexcept { return threshold_; }

private:
    std::size_t step_;
    double norm_;
    double threshold_;
};

/// Experiment configuration problems (CLI exit code 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace lambdapi
