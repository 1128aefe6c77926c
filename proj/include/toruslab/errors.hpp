#pragma once

#include <stdexcept>
#include <string>

namespace toruslab {

/// Bad caller input: dimension mismatch, out-of-range degree, bad flags.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A system or form description that parses but violates its invariants.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Non-finite values or a breakdown of an iterative numerical procedure.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, long long step = -1)
        : std::runtime_error(step >= 0 ? what + " (step " + std::to_string(step) + ")" : what),
          step_(step) {}

    long long step() const noexcept { return step_; }

private:
    long long step_;
};

/// Two evaluations of an algebraic identity disagree; indicates a bug.
class ConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Exponent clusters cannot be separated at the configured gap threshold.
class DegenerateSplittingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Lyapunov metric series did not decay within the truncation budget.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, int block)
        : std::runtime_error(what), block_(block) {}

    int block() const noexcept { return block_; }

private:
    int block_;
};

}  // namespace toruslab
