#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mcomp {

// Argument outside the mathematical domain of an operation (t <= 0 for gamma, s <= 1, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Query beyond the range a table or set was materialized for.
class OutOfRangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Requested allocation would exceed the configured memory budget.
class ResourceError : public std::runtime_error {
public:
    ResourceError(const std::string& what, std::uint64_t budget_bytes)
        : std::runtime_error(what), budget_bytes_(budget_bytes) {}
    std::uint64_t budget_bytes() const noexcept { return budget_bytes_; }

private:
    std::uint64_t budget_bytes_;
};

class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// An internal invariant of a construction did not hold.
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Basis precondition failed; carries the least n that has no representation.
class NotABasisError : public PreconditionError {
public:
    NotABasisError(const std::string& what, std::uint64_t first_failure)
        : PreconditionError(what), first_failure_(first_failure) {}
    std::uint64_t first_failure() const noexcept { return first_failure_; }

private:
    std::uint64_t first_failure_;
};

class InfeasibleTargetError : public std::runtime_error {
public:
    InfeasibleTargetError(const std::string& what, double target, double reach)
        : std::runtime_error(what), target_(target), reach_(reach) {}
    double target() const noexcept { return target_; }
    double reach() const noexcept { return reach_; }

private:
    double target_;
    double reach_;
};

// q_n > sum_{k>n} q_k (+ omitted tail) at a global index n.
class DominanceError : public std::runtime_error {
public:
    DominanceError(const std::string& what, std::size_t index)
        : std::runtime_error(what), index_(index) {}
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

// The log-Mertens target cannot be reached by dropping or adding the
// adjustable primes below the cutoff; [low, high] is what is reachable.
class UnreachableTargetError : public std::runtime_error {
public:
    UnreachableTargetError(const std::string& what, double low, double high)
        : std::runtime_error(what), low_(low), high_(high) {}
    double low() const noexcept { return low_; }
    double high() const noexcept { return high_; }

private:
    double low_;
    double high_;
};

// A complement construction produced a family with an unrepresentable n.
class VerificationError : public std::runtime_error {
public:
    VerificationError(const std::string& what, std::uint64_t counterexample)
        : std::runtime_error(what), counterexample_(counterexample) {}
    std::uint64_t counterexample() const noexcept { return counterexample_; }

private:
    std::uint64_t counterexample_;
};

} // namespace mcomp
