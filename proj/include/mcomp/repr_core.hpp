#pragma once

// Finite integer sets, multiplicative representation functions, and exact
// verification of the basis / complement property on an initial segment.

#include "mcomp/prime_engine.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mcomp {

// A set of positive integers, complete on [1, limit]: every member is listed.
class IntegerSet {
public:
    using value_type = std::uint32_t;

    IntegerSet() = default;
    // elements must be strictly increasing, each in [1, limit].
    IntegerSet(std::vector<value_type> elements, std::uint64_t limit);

    // Sorts and deduplicates; drops nothing, so every value must lie in [1, limit].
    static IntegerSet from_unsorted(std::vector<value_type> elements, std::uint64_t limit);
    // {1, ..., limit}
    static IntegerSet range(std::uint64_t limit);

    std::span<const value_type> elements() const noexcept { return elements_; }
    std::uint64_t limit() const noexcept { return limit_; }
    std::size_t size() const noexcept { return elements_.size(); }
    bool empty() const noexcept { return elements_.empty(); }

    bool contains(std::uint64_t n) const noexcept;

    // |{a in A : a <= x}| by binary search; no range check.
    std::size_t rank(std::uint64_t x) const noexcept;

    // A restricted to [1, x] (x <= limit), complete on [1, x].
    IntegerSet truncated(std::uint64_t x) const;

    // Byte map m with m[n] = 1 iff n in A, for n in [0, upto].
    std::vector<std::uint8_t> membership(std::uint64_t upto) const;

    friend bool operator==(const IntegerSet&, const IntegerSet&) = default;

private:
    std::vector<value_type> elements_;
    std::uint64_t limit_ = 0;
};

// One checkpoint of a checkpointed construction.
struct CheckpointRecord {
    std::uint64_t n = 0;              // checkpoint value n_i
    std::uint64_t previous = 0;       // n_{i-1}; 0 for the seed
    std::vector<std::size_t> set_sizes;
    // F-set sizes that produced this checkpoint (empty for the seed).
    std::size_t f0 = 0, f1 = 0, f2 = 0;
    std::vector<std::size_t> f3;
    bool verified = false;
    std::optional<std::uint64_t> counterexample;
    bool consistent = true;           // A_j^i restricted to [n_{i-1}] equals A_j^{i-1}
    double max_density = 0.0;         // max_j |A_j^i| * log(n_i) / n_i
    double density_bound = 0.0;       // 1/h + epsilon
    bool within_bound = false;
    bool precondition_met = true;     // n_i > n_{i-1}^2
    bool capped = false;              // growth policy hit its cap
};

struct Provenance {
    std::string construction;         // "theorem5", "theorem8", or "file"
    double epsilon = 0.0;
    std::uint64_t seed_n = 0;         // N used as n_0
    std::uint64_t seed_n_formula = 0; // ceil(256 / eps^2) + 1
    bool seed_n_overridden = false;
    std::vector<CheckpointRecord> records;
};

// An h-tuple of sets, each complete on [1, checkpoints.back()].
struct ComplementFamily {
    int h = 0;
    std::vector<IntegerSet> sets;
    std::vector<std::uint64_t> checkpoints;
    Provenance provenance;
};

// A(x) = |A cap [1, x]|; OutOfRangeError if x > A.limit().
std::uint64_t counting(const IntegerSet& set, double x);

// S_{A,h}(n): ordered h-tuples of elements of A with product n.
std::uint64_t repr_count(const IntegerSet& set, int h, std::uint64_t n, const FactorSieve& sieve);

// S_{A_1,...,A_h}(n) with a_i drawn from family[i].
std::uint64_t joint_repr_count(std::span<const IntegerSet> family, std::uint64_t n, const FactorSieve& sieve);

// sum_{n <= x} S_{A_1,...,A_h}(n), by enumerating tuples with product <= x.
std::uint64_t summatory_repr(std::span<const IntegerSet> family, std::uint64_t x);

// Least n in [1, x] with S_{A_1,...,A_h}(n) = 0, or nullopt if every n is represented.
std::optional<std::uint64_t> verify_complement(std::span<const IntegerSet> family, std::uint64_t x,
                                               const FactorSieve& sieve);

std::optional<std::uint64_t> verify_basis(const IntegerSet& set, int h, std::uint64_t x, const FactorSieve& sieve);

// A(x) * log(x)^(1 - tau) / x; DomainError for x < 2.
double density_statistic(const IntegerSet& set, double tau, double x);

} // namespace mcomp
