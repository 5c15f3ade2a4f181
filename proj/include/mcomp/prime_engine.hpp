#pragma once

// Prime sieving, smallest-prime-factor tables, and Mertens-type products
// over subsets of the primes.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace mcomp {

struct SieveOptions {
    // Candidates per segment of the segmented sieve.
    std::uint64_t segment_size = 100'000'000;
    // Upper bound on the bytes a single table may allocate.
    std::uint64_t memory_budget_bytes = std::uint64_t{3} << 30;
};

// Largest limit representable by the 32-bit storage used for primes and spf entries.
inline constexpr std::uint64_t max_table_limit = 0xFFFF'FFFFull;

// All primes <= limit, strictly increasing.
class PrimeTable {
public:
    PrimeTable(std::uint64_t limit, std::vector<std::uint32_t> primes);

    std::uint64_t limit() const noexcept { return limit_; }
    std::size_t size() const noexcept { return primes_.size(); }
    std::span<const std::uint32_t> primes() const noexcept { return primes_; }

    // 0-based: prime(0) == 2.
    std::uint64_t prime(std::size_t rank) const { return primes_.at(rank); }

    // Number of tabled primes <= x (x may be any value; no range check).
    std::size_t count_upto(std::uint64_t x) const noexcept;

    // 0-based rank of p if p is a tabled prime.
    std::optional<std::size_t> rank_of(std::uint64_t p) const noexcept;

    bool is_prime(std::uint64_t n) const noexcept { return rank_of(n).has_value(); }

private:
    std::uint64_t limit_;
    std::vector<std::uint32_t> primes_;
};

// Segmented sieve of Eratosthenes. Throws ResourceError if the estimated
// allocation exceeds options.memory_budget_bytes.
PrimeTable sieve_primes(std::uint64_t limit, const SieveOptions& options = {});

// pi(x) for real x <= table.limit(); OutOfRangeError otherwise.
std::uint64_t prime_count(const PrimeTable& table, double x);

// Smallest prime factor of every n in [2, limit].
class FactorSieve {
public:
    explicit FactorSieve(std::uint64_t limit, const SieveOptions& options = {});

    std::uint64_t limit() const noexcept { return limit_; }

    // spf(n) for 2 <= n <= limit.
    std::uint32_t spf(std::uint64_t n) const noexcept { return spf_[n]; }

    bool is_prime(std::uint64_t n) const noexcept { return n >= 2 && n <= limit_ && spf_[n] == n; }

private:
    std::uint64_t limit_;
    std::vector<std::uint32_t> spf_;
};

struct PrimePower {
    std::uint64_t prime;
    unsigned exponent;
    friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

// Prime factors of n with multiplicity, ascending; n == 1 gives {}.
std::vector<std::uint64_t> factorize(std::uint64_t n, const FactorSieve& sieve);

// Same factorization grouped as prime powers.
std::vector<PrimePower> factorize_powers(std::uint64_t n, const FactorSieve& sieve);

// All divisors of n in ascending order.
std::vector<std::uint64_t> divisors(std::uint64_t n, const FactorSieve& sieve);

// A subset of the primes of a PrimeTable, stored as a bitset indexed by prime rank.
class PrimeSubset {
public:
    explicit PrimeSubset(std::shared_ptr<const PrimeTable> base);

    static PrimeSubset all(std::shared_ptr<const PrimeTable> base);
    static PrimeSubset of_primes(std::shared_ptr<const PrimeTable> base,
                                 std::span<const std::uint64_t> primes);

    const PrimeTable& base() const noexcept { return *base_; }
    const std::shared_ptr<const PrimeTable>& base_ptr() const noexcept { return base_; }

    bool contains_rank(std::size_t rank) const noexcept
    {
        return (words_[rank >> 6] >> (rank & 63)) & 1u;
    }
    // False for non-primes and values outside the table.
    bool contains(std::uint64_t p) const noexcept;

    void insert_rank(std::size_t rank) noexcept { words_[rank >> 6] |= std::uint64_t{1} << (rank & 63); }
    void erase_rank(std::size_t rank) noexcept { words_[rank >> 6] &= ~(std::uint64_t{1} << (rank & 63)); }
    void insert(std::uint64_t p);
    void erase(std::uint64_t p);

    std::size_t count() const noexcept;
    // Members <= x.
    std::size_t count_upto(std::uint64_t x) const noexcept;
    bool empty() const noexcept { return count() == 0; }

    // Members <= x in ascending order.
    std::vector<std::uint64_t> members(std::uint64_t x) const;
    std::vector<std::uint64_t> members() const { return members(base_->limit()); }

    PrimeSubset operator|(const PrimeSubset& other) const;
    PrimeSubset operator&(const PrimeSubset& other) const;
    PrimeSubset operator-(const PrimeSubset& other) const;
    PrimeSubset operator^(const PrimeSubset& other) const;

    // Same base table and same members.
    friend bool operator==(const PrimeSubset& a, const PrimeSubset& b) noexcept;

private:
    void require_same_base(const PrimeSubset& other) const;

    std::shared_ptr<const PrimeTable> base_;
    std::vector<std::uint64_t> words_;
};

// log(p/(p-1)), the per-prime term of every Mertens product.
double log_mertens_term(std::uint64_t p) noexcept;

// sum_{p<=x, p in subset} log(p/(p-1)) - tau * sum_{p<=x} log(p/(p-1)).
double log_mertens_statistic(const PrimeSubset& subset, double tau, double x);

// (prod_{p<=x, p in subset} p/(p-1)) * (prod_{p<=x} (p-1)/p)^tau, evaluated in log space.
double mertens_statistic(const PrimeSubset& subset, double tau, double x);

} // namespace mcomp
