#include "mcomp/prime_engine.hpp"

#include "mcomp/detail/compensated_sum.hpp"
#include "mcomp/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fmt/format.h>

namespace mcomp {

namespace {

std::uint64_t isqrt(std::uint64_t n)
{
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
    while (r * r > n)
        --r;
    while ((r + 1) * (r + 1) <= n)
        ++r;
    return r;
}

// Generous upper estimate of pi(limit) (Rosser-Schoenfeld style bound).
std::uint64_t estimated_prime_count(std::uint64_t limit)
{
    if (limit < 100)
        return 25;
    const double x = static_cast<double>(limit);
    return static_cast<std::uint64_t>(1.26 * x / std::log(x)) + 16;
}

void check_budget(std::uint64_t bytes, const SieveOptions& options, const char* what)
{
    if (bytes > options.memory_budget_bytes)
        throw ResourceError(fmt::format("{} needs about {} bytes, exceeding the memory budget of {} bytes",
                                        what, bytes, options.memory_budget_bytes),
                            options.memory_budget_bytes);
}

void check_limit(std::uint64_t limit, const char* what)
{
    if (limit < 2)
        throw ArgumentError(fmt::format("{}: limit must be >= 2, got {}", what, limit));
    if (limit > max_table_limit)
        throw ArgumentError(fmt::format("{}: limit {} exceeds the supported maximum {}", what, limit,
                                        max_table_limit));
}

std::vector<std::uint32_t> simple_sieve(std::uint64_t limit)
{
    std::vector<std::uint8_t> composite(limit + 1, 0);
    std::vector<std::uint32_t> primes;
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (composite[i])
            continue;
        primes.push_back(static_cast<std::uint32_t>(i));
        for (std::uint64_t j = i * i; j <= limit; j += i)
            composite[j] = 1;
    }
    return primes;
}

} // namespace

PrimeTable::PrimeTable(std::uint64_t limit, std::vector<std::uint32_t> primes)
    : limit_(limit), primes_(std::move(primes))
{
    if (!primes_.empty() && primes_.back() > limit_)
        throw ArgumentError("PrimeTable: prime above limit");
    if (!std::is_sorted(primes_.begin(), primes_.end()) ||
        std::adjacent_find(primes_.begin(), primes_.end()) != primes_.end())
        throw ArgumentError("PrimeTable: primes must be strictly increasing");
}

std::size_t PrimeTable::count_upto(std::uint64_t x) const noexcept
{
    if (x >= max_table_limit)
        return primes_.size();
    return static_cast<std::size_t>(std::upper_bound(primes_.begin(), primes_.end(), x) - primes_.begin());
}

std::optional<std::size_t> PrimeTable::rank_of(std::uint64_t p) const noexcept
{
    if (p > limit_)
        return std::nullopt;
    auto it = std::lower_bound(primes_.begin(), primes_.end(), p);
    if (it == primes_.end() || *it != p)
        return std::nullopt;
    return static_cast<std::size_t>(it - primes_.begin());
}

PrimeTable sieve_primes(std::uint64_t limit, const SieveOptions& options)
{
    check_limit(limit, "sieve_primes");
    const std::uint64_t segment = std::max<std::uint64_t>(options.segment_size, 1024);
    const std::uint64_t seg_bytes = std::min(segment, limit + 1);
    check_budget(seg_bytes + 4 * estimated_prime_count(limit), options, "sieve_primes");

    const std::uint64_t root = isqrt(limit);
    std::vector<std::uint32_t> base = simple_sieve(std::max<std::uint64_t>(root, 2));
    if (limit <= seg_bytes) {
        auto primes = simple_sieve(limit);
        return PrimeTable(limit, std::move(primes));
    }

    std::vector<std::uint32_t> primes;
    primes.reserve(estimated_prime_count(limit));
    std::vector<std::uint8_t> composite(seg_bytes);
    for (std::uint64_t lo = 0; lo <= limit; lo += seg_bytes) {
        const std::uint64_t hi = std::min(limit, lo + seg_bytes - 1);
        std::fill(composite.begin(), composite.end(), 0);
        for (std::uint32_t p : base) {
            const std::uint64_t pp = std::uint64_t{p} * p;
            if (pp > hi)
                break;
            std::uint64_t start = std::max(pp, (lo + p - 1) / p * p);
            for (std::uint64_t j = start; j <= hi; j += p)
                composite[j - lo] = 1;
        }
        for (std::uint64_t n = std::max<std::uint64_t>(lo, 2); n <= hi; ++n)
            if (!composite[n - lo])
                primes.push_back(static_cast<std::uint32_t>(n));
    }
    return PrimeTable(limit, std::move(primes));
}

std::uint64_t prime_count(const PrimeTable& table, double x)
{
    if (!(x <= static_cast<double>(table.limit())))
        throw OutOfRangeError(fmt::format("prime_count: x = {} exceeds table limit {}", x, table.limit()));
    if (x < 2)
        return 0;
    return table.count_upto(static_cast<std::uint64_t>(std::floor(x)));
}

FactorSieve::FactorSieve(std::uint64_t limit, const SieveOptions& options) : limit_(limit)
{
    check_limit(limit, "FactorSieve");
    check_budget(4 * (limit + 1) + 4 * estimated_prime_count(limit), options, "FactorSieve");
    // Linear sieve: each composite is struck exactly once, by its smallest prime factor.
    spf_.assign(limit + 1, 0);
    std::vector<std::uint32_t> primes;
    primes.reserve(estimated_prime_count(limit));
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (spf_[i] == 0) {
            spf_[i] = static_cast<std::uint32_t>(i);
            primes.push_back(static_cast<std::uint32_t>(i));
        }
        const std::uint32_t si = spf_[i];
        for (std::uint32_t p : primes) {
            if (p > si || std::uint64_t{p} * i > limit)
                break;
            spf_[std::uint64_t{p} * i] = p;
        }
    }
}

std::vector<std::uint64_t> factorize(std::uint64_t n, const FactorSieve& sieve)
{
    if (n == 0 || n > sieve.limit())
        throw OutOfRangeError(fmt::format("factorize: n = {} outside [1, {}]", n, sieve.limit()));
    std::vector<std::uint64_t> out;
    while (n > 1) {
        const std::uint32_t p = sieve.spf(n);
        out.push_back(p);
        n /= p;
    }
    return out;
}

std::vector<PrimePower> factorize_powers(std::uint64_t n, const FactorSieve& sieve)
{
    std::vector<PrimePower> out;
    for (std::uint64_t p : factorize(n, sieve)) {
        if (!out.empty() && out.back().prime == p)
            ++out.back().exponent;
        else
            out.push_back({p, 1});
    }
    return out;
}

std::vector<std::uint64_t> divisors(std::uint64_t n, const FactorSieve& sieve)
{
    std::vector<std::uint64_t> out{1};
    for (const auto& [p, e] : factorize_powers(n, sieve)) {
        const std::size_t prev = out.size();
        std::uint64_t pk = 1;
        for (unsigned k = 0; k < e; ++k) {
            pk *= p;
            for (std::size_t i = 0; i < prev; ++i)
                out.push_back(out[i] * pk);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

PrimeSubset::PrimeSubset(std::shared_ptr<const PrimeTable> base) : base_(std::move(base))
{
    if (!base_)
        throw ArgumentError("PrimeSubset: null base table");
    words_.assign((base_->size() + 63) / 64, 0);
}

PrimeSubset PrimeSubset::all(std::shared_ptr<const PrimeTable> base)
{
    PrimeSubset s(std::move(base));
    for (std::size_t i = 0; i < s.base_->size(); ++i)
        s.insert_rank(i);
    return s;
}

PrimeSubset PrimeSubset::of_primes(std::shared_ptr<const PrimeTable> base, std::span<const std::uint64_t> primes)
{
    PrimeSubset s(std::move(base));
    for (std::uint64_t p : primes)
        s.insert(p);
    return s;
}

bool PrimeSubset::contains(std::uint64_t p) const noexcept
{
    auto r = base_->rank_of(p);
    return r && contains_rank(*r);
}

void PrimeSubset::insert(std::uint64_t p)
{
    auto r = base_->rank_of(p);
    if (!r)
        throw ArgumentError(fmt::format("PrimeSubset: {} is not a prime of the base table", p));
    insert_rank(*r);
}

void PrimeSubset::erase(std::uint64_t p)
{
    if (auto r = base_->rank_of(p))
        erase_rank(*r);
}

std::size_t PrimeSubset::count() const noexcept
{
    std::size_t c = 0;
    for (std::uint64_t w : words_)
        c += static_cast<std::size_t>(std::popcount(w));
    return c;
}

std::size_t PrimeSubset::count_upto(std::uint64_t x) const noexcept
{
    const std::size_t n = base_->count_upto(x);
    std::size_t c = 0;
    const std::size_t full = n >> 6;
    for (std::size_t i = 0; i < full; ++i)
        c += static_cast<std::size_t>(std::popcount(words_[i]));
    if (const std::size_t rest = n & 63)
        c += static_cast<std::size_t>(std::popcount(words_[full] & ((std::uint64_t{1} << rest) - 1)));
    return c;
}

std::vector<std::uint64_t> PrimeSubset::members(std::uint64_t x) const
{
    std::vector<std::uint64_t> out;
    const std::size_t n = base_->count_upto(x);
    for (std::size_t i = 0; i < n; ++i)
        if (contains_rank(i))
            out.push_back(base_->primes()[i]);
    return out;
}

void PrimeSubset::require_same_base(const PrimeSubset& other) const
{
    if (base_ != other.base_)
        throw ArgumentError("PrimeSubset: set algebra requires a shared base table");
}

PrimeSubset PrimeSubset::operator|(const PrimeSubset& other) const
{
    require_same_base(other);
    PrimeSubset out(*this);
    for (std::size_t i = 0; i < words_.size(); ++i)
        out.words_[i] |= other.words_[i];
    return out;
}

PrimeSubset PrimeSubset::operator&(const PrimeSubset& other) const
{
    require_same_base(other);
    PrimeSubset out(*this);
    for (std::size_t i = 0; i < words_.size(); ++i)
        out.words_[i] &= other.words_[i];
    return out;
}

PrimeSubset PrimeSubset::operator-(const PrimeSubset& other) const
{
    require_same_base(other);
    PrimeSubset out(*this);
    for (std::size_t i = 0; i < words_.size(); ++i)
        out.words_[i] &= ~other.words_[i];
    return out;
}

PrimeSubset PrimeSubset::operator^(const PrimeSubset& other) const
{
    require_same_base(other);
    PrimeSubset out(*this);
    for (std::size_t i = 0; i < words_.size(); ++i)
        out.words_[i] ^= other.words_[i];
    return out;
}

bool operator==(const PrimeSubset& a, const PrimeSubset& b) noexcept
{
    return a.base_ == b.base_ && a.words_ == b.words_;
}

double log_mertens_term(std::uint64_t p) noexcept
{
    return -std::log1p(-1.0 / static_cast<double>(p));
}

double log_mertens_statistic(const PrimeSubset& subset, double tau, double x)
{
    const PrimeTable& table = subset.base();
    if (!(x <= static_cast<double>(table.limit())))
        throw OutOfRangeError(fmt::format("mertens_statistic: x = {} exceeds table limit {}", x, table.limit()));
    if (!(tau > 0.0 && tau <= 1.0))
        throw DomainError(fmt::format("mertens_statistic: tau = {} outside (0, 1]", tau));
    const std::size_t n = x < 2 ? 0 : table.count_upto(static_cast<std::uint64_t>(std::floor(x)));
    detail::CompensatedSum in_subset, all;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = log_mertens_term(table.primes()[i]);
        all += w;
        if (subset.contains_rank(i))
            in_subset += w;
    }
    return in_subset.value() - tau * all.value();
}

double mertens_statistic(const PrimeSubset& subset, double tau, double x)
{
    return std::exp(log_mertens_statistic(subset, tau, x));
}

} // namespace mcomp
