#include "mcomp/repr_core.hpp"

#include "mcomp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace mcomp {

IntegerSet::IntegerSet(std::vector<value_type> elements, std::uint64_t limit)
    : elements_(std::move(elements)), limit_(limit)
{
    if (limit_ > max_table_limit)
        throw ArgumentError(fmt::format("IntegerSet: limit {} exceeds {}", limit_, max_table_limit));
    for (std::size_t i = 0; i < elements_.size(); ++i) {
        if (elements_[i] == 0 || elements_[i] > limit_)
            throw ArgumentError(fmt::format("IntegerSet: element {} outside [1, {}]", elements_[i], limit_));
        if (i > 0 && elements_[i - 1] >= elements_[i])
            throw ArgumentError("IntegerSet: elements must be strictly increasing");
    }
}

IntegerSet IntegerSet::from_unsorted(std::vector<value_type> elements, std::uint64_t limit)
{
    std::sort(elements.begin(), elements.end());
    elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
    return IntegerSet(std::move(elements), limit);
}

IntegerSet IntegerSet::range(std::uint64_t limit)
{
    std::vector<value_type> e(limit);
    for (std::uint64_t i = 0; i < limit; ++i)
        e[i] = static_cast<value_type>(i + 1);
    return IntegerSet(std::move(e), limit);
}

bool IntegerSet::contains(std::uint64_t n) const noexcept
{
    if (n == 0 || n > limit_)
        return false;
    return std::binary_search(elements_.begin(), elements_.end(), static_cast<value_type>(n));
}

std::size_t IntegerSet::rank(std::uint64_t x) const noexcept
{
    if (x >= limit_)
        return static_cast<std::size_t>(std::upper_bound(elements_.begin(), elements_.end(),
                                                         static_cast<value_type>(limit_)) -
                                        elements_.begin());
    return static_cast<std::size_t>(
        std::upper_bound(elements_.begin(), elements_.end(), static_cast<value_type>(x)) - elements_.begin());
}

IntegerSet IntegerSet::truncated(std::uint64_t x) const
{
    if (x > limit_)
        throw OutOfRangeError(fmt::format("IntegerSet::truncated: {} exceeds limit {}", x, limit_));
    return IntegerSet(std::vector<value_type>(elements_.begin(), elements_.begin() + rank(x)), x);
}

std::vector<std::uint8_t> IntegerSet::membership(std::uint64_t upto) const
{
    std::vector<std::uint8_t> m(upto + 1, 0);
    for (value_type a : elements_) {
        if (a > upto)
            break;
        m[a] = 1;
    }
    return m;
}

std::uint64_t counting(const IntegerSet& set, double x)
{
    if (!(x <= static_cast<double>(set.limit())))
        throw OutOfRangeError(fmt::format("counting: x = {} exceeds set limit {}", x, set.limit()));
    if (x < 1)
        return 0;
    return set.rank(static_cast<std::uint64_t>(std::floor(x)));
}

namespace {

void check_order(int h)
{
    if (h < 1)
        throw ArgumentError(fmt::format("order h must be >= 1, got {}", h));
}

void check_n(std::uint64_t n, std::uint64_t set_limit, const FactorSieve& sieve, const char* what)
{
    if (n == 0)
        throw OutOfRangeError(fmt::format("{}: n must be positive", what));
    if (n > set_limit)
        throw OutOfRangeError(fmt::format("{}: n = {} exceeds set limit {}", what, n, set_limit));
    if (n > sieve.limit())
        throw OutOfRangeError(fmt::format("{}: n = {} exceeds sieve limit {}", what, n, sieve.limit()));
}

std::uint64_t min_limit(std::span<const IntegerSet> family)
{
    std::uint64_t m = max_table_limit;
    for (const auto& s : family)
        m = std::min(m, s.limit());
    return m;
}

// Counts ordered tuples over the divisor lattice of n. level(i) is the set
// supplying the i-th factor; memo is keyed by (divisor index, level).
template <class SetAt>
std::uint64_t count_over_divisors(std::uint64_t n, int h, SetAt set_at, const FactorSieve& sieve)
{
    const std::vector<std::uint64_t> divs = divisors(n, sieve);
    const std::size_t d = divs.size();
    auto index_of = [&](std::uint64_t m) {
        return static_cast<std::size_t>(std::lower_bound(divs.begin(), divs.end(), m) - divs.begin());
    };
    std::vector<std::vector<std::int64_t>> memo(static_cast<std::size_t>(h), std::vector<std::int64_t>(d, -1));

    auto rec = [&](auto&& self, std::size_t idx, int level) -> std::uint64_t {
        auto& slot = memo[static_cast<std::size_t>(level)][idx];
        if (slot >= 0)
            return static_cast<std::uint64_t>(slot);
        const std::uint64_t m = divs[idx];
        const IntegerSet& a = set_at(level);
        std::uint64_t total = 0;
        if (level == h - 1) {
            total = a.contains(m) ? 1 : 0;
        } else {
            for (std::size_t j = 0; j <= idx; ++j) {
                const std::uint64_t f = divs[j];
                if (m % f == 0 && a.contains(f))
                    total += self(self, index_of(m / f), level + 1);
            }
        }
        slot = static_cast<std::int64_t>(total);
        return total;
    };
    return rec(rec, d - 1, 0);
}

// Unsorted divisors of n into out, reusing its storage.
void divisors_into(std::uint64_t n, const FactorSieve& sieve, std::vector<std::uint64_t>& out)
{
    out.clear();
    out.push_back(1);
    while (n > 1) {
        const std::uint64_t p = sieve.spf(n);
        unsigned e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        const std::size_t prev = out.size();
        std::uint64_t pk = 1;
        for (unsigned k = 0; k < e; ++k) {
            pk *= p;
            for (std::size_t i = 0; i < prev; ++i)
                out.push_back(out[i] * pk);
        }
    }
}

} // namespace

std::uint64_t repr_count(const IntegerSet& set, int h, std::uint64_t n, const FactorSieve& sieve)
{
    check_order(h);
    check_n(n, set.limit(), sieve, "repr_count");
    return count_over_divisors(n, h, [&](int) -> const IntegerSet& { return set; }, sieve);
}

std::uint64_t joint_repr_count(std::span<const IntegerSet> family, std::uint64_t n, const FactorSieve& sieve)
{
    check_order(static_cast<int>(family.size()));
    check_n(n, min_limit(family), sieve, "joint_repr_count");
    return count_over_divisors(n, static_cast<int>(family.size()),
                               [&](int i) -> const IntegerSet& { return family[static_cast<std::size_t>(i)]; },
                               sieve);
}

std::uint64_t summatory_repr(std::span<const IntegerSet> family, std::uint64_t x)
{
    check_order(static_cast<int>(family.size()));
    if (x > min_limit(family))
        throw OutOfRangeError(fmt::format("summatory_repr: x = {} exceeds the smallest set limit {}", x,
                                          min_limit(family)));
    const std::size_t last = family.size() - 1;
    auto rec = [&](auto&& self, std::size_t level, std::uint64_t bound) -> std::uint64_t {
        if (level == last)
            return family[level].rank(bound);
        std::uint64_t total = 0;
        for (auto a : family[level].elements()) {
            if (a > bound)
                break;
            total += self(self, level + 1, bound / a);
        }
        return total;
    };
    return rec(rec, 0, x);
}

std::optional<std::uint64_t> verify_complement(std::span<const IntegerSet> family, std::uint64_t x,
                                               const FactorSieve& sieve)
{
    check_order(static_cast<int>(family.size()));
    if (x > min_limit(family))
        throw OutOfRangeError(fmt::format("verify_complement: x = {} exceeds the smallest set limit {}", x,
                                          min_limit(family)));
    if (x > sieve.limit() && x > 1)
        throw OutOfRangeError(fmt::format("verify_complement: x = {} exceeds sieve limit {}", x, sieve.limit()));

    const std::size_t h = family.size();
    std::vector<std::vector<std::uint8_t>> in;
    in.reserve(h);
    for (const auto& s : family)
        in.push_back(s.membership(x));

    std::vector<std::uint64_t> divs;
    auto exists = [&](auto&& self, std::uint64_t m, std::size_t level) -> bool {
        if (level == h - 1)
            return in[level][m] != 0;
        for (std::uint64_t d : divs)
            if (d <= m && m % d == 0 && in[level][d] && self(self, m / d, level + 1))
                return true;
        return false;
    };

    for (std::uint64_t n = 1; n <= x; ++n) {
        // Witnesses with all factors but one equal to 1.
        bool found = false;
        for (std::size_t i = 0; i < h && !found; ++i) {
            if (!in[i][n])
                continue;
            bool ones = true;
            for (std::size_t j = 0; j < h && ones; ++j)
                if (j != i && !in[j][1])
                    ones = false;
            found = ones;
        }
        if (found)
            continue;
        if (h == 1)
            return n;
        divisors_into(n, sieve, divs);
        if (!exists(exists, n, 0))
            return n;
    }
    return std::nullopt;
}

std::optional<std::uint64_t> verify_basis(const IntegerSet& set, int h, std::uint64_t x, const FactorSieve& sieve)
{
    check_order(h);
    std::vector<IntegerSet> family(static_cast<std::size_t>(h), set);
    return verify_complement(family, x, sieve);
}

double density_statistic(const IntegerSet& set, double tau, double x)
{
    if (!(x >= 2))
        throw DomainError(fmt::format("density_statistic: x = {} must be >= 2", x));
    if (!(tau > 0.0 && tau <= 1.0))
        throw DomainError(fmt::format("density_statistic: tau = {} outside (0, 1]", tau));
    const double count = static_cast<double>(counting(set, x));
    return count * std::pow(std::log(x), 1.0 - tau) / x;
}

} // namespace mcomp
