#include "mcomp/complement_builder.hpp"

#include "mcomp/analytic.hpp"
#include "mcomp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace mcomp {

namespace {

using u128 = unsigned __int128;

std::uint64_t isqrt(std::uint64_t n)
{
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && u128{r} * r > n)
        --r;
    while (u128{r + 1} * (r + 1) <= n)
        ++r;
    return r;
}

// min(floor(x * y^(2/3)), y): the largest i <= y with i^3 <= x^3 y^2.
std::uint64_t f0_upper(std::uint64_t x, std::uint64_t y)
{
    const u128 x3 = u128{x} * x * x;
    if (x3 >= y)
        return y;  // x y^(2/3) >= y
    // here x^3 < y <= 2^32, so every cube below fits in 128 bits
    const u128 rhs = x3 * y * y;
    auto i = static_cast<std::uint64_t>(static_cast<double>(x) * std::cbrt(static_cast<double>(y) * static_cast<double>(y)));
    i = std::min(i, y);
    while (i > 0 && u128{i} * i * i > rhs)
        --i;
    while (i < y && u128{i + 1} * (i + 1) * (i + 1) <= rhs)
        ++i;
    return i;
}

// p^3 > y^2, i.e. p > y^(2/3)
bool above_two_thirds(std::uint64_t p, std::uint64_t y)
{
    return u128{p} * p * p > u128{y} * y;
}

IntegerSet collect(std::vector<IntegerSet::value_type> v, std::uint64_t limit)
{
    return IntegerSet::from_unsorted(std::move(v), limit);
}

double max_density(const std::vector<IntegerSet>& sets, std::uint64_t n)
{
    std::size_t m = 0;
    for (const auto& s : sets)
        m = std::max(m, s.size());
    const double x = static_cast<double>(n);
    return static_cast<double>(m) * std::log(x) / x;
}

} // namespace

IntegerSet smooth_numbers(const PrimeSubset& part, std::uint64_t x, const FactorSieve& sieve)
{
    if (x > sieve.limit())
        throw OutOfRangeError(fmt::format("smooth_numbers: x = {} exceeds sieve limit {}", x, sieve.limit()));
    if (x == 0)
        return IntegerSet({}, 0);
    // smooth[n] iff spf(n) in part and n / spf(n) smooth
    std::vector<std::uint8_t> smooth(x + 1, 0);
    smooth[1] = 1;
    for (std::uint64_t p : part.members(std::min(x, part.base().limit())))
        smooth[p] = 1;
    std::vector<IntegerSet::value_type> out{1};
    for (std::uint64_t n = 2; n <= x; ++n) {
        const std::uint32_t p = sieve.spf(n);
        if (p != n)
            smooth[n] = smooth[p] && smooth[n / p];
        if (smooth[n])
            out.push_back(static_cast<IntegerSet::value_type>(n));
    }
    return IntegerSet(std::move(out), x);
}

WirsingOdoniPrediction wirsing_odoni_predict(double tau, double a, double x)
{
    if (!(tau > 0.0 && tau < 1.0))
        throw DomainError(fmt::format("wirsing_odoni_predict: tau = {} outside (0, 1)", tau));
    if (!(a > 0.0))
        throw DomainError(fmt::format("wirsing_odoni_predict: a = {} must be positive", a));
    if (!(x >= 2.0))
        throw DomainError(fmt::format("wirsing_odoni_predict: x = {} must be >= 2", x));
    WirsingOdoniPrediction out;
    out.tau = tau;
    out.a = a;
    out.x = x;
    out.constant = a / gamma(tau);
    out.predicted_count = out.constant * x / std::pow(std::log(x), 1.0 - tau);
    return out;
}

Theorem5Result build_theorem5_family(const PrimePartition& partition, std::uint64_t x, const FactorSieve& sieve)
{
    if (x > partition.cutoff)
        throw PreconditionError(fmt::format("build_theorem5_family: x = {} exceeds the partition cutoff {}", x,
                                            partition.cutoff));
    Theorem5Result out;
    ComplementFamily& fam = out.family;
    fam.h = partition.spec.h;
    fam.checkpoints = {x};
    fam.provenance.construction = "theorem5";
    for (const auto& part : partition.parts)
        fam.sets.push_back(smooth_numbers(part, x, sieve));

    CheckpointRecord rec;
    rec.n = x;
    for (const auto& s : fam.sets)
        rec.set_sizes.push_back(s.size());
    rec.counterexample = verify_complement(fam.sets, x, sieve);
    rec.verified = !rec.counterexample;
    if (!rec.verified)
        throw VerificationError(
            fmt::format("build_theorem5_family: {} has no representation; the partition does not cover the primes",
                        *rec.counterexample),
            *rec.counterexample);
    if (x >= 2)
        rec.max_density = max_density(fam.sets, x);
    fam.provenance.records.push_back(rec);

    for (int i = 0; i < fam.h; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        SmoothSetReport r;
        r.tau = partition.spec.tau[idx];
        r.a = partition.spec.a[idx];
        r.count = fam.sets[idx].size();
        if (x >= 2) {
            r.density_statistic = density_statistic(fam.sets[idx], r.tau, static_cast<double>(x));
            if (r.tau < 1.0) {
                r.prediction = wirsing_odoni_predict(r.tau, r.a, static_cast<double>(x));
                r.ratio = static_cast<double>(r.count) / r.prediction.predicted_count;
            }
        }
        out.sets.push_back(r);
    }
    return out;
}

FSets f_sets_unchecked(std::uint64_t x, std::uint64_t y, std::uint64_t n, int h, const PrimeTable& table)
{
    if (h < 1)
        throw ArgumentError(fmt::format("f_sets: h = {} must be >= 1", h));
    if (n == 0 || x == 0)
        throw ArgumentError("f_sets: x and N must be positive");
    if (y > table.limit())
        throw OutOfRangeError(fmt::format("f_sets: y = {} exceeds prime table limit {}", y, table.limit()));

    FSets out;
    out.x = x;
    out.y = y;
    out.n = n;

    std::vector<IntegerSet::value_type> f0;
    const std::uint64_t f0_hi = f0_upper(x, y);
    for (std::uint64_t i = x + 1; i <= f0_hi; ++i)
        f0.push_back(static_cast<IntegerSet::value_type>(i));
    out.f0 = IntegerSet(std::move(f0), y);

    const auto primes = table.primes();
    const std::uint64_t sqrt_x = isqrt(x);
    std::vector<IntegerSet::value_type> f1, f2;
    std::vector<std::vector<IntegerSet::value_type>> f3(static_cast<std::size_t>(h));
    for (std::size_t i = 0; i < primes.size() && primes[i] <= y; ++i) {
        const std::uint64_t p = primes[i];
        const u128 px = u128{p} * x;
        if (above_two_thirds(p, y) && px < y) {
            for (std::uint64_t v = 1; v <= sqrt_x && p * v <= y; ++v)
                f1.push_back(static_cast<IntegerSet::value_type>(p * v));
        }
        if (px > y && u128{p} * n <= y) {
            // v^2 p <= y
            for (std::uint64_t v = 1; u128{v} * v * p <= y; ++v)
                f2.push_back(static_cast<IntegerSet::value_type>(p * v));
        }
        if (u128{p} * n > y) {
            // pi(p) = i + 1; class j in 1..h with residue 0 mapped to h
            const std::size_t j = (i + 1) % static_cast<std::size_t>(h);
            f3[j == 0 ? static_cast<std::size_t>(h) - 1 : j - 1].push_back(static_cast<IntegerSet::value_type>(p));
        }
    }
    out.f1 = collect(std::move(f1), y);
    out.f2 = collect(std::move(f2), y);
    for (auto& cls : f3)
        out.f3.push_back(IntegerSet(std::move(cls), y));
    return out;
}

FSets f_sets(std::uint64_t x, std::uint64_t y, std::uint64_t n, int h, const PrimeTable& table)
{
    if (!(u128{y} > u128{x} * x))
        throw PreconditionError(fmt::format("f_sets: need y > x^2, got x = {}, y = {}", x, y));
    return f_sets_unchecked(x, y, n, h, table);
}

std::uint64_t theorem8_seed(double epsilon)
{
    if (!(epsilon > 0.0))
        throw DomainError(fmt::format("theorem8_seed: epsilon = {} must be positive", epsilon));
    const double v = std::ceil(256.0 / (epsilon * epsilon));
    if (v > 1e18)
        throw OutOfRangeError(fmt::format("theorem8_seed: N for epsilon = {} is too large", epsilon));
    return static_cast<std::uint64_t>(v) + 1;
}

std::uint64_t GrowthPolicy::uncapped(std::uint64_t x) const
{
    if (exponent < 3)
        throw ArgumentError(fmt::format("GrowthPolicy: exponent {} must be >= 3", exponent));
    constexpr u128 saturate = u128{~std::uint64_t{0}};
    u128 y = 1;
    for (int i = 0; i < exponent && y <= saturate; ++i)
        y *= x;
    y = std::max<u128>(y, u128{x} * 10);
    return static_cast<std::uint64_t>(std::min(y, saturate));
}

bool GrowthPolicy::is_capped(std::uint64_t x) const
{
    return kind == Kind::power && cap != 0 && uncapped(x) > cap;
}

std::uint64_t GrowthPolicy::next(std::uint64_t x, std::size_t step) const
{
    if (kind == Kind::explicit_list) {
        if (step >= checkpoints.size())
            throw ArgumentError(fmt::format("GrowthPolicy: no checkpoint listed for step {}", step + 1));
        return checkpoints[step];
    }
    const std::uint64_t y = uncapped(x);
    return cap != 0 ? std::min(y, cap) : y;
}

ComplementFamily build_theorem8_family(int h, double epsilon, std::size_t steps, const GrowthPolicy& growth,
                                       const PrimeTable& table, const FactorSieve& sieve,
                                       const Theorem8Options& options)
{
    if (h < 1)
        throw ArgumentError(fmt::format("build_theorem8_family: h = {} must be >= 1", h));
    ComplementFamily fam;
    fam.h = h;
    Provenance& prov = fam.provenance;
    prov.construction = "theorem8";
    prov.epsilon = epsilon;
    prov.seed_n_formula = theorem8_seed(epsilon);
    prov.seed_n_overridden = options.seed_override != 0;
    prov.seed_n = prov.seed_n_overridden ? options.seed_override : prov.seed_n_formula;
    const std::uint64_t seed = prov.seed_n;
    if (seed > sieve.limit() || seed > table.limit())
        throw OutOfRangeError(fmt::format("build_theorem8_family: N = {} exceeds the sieve limit", seed));

    fam.sets.assign(static_cast<std::size_t>(h), IntegerSet::range(seed));
    fam.checkpoints = {seed};
    const double bound = 1.0 / h + epsilon;
    {
        CheckpointRecord rec;
        rec.n = seed;
        rec.set_sizes.assign(static_cast<std::size_t>(h), seed);
        rec.counterexample = verify_complement(fam.sets, seed, sieve);
        rec.verified = !rec.counterexample;
        rec.max_density = seed >= 2 ? max_density(fam.sets, seed) : 0.0;
        rec.density_bound = bound;
        rec.within_bound = rec.max_density <= bound;
        prov.records.push_back(rec);
    }

    for (std::size_t step = 0; step < steps; ++step) {
        const std::uint64_t x = fam.checkpoints.back();
        const std::uint64_t y = growth.next(x, step);
        if (y <= x)
            throw ArgumentError(fmt::format("build_theorem8_family: checkpoint {} does not exceed {}", y, x));
        if (y > sieve.limit() || y > table.limit())
            throw OutOfRangeError(fmt::format("build_theorem8_family: checkpoint {} exceeds the sieve limit", y));
        const bool precondition = u128{y} > u128{x} * x;
        const bool capped = growth.is_capped(x);
        if (!precondition && options.strict_growth)
            throw PreconditionError(fmt::format("build_theorem8_family: need y > x^2, got x = {}, y = {}", x, y));

        const FSets f = precondition ? f_sets(x, y, seed, h, table) : f_sets_unchecked(x, y, seed, h, table);
        CheckpointRecord rec;
        rec.n = y;
        rec.previous = x;
        rec.f0 = f.f0.size();
        rec.f1 = f.f1.size();
        rec.f2 = f.f2.size();
        for (const auto& c : f.f3)
            rec.f3.push_back(c.size());
        rec.precondition_met = precondition;
        rec.capped = capped;

        std::vector<IntegerSet> next;
        for (int j = 0; j < h; ++j) {
            const auto& prev = fam.sets[static_cast<std::size_t>(j)].elements();
            std::vector<IntegerSet::value_type> merged(prev.begin(), prev.end());
            for (const IntegerSet* part : {&f.f0, &f.f1, &f.f2, &f.f3[static_cast<std::size_t>(j)]})
                merged.insert(merged.end(), part->elements().begin(), part->elements().end());
            next.push_back(IntegerSet::from_unsorted(std::move(merged), y));
        }

        for (int j = 0; j < h && rec.consistent; ++j)
            rec.consistent = next[static_cast<std::size_t>(j)].truncated(x) == fam.sets[static_cast<std::size_t>(j)];
        if (!rec.consistent)
            throw InvariantError(fmt::format("build_theorem8_family: checkpoint {} changed the sets below {}", y, x));

        rec.counterexample = verify_complement(next, y, sieve);
        rec.verified = !rec.counterexample;
        if (!rec.verified)
            throw VerificationError(fmt::format("build_theorem8_family: {} has no representation at checkpoint {}",
                                                *rec.counterexample, y),
                                    *rec.counterexample);
        for (const auto& s : next)
            rec.set_sizes.push_back(s.size());
        rec.max_density = max_density(next, y);
        rec.density_bound = bound;
        rec.within_bound = rec.max_density <= bound;

        fam.sets = std::move(next);
        fam.checkpoints.push_back(y);
        prov.records.push_back(std::move(rec));
    }
    return fam;
}

} // namespace mcomp
