#include "mcomp/prime_partition.hpp"

#include "mcomp/detail/compensated_sum.hpp"
#include "mcomp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numeric>

namespace mcomp {

namespace {

constexpr double spec_tolerance = 1e-12;

std::size_t primes_upto(const PrimeSubset& s, std::uint64_t cutoff)
{
    if (cutoff > s.base().limit())
        throw OutOfRangeError(fmt::format("cutoff {} exceeds prime table limit {}", cutoff, s.base().limit()));
    return s.base().count_upto(cutoff);
}

// max_x |A(x) - B(x)| over prime x <= cutoff (the counts only change at primes).
std::uint64_t max_count_shift(const PrimeSubset& a, const PrimeSubset& b, std::size_t n)
{
    std::int64_t ca = 0, cb = 0;
    std::uint64_t worst = 0;
    for (std::size_t i = 0; i < n; ++i) {
        ca += a.contains_rank(i);
        cb += b.contains_rank(i);
        worst = std::max<std::uint64_t>(worst, static_cast<std::uint64_t>(std::llabs(ca - cb)));
    }
    return worst;
}

} // namespace

void PartitionSpec::validate() const
{
    if (h < 1)
        throw ArgumentError(fmt::format("PartitionSpec: h = {} must be >= 1", h));
    if (tau.size() != static_cast<std::size_t>(h) || a.size() != static_cast<std::size_t>(h))
        throw ArgumentError(fmt::format("PartitionSpec: expected {} tau and {} a values, got {} and {}", h, h,
                                        tau.size(), a.size()));
    double tau_sum = 0.0, log_a = 0.0;
    for (int i = 0; i < h; ++i) {
        const double t = tau[static_cast<std::size_t>(i)];
        const double ai = a[static_cast<std::size_t>(i)];
        if (!(t > 0.0 && t <= 1.0))
            throw ArgumentError(fmt::format("PartitionSpec: tau_{} = {} outside (0, 1]", i + 1, t));
        if (!(ai > 0.0) || !std::isfinite(ai))
            throw ArgumentError(fmt::format("PartitionSpec: a_{} = {} must be positive", i + 1, ai));
        tau_sum += t;
        log_a += std::log(ai);
    }
    if (std::fabs(tau_sum - 1.0) > spec_tolerance)
        throw ArgumentError(fmt::format("PartitionSpec: tau values sum to {}, not 1", tau_sum));
    if (std::fabs(std::exp(log_a) - 1.0) > spec_tolerance)
        throw ArgumentError(fmt::format("PartitionSpec: a values multiply to {}, not 1", std::exp(log_a)));
}

double PairSequence::tail_bound() const noexcept
{
    if (last_block_prime == 0)
        return std::log(2.0);
    return std::log1p(1.0 / static_cast<double>(last_block_prime));
}

PrimeSubset greedy_select(const PrimeSubset& q_set, double tau, double kappa, std::uint64_t cutoff)
{
    if (!(tau > 0.0 && tau < kappa && kappa <= 1.0))
        throw ArgumentError(fmt::format("greedy_select: need 0 < tau < kappa <= 1, got tau = {}, kappa = {}", tau,
                                        kappa));
    const std::size_t n = primes_upto(q_set, cutoff);
    const double ratio = tau / kappa;
    PrimeSubset r(q_set.base_ptr());
    std::uint64_t q_count = 0, r_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!q_set.contains_rank(i))
            continue;
        ++q_count;
        if (static_cast<double>(r_count) < ratio * static_cast<double>(q_count)) {
            r.insert_rank(i);
            ++r_count;
        }
    }
    return r;
}

double greedy_deviation(const PrimeSubset& r_set, const PrimeSubset& q_set, double ratio, std::uint64_t cutoff)
{
    const std::size_t n = primes_upto(q_set, cutoff);
    double r_count = 0, q_count = 0, worst = 0;
    for (std::size_t i = 0; i < n; ++i) {
        r_count += r_set.contains_rank(i);
        q_count += q_set.contains_rank(i);
        worst = std::max(worst, std::fabs(r_count - ratio * q_count));
    }
    return worst;
}

PairSequence block_pairs(const PrimeSubset& r_set, const PrimeSubset& q_set, std::uint64_t block_size,
                         std::uint64_t cutoff)
{
    if (block_size == 0)
        throw ArgumentError("block_pairs: block size must be positive");
    const std::size_t n = primes_upto(q_set, cutoff);
    const auto primes = q_set.base().primes();
    PairSequence out;
    out.block_size = block_size;
    out.complete_blocks = n / block_size;
    for (std::size_t k = 0; k < out.complete_blocks; ++k) {
        const std::size_t lo = k * block_size, hi = lo + block_size;
        std::size_t i = lo;
        while (i < hi && !r_set.contains_rank(i))
            ++i;
        std::size_t j = i + 1;
        while (j < hi && !(q_set.contains_rank(j) && !r_set.contains_rank(j)))
            ++j;
        if (i >= hi || j >= hi)
            out.skipped_blocks.push_back(k + 1);
        else
            out.pairs.push_back({primes[i], primes[j], k + 1});
    }
    if (out.complete_blocks > 0)
        out.last_block_prime = primes[out.complete_blocks * block_size - 1];
    return out;
}

std::uint64_t choose_block_size(const PrimeSubset& r_set, const PrimeSubset& q_set, std::uint64_t cutoff,
                                std::uint64_t max_block)
{
    const std::size_t n = primes_upto(q_set, cutoff);
    // Per-rank tags: 1 = in R, 2 = in Q \ R, 0 = neither.
    std::vector<std::uint8_t> tag(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        tag[i] = r_set.contains_rank(i) ? 1 : (q_set.contains_rank(i) ? 2 : 0);

    for (std::uint64_t block = 2; block <= max_block && block <= n; ++block) {
        bool ok = true;
        for (std::size_t lo = 0; ok && lo + block <= n; lo += block) {
            std::size_t in_r = 0, in_rest = 0;
            bool seen_r = false, ordered = false;
            for (std::size_t i = lo; i < lo + block; ++i) {
                if (tag[i] == 1) {
                    ++in_r;
                    seen_r = true;
                } else if (tag[i] == 2) {
                    ++in_rest;
                    ordered = ordered || seen_r;
                }
            }
            ok = in_r >= 2 && in_rest >= 2 && ordered;
        }
        if (ok)
            return block;
    }
    throw ArgumentError(fmt::format("choose_block_size: no block size <= {} gives every block two primes of R, "
                                    "two of Q\\R and an ordered pair below {}",
                                    max_block, cutoff));
}

void q_series(PairSequence& pairs, std::size_t ratio_check_from)
{
    pairs.q.clear();
    pairs.q_prime.clear();
    for (std::size_t k = 0; k < pairs.pairs.size(); ++k) {
        const auto [r, s, block] = pairs.pairs[k];
        if (r >= s)
            throw InvariantError(fmt::format("q_series: pair {} has r = {} >= s = {}", k, r, s));
        const double rd = static_cast<double>(r), sd = static_cast<double>(s), gap = sd - rd;
        // r(s-1) / ((r-1)s) = 1 + (s-r)/((r-1)s); log1p keeps precision for large r
        const double q = std::log1p(gap / ((rd - 1.0) * sd));
        const double qp = gap / (rd * sd);
        if (!(q > 0.0))
            throw InvariantError(fmt::format("q_series: q_{} = {} is not positive", k, q));
        if (k >= ratio_check_from && !(0.5 * q < qp && qp < 1.5 * q))
            throw InvariantError(fmt::format("q_series: q'_{} = {} outside (0.5 q, 1.5 q) for q = {}", k, qp, q));
        pairs.q.push_back(q);
        pairs.q_prime.push_back(qp);
    }
}

namespace {

// suffix[n] = sum_{k > n} q_k
std::vector<double> tail_sums(std::span<const double> q)
{
    std::vector<double> suffix(q.size(), 0.0);
    detail::CompensatedSum acc;
    for (std::size_t n = q.size(); n-- > 0;) {
        suffix[n] = acc.value();
        acc += q[n];
    }
    return suffix;
}

bool dominated(double qn, double tail) { return qn <= tail + 1e-12 * qn; }

} // namespace

std::size_t dominance_start(std::span<const double> q, double omitted_tail)
{
    const auto suffix = tail_sums(q);
    std::size_t start = 0;
    for (std::size_t n = 0; n < q.size(); ++n)
        if (!dominated(q[n], suffix[n] + omitted_tail))
            start = n + 1;
    return start;
}

SignSolution sign_solve(std::span<const double> q, double target, double omitted_tail, std::size_t index_offset)
{
    if (!(omitted_tail >= 0.0))
        throw ArgumentError("sign_solve: omitted tail must be nonnegative");
    detail::CompensatedSum total;
    for (double v : q) {
        if (!(v > 0.0))
            throw ArgumentError("sign_solve: q must be positive");
        total += v;
    }
    const double reach = total.value() + omitted_tail;
    if (std::fabs(target) > reach * (1.0 + 1e-15))
        throw InfeasibleTargetError(
            fmt::format("sign_solve: |target| = {} exceeds the series sum {}", std::fabs(target), reach), target,
            reach);
    const auto suffix = tail_sums(q);
    for (std::size_t n = 0; n < q.size(); ++n)
        if (!dominated(q[n], suffix[n] + omitted_tail))
            throw DominanceError(fmt::format("sign_solve: q_{} = {} exceeds the sum of later terms {}",
                                             index_offset + n, q[n], suffix[n] + omitted_tail),
                                 index_offset + n);

    // g(k) in {0, 1} with sum g q = target/2 + (sum q)/2; f = 2g - 1
    double remaining = 0.5 * target + 0.5 * reach;
    SignSolution out;
    out.target = target;
    out.omitted_tail = omitted_tail;
    out.signs.reserve(q.size());
    detail::CompensatedSum achieved;
    for (double v : q) {
        const bool take = remaining >= v;
        if (take)
            remaining -= v;
        out.signs.push_back(take ? 1 : -1);
        achieved += take ? v : -v;
    }
    out.achieved = achieved.value();
    out.residual = std::fabs(out.achieved - target);
    return out;
}

AdjustResult adjust(const PrimeSubset& r_set, const PrimeSubset& q_set, const PairSequence& pairs, double a,
                    double tau, std::uint64_t cutoff)
{
    if (!(a > 0.0))
        throw ArgumentError(fmt::format("adjust: target a = {} must be positive", a));
    if (pairs.q.size() != pairs.pairs.size())
        throw ArgumentError("adjust: q_series has not been computed for the pairs");
    const std::size_t n = primes_upto(q_set, cutoff);
    const auto primes = q_set.base().primes();

    AdjustResult res{.r_prime = r_set, .r_double_prime = r_set, .signs = {}};
    res.log_target = std::log(a);
    res.tail = pairs.tail_bound();
    res.sign_start = dominance_start(pairs.q, res.tail);
    if (res.sign_start >= pairs.q.size())
        throw InvariantError("adjust: no suffix of the pair sequence satisfies the dominance condition");
    const std::span<const double> q_tail(pairs.q.begin() + static_cast<std::ptrdiff_t>(res.sign_start),
                                         pairs.q.end());
    detail::CompensatedSum weight;
    for (double v : q_tail)
        weight += v;
    res.pair_weight = weight.value();

    PrimeSubset in_pairs(q_set.base_ptr());
    for (const auto& p : pairs.pairs) {
        in_pairs.insert(p.r);
        in_pairs.insert(p.s);
    }

    res.c = log_mertens_statistic(r_set, tau, static_cast<double>(cutoff)) - 0.5 * res.pair_weight;
    const double hi = res.log_target + 0.5 * res.pair_weight;
    const double lo = res.log_target - 0.5 * res.pair_weight;

    // Candidates outside the pairs, smallest first: heavy terms fix the defect
    // with few primes, so the counting functions barely move.
    auto candidates = [&](bool from_r) {
        std::vector<std::size_t> ranks;
        for (std::size_t i = 0; i < n; ++i)
            if (!in_pairs.contains_rank(i) && q_set.contains_rank(i) && r_set.contains_rank(i) == from_r)
                ranks.push_back(i);
        return ranks;
    };
    auto weight_of = [&](const std::vector<std::size_t>& ranks) {
        detail::CompensatedSum w;
        for (std::size_t i : ranks)
            w += log_mertens_term(primes[i]);
        return w.value();
    };

    double defect = res.c;
    if (defect > hi || defect < lo) {
        const bool drop = defect > hi;
        const auto ranks = candidates(drop);
        for (std::size_t i : ranks) {
            if (defect <= hi && defect >= lo)
                break;
            const double w = log_mertens_term(primes[i]);
            const double next = drop ? defect - w : defect + w;
            if (drop ? next < lo : next > hi)
                continue;  // would overshoot the window; later primes weigh less
            defect = next;
            if (drop) {
                res.r_prime.erase_rank(i);
                ++res.dropped;
            } else {
                res.r_prime.insert_rank(i);
                ++res.added;
            }
        }
        if (defect > hi || defect < lo) {
            const double low = res.c - weight_of(candidates(true));
            const double high = res.c + weight_of(candidates(false));
            throw UnreachableTargetError(
                fmt::format("adjust: log target {} unreachable; the adjustable primes below {} reach "
                            "[{}, {}] (window half-width {})",
                            res.log_target, cutoff, low + 0.5 * res.pair_weight, high + 0.5 * res.pair_weight,
                            0.5 * res.pair_weight),
                low + 0.5 * res.pair_weight, high + 0.5 * res.pair_weight);
        }
    }
    res.d = res.log_target - defect;

    res.signs = sign_solve(q_tail, 2.0 * res.d, res.tail, res.sign_start);
    res.r_double_prime = res.r_prime;
    for (std::size_t k = 0; k < res.signs.signs.size(); ++k) {
        if (res.signs.signs[k] > 0)
            continue;
        const auto& p = pairs.pairs[res.sign_start + k];
        res.r_double_prime.erase(p.r);
        res.r_double_prime.insert(p.s);
        ++res.swaps;
    }

    res.achieved_log = log_mertens_statistic(res.r_double_prime, tau, static_cast<double>(cutoff));
    res.shift_r_r2 = max_count_shift(r_set, res.r_double_prime, n);
    res.shift_r1_r2 = max_count_shift(res.r_prime, res.r_double_prime, n);
    if (res.shift_r1_r2 > 1)
        throw InvariantError(fmt::format("adjust: swaps moved a counting function by {}", res.shift_r1_r2));
    return res;
}

PartStatistics part_statistics(const PrimeSubset& part, double tau, std::uint64_t cutoff)
{
    PartStatistics st;
    const std::size_t total = primes_upto(part, cutoff);
    st.count = part.count_upto(cutoff);
    st.share = total == 0 ? 0.0 : static_cast<double>(st.count) / static_cast<double>(total);
    const double x = static_cast<double>(cutoff);
    st.prime_density = static_cast<double>(st.count) * std::log(x) / x;
    st.mertens = mertens_statistic(part, tau, x);
    return st;
}

PrimePartition build_partition(const PartitionSpec& spec, std::shared_ptr<const PrimeTable> table,
                               std::uint64_t cutoff, const PartitionOptions& options)
{
    spec.validate();
    if (!table)
        throw ArgumentError("build_partition: null prime table");
    if (cutoff < options.min_cutoff)
        throw ArgumentError(fmt::format("build_partition: cutoff {} below the minimum {}", cutoff,
                                        options.min_cutoff));
    if (cutoff > table->limit())
        throw OutOfRangeError(fmt::format("build_partition: cutoff {} exceeds table limit {}", cutoff,
                                          table->limit()));

    const std::size_t h = static_cast<std::size_t>(spec.h);
    // suffix sums of tau and products of a, from index j on
    std::vector<double> tau_from(h + 1, 0.0), a_from(h + 1, 1.0);
    for (std::size_t j = h; j-- > 0;) {
        tau_from[j] = tau_from[j + 1] + spec.tau[j];
        a_from[j] = a_from[j + 1] * spec.a[j];
    }

    PrimePartition out;
    out.spec = spec;
    out.cutoff = cutoff;

    PrimeSubset rest(table);
    for (std::size_t i = 0, n = table->count_upto(cutoff); i < n; ++i)
        rest.insert_rank(i);

    for (std::size_t j = 0; j + 1 < h; ++j) {
        const double kappa = tau_from[j];
        const double tau = tau_from[j + 1];
        const double a = a_from[j + 1];
        PrimeSubset r = greedy_select(rest, tau, kappa, cutoff);
        const std::uint64_t block = choose_block_size(r, rest, cutoff, options.max_block);
        PairSequence pairs = block_pairs(r, rest, block, cutoff);
        q_series(pairs, options.ratio_check_from);
        AdjustResult adj = adjust(r, rest, pairs, a, tau, cutoff);

        PrimeSubset next = adj.r_double_prime;
        out.parts.push_back(rest - next);
        out.levels.push_back(LevelDiagnostics{
            .kappa = kappa,
            .tau = tau,
            .a = a,
            .block_size = block,
            .pairs = pairs.pairs.size(),
            .skipped_blocks = pairs.skipped_blocks.size(),
            .greedy_deviation = greedy_deviation(r, rest, tau / kappa, cutoff),
            .adjustment = std::move(adj),
        });
        rest = std::move(next);
    }
    out.parts.push_back(std::move(rest));

    for (std::size_t i = 0; i < h; ++i)
        out.achieved.push_back(part_statistics(out.parts[i], spec.tau[i], cutoff));
    return out;
}

} // namespace mcomp
