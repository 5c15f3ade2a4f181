#pragma once

// Multiplicative complements built two ways: smooth-number families over a
// prime partition, and the checkpointed F-set recursion.

#include "mcomp/prime_partition.hpp"
#include "mcomp/repr_core.hpp"

#include <cstdint>
#include <vector>

namespace mcomp {

// All n <= x whose prime factors lie in part (1 included).
IntegerSet smooth_numbers(const PrimeSubset& part, std::uint64_t x, const FactorSieve& sieve);

struct WirsingOdoniPrediction {
    double tau = 0.0;
    double a = 0.0;
    double constant = 0.0;   // a / Gamma(tau)
    double x = 0.0;
    double predicted_count = 0.0;  // constant * x / log(x)^(1 - tau)
};

WirsingOdoniPrediction wirsing_odoni_predict(double tau, double a, double x);

struct SmoothSetReport {
    double tau = 0.0;
    double a = 0.0;
    std::uint64_t count = 0;
    double density_statistic = 0.0;  // A_i(x) log^(1 - tau_i)(x) / x
    WirsingOdoniPrediction prediction;
    double ratio = 0.0;              // count / predicted count
};

struct Theorem5Result {
    ComplementFamily family;
    std::vector<SmoothSetReport> sets;
};

// A_i = P_i-smooth numbers up to x, verified exactly as a complement on [1, x].
// VerificationError if verification fails (the partition must cover every prime <= x).
Theorem5Result build_theorem5_family(const PrimePartition& partition, std::uint64_t x, const FactorSieve& sieve);

struct FSets {
    std::uint64_t x = 0;
    std::uint64_t y = 0;
    std::uint64_t n = 0;   // N
    IntegerSet f0;         // (x, x y^(2/3)], capped at y
    IntegerSet f1;         // pv: y^(2/3) < p < y/x, v <= sqrt(x)
    IntegerSet f2;         // pv: y/x < p <= y/N, v <= sqrt(y/p)
    std::vector<IntegerSet> f3;  // f3[j-1]: primes in (y/N, y] with pi(p) = j mod h (j = h for residue 0)
};

// PreconditionError unless y > x^2; y must not exceed table.limit().
FSets f_sets(std::uint64_t x, std::uint64_t y, std::uint64_t n, int h, const PrimeTable& table);

// Same defining inequalities without the y > x^2 precondition. Callers must
// check freshness and checkpoint consistency themselves.
FSets f_sets_unchecked(std::uint64_t x, std::uint64_t y, std::uint64_t n, int h, const PrimeTable& table);

// ceil(256 / eps^2) + 1
std::uint64_t theorem8_seed(double epsilon);

struct GrowthPolicy {
    enum class Kind { power, explicit_list };
    Kind kind = Kind::power;
    // power: y = max(x^exponent, 10 x), then min(y, cap)
    int exponent = 3;
    std::uint64_t cap = 0;  // 0 = no cap
    // explicit_list: successive checkpoints after n_0
    std::vector<std::uint64_t> checkpoints;

    std::uint64_t next(std::uint64_t x, std::size_t step) const;
    // power policy before the cap (saturating at 2^64 - 1)
    std::uint64_t uncapped(std::uint64_t x) const;
    bool is_capped(std::uint64_t x) const;
};

struct Theorem8Options {
    std::uint64_t seed_override = 0;  // 0 = use ceil(256/eps^2) + 1
    // Throw PreconditionError on a step with y <= x^2 instead of running it
    // unchecked and flagging it in the record.
    bool strict_growth = false;
};

// Runs the F-set recursion `steps` times from A_j^0 = [N]. Each checkpoint is
// verified exactly on [1, n_{i+1}] and checked for consistency with the
// previous one; either failure throws (VerificationError / InvariantError).
// The density condition is recorded per checkpoint, not enforced. Steps with
// n_{i+1} <= n_i^2 (a capped power policy, or a short explicit list) are run
// with the same F-set inequalities and flagged in the provenance.
ComplementFamily build_theorem8_family(int h, double epsilon, std::size_t steps, const GrowthPolicy& growth,
                                       const PrimeTable& table, const FactorSieve& sieve,
                                       const Theorem8Options& options = {});

} // namespace mcomp
