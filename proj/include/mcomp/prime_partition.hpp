#pragma once

// Partition of the primes below a cutoff into h classes with prescribed
// relative densities tau_i and Mertens-product targets a_i.
//
// One level of the construction, given a class Q of density kappa:
//   1. greedy_select picks R in Q tracking (tau/kappa) Q(x) to within 2;
//   2. block_pairs picks one pair r_k < s_k (r_k in R, s_k in Q\R) per
//      block of N consecutive primes;
//   3. adjust drops or adds primes outside the pairs until the log-Mertens
//      defect lies within half the remaining pair weight, then swaps
//      r_k -> s_k along a sign sequence from sign_solve.
// Limits become evaluations at the cutoff; every result records the tail
// bounds it relies on.

#include "mcomp/prime_engine.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace mcomp {

struct PartitionSpec {
    int h = 0;
    std::vector<double> tau;
    std::vector<double> a;

    // h >= 1, sizes match, tau_i in (0, 1] summing to 1, a_i > 0 with product 1
    // (both within 1e-12). ArgumentError otherwise.
    void validate() const;
};

struct PrimePair {
    std::uint64_t r = 0;
    std::uint64_t s = 0;
    std::size_t block = 0;  // 1-based block index k
};

struct PairSequence {
    std::uint64_t block_size = 0;
    std::vector<PrimePair> pairs;
    std::vector<double> q;        // log(r/(r-1)) - log(s/(s-1))
    std::vector<double> q_prime;  // 1/r - 1/s
    std::vector<std::size_t> skipped_blocks;
    std::size_t complete_blocks = 0;
    // Largest prime of the last complete block; every later pair has r > this.
    std::uint64_t last_block_prime = 0;

    // Upper bound on sum_{k > K} q_k for the continuation past the last
    // complete block: the q_k telescope inside disjoint prime intervals, so
    // the tail is at most log(p/(p-1)) at p = last_block_prime + 1.
    double tail_bound() const noexcept;
};

// Processes Q's primes ascending; p joins R iff R(p-1) < (tau/kappa) Q(p).
PrimeSubset greedy_select(const PrimeSubset& q_set, double tau, double kappa, std::uint64_t cutoff);

// max over primes x <= cutoff of |R(x) - ratio * Q(x)|.
double greedy_deviation(const PrimeSubset& r_set, const PrimeSubset& q_set, double ratio, std::uint64_t cutoff);

// Per complete block k (global primes p_{(k-1)N+1} .. p_{kN} <= cutoff): r_k is the
// least element of R in the block, s_k the least element of Q\R above r_k.
// Blocks without such a pair are skipped and listed. q and q_prime are left empty.
PairSequence block_pairs(const PrimeSubset& r_set, const PrimeSubset& q_set, std::uint64_t block_size,
                         std::uint64_t cutoff);

// Smallest N in [2, max_block] for which every complete block below cutoff holds
// >= 2 primes of R, >= 2 of Q\R, and some r < s. ArgumentError if none exists.
std::uint64_t choose_block_size(const PrimeSubset& r_set, const PrimeSubset& q_set, std::uint64_t cutoff,
                                std::uint64_t max_block = 10'000);

// Fills pairs.q and pairs.q_prime. InvariantError if some r_k >= s_k, some q_k <= 0,
// or 0.5 q_k < q'_k < 1.5 q_k fails for an index >= ratio_check_from.
void q_series(PairSequence& pairs, std::size_t ratio_check_from = 0);

struct SignSolution {
    std::vector<int> signs;   // f(k) in {-1, +1}
    double target = 0.0;
    double achieved = 0.0;    // sum f(k) q_k
    double residual = 0.0;    // |achieved - target|
    double omitted_tail = 0.0;
};

// Least index M such that q_n <= sum_{k>n} q_k + omitted_tail for every n >= M.
// Returns q.size() when even the last term fails.
std::size_t dominance_start(std::span<const double> q, double omitted_tail);

// Greedy sign selection steering sum f(k) q_k to target. omitted_tail bounds
// the series beyond the given terms; the result satisfies
// residual <= omitted_tail. Throws InfeasibleTargetError if
// |target| > sum q_k + omitted_tail, DominanceError (with index_offset + n)
// if some q_n exceeds its tail.
SignSolution sign_solve(std::span<const double> q, double target, double omitted_tail = 0.0,
                        std::size_t index_offset = 0);

struct AdjustResult {
    PrimeSubset r_prime;        // R after the finite drop/add step
    PrimeSubset r_double_prime; // R' after the r_k -> s_k swaps
    std::size_t sign_start = 0; // M
    double pair_weight = 0.0;   // sum_{k >= M} q_k
    double tail = 0.0;          // bound on the omitted q tail
    double c = 0.0;             // defect of R: W(R) - tau W(P) - pair_weight / 2
    double d = 0.0;             // log(a) - defect of R'
    double log_target = 0.0;    // log(a)
    double achieved_log = 0.0;  // W(R'') - tau W(P) at cutoff
    std::size_t dropped = 0;
    std::size_t added = 0;
    std::size_t swaps = 0;
    std::uint64_t shift_r_r2 = 0;  // max_x |R''(x) - R(x)|
    std::uint64_t shift_r1_r2 = 0; // max_x |R''(x) - R'(x)|
    SignSolution signs;
};

// Steers the log-Mertens statistic of R (exponent tau) to log(a) at the cutoff.
// UnreachableTargetError reports the achievable interval when the drop/add step
// runs out of primes.
AdjustResult adjust(const PrimeSubset& r_set, const PrimeSubset& q_set, const PairSequence& pairs, double a,
                    double tau, std::uint64_t cutoff);

struct PartStatistics {
    std::uint64_t count = 0;       // P_i(cutoff)
    double share = 0.0;            // P_i(cutoff) / pi(cutoff)
    double prime_density = 0.0;    // P_i(cutoff) log(cutoff) / cutoff
    double mertens = 0.0;          // Mertens statistic with exponent tau_i
};

struct LevelDiagnostics {
    double kappa = 0.0;
    double tau = 0.0;
    double a = 0.0;
    std::uint64_t block_size = 0;
    std::size_t pairs = 0;
    std::size_t skipped_blocks = 0;
    double greedy_deviation = 0.0;
    AdjustResult adjustment;
};

struct PartitionOptions {
    std::uint64_t min_cutoff = 100'000;
    std::uint64_t max_block = 10'000;
    std::size_t ratio_check_from = 0;
};

struct PrimePartition {
    std::vector<PrimeSubset> parts;
    PartitionSpec spec;
    std::uint64_t cutoff = 0;
    std::vector<PartStatistics> achieved;
    std::vector<LevelDiagnostics> levels;  // h - 1 entries
};

PartStatistics part_statistics(const PrimeSubset& part, double tau, std::uint64_t cutoff);

// Peels P_1, ..., P_{h-1} off the primes <= cutoff; P_h is the residue.
PrimePartition build_partition(const PartitionSpec& spec, std::shared_ptr<const PrimeTable> table,
                               std::uint64_t cutoff, const PartitionOptions& options = {});

} // namespace mcomp
