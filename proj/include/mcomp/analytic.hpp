#pragma once

// Gamma function, the sharp density constants, truncated Dirichlet sums, and
// finite-cutoff numeric probes of the Dirichlet-series inequalities.

#include "mcomp/repr_core.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace mcomp {

// Gamma(t) for t > 0 via the Lanczos approximation (g = 7, 9 terms) with
// reflection below 1/2. Relative error below 1e-13 on (0, 10].
double gamma(double t);

// (h!)^(1/h) / Gamma(1/h)
double raikov_constant(int h);

// 1 / Gamma(1 + 1/h) = h / Gamma(1/h); h >= 2.
double upper_constant(int h);

struct ConstantsRow {
    int h = 0;
    double lower_raikov = 0.0;
    double upper = 0.0;      // NaN for h = 1, where the upper constant is undefined
    double gamma_inv = 0.0;  // 1 / Gamma(1/h)
};

ConstantsRow constants_row(int h);

// Truncated Dirichlet sum A[s] = sum_{a in A, a <= cutoff} a^-s.
struct DirichletSample {
    double s = 0.0;
    std::uint64_t cutoff = 0;
    double value = 0.0;
    double tau = 0.0;
    double scaled = 0.0;  // (s - 1)^tau * value; equals value while tau == 0
};

DirichletSample dirichlet_partial(const IntegerSet& set, double s, std::uint64_t cutoff);

// Returns sample with tau set and scaled = (s - 1)^tau * value.
DirichletSample scaled_by(DirichletSample sample, double tau);

// sum_{n <= cutoff} n^-s
double truncated_zeta(double s, std::uint64_t cutoff);

// s = 1 + 2^-k for k = 1..count.
std::vector<double> default_s_sequence(int count = 20);

// x = 2, then x <- max(x + 1, floor(x * ratio)), always ending at cutoff.
std::vector<std::uint64_t> geometric_grid(std::uint64_t start, std::uint64_t cutoff, double ratio);

struct Lemma1Row {
    double s = 0.0;
    double value = 0.0;   // truncated A[s]
    double scaled = 0.0;  // (s - 1)^tau * A[s]
    bool flagged = false; // scaled > bound * (1 + slack)
};

// Finite-cutoff probe of (s-1)^tau A[s] <= Gamma(tau) * limsup A(x) log^(1-tau)x / x,
// where the limsup is replaced by a maximum over a geometric grid of x <= cutoff.
struct Lemma1Report {
    double tau = 0.0;
    std::uint64_t cutoff = 0;
    double grid_ratio = 0.0;
    double slack = 0.0;
    double density_max = 0.0;     // max over the grid of the density statistic
    std::uint64_t density_argmax = 0;
    double bound = 0.0;           // Gamma(tau) * density_max
    std::vector<Lemma1Row> rows;
    bool any_flagged() const noexcept;
};

Lemma1Report lemma1_check(const IntegerSet& set, double tau, std::span<const double> s_sequence,
                          std::uint64_t cutoff, double slack, double grid_ratio = 1.1);

struct Lemma2Evaluation {
    double lhs = 0.0;  // A[s]^h / h! + B[s]^(h-1), B = A u {a^2}
    double rhs = 0.0;  // truncated zeta(s)
    bool holds = false;
};

// Evaluates the inequality with every sum truncated at cutoff; no basis check.
Lemma2Evaluation lemma2_inequality(const IntegerSet& set, int h, double s, std::uint64_t cutoff);

// As lemma2_inequality, after verifying set is a basis of order h on [1, cutoff].
// NotABasisError names the least unrepresentable n otherwise.
bool lemma2_check(const IntegerSet& set, int h, double s, std::uint64_t cutoff, const FactorSieve& sieve);

struct EulerIdentityResult {
    double lhs = 0.0;  // sum over products n of S(n) / n^s
    double rhs = 0.0;  // prod_i A_i[s]
    double relative_error = 0.0;
    bool holds = false;
};

// sum_n S_{A_1..A_h}(n) n^-s == prod_i A_i[s] for finite sets. The left side
// is built by Dirichlet convolution of the sets' indicator functions.
EulerIdentityResult euler_identity_check(std::span<const IntegerSet> family, double s, double tolerance);

} // namespace mcomp
