#include "mcomp/analytic.hpp"

#include "mcomp/detail/compensated_sum.hpp"
#include "mcomp/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <map>
#include <numbers>

namespace mcomp {

namespace {

// Lanczos coefficients for g = 7, n = 9.
constexpr double lanczos_g = 7.0;
constexpr std::array<double, 9> lanczos_coef{
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7,
};

double lanczos(double t)
{
    // Gamma(t) for t >= 1/2
    const double z = t - 1.0;
    double a = lanczos_coef[0];
    for (std::size_t i = 1; i < lanczos_coef.size(); ++i)
        a += lanczos_coef[i] / (z + static_cast<double>(i));
    const double w = z + lanczos_g + 0.5;
    // sqrt(2 pi) * w^(z + 1/2) * e^-w * a, split to delay overflow
    const double half = std::pow(w, 0.5 * (z + 0.5));
    return std::sqrt(2.0 * std::numbers::pi) * half * (half * std::exp(-w)) * a;
}

double log_factorial(int h)
{
    detail::CompensatedSum s;
    for (int k = 2; k <= h; ++k)
        s += std::log(static_cast<double>(k));
    return s.value();
}

void check_s(double s, const char* what)
{
    if (!(s > 1.0))
        throw DomainError(fmt::format("{}: s = {} must exceed 1", what, s));
}

double sum_inverse_powers(std::span<const IntegerSet::value_type> elements, double s, std::uint64_t cutoff)
{
    detail::CompensatedSum acc;
    for (auto a : elements) {
        if (a > cutoff)
            break;
        acc += std::pow(static_cast<double>(a), -s);
    }
    return acc.value();
}

} // namespace

double gamma(double t)
{
    if (!(t > 0.0) || !std::isfinite(t))
        throw DomainError(fmt::format("gamma: t = {} must be a positive finite real", t));
    if (t < 0.5)
        return std::numbers::pi / (std::sin(std::numbers::pi * t) * lanczos(1.0 - t));
    return lanczos(t);
}

double raikov_constant(int h)
{
    if (h < 1)
        throw ArgumentError(fmt::format("raikov_constant: h = {} must be >= 1", h));
    const double inv_h = 1.0 / static_cast<double>(h);
    double root;
    if (h <= 20) {
        double fact = 1.0;
        for (int k = 2; k <= h; ++k)
            fact *= static_cast<double>(k);
        root = std::pow(fact, inv_h);
    } else {
        root = std::exp(log_factorial(h) * inv_h);
    }
    return root / gamma(inv_h);
}

double upper_constant(int h)
{
    if (h < 2)
        throw ArgumentError(fmt::format("upper_constant: h = {} must be >= 2", h));
    return 1.0 / gamma(1.0 + 1.0 / static_cast<double>(h));
}

ConstantsRow constants_row(int h)
{
    ConstantsRow row;
    row.h = h;
    row.lower_raikov = raikov_constant(h);
    row.upper = h >= 2 ? upper_constant(h) : std::numeric_limits<double>::quiet_NaN();
    row.gamma_inv = 1.0 / gamma(1.0 / static_cast<double>(h));
    return row;
}

DirichletSample dirichlet_partial(const IntegerSet& set, double s, std::uint64_t cutoff)
{
    check_s(s, "dirichlet_partial");
    if (cutoff > set.limit())
        throw OutOfRangeError(fmt::format("dirichlet_partial: cutoff {} exceeds set limit {}", cutoff, set.limit()));
    DirichletSample out;
    out.s = s;
    out.cutoff = cutoff;
    out.value = sum_inverse_powers(set.elements(), s, cutoff);
    out.scaled = out.value;
    return out;
}

DirichletSample scaled_by(DirichletSample sample, double tau)
{
    if (!(tau > 0.0 && tau < 1.0))
        throw DomainError(fmt::format("scaled_by: tau = {} outside (0, 1)", tau));
    sample.tau = tau;
    sample.scaled = std::pow(sample.s - 1.0, tau) * sample.value;
    return sample;
}

double truncated_zeta(double s, std::uint64_t cutoff)
{
    check_s(s, "truncated_zeta");
    detail::CompensatedSum acc;
    for (std::uint64_t n = 1; n <= cutoff; ++n)
        acc += std::pow(static_cast<double>(n), -s);
    return acc.value();
}

std::vector<double> default_s_sequence(int count)
{
    std::vector<double> out;
    for (int k = 1; k <= count; ++k)
        out.push_back(1.0 + std::ldexp(1.0, -k));
    return out;
}

std::vector<std::uint64_t> geometric_grid(std::uint64_t start, std::uint64_t cutoff, double ratio)
{
    if (!(ratio > 1.0))
        throw ArgumentError(fmt::format("geometric_grid: ratio {} must exceed 1", ratio));
    std::vector<std::uint64_t> out;
    if (cutoff < start)
        return out;
    for (std::uint64_t x = start; x < cutoff;) {
        out.push_back(x);
        const auto next = static_cast<std::uint64_t>(std::floor(static_cast<double>(x) * ratio));
        x = std::max(x + 1, next);
    }
    out.push_back(cutoff);
    return out;
}

bool Lemma1Report::any_flagged() const noexcept
{
    return std::any_of(rows.begin(), rows.end(), [](const Lemma1Row& r) { return r.flagged; });
}

Lemma1Report lemma1_check(const IntegerSet& set, double tau, std::span<const double> s_sequence,
                          std::uint64_t cutoff, double slack, double grid_ratio)
{
    if (s_sequence.empty())
        throw ArgumentError("lemma1_check: empty s sequence");
    if (!(tau > 0.0 && tau < 1.0))
        throw DomainError(fmt::format("lemma1_check: tau = {} outside (0, 1)", tau));
    if (!(slack > 0.0))
        throw ArgumentError(fmt::format("lemma1_check: slack = {} must be positive", slack));
    for (double s : s_sequence)
        check_s(s, "lemma1_check");
    if (cutoff > set.limit())
        throw OutOfRangeError(fmt::format("lemma1_check: cutoff {} exceeds set limit {}", cutoff, set.limit()));

    Lemma1Report report;
    report.tau = tau;
    report.cutoff = cutoff;
    report.grid_ratio = grid_ratio;
    report.slack = slack;
    for (std::uint64_t x : geometric_grid(2, cutoff, grid_ratio)) {
        const double d = density_statistic(set, tau, static_cast<double>(x));
        if (d > report.density_max) {
            report.density_max = d;
            report.density_argmax = x;
        }
    }
    report.bound = gamma(tau) * report.density_max;
    for (double s : s_sequence) {
        const DirichletSample sample = scaled_by(dirichlet_partial(set, s, cutoff), tau);
        report.rows.push_back({s, sample.value, sample.scaled, sample.scaled > report.bound * (1.0 + slack)});
    }
    return report;
}

Lemma2Evaluation lemma2_inequality(const IntegerSet& set, int h, double s, std::uint64_t cutoff)
{
    check_s(s, "lemma2_inequality");
    if (h < 1)
        throw ArgumentError(fmt::format("lemma2_inequality: h = {} must be >= 1", h));
    if (cutoff > set.limit())
        throw OutOfRangeError(fmt::format("lemma2_inequality: cutoff {} exceeds set limit {}", cutoff, set.limit()));

    std::vector<std::uint8_t> in_b = set.membership(cutoff);
    for (auto a : set.elements()) {
        const std::uint64_t sq = std::uint64_t{a} * a;
        if (sq > cutoff)
            break;
        in_b[sq] = 1;
    }
    detail::CompensatedSum b_sum;
    for (std::uint64_t n = 1; n <= cutoff; ++n)
        if (in_b[n])
            b_sum += std::pow(static_cast<double>(n), -s);

    const double a_s = sum_inverse_powers(set.elements(), s, cutoff);
    Lemma2Evaluation out;
    // a_s == 0 gives exp(-inf) == 0
    out.lhs = std::exp(static_cast<double>(h) * std::log(a_s) - log_factorial(h)) +
              std::pow(b_sum.value(), static_cast<double>(h - 1));
    out.rhs = truncated_zeta(s, cutoff);
    out.holds = out.lhs >= out.rhs;
    return out;
}

bool lemma2_check(const IntegerSet& set, int h, double s, std::uint64_t cutoff, const FactorSieve& sieve)
{
    if (auto failure = verify_basis(set, h, cutoff, sieve))
        throw NotABasisError(fmt::format("lemma2_check: set is not a basis of order {} on [1, {}]; "
                                         "first unrepresentable n = {}",
                                         h, cutoff, *failure),
                             *failure);
    return lemma2_inequality(set, h, s, cutoff).holds;
}

EulerIdentityResult euler_identity_check(std::span<const IntegerSet> family, double s, double tolerance)
{
    check_s(s, "euler_identity_check");
    // Dirichlet convolution of indicator functions: product n -> S(n).
    std::map<std::uint64_t, std::uint64_t> conv{{1, 1}};
    for (const IntegerSet& set : family) {
        std::map<std::uint64_t, std::uint64_t> next;
        for (const auto& [n, count] : conv)
            for (auto a : set.elements()) {
                std::uint64_t prod;
                if (__builtin_mul_overflow(n, std::uint64_t{a}, &prod))
                    throw OutOfRangeError("euler_identity_check: product exceeds 64 bits");
                next[prod] += count;
            }
        conv = std::move(next);
    }

    detail::CompensatedSum lhs;
    for (const auto& [n, count] : conv)
        lhs += static_cast<double>(count) * std::pow(static_cast<double>(n), -s);

    double rhs = 1.0;
    for (const IntegerSet& set : family)
        rhs *= sum_inverse_powers(set.elements(), s, set.limit());

    EulerIdentityResult out;
    out.lhs = lhs.value();
    out.rhs = rhs;
    const double scale = std::max(std::fabs(out.lhs), std::fabs(out.rhs));
    out.relative_error = scale == 0.0 ? 0.0 : std::fabs(out.lhs - out.rhs) / scale;
    out.holds = out.relative_error <= tolerance;
    return out;
}

} // namespace mcomp
