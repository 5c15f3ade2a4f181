#include "mcomp/complement_builder.hpp"
#include "mcomp/errors.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace mcomp;

namespace {

using u128 = unsigned __int128;

// F-sets by scanning every n <= y and testing the defining inequalities on
// each factorization n = p v, rather than walking the primes.
struct FOracle {
    std::vector<std::uint64_t> f0, f1, f2;
    std::vector<std::vector<std::uint64_t>> f3;
};

FOracle f_oracle(std::uint64_t x, std::uint64_t y, std::uint64_t n, int h)
{
    FOracle o;
    o.f3.resize(static_cast<std::size_t>(h));
    const auto primes = oracle::primes_upto(y);
    std::vector<std::uint64_t> rank(y + 1, 0);
    for (std::size_t i = 0; i < primes.size(); ++i)
        rank[primes[i]] = i + 1;
    for (std::uint64_t m = 1; m <= y; ++m) {
        // m^3 <= x^3 y^2
        if (m > x && u128{m} * m * m <= u128{x} * x * x * y * y)
            o.f0.push_back(m);
        bool in1 = false, in2 = false;
        // both F1 and F2 force v^2 <= y
        for (std::uint64_t v = 1; v * v <= y && v <= m; ++v) {
            if (m % v)
                continue;
            const std::uint64_t p = m / v;
            if (!rank[p])
                continue;
            const bool big = u128{p} * p * p > u128{y} * y;
            in1 |= big && p * x < y && v * v <= x;
            in2 |= p * x > y && p * n <= y && u128{v} * v * p <= y;
        }
        if (in1)
            o.f1.push_back(m);
        if (in2)
            o.f2.push_back(m);
        if (rank[m] && m * n > y)
            o.f3[(rank[m] - 1) % static_cast<std::size_t>(h)].push_back(m);
    }
    return o;
}

void check_against_oracle(std::uint64_t x, std::uint64_t y, std::uint64_t n, int h)
{
    const PrimeTable t = sieve_primes(y);
    const FSets f = f_sets_unchecked(x, y, n, h, t);
    const FOracle o = f_oracle(x, y, n, h);
    CHECK(to_vector(f.f0) == o.f0);
    CHECK(to_vector(f.f1) == o.f1);
    CHECK(to_vector(f.f2) == o.f2);
    REQUIRE(f.f3.size() == static_cast<std::size_t>(h));
    for (int j = 0; j < h; ++j)
        CHECK(to_vector(f.f3[static_cast<std::size_t>(j)]) == o.f3[static_cast<std::size_t>(j)]);
}

PrimePartition manual_partition(std::shared_ptr<const PrimeTable> t, std::vector<PrimeSubset> parts,
                                std::vector<double> tau, std::vector<double> a)
{
    PrimePartition p;
    p.spec.h = static_cast<int>(parts.size());
    p.spec.tau = std::move(tau);
    p.spec.a = std::move(a);
    p.cutoff = t->limit();
    p.parts = std::move(parts);
    return p;
}

} // namespace

TEST_SUITE("complement_builder") {

TEST_CASE("smooth_numbers examples")
{
    auto t = std::make_shared<const PrimeTable>(sieve_primes(1000));
    const FactorSieve sv(1000);
    const std::vector<std::uint64_t> two_three{2, 3};
    CHECK(to_vector(smooth_numbers(PrimeSubset::of_primes(t, two_three), 20, sv)) ==
          std::vector<std::uint64_t>{1, 2, 3, 4, 6, 8, 9, 12, 16, 18});
    CHECK(to_vector(smooth_numbers(PrimeSubset(t), 20, sv)) == std::vector<std::uint64_t>{1});
    CHECK(smooth_numbers(PrimeSubset::all(t), 1000, sv) == IntegerSet::range(1000));
    CHECK_THROWS_AS(smooth_numbers(PrimeSubset::all(t), 1001, sv), OutOfRangeError);
}

TEST_CASE("smooth_numbers agrees with trial division")
{
    const std::uint64_t x = 20'000;
    auto t = std::make_shared<const PrimeTable>(sieve_primes(x));
    const FactorSieve sv(x);
    std::mt19937_64 rng(41);
    std::bernoulli_distribution coin(0.5);
    for (int trial = 0; trial < 4; ++trial) {
        std::vector<std::uint64_t> part;
        for (auto p : t->primes())
            if (coin(rng))
                part.push_back(p);
        const std::set<std::uint64_t> in(part.begin(), part.end());
        std::vector<std::uint64_t> expect;
        for (std::uint64_t n = 1; n <= x; ++n) {
            std::uint64_t m = n;
            bool ok = true;
            for (std::uint64_t d = 2; d * d <= m && ok; ++d)
                if (m % d == 0) {
                    ok = in.count(d) > 0;
                    while (m % d == 0)
                        m /= d;
                }
            if (ok && m > 1)
                ok = in.count(m) > 0;
            if (ok)
                expect.push_back(n);
        }
        REQUIRE(to_vector(smooth_numbers(PrimeSubset::of_primes(t, part), x, sv)) == expect);
    }
}

TEST_CASE("smooth families over a prime partition")
{
    auto t = std::make_shared<const PrimeTable>(sieve_primes(100));
    const FactorSieve sv(100);
    const std::vector<std::uint64_t> two{2};
    const auto p2 = PrimeSubset::of_primes(t, two);
    const auto part = manual_partition(t, {p2, PrimeSubset::all(t) - p2}, {0.5, 0.5}, {1.0, 1.0});
    const auto res = build_theorem5_family(part, 100, sv);
    CHECK(to_vector(res.family.sets[0]) == std::vector<std::uint64_t>{1, 2, 4, 8, 16, 32, 64});
    std::vector<std::uint64_t> odd;
    for (std::uint64_t v = 1; v <= 100; v += 2)
        odd.push_back(v);
    CHECK(to_vector(res.family.sets[1]) == odd);
    CHECK(res.family.provenance.records.at(0).verified);

    const auto one = manual_partition(t, {PrimeSubset::all(t)}, {1.0}, {1.0});
    CHECK(build_theorem5_family(one, 100, sv).family.sets.at(0) == IntegerSet::range(100));

    // a part missing the prime 3 leaves 3 unrepresented
    const std::vector<std::uint64_t> three{3};
    const auto gap = manual_partition(t, {p2, PrimeSubset::all(t) - p2 - PrimeSubset::of_primes(t, three)},
                                      {0.5, 0.5}, {1.0, 1.0});
    CHECK_THROWS_AS(build_theorem5_family(gap, 100, sv), VerificationError);
    CHECK_THROWS_AS(build_theorem5_family(one, 101, FactorSieve(200)), PreconditionError);
}

TEST_CASE("balanced partition at 1e6 tracks the predicted counts")
{
    const std::uint64_t x = 1'000'000;
    auto t = std::make_shared<const PrimeTable>(sieve_primes(x));
    const FactorSieve sv(x);
    PartitionSpec spec{2, {0.5, 0.5}, {1.0, 1.0}};
    const auto part = build_partition(spec, t, x);
    const auto res = build_theorem5_family(part, x, sv);
    REQUIRE(res.sets.size() == 2);
    for (const auto& r : res.sets) {
        CHECK(r.ratio >= 0.5);
        CHECK(r.ratio <= 2.0);
        CHECK(r.prediction.constant == doctest::Approx(1.0 / std::sqrt(std::acos(-1.0))).epsilon(1e-12));
    }
}

TEST_CASE("wirsing_odoni_predict examples")
{
    const auto w = wirsing_odoni_predict(0.5, 1.0, 1e6);
    CHECK(w.constant == doctest::Approx(1.0 / std::sqrt(std::acos(-1.0))).epsilon(1e-13));
    CHECK(w.predicted_count == doctest::Approx(w.constant * 1e6 / std::sqrt(std::log(1e6))).epsilon(1e-13));
    CHECK_THROWS_AS(wirsing_odoni_predict(1.0, 1.0, 1e6), DomainError);
    CHECK_THROWS_AS(wirsing_odoni_predict(0.5, 0.0, 1e6), DomainError);
    CHECK_THROWS_AS(wirsing_odoni_predict(0.5, 1.0, 1.0), DomainError);
}

TEST_CASE("f_sets example x = 10, y = 1e4, N = 26")
{
    const PrimeTable t = sieve_primes(10'000);
    const FSets f = f_sets(10, 10'000, 26, 2, t);
    REQUIRE(f.f0.size() == 4641 - 10);
    CHECK(f.f0.elements().front() == 11);
    CHECK(f.f0.elements().back() == 4641);
    // y/N < y/x, so no prime qualifies for F2
    CHECK(f.f2.size() == 0);
    check_against_oracle(10, 10'000, 26, 2);
}

TEST_CASE("f_sets match the direct inequalities")
{
    check_against_oracle(10, 10'000, 5, 3);
    check_against_oracle(30, 27'000, 30, 2);   // y = x^3: F1 is empty
    check_against_oracle(12, 50'000, 4, 2);    // F2 nonempty
    check_against_oracle(7, 60'000, 3, 1);
}

TEST_CASE("f_sets properties")
{
    const PrimeTable t = sieve_primes(200'000);
    for (auto [x, y, n, h] : {std::tuple{10ull, 10'000ull, 5ull, 2}, std::tuple{20ull, 200'000ull, 8ull, 3},
                              std::tuple{40ull, 64'000ull, 30ull, 2}}) {
        const FSets f = f_sets(x, y, n, h, t);
        // every element is fresh: above x, at most y
        for (const IntegerSet* s : {&f.f0, &f.f1, &f.f2})
            for (auto v : s->elements())
                REQUIRE((v > x && v <= y));
        // the F3 classes partition the primes in (y/N, y]
        std::uint64_t total = 0;
        for (const auto& c : f.f3)
            total += c.size();
        std::uint64_t expect = 0;
        for (auto p : t.primes())
            expect += (p <= y && p * n > y);
        CHECK(total == expect);
        if (y <= x * x * x)
            CHECK(f.f1.size() == 0);
    }
    CHECK_THROWS_AS(f_sets(100, 10'000, 5, 2, t), PreconditionError);
    CHECK_NOTHROW(f_sets_unchecked(100, 10'000, 5, 2, t));
    CHECK_THROWS_AS(f_sets(10, 300'000, 5, 2, t), OutOfRangeError);
}

TEST_CASE("theorem8_seed and growth policy")
{
    CHECK(theorem8_seed(4.0) == 17);
    CHECK(theorem8_seed(1.0) == 257);
    CHECK_THROWS_AS(theorem8_seed(0.0), DomainError);

    GrowthPolicy g;
    CHECK(g.next(30, 0) == 27'000);
    CHECK(g.next(2, 0) == 20);  // 10 x beats x^3
    g.cap = 20'000'000;
    CHECK(g.next(27'000, 1) == 20'000'000);
    CHECK(g.is_capped(27'000));
    CHECK_FALSE(g.is_capped(30));
    g.exponent = 4;
    CHECK(g.next(30, 0) == 810'000);

    GrowthPolicy list;
    list.kind = GrowthPolicy::Kind::explicit_list;
    list.checkpoints = {10'000, 1'000'000};
    CHECK(list.next(30, 1) == 1'000'000);
    CHECK_THROWS_AS(list.next(30, 2), ArgumentError);
}

TEST_CASE("theorem8 family with no steps is the seed range")
{
    const PrimeTable t = sieve_primes(1000);
    const FactorSieve sv(1000);
    const auto fam = build_theorem8_family(2, 4.0, 0, GrowthPolicy{}, t, sv);
    REQUIRE(fam.sets.size() == 2);
    CHECK(fam.sets[0] == IntegerSet::range(17));
    CHECK(fam.checkpoints == std::vector<std::uint64_t>{17});
    CHECK(fam.provenance.records.at(0).verified);
}

TEST_CASE("theorem8 family on an explicit checkpoint list")
{
    const std::uint64_t top = 1'000'000;
    const PrimeTable t = sieve_primes(top);
    const FactorSieve sv(top);
    GrowthPolicy list;
    list.kind = GrowthPolicy::Kind::explicit_list;
    list.checkpoints = {10'000, top};
    Theorem8Options opt;
    opt.seed_override = 30;
    const auto fam = build_theorem8_family(2, 3.0, 2, list, t, sv, opt);
    REQUIRE(fam.checkpoints == std::vector<std::uint64_t>{30, 10'000, top});
    for (const auto& r : fam.provenance.records) {
        CHECK(r.verified);
        CHECK(r.consistent);
    }
    // 30 -> 1e4 clears the squaring condition, 1e4 -> 1e6 does not
    CHECK(fam.provenance.records[1].precondition_met);
    CHECK_FALSE(fam.provenance.records[2].precondition_met);
    CHECK_FALSE(verify_complement(fam.sets, top, sv).has_value());

    // the same run stopped one step early is a prefix of this one
    const auto shorter = build_theorem8_family(2, 3.0, 1, list, t, sv, opt);
    for (std::size_t j = 0; j < 2; ++j)
        CHECK(fam.sets[j].truncated(10'000) == shorter.sets[j]);

    // tuple enumeration on [1, 1e4] agrees with the verifier
    std::vector<std::vector<std::uint64_t>> raw;
    for (const auto& s : shorter.sets)
        raw.push_back(to_vector(s));
    const auto c = oracle::tuple_counts(raw, 10'000);
    for (std::uint64_t n = 1; n <= 10'000; ++n)
        REQUIRE(c[n] > 0);
}

TEST_CASE("theorem8 family under the power policy")
{
    const std::uint64_t top = 1'000'000;
    const PrimeTable t = sieve_primes(top);
    const FactorSieve sv(top);
    Theorem8Options opt;
    opt.seed_override = 30;

    GrowthPolicy four;
    four.exponent = 4;
    const auto fam = build_theorem8_family(2, 3.0, 1, four, t, sv, opt);
    CHECK(fam.checkpoints.back() == 810'000);
    const auto& rec = fam.provenance.records.back();
    CHECK(rec.verified);
    CHECK(rec.f1 > 0);  // y > x^3 keeps F1 alive
    CHECK(rec.f0 + rec.f1 + rec.f2 > 0);

    GrowthPolicy capped;
    capped.cap = 500'000;
    const auto c = build_theorem8_family(2, 3.0, 2, capped, t, sv, opt);
    REQUIRE(c.checkpoints == std::vector<std::uint64_t>{30, 27'000, 500'000});
    CHECK(c.provenance.records[1].f1 == 0);
    CHECK(c.provenance.records[1].precondition_met);
    CHECK_FALSE(c.provenance.records[2].precondition_met);
    CHECK(c.provenance.records[2].capped);
    CHECK(c.provenance.records[2].verified);

    opt.strict_growth = true;
    CHECK_THROWS_AS(build_theorem8_family(2, 3.0, 2, capped, t, sv, opt), PreconditionError);
    CHECK_THROWS_AS(build_theorem8_family(2, 3.0, 1, GrowthPolicy{.cap = 2'000'000, .checkpoints = {}}, t, sv, {.seed_override = 200}),
                    OutOfRangeError);
}

TEST_CASE("theorem8 densities are recorded for h = 1 and h = 3")
{
    const std::uint64_t top = 100'000;
    const PrimeTable t = sieve_primes(top);
    const FactorSieve sv(top);
    for (int h : {1, 3}) {
        Theorem8Options opt;
        opt.seed_override = 20;
        GrowthPolicy g;
        g.cap = top;
        const auto fam = build_theorem8_family(h, 0.5, 2, g, t, sv, opt);
        REQUIRE(fam.sets.size() == static_cast<std::size_t>(h));
        for (const auto& r : fam.provenance.records) {
            CHECK(r.verified);
            CHECK(r.density_bound == doctest::Approx(1.0 / h + 0.5));
            CHECK(r.within_bound == (r.max_density <= r.density_bound));
        }
    }
}

}
