#include "cli.hpp"

#include "mcomp/analytic.hpp"
#include "mcomp/complement_builder.hpp"
#include "mcomp/errors.hpp"
#include "mcomp/serialize.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

namespace mcomp::cli {

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A counterexample was found; the message names it.
class CounterexampleFound : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// --out "-" (the default) means the caller's stream.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback)
    {
        if (path.empty() || path == "-")
            return;
        file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
        if (!*file_)
            throw UsageError(fmt::format("cannot open {} for writing", path));
        stream_ = file_.get();
    }
    std::ostream& stream() { return *stream_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* stream_;
};

std::string join(const std::vector<double>& v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? "," : "") + format_real(v[i]);
    return s;
}

std::string join(const std::vector<std::uint64_t>& v)
{
    return fmt::format("{}", fmt::join(v, ","));
}

std::string join(const std::vector<std::string>& v)
{
    return fmt::format("{}", fmt::join(v, ","));
}

std::string flag(bool b) { return b ? "1" : "0"; }

// The parameter echo is built from the parsed values, in a fixed order per
// command. Output paths are left out so two runs into different files match.
struct Echo {
    std::vector<std::pair<std::string, std::string>> items;
    Echo& operator()(std::string key, std::string value)
    {
        items.emplace_back(std::move(key), std::move(value));
        return *this;
    }
};

void csv_header(std::ostream& os, const std::string& command, const Echo& echo, const std::vector<std::string>& notes,
                const std::vector<std::string>& columns)
{
    std::string line = fmt::format("# mcomp {} {}", tool_version, command);
    for (const auto& [k, v] : echo.items)
        line += fmt::format(" {}={}", k, v);
    os << line << '\n';
    for (const auto& n : notes)
        os << "# " << n << '\n';
    os << join(columns) << '\n';
}

void csv_row(std::ostream& os, const std::vector<std::string>& cells)
{
    os << join(cells) << '\n';
}

std::string num(double v) { return format_real(v); }
std::string num(std::uint64_t v) { return fmt::format("{}", v); }

constexpr std::uint64_t set_limit_max = 0xFFFFFFFFull;

void check_limit(std::uint64_t limit, const char* name)
{
    if (limit < 1)
        throw UsageError(fmt::format("--{} is required and must be at least 1", name));
    if (limit > set_limit_max)
        throw UsageError(fmt::format("--{} = {} exceeds {}", name, limit, set_limit_max));
}

// ---- set sources shared by verify / density / dirichlet ----

const std::vector<std::string> preset_names = {"integers", "primes", "primes1", "pow2", "odd"};

IntegerSet preset_set(const std::string& name, std::uint64_t limit)
{
    std::vector<IntegerSet::value_type> v;
    if (name == "integers")
        return IntegerSet::range(limit);
    if (name == "primes" || name == "primes1") {
        if (name == "primes1")
            v.push_back(1);
        if (limit >= 2) {
            const PrimeTable t = sieve_primes(limit);
            v.insert(v.end(), t.primes().begin(), t.primes().end());
        }
    } else if (name == "pow2") {
        for (std::uint64_t p = 1; p <= limit; p *= 2)
            v.push_back(static_cast<IntegerSet::value_type>(p));
    } else if (name == "odd") {
        for (std::uint64_t n = 1; n <= limit; n += 2)
            v.push_back(static_cast<IntegerSet::value_type>(n));
    } else {
        throw UsageError(fmt::format("--preset: unknown set '{}' (known: {})", name, join(preset_names)));
    }
    return IntegerSet(std::move(v), limit);
}

struct SetSource {
    std::string family_path;
    std::vector<std::string> presets;

    void add_to(CLI::App* sub)
    {
        auto* fam = sub->add_option("--family", family_path, "family file (h epsilon N checkpoints..., then sets)");
        auto* pre = sub->add_option("--preset", presets,
                                    "comma-separated built-in sets: integers, primes, primes1 ({1} and primes), "
                                    "pow2, odd")
                        ->delimiter(',');
        fam->excludes(pre);
    }

    void echo(Echo& e) const
    {
        if (!family_path.empty())
            e("family", family_path);
        else
            e("preset", join(presets));
    }

    std::vector<IntegerSet> load(std::uint64_t limit) const
    {
        std::vector<IntegerSet> sets;
        if (!family_path.empty()) {
            std::ifstream in(family_path, std::ios::binary);
            if (!in)
                throw UsageError(fmt::format("--family: cannot open {}", family_path));
            ComplementFamily fam = read_family(in);
            const std::uint64_t known = fam.checkpoints.back();
            if (limit > known)
                throw UsageError(fmt::format("--limit {} exceeds the family's last checkpoint {}", limit, known));
            for (const auto& s : fam.sets)
                sets.push_back(s.truncated(limit));
        } else if (!presets.empty()) {
            for (const auto& name : presets)
                sets.push_back(preset_set(name, limit));
        } else {
            throw UsageError("one of --family or --preset is required");
        }
        return sets;
    }
};

// ---- commands ----

struct ConstantsCmd {
    int h_max = 10;
    std::string out = "-";

    void install(CLI::App* sub)
    {
        sub->add_option("--h-max", h_max, "largest order h (rows h = 1..h-max)")
            ->capture_default_str()
            ->check(CLI::Range(1, 170));
        sub->add_option("--out", out, "CSV output path ('-' for stdout)")->capture_default_str();
        sub->footer("CSV columns: h, raikov_constant ((h!)^(1/h) / Gamma(1/h)), upper_constant "
                    "(1 / Gamma(1 + 1/h); empty for h = 1)");
    }

    int run(std::ostream& fallback) const
    {
        Sink sink(out, fallback);
        auto& os = sink.stream();
        csv_header(os, "constants", Echo{}("h_max", num(static_cast<std::uint64_t>(h_max))), {},
                   {"h", "raikov_constant", "upper_constant"});
        for (int h = 1; h <= h_max; ++h) {
            const ConstantsRow r = constants_row(h);
            csv_row(os, {num(static_cast<std::uint64_t>(h)), num(r.lower_raikov), h == 1 ? "" : num(r.upper)});
        }
        return 0;
    }
};

struct PartitionParams {
    std::vector<double> tau;
    std::vector<double> a;
    std::uint64_t cutoff = 1'000'000;
    std::uint64_t max_block = 10'000;

    void add_to(CLI::App* sub, bool required)
    {
        auto* t = sub->add_option("--tau", tau, "prime densities tau_1..tau_h (sum 1)")->delimiter(',');
        auto* a_opt = sub->add_option("--a", a, "Mertens targets a_1..a_h (product 1)")->delimiter(',');
        sub->add_option("--cutoff", cutoff, "primes are assigned up to this bound")->capture_default_str();
        sub->add_option("--max-block", max_block, "largest block size tried for the pair sequence")
            ->capture_default_str();
        if (required) {
            t->description(t->get_description() + " (required)");
            a_opt->description(a_opt->get_description() + " (required)");
        }
    }

    void echo(Echo& e) const
    {
        e("tau", join(tau))("a", join(a))("cutoff", num(cutoff))("max_block", num(max_block));
    }

    PrimePartition build() const
    {
        if (tau.empty() || a.empty())
            throw UsageError("--tau and --a are required");
        PartitionSpec spec{static_cast<int>(tau.size()), tau, a};
        if (a.size() != tau.size())
            throw UsageError(fmt::format("--tau has {} values but --a has {}", tau.size(), a.size()));
        check_limit(cutoff, "cutoff");
        auto table = std::make_shared<const PrimeTable>(sieve_primes(cutoff));
        PartitionOptions opts;
        opts.max_block = max_block;
        return build_partition(spec, table, cutoff, opts);
    }
};

std::vector<std::string> level_notes(const PrimePartition& p)
{
    std::vector<std::string> notes;
    for (std::size_t i = 0; i < p.levels.size(); ++i) {
        const auto& l = p.levels[i];
        const auto& adj = l.adjustment;
        notes.push_back(fmt::format(
            "level {}: kappa={} tau={} a={} block_size={} pairs={} skipped_blocks={} greedy_deviation={} "
            "sign_start={} dropped={} added={} swaps={} log_target={} achieved_log={} residual={} q_tail={}",
            i + 1, num(l.kappa), num(l.tau), num(l.a), l.block_size, l.pairs, l.skipped_blocks,
            num(l.greedy_deviation), adj.sign_start, adj.dropped, adj.added, adj.swaps, num(adj.log_target),
            num(adj.achieved_log), num(std::fabs(adj.achieved_log - adj.log_target)), num(adj.tail)));
    }
    return notes;
}

struct PartitionCmd {
    PartitionParams params;
    std::string out = "-";
    std::string partition_out;

    void install(CLI::App* sub)
    {
        params.add_to(sub, true);
        sub->add_option("--out", out, "CSV output path ('-' for stdout)")->capture_default_str();
        sub->add_option("--partition-out", partition_out, "write the partition file here");
        sub->footer("CSV columns: part, tau, a, count (primes <= cutoff in the part), share (count / pi(cutoff)), "
                    "prime_density (count log(cutoff) / cutoff), mertens_statistic");
    }

    int run(std::ostream& fallback) const
    {
        const PrimePartition p = params.build();
        if (!partition_out.empty()) {
            std::ofstream f(partition_out, std::ios::binary);
            if (!f)
                throw UsageError(fmt::format("--partition-out: cannot open {}", partition_out));
            write_partition(f, p);
        }
        Sink sink(out, fallback);
        auto& os = sink.stream();
        Echo e;
        params.echo(e);
        csv_header(os, "partition", e, level_notes(p),
                   {"part", "tau", "a", "count", "share", "prime_density", "mertens_statistic"});
        for (std::size_t i = 0; i < p.parts.size(); ++i) {
            const auto& s = p.achieved[i];
            csv_row(os, {num(static_cast<std::uint64_t>(i + 1)), num(p.spec.tau[i]), num(p.spec.a[i]), num(s.count),
                         num(s.share), num(s.prime_density), num(s.mertens)});
        }
        return 0;
    }
};

struct Complement5Cmd {
    PartitionParams params;
    std::string partition_in;
    std::uint64_t limit = 0;
    std::string out = "-";
    std::string family_out;

    void install(CLI::App* sub)
    {
        params.add_to(sub, false);
        sub->add_option("--partition", partition_in, "read the partition from this file instead of building one");
        sub->add_option("--limit", limit, "largest integer in the sets (default: the partition cutoff)");
        sub->add_option("--out", out, "CSV output path ('-' for stdout)")->capture_default_str();
        sub->add_option("--family-out", family_out, "write the family file here");
        sub->footer("CSV columns: set, tau, a, count (|A_i| up to limit), density_statistic "
                    "(count log^(1-tau)(limit) / limit), predicted_constant (a / Gamma(tau)), predicted_count, ratio "
                    "(count / predicted_count)");
    }

    int run(std::ostream& fallback) const
    {
        PrimePartition p;
        if (!partition_in.empty()) {
            std::ifstream in(partition_in, std::ios::binary);
            if (!in)
                throw UsageError(fmt::format("--partition: cannot open {}", partition_in));
            p = read_partition(in);
        } else {
            if (params.tau.empty() || params.a.empty())
                throw UsageError("either --partition or both --tau and --a are required");
            p = params.build();
        }
        const std::uint64_t x = limit == 0 ? p.cutoff : limit;
        check_limit(x, "limit");
        if (x > p.cutoff)
            throw UsageError(fmt::format("--limit {} exceeds the partition cutoff {}", x, p.cutoff));

        const FactorSieve sieve(x);
        Theorem5Result res;
        try {
            res = build_theorem5_family(p, x, sieve);
        } catch (const VerificationError& e) {
            throw CounterexampleFound(fmt::format("counterexample n={} ({})", e.counterexample(), e.what()));
        }
        if (!family_out.empty()) {
            std::ofstream f(family_out, std::ios::binary);
            if (!f)
                throw UsageError(fmt::format("--family-out: cannot open {}", family_out));
            write_family(f, res.family);
        }

        Sink sink(out, fallback);
        auto& os = sink.stream();
        Echo e;
        if (!partition_in.empty())
            e("partition", partition_in);
        else
            params.echo(e);
        e("limit", num(x));
        csv_header(os, "complement5", e,
                   {fmt::format("verified exactly on [1, {}]; predictions are asymptotic", x)},
                   {"set", "tau", "a", "count", "density_statistic", "predicted_constant", "predicted_count",
                    "ratio"});
        for (std::size_t i = 0; i < res.sets.size(); ++i) {
            const auto& s = res.sets[i];
            csv_row(os, {num(static_cast<std::uint64_t>(i + 1)), num(s.tau), num(s.a), num(s.count),
                         num(s.density_statistic), num(s.prediction.constant), num(s.prediction.predicted_count),
                         num(s.ratio)});
        }
        return 0;
    }
};

struct Complement8Cmd {
    int h = 2;
    double epsilon = 0.1;
    std::size_t steps = 2;
    std::uint64_t n0 = 0;
    int exponent = 3;
    std::uint64_t cap = 20'000'000;
    std::vector<std::uint64_t> checkpoints;
    bool strict = false;
    std::string out = "-";
    std::string family_out;

    void install(CLI::App* sub)
    {
        sub->add_option("--h", h, "order h")->capture_default_str()->check(CLI::Range(1, 64));
        sub->add_option("--epsilon", epsilon, "density slack epsilon > 0")->capture_default_str();
        sub->add_option("--steps", steps, "number of checkpoint steps (ignored with --checkpoints)")
            ->capture_default_str();
        sub->add_option("--n0", n0, "override the starting checkpoint N (default ceil(256/eps^2) + 1)");
        sub->add_option("--exponent", exponent, "power growth y = max(x^k, 10x)")->capture_default_str();
        sub->add_option("--cap", cap, "upper bound on every checkpoint of the power growth")->capture_default_str();
        sub->add_option("--checkpoints", checkpoints, "explicit checkpoints after N, comma-separated")
            ->delimiter(',');
        sub->add_flag("--strict", strict, "reject steps with n_(i+1) <= n_i^2 instead of flagging them");
        sub->add_option("--out", out, "CSV output path ('-' for stdout)")->capture_default_str();
        sub->add_option("--family-out", family_out, "write the family file here");
        sub->footer("CSV columns (one row per checkpoint and set): n, previous, set, size (|A_j| up to n), f0, f1, "
                    "f2, f3 (F-set sizes of the step; f3 is this set's class), density (size log(n) / n), "
                    "density_bound (1/h + epsilon), within_bound, verified, consistent, precondition_met "
                    "(n > previous^2), capped");
    }

    int run(std::ostream& fallback) const
    {
        if (!(epsilon > 0.0))
            throw UsageError("--epsilon must be positive");
        GrowthPolicy growth;
        std::size_t n_steps = steps;
        if (!checkpoints.empty()) {
            growth.kind = GrowthPolicy::Kind::explicit_list;
            growth.checkpoints = checkpoints;
            n_steps = checkpoints.size();
        } else {
            if (exponent < 3)
                throw UsageError("--exponent must be at least 3");
            if (cap == 0)
                throw UsageError("--cap must be positive");
            growth.exponent = exponent;
            growth.cap = cap;
        }
        Theorem8Options opts;
        opts.seed_override = n0;
        opts.strict_growth = strict;

        // Walk the policy once to size the sieve.
        std::uint64_t x = n0 != 0 ? n0 : theorem8_seed(epsilon), top = x;
        for (std::size_t i = 0; i < n_steps; ++i) {
            const std::uint64_t y = growth.next(x, i);
            if (y <= x)
                throw UsageError(fmt::format("checkpoint {} does not exceed {}", y, x));
            top = std::max(top, y);
            x = y;
        }
        check_limit(top, "cap");
        const PrimeTable table = sieve_primes(top);
        const FactorSieve sieve(top);

        ComplementFamily fam;
        try {
            fam = build_theorem8_family(h, epsilon, n_steps, growth, table, sieve, opts);
        } catch (const VerificationError& e) {
            throw CounterexampleFound(fmt::format("counterexample n={} ({})", e.counterexample(), e.what()));
        }
        if (!family_out.empty()) {
            std::ofstream f(family_out, std::ios::binary);
            if (!f)
                throw UsageError(fmt::format("--family-out: cannot open {}", family_out));
            write_family(f, fam);
        }

        Sink sink(out, fallback);
        auto& os = sink.stream();
        const auto& prov = fam.provenance;
        Echo e;
        e("h", num(static_cast<std::uint64_t>(h)))("epsilon", num(epsilon));
        if (checkpoints.empty())
            e("steps", num(static_cast<std::uint64_t>(steps)))("exponent", num(static_cast<std::uint64_t>(exponent)))(
                "cap", num(cap));
        else
            e("checkpoints", join(checkpoints));
        e("n0", num(prov.seed_n))("strict", flag(strict));
        csv_header(os, "complement8", e,
                   {fmt::format("N={} formula_N={} overridden={}", prov.seed_n, prov.seed_n_formula,
                                flag(prov.seed_n_overridden)),
                    "density bound is reported, not enforced"},
                   {"n", "previous", "set", "size", "f0", "f1", "f2", "f3", "density", "density_bound",
                    "within_bound", "verified", "consistent", "precondition_met", "capped"});
        for (const auto& r : prov.records) {
            const double logn = r.n >= 2 ? std::log(static_cast<double>(r.n)) : 0.0;
            for (std::size_t j = 0; j < r.set_sizes.size(); ++j) {
                const double dens = static_cast<double>(r.set_sizes[j]) * logn / static_cast<double>(r.n);
                csv_row(os, {num(r.n), num(r.previous), num(static_cast<std::uint64_t>(j + 1)),
                             num(static_cast<std::uint64_t>(r.set_sizes[j])), num(static_cast<std::uint64_t>(r.f0)),
                             num(static_cast<std::uint64_t>(r.f1)), num(static_cast<std::uint64_t>(r.f2)),
                             num(static_cast<std::uint64_t>(j < r.f3.size() ? r.f3[j] : 0)), num(dens),
                             num(r.density_bound), flag(dens <= r.density_bound), flag(r.verified),
                             flag(r.consistent), flag(r.precondition_met), flag(r.capped)});
            }
        }
        return 0;
    }
};

struct VerifyCmd {
    SetSource source;
    std::uint64_t limit = 0;
    int h = 0;
    std::string out = "-";

    void install(CLI::App* sub)
    {
        source.add_to(sub);
        sub->add_option("--limit", limit, "verify every n in [1, limit] (required)");
        sub->add_option("--h", h, "order; with a single set, checks it as a basis of order h (default: number of "
                                  "sets)");
        sub->add_option("--out", out, "CSV output path ('-' for stdout)")->capture_default_str();
        sub->footer("CSV columns: limit, h, sets, first_failure (empty when every n <= limit is represented). "
                    "Exit status 1 when a counterexample exists.");
    }

    int run(std::ostream& fallback, std::ostream& err) const
    {
        check_limit(limit, "limit");
        const auto sets = source.load(limit);
        int order = h == 0 ? static_cast<int>(sets.size()) : h;
        if (order < 1)
            throw UsageError("--h must be positive");
        const FactorSieve sieve(limit);
        std::optional<std::uint64_t> bad;
        if (sets.size() == 1)
            bad = verify_basis(sets.front(), order, limit, sieve);
        else if (order == static_cast<int>(sets.size()))
            bad = verify_complement(sets, limit, sieve);
        else
            throw UsageError(fmt::format("--h {} does not match the {} sets given", order, sets.size()));

        Sink sink(out, fallback);
        auto& os = sink.stream();
        Echo e;
        source.echo(e);
        e("limit", num(limit))("h", num(static_cast<std::uint64_t>(order)));
        csv_header(os, "verify", e, {}, {"limit", "h", "sets", "first_failure"});
        csv_row(os, {num(limit), num(static_cast<std::uint64_t>(order)), num(static_cast<std::uint64_t>(sets.size())),
                     bad ? num(*bad) : ""});
        if (bad) {
            err << fmt::format("counterexample n={}\n", *bad);
            return 1;
        }
        return 0;
    }
};

struct DensityCmd {
    SetSource source;
    std::uint64_t limit = 0;
    std::vector<double> tau;
    double ratio = 1.25;
    std::uint64_t start = 2;
    std::string out = "-";

    void install(CLI::App* sub)
    {
        source.add_to(sub);
        sub->add_option("--limit", limit, "largest x sampled (required)");
        sub->add_option("--tau", tau, "exponent per set, or one value for all (default 1)")->delimiter(',');
        sub->add_option("--ratio", ratio, "geometric grid ratio")->capture_default_str();
        sub->add_option("--start", start, "smallest x sampled")->capture_default_str();
        sub->add_option("--out", out, "CSV output path ('-' for stdout)")->capture_default_str();
        sub->footer("CSV columns (long format, one row per set and grid point): set, tau, x, count (A(x)), "
                    "density_statistic (A(x) log^(1-tau)(x) / x)");
    }

    int run(std::ostream& fallback) const
    {
        check_limit(limit, "limit");
        if (start < 2 || start > limit)
            throw UsageError("--start must lie in [2, limit]");
        if (!(ratio > 1.0))
            throw UsageError("--ratio must exceed 1");
        const auto sets = source.load(limit);
        std::vector<double> taus = tau.empty() ? std::vector<double>{1.0} : tau;
        if (taus.size() == 1)
            taus.assign(sets.size(), taus.front());
        if (taus.size() != sets.size())
            throw UsageError(fmt::format("--tau has {} values for {} sets", taus.size(), sets.size()));
        const auto grid = geometric_grid(start, limit, ratio);

        Sink sink(out, fallback);
        auto& os = sink.stream();
        Echo e;
        source.echo(e);
        e("limit", num(limit))("tau", join(taus))("ratio", num(ratio))("start", num(start));
        csv_header(os, "density", e, {}, {"set", "tau", "x", "count", "density_statistic"});
        for (std::size_t j = 0; j < sets.size(); ++j)
            for (std::uint64_t x : grid)
                csv_row(os, {num(static_cast<std::uint64_t>(j + 1)), num(taus[j]), num(x),
                             num(counting(sets[j], static_cast<double>(x))),
                             num(density_statistic(sets[j], taus[j], static_cast<double>(x)))});
        return 0;
    }
};

struct DirichletCmd {
    SetSource source;
    std::size_t set_index = 1;
    std::uint64_t cutoff = 0;
    double tau = 0.5;
    double slack = 0.5;
    double grid_ratio = 1.1;
    std::vector<double> s_grid;
    std::string out = "-";

    void install(CLI::App* sub)
    {
        source.add_to(sub);
        sub->add_option("--set", set_index, "which set of the family to use (1-based)")->capture_default_str();
        sub->add_option("--cutoff", cutoff, "truncation point of every sum (required)");
        sub->add_option("--tau", tau, "exponent tau in (0, 1)")->capture_default_str();
        sub->add_option("--slack", slack, "relative slack before a row is flagged")->capture_default_str();
        sub->add_option("--grid-ratio", grid_ratio, "geometric grid ratio for the density maximum")
            ->capture_default_str();
        sub->add_option("--s", s_grid, "comma-separated s values (default 1 + 2^-k, k = 1..20)")->delimiter(',');
        sub->add_option("--out", out, "CSV output path ('-' for stdout)")->capture_default_str();
        sub->footer("CSV columns: s, cutoff, value (truncated A[s]), scaled ((s-1)^tau A[s]), bound (Gamma(tau) "
                    "times the grid maximum of the density statistic), flagged (scaled > bound (1 + slack))");
    }

    int run(std::ostream& fallback) const
    {
        check_limit(cutoff, "cutoff");
        const auto sets = source.load(cutoff);
        if (set_index < 1 || set_index > sets.size())
            throw UsageError(fmt::format("--set {} outside [1, {}]", set_index, sets.size()));
        const std::vector<double> s_values = s_grid.empty() ? default_s_sequence() : s_grid;
        const Lemma1Report rep = lemma1_check(sets[set_index - 1], tau, s_values, cutoff, slack, grid_ratio);

        Sink sink(out, fallback);
        auto& os = sink.stream();
        Echo e;
        source.echo(e);
        e("set", num(static_cast<std::uint64_t>(set_index)))("cutoff", num(cutoff))("tau", num(tau))(
            "slack", num(slack))("grid_ratio", num(grid_ratio))("s", join(s_values));
        csv_header(os, "dirichlet", e,
                   {fmt::format("finite-cutoff probe: density maximum {} at x={} over a grid of ratio {}",
                                num(rep.density_max), rep.density_argmax, num(rep.grid_ratio))},
                   {"s", "cutoff", "value", "scaled", "bound", "flagged"});
        for (const auto& r : rep.rows)
            csv_row(os, {num(r.s), num(cutoff), num(r.value), num(r.scaled), num(rep.bound), flag(r.flagged)});
        return 0;
    }
};

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Multiplicative bases and complements: constructions, exact verification, density statistics"};
    app.set_config("--config", "", "key = value file; [command] sections hold per-command keys, flags win");
    // --h is the order h everywhere, so help is long-form only.
    app.set_help_flag("--help", "print this help and exit");
    app.require_subcommand(1);
    app.set_version_flag("--version", tool_version);

    ConstantsCmd constants;
    PartitionCmd partition;
    Complement5Cmd complement5;
    Complement8Cmd complement8;
    VerifyCmd verify;
    DensityCmd density;
    DirichletCmd dirichlet;

    std::function<int()> action;
    auto bind = [&](CLI::App* sub, auto& cmd, std::function<int()> f) {
        cmd.install(sub);
        sub->callback([&action, f] { action = f; });
    };
    bind(app.add_subcommand("constants", "table of the constants (h!)^(1/h)/Gamma(1/h) and 1/Gamma(1+1/h)"),
         constants, [&] { return constants.run(out); });
    bind(app.add_subcommand("partition", "partition the primes with prescribed densities and Mertens targets"),
         partition, [&] { return partition.run(out); });
    bind(app.add_subcommand("complement5", "smooth-number complement over a prime partition"), complement5,
         [&] { return complement5.run(out); });
    bind(app.add_subcommand("complement8", "checkpointed F-set complement"), complement8,
         [&] { return complement8.run(out); });
    bind(app.add_subcommand("verify", "exact check that every n <= limit is represented"), verify,
         [&] { return verify.run(out, err); });
    bind(app.add_subcommand("density", "density statistic A(x) log^(1-tau)(x) / x on a geometric grid"), density,
         [&] { return density.run(out); });
    bind(app.add_subcommand("dirichlet", "truncated Dirichlet sums against the density bound"), dirichlet,
         [&] { return dirichlet.run(out); });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        return action ? action() : 2;
    } catch (const CounterexampleFound& e) {
        err << e.what() << '\n';
        return 1;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const ArgumentError& e) {
        err << "invalid parameter: " << e.what() << '\n';
        return 2;
    } catch (const DomainError& e) {
        err << "invalid parameter: " << e.what() << '\n';
        return 2;
    } catch (const OutOfRangeError& e) {
        err << "invalid parameter: " << e.what() << '\n';
        return 2;
    } catch (const PreconditionError& e) {
        err << "invalid parameter: " << e.what() << '\n';
        return 2;
    } catch (const UnreachableTargetError& e) {
        err << "invalid parameter: " << e.what() << '\n';
        return 2;
    } catch (const ResourceError& e) {
        err << "resource limit: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return 3;
    }
}

} // namespace mcomp::cli
