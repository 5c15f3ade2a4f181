#include "mcomp/serialize.hpp"

#include "mcomp/errors.hpp"

#include <fmt/format.h>
#include <istream>
#include <ostream>
#include <sstream>

namespace mcomp {

namespace {

class ParseError : public ArgumentError {
public:
    using ArgumentError::ArgumentError;
};

std::string next_line(std::istream& in, const char* what)
{
    std::string line;
    if (!std::getline(in, line))
        throw ParseError(fmt::format("unexpected end of input while reading {}", what));
    return line;
}

} // namespace

std::string format_real(double v)
{
    return fmt::format("{}", v);
}

void write_partition(std::ostream& out, const PrimePartition& partition)
{
    const auto& spec = partition.spec;
    std::string header = fmt::format("{}", spec.h);
    for (double t : spec.tau)
        header += " " + format_real(t);
    for (double a : spec.a)
        header += " " + format_real(a);
    header += fmt::format(" {}\n", partition.cutoff);
    out << header;

    const PrimeTable& table = partition.parts.front().base();
    const std::size_t n = table.count_upto(partition.cutoff);
    fmt::memory_buffer buf;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t owner = 0;
        for (std::size_t j = 0; j < partition.parts.size(); ++j)
            if (partition.parts[j].contains_rank(i)) {
                owner = j + 1;
                break;
            }
        fmt::format_to(std::back_inserter(buf), "{} {}\n", table.primes()[i], owner);
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

PrimePartition read_partition(std::istream& in)
{
    std::istringstream header(next_line(in, "partition header"));
    PrimePartition out;
    auto& spec = out.spec;
    if (!(header >> spec.h) || spec.h < 1)
        throw ParseError("partition header: bad order h");
    spec.tau.resize(static_cast<std::size_t>(spec.h));
    spec.a.resize(static_cast<std::size_t>(spec.h));
    for (auto& t : spec.tau)
        if (!(header >> t))
            throw ParseError("partition header: bad tau value");
    for (auto& a : spec.a)
        if (!(header >> a))
            throw ParseError("partition header: bad a value");
    if (!(header >> out.cutoff))
        throw ParseError("partition header: bad cutoff");
    spec.validate();

    auto table = std::make_shared<const PrimeTable>(sieve_primes(out.cutoff));
    for (int i = 0; i < spec.h; ++i)
        out.parts.emplace_back(table);
    const auto primes = table->primes();
    for (std::size_t i = 0; i < primes.size(); ++i) {
        std::istringstream line(next_line(in, "partition body"));
        std::uint64_t p = 0;
        int part = 0;
        if (!(line >> p >> part))
            throw ParseError(fmt::format("partition body: malformed line {}", i + 2));
        if (p != primes[i])
            throw ParseError(fmt::format("partition body: expected prime {} on line {}, got {}", primes[i], i + 2, p));
        if (part < 1 || part > spec.h)
            throw ParseError(fmt::format("partition body: part index {} outside [1, {}]", part, spec.h));
        out.parts[static_cast<std::size_t>(part - 1)].insert_rank(i);
    }
    for (int i = 0; i < spec.h; ++i)
        out.achieved.push_back(part_statistics(out.parts[static_cast<std::size_t>(i)],
                                               spec.tau[static_cast<std::size_t>(i)], out.cutoff));
    return out;
}

void write_family(std::ostream& out, const ComplementFamily& family)
{
    fmt::memory_buffer buf;
    fmt::format_to(std::back_inserter(buf), "{} {} {}", family.h, format_real(family.provenance.epsilon),
                   family.provenance.seed_n);
    for (std::uint64_t c : family.checkpoints)
        fmt::format_to(std::back_inserter(buf), " {}", c);
    buf.push_back('\n');
    for (const auto& set : family.sets) {
        fmt::format_to(std::back_inserter(buf), "{}\n", set.size());
        for (auto a : set.elements())
            fmt::format_to(std::back_inserter(buf), "{}\n", a);
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

ComplementFamily read_family(std::istream& in)
{
    std::istringstream header(next_line(in, "family header"));
    ComplementFamily fam;
    fam.provenance.construction = "file";
    if (!(header >> fam.h >> fam.provenance.epsilon >> fam.provenance.seed_n) || fam.h < 1)
        throw ParseError("family header: expected `h epsilon N checkpoints...`");
    for (std::uint64_t c; header >> c;)
        fam.checkpoints.push_back(c);
    if (fam.checkpoints.empty())
        throw ParseError("family header: at least one checkpoint is required");
    const std::uint64_t limit = fam.checkpoints.back();
    for (int j = 0; j < fam.h; ++j) {
        std::size_t count = 0;
        if (!(in >> count))
            throw ParseError(fmt::format("family: missing element count for set {}", j + 1));
        std::vector<IntegerSet::value_type> elems(count);
        for (auto& e : elems)
            if (!(in >> e))
                throw ParseError(fmt::format("family: set {} ended early", j + 1));
        fam.sets.emplace_back(std::move(elems), limit);
    }
    return fam;
}

} // namespace mcomp
