#pragma once

// Text formats for partitions and complement families. Both writers are
// byte-for-byte deterministic for identical inputs.
//
// Partition:
//   h tau_1 .. tau_h a_1 .. a_h cutoff
//   p part_index            (one line per prime <= cutoff, ascending; index 1-based)
//
// Family:
//   h epsilon N n_0 n_1 .. n_k
//   count                   (then `count` ascending elements, one per line; repeated per set)

#include "mcomp/prime_partition.hpp"
#include "mcomp/repr_core.hpp"

#include <iosfwd>
#include <string>

namespace mcomp {

// Shortest decimal that round-trips the double.
std::string format_real(double v);

void write_partition(std::ostream& out, const PrimePartition& partition);
// Rebuilds the prime table up to the cutoff and checks that every prime is listed once.
PrimePartition read_partition(std::istream& in);

void write_family(std::ostream& out, const ComplementFamily& family);
ComplementFamily read_family(std::istream& in);

} // namespace mcomp
