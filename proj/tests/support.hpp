#pragma once

#include "mcomp/repr_core.hpp"

#include <cstdint>
#include <vector>

inline mcomp::IntegerSet make_set(const std::vector<std::uint64_t>& v, std::uint64_t limit)
{
    std::vector<mcomp::IntegerSet::value_type> e(v.begin(), v.end());
    return mcomp::IntegerSet(std::move(e), limit);
}

inline std::vector<std::uint64_t> to_vector(const mcomp::IntegerSet& s)
{
    return {s.elements().begin(), s.elements().end()};
}
