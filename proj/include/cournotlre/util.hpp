#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace cournot {

// Shortest decimal string that round-trips the double (e.g. "15", "1.5",
// "55.333333333333336").
std::string dec_string(double v);

// Small exact rational "p/q" (denominator <= 10000) when v is within 1e-9 of
// one, e.g. 55.3333... -> "166/3". Integers return "p/1" suppressed to "p".
std::optional<std::string> rational_string(double v);

// SplitMix64 step; used to derive independent per-replication seeds.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index);

}  // namespace cournot
