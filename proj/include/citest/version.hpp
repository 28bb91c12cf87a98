#pragma once

namespace citest {

inline constexpr const char* tool_name = "citest";
inline constexpr const char* tool_version = "0.1.0";

/// Default seed used when neither --seed nor CITEST_SEED is given, so naive
/// runs are reproducible.
inline constexpr unsigned long long default_seed = 42;

}  // namespace citest
