#pragma once

#include <cstdint>
#include <ostream>

namespace fdb {

// Built-in oracle suite: prints one fixed-format pass/fail row per check.
// Output is byte-stable for a fixed seed. Returns true iff all checks pass.
bool run_selftest(std::ostream& out, std::uint64_t seed);

}  // namespace fdb
