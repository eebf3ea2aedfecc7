#pragma once

#include <iosfwd>

namespace vfsk::cli {

/// `vfsk run <config> [--seed N] [--out DIR] [--workers K]` and `vfsk list`.
/// Returns the process exit status: 0 when every recipe check passed, 1 when
/// a check failed or the recipe threw, 2 for usage and config errors.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace vfsk::cli
