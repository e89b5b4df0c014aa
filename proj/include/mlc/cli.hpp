#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mlc {

/// Runs the command-line front end. Exit codes:
///   0 success
///   1 type error (including type disagreement between equiv operands)
///   2 parse, scope or usage error
///   3 contextual-fragment input to normalize/equiv
///   4 equiv: terms are not equivalent
///   5 property failure (selftest, or an --oracle cross-check mismatch)
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace mlc
