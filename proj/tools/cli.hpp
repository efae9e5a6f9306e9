#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace liftlab::cli {

// Exit codes: 0 expected verdicts met, 1 verdict mismatch, 2 input error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace liftlab::cli
