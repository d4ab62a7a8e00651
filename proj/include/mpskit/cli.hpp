#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mpskit {

// Exit codes: 0 success, 1 semantic failure (verification mismatch),
// 2 input error, 3 resource guard.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace mpskit
