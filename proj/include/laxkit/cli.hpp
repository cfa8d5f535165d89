#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace laxkit::cli {

// Exit codes: 0 pass/none, 1 fail/witness found, 2 usage or input error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace laxkit::cli
