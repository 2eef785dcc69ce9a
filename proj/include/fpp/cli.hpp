#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fpp {

/// Exit status: 0 success, 1 runtime failure, 2 usage error or unreadable input.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int dispatch(int argc, const char* const* argv);

}  // namespace fpp
