#pragma once

#include <iosfwd>

namespace rlab {

/// Entry point of the rlab tool. Exit codes: 0 success, 2 usage or config error, 3 numerical failure.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rlab
