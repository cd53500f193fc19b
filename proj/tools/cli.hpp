#ifndef MGRAPH_TOOLS_CLI_HPP
#define MGRAPH_TOOLS_CLI_HPP

#include <iosfwd>

namespace mgraph::cli {

// Exit codes: 0 success, 1 a verification failed, 2 usage or input error.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace mgraph::cli

#endif
