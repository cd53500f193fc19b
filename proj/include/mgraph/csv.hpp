#ifndef MGRAPH_CSV_HPP
#define MGRAPH_CSV_HPP

#include <charconv>
#include <string>

namespace mgraph {

// Shortest round-trip decimal form, so exported numbers reload bit-exactly.
inline std::string num(double x)
{
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

} // namespace mgraph

#endif
