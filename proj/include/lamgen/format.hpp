#ifndef LAMGEN_FORMAT_HPP
#define LAMGEN_FORMAT_HPP

#include <charconv>
#include <string>

namespace lamgen {

/// Shortest decimal text that parses back to exactly `v`.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace lamgen

#endif
