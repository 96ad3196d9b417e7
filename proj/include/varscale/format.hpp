#pragma once

#include <charconv>
#include <cstdio>
#include <string>

namespace varscale {

// Locale-independent double formatting (std::to_chars), so output files are
// byte-stable across environments.
inline std::string fmt_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v,
                                 std::chars_format::general, 10);
    return std::string(buf, p);
}

inline std::string fmt_fixed(double v, int decimals) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v,
                                 std::chars_format::fixed, decimals);
    return std::string(buf, p);
}

// Shortest representation that round-trips; used where exact re-parsing
// matters (forecast series files).
inline std::string fmt_shortest(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, p);
}

}  // namespace varscale
