#pragma once

#include <charconv>
#include <cstdio>
#include <string>
#include <system_error>

namespace poolprev {

/// Shortest decimal string that round-trips to the same double. Used for CSV
/// cells and condition ids so that emitted bytes are stable across runs.
inline std::string format_shortest(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

/// Fixed significant-digit formatting for human-facing numeric output.
inline std::string format_sig(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
    return std::string(buf);
}

/// Rounds to the given number of significant decimal digits (by way of the
/// decimal representation), for emitting JSON numbers at a documented
/// precision.
inline double round_sig(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
    double out = v;
    std::from_chars(buf, buf + sizeof(buf), out);
    return out;
}

} // namespace poolprev
