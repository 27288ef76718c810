#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <system_error>

namespace flrw {

/// Shortest decimal that round-trips to the same double ("inf", "-inf", "nan" otherwise).
inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    if (res.ec != std::errc{}) return "nan";
    return std::string(buf, res.ptr);
}

}  // namespace flrw
