#pragma once

#include <charconv>
#include <cstdint>
#include <string>

namespace scenver {

/// Shortest decimal representation that parses back to the same double.
inline std::string format_double(double value)
{
    char buf[32];
    const auto result = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, result.ptr);
}

}  // namespace scenver
