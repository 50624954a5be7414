#pragma once

#include <charconv>
#include <string>

namespace hpforge {

// Shortest decimal representation that round-trips the exact double.
inline std::string format_double(double value) {
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

}  // namespace hpforge
