#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace hpforge {

// IPv4 address held in host byte order.
struct Ipv4 {
    std::uint32_t value = 0;

    static Ipv4 parse(std::string_view text);  // throws Error on bad input
    static std::optional<Ipv4> try_parse(std::string_view text);

    std::string to_string() const;  // dotted quad

    // Network part assuming a /24, e.g. 192.168.1.0 for 192.168.1.10.
    std::uint32_t prefix24() const { return value & 0xffffff00u; }
    int last_octet() const { return static_cast<int>(value & 0xffu); }

    auto operator<=>(const Ipv4&) const = default;
};

// Vendor prefix: the first three bytes of a MAC address.
struct Oui {
    std::array<std::uint8_t, 3> bytes{};

    std::string to_string() const;  // "b8:27:eb"

    auto operator<=>(const Oui&) const = default;
};

struct Mac {
    std::array<std::uint8_t, 6> bytes{};

    static Mac parse(std::string_view text);  // accepts upper or lower hex
    static std::optional<Mac> try_parse(std::string_view text);

    std::string to_string() const;  // lowercase, colon-separated

    Oui oui() const { return Oui{{bytes[0], bytes[1], bytes[2]}}; }

    auto operator<=>(const Mac&) const = default;
};

}  // namespace hpforge
