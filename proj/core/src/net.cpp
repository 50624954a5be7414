#include "hpforge/net.hpp"

#include <charconv>

#include "hpforge/errors.hpp"

namespace hpforge {

namespace {

// Parses a decimal octet from [pos, end); advances pos past it.
std::optional<std::uint32_t> parse_octet(std::string_view text, std::size_t& pos) {
    if (pos >= text.size() || text[pos] < '0' || text[pos] > '9') return std::nullopt;
    std::uint32_t v = 0;
    std::size_t digits = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
        v = v * 10 + static_cast<std::uint32_t>(text[pos] - '0');
        ++pos;
        if (++digits > 3 || v > 255) return std::nullopt;
    }
    return v;
}

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

void append_hex_byte(std::string& out, std::uint8_t b) {
    static constexpr char digits[] = "0123456789abcdef";
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xf]);
}

}  // namespace

std::optional<Ipv4> Ipv4::try_parse(std::string_view text) {
    std::uint32_t value = 0;
    std::size_t pos = 0;
    for (int i = 0; i < 4; ++i) {
        if (i > 0) {
            if (pos >= text.size() || text[pos] != '.') return std::nullopt;
            ++pos;
        }
        const auto octet = parse_octet(text, pos);
        if (!octet) return std::nullopt;
        value = (value << 8) | *octet;
    }
    if (pos != text.size()) return std::nullopt;
    return Ipv4{value};
}

Ipv4 Ipv4::parse(std::string_view text) {
    const auto parsed = try_parse(text);
    if (!parsed) throw Error("invalid IPv4 address: \"" + std::string(text) + "\"");
    return *parsed;
}

std::string Ipv4::to_string() const {
    std::string out;
    out.reserve(15);
    for (int shift = 24; shift >= 0; shift -= 8) {
        if (shift != 24) out.push_back('.');
        out += std::to_string((value >> shift) & 0xffu);
    }
    return out;
}

std::string Oui::to_string() const {
    std::string out;
    out.reserve(8);
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        if (i != 0) out.push_back(':');
        append_hex_byte(out, bytes[i]);
    }
    return out;
}

std::optional<Mac> Mac::try_parse(std::string_view text) {
    if (text.size() != 17) return std::nullopt;
    Mac mac;
    for (std::size_t i = 0; i < 6; ++i) {
        const std::size_t base = i * 3;
        if (i != 0 && text[base - 1] != ':') return std::nullopt;
        const int hi = hex_value(text[base]);
        const int lo = hex_value(text[base + 1]);
        if (hi < 0 || lo < 0) return std::nullopt;
        mac.bytes[i] = static_cast<std::uint8_t>(hi << 4 | lo);
    }
    return mac;
}

Mac Mac::parse(std::string_view text) {
    const auto parsed = try_parse(text);
    if (!parsed) throw Error("invalid MAC address: \"" + std::string(text) + "\"");
    return *parsed;
}

std::string Mac::to_string() const {
    std::string out;
    out.reserve(17);
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        if (i != 0) out.push_back(':');
        append_hex_byte(out, bytes[i]);
    }
    return out;
}

}  // namespace hpforge
