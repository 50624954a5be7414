#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hpforge/net.hpp"

namespace hpforge {

// One scanned machine. Fingerprint attributes are the categorical facets of
// the scanner's OS detection (vendor, family, generation, device type, best
// match name); a host may carry any subset of them.
struct HostRecord {
    std::string id;
    Ipv4 ipv4;
    std::optional<Mac> mac;
    std::optional<std::uint64_t> uptime_seconds;
    std::int64_t scan_time = 0;                     // unix seconds, UTC
    std::vector<std::uint16_t> open_tcp_ports;      // ascending, duplicate-free
    std::map<std::string, std::string> fingerprint; // attribute name -> value
    std::optional<std::string> os_label;            // reporting only

    // Vendor prefix of the MAC, when one is known.
    std::optional<Oui> vendor_oui() const {
        if (!mac) return std::nullopt;
        return mac->oui();
    }
};

struct Inventory {
    std::vector<HostRecord> hosts;
    std::int64_t scan_time = 0;  // max of member scan times
    std::string source;          // file path or "synthetic"

    const HostRecord* find(std::string_view id) const;
};

// Dimension dictionary shared by every feature vector built from one
// inventory: the fingerprint attribute names (name-sorted) plus every port
// observed open on at least one host (ascending).
struct FeatureSchema {
    std::vector<std::string> fingerprint_attrs;
    std::vector<std::uint16_t> port_dims;

    std::size_t dimensions() const { return fingerprint_attrs.size() + port_dims.size(); }
};

// Categorical vector for one host, aligned to a FeatureSchema. Fingerprint
// slots hold "" when the host lacks the attribute; port slots hold 1 when the
// port is open on the host.
struct FeatureVector {
    std::string host_id;
    std::vector<std::string> fingerprint_values;
    std::vector<std::uint8_t> port_flags;
};

// Throws Error when a type invariant does not hold (bad port range,
// duplicate ports, duplicate host ids, empty id).
void validate(const HostRecord& host);
void validate(const Inventory& inv);

FeatureSchema build_schema(const Inventory& inv);

// Throws Error when the host mentions an attribute or open port that is
// missing from the schema.
FeatureVector vectorize(const HostRecord& host, const FeatureSchema& schema);
std::vector<FeatureVector> vectorize(const Inventory& inv, const FeatureSchema& schema);

// Native persistence. One JSON document; unknown fields are rejected on load
// and per-host scan times collapse onto the inventory-level scan time.
std::string to_json_text(const Inventory& inv);
Inventory inventory_from_json_text(std::string_view text, std::string source = "");
void save_inventory(const Inventory& inv, const std::filesystem::path& path);
Inventory load_inventory(const std::filesystem::path& path);

}  // namespace hpforge
