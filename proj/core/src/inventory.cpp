#include "hpforge/inventory.hpp"

#include <algorithm>
#include <set>

#include "hpforge/errors.hpp"

namespace hpforge {

const HostRecord* Inventory::find(std::string_view id) const {
    for (const auto& host : hosts) {
        if (host.id == id) return &host;
    }
    return nullptr;
}

void validate(const HostRecord& host) {
    if (host.id.empty()) throw Error("host id must not be empty");
    for (std::size_t i = 0; i < host.open_tcp_ports.size(); ++i) {
        const auto port = host.open_tcp_ports[i];
        if (port < 1) throw Error("host \"" + host.id + "\": port out of range [1, 65535]");
        if (i > 0 && host.open_tcp_ports[i - 1] >= port)
            throw Error("host \"" + host.id + "\": open_tcp_ports must be ascending and duplicate-free");
    }
}

void validate(const Inventory& inv) {
    std::set<std::string_view> ids;
    for (const auto& host : inv.hosts) {
        validate(host);
        if (!ids.insert(host.id).second)
            throw Error("duplicate host id \"" + host.id + "\"");
    }
}

FeatureSchema build_schema(const Inventory& inv) {
    if (inv.hosts.empty()) throw Error("cannot build a schema from an empty inventory");
    std::set<std::string> attrs;
    std::set<std::uint16_t> ports;
    for (const auto& host : inv.hosts) {
        for (const auto& [name, value] : host.fingerprint) attrs.insert(name);
        for (const auto port : host.open_tcp_ports) ports.insert(port);
    }
    FeatureSchema schema;
    schema.fingerprint_attrs.assign(attrs.begin(), attrs.end());
    schema.port_dims.assign(ports.begin(), ports.end());
    return schema;
}

FeatureVector vectorize(const HostRecord& host, const FeatureSchema& schema) {
    for (const auto& [name, value] : host.fingerprint) {
        if (!std::binary_search(schema.fingerprint_attrs.begin(), schema.fingerprint_attrs.end(), name))
            throw Error("schema mismatch: host \"" + host.id + "\" has attribute \"" + name +
                        "\" not present in the schema");
    }
    for (const auto port : host.open_tcp_ports) {
        if (!std::binary_search(schema.port_dims.begin(), schema.port_dims.end(), port))
            throw Error("schema mismatch: host \"" + host.id + "\" has open port " +
                        std::to_string(port) + " not present in the schema");
    }

    FeatureVector vec;
    vec.host_id = host.id;
    vec.fingerprint_values.reserve(schema.fingerprint_attrs.size());
    for (const auto& attr : schema.fingerprint_attrs) {
        const auto it = host.fingerprint.find(attr);
        vec.fingerprint_values.push_back(it == host.fingerprint.end() ? std::string() : it->second);
    }
    vec.port_flags.reserve(schema.port_dims.size());
    for (const auto port : schema.port_dims) {
        const bool open = std::binary_search(host.open_tcp_ports.begin(), host.open_tcp_ports.end(), port);
        vec.port_flags.push_back(open ? 1 : 0);
    }
    return vec;
}

std::vector<FeatureVector> vectorize(const Inventory& inv, const FeatureSchema& schema) {
    std::vector<FeatureVector> vectors;
    vectors.reserve(inv.hosts.size());
    for (const auto& host : inv.hosts) vectors.push_back(vectorize(host, schema));
    return vectors;
}

}  // namespace hpforge
