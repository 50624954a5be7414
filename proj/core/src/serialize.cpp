#include <algorithm>
#include <initializer_list>
#include <string_view>

#include "json.hpp"

#include "hpforge/clustering.hpp"
#include "hpforge/errors.hpp"
#include "hpforge/inventory.hpp"
#include "hpforge/io.hpp"
#include "hpforge/planner.hpp"

namespace hpforge {

namespace {

using json = nlohmann::ordered_json;

json parse_document(std::string_view text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(std::string(what) + ": " + e.what());
    }
}

void expect_object(const json& value, const char* what) {
    if (!value.is_object()) throw Error(std::string(what) + ": expected a JSON object");
}

void expect_array(const json& value, const char* field, const char* what) {
    if (!value.is_array())
        throw Error(std::string(what) + ": field \"" + field + "\" must be an array");
}

const json& field(const json& obj, const char* key, const char* what) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw Error(std::string(what) + ": missing field \"" + key + "\"");
    return *it;
}

void allow_only(const json& obj, std::initializer_list<std::string_view> keys, const char* what) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
            throw Error(std::string(what) + ": unknown field \"" + key + "\"");
    }
}

std::int64_t as_int(const json& value, const char* field_name, const char* what) {
    if (!value.is_number_integer())
        throw Error(std::string(what) + ": field \"" + field_name + "\" must be an integer");
    return value.get<std::int64_t>();
}

std::uint64_t as_uint(const json& value, const char* field_name, const char* what) {
    if (!value.is_number_integer() ||
        (!value.is_number_unsigned() && value.get<std::int64_t>() < 0))
        throw Error(std::string(what) + ": field \"" + field_name +
                    "\" must be a non-negative integer");
    return value.get<std::uint64_t>();
}

double as_double(const json& value, const char* field_name, const char* what) {
    if (!value.is_number())
        throw Error(std::string(what) + ": field \"" + field_name + "\" must be a number");
    return value.get<double>();
}

std::string as_string(const json& value, const char* field_name, const char* what) {
    if (!value.is_string())
        throw Error(std::string(what) + ": field \"" + field_name + "\" must be a string");
    return value.get<std::string>();
}

bool as_bool(const json& value, const char* field_name, const char* what) {
    if (!value.is_boolean())
        throw Error(std::string(what) + ": field \"" + field_name + "\" must be a boolean");
    return value.get<bool>();
}

std::vector<std::uint16_t> as_ports(const json& value, const char* field_name, const char* what) {
    expect_array(value, field_name, what);
    std::vector<std::uint16_t> ports;
    for (const auto& entry : value) {
        const auto port = as_int(entry, field_name, what);
        if (port < 1 || port > 65535)
            throw Error(std::string(what) + ": port " + std::to_string(port) +
                        " is outside [1, 65535]");
        ports.push_back(static_cast<std::uint16_t>(port));
    }
    return ports;
}

std::map<std::string, std::string> as_string_map(const json& value, const char* field_name,
                                                 const char* what) {
    if (!value.is_object())
        throw Error(std::string(what) + ": field \"" + field_name + "\" must be an object");
    std::map<std::string, std::string> out;
    for (const auto& [key, entry] : value.items()) {
        if (!entry.is_string())
            throw Error(std::string(what) + ": value of \"" + key + "\" in \"" + field_name +
                        "\" must be a string");
        out[key] = entry.get<std::string>();
    }
    return out;
}

void check_version(const json& doc, const char* what) {
    const auto version = as_int(field(doc, "version", what), "version", what);
    if (version != 1)
        throw Error(std::string(what) + ": unsupported version " + std::to_string(version));
}

}  // namespace

std::string to_json_text(const Inventory& inv) {
    json doc;
    doc["version"] = 1;
    doc["scan_time"] = inv.scan_time;
    json hosts = json::array();
    for (const auto& host : inv.hosts) {
        json h;
        h["id"] = host.id;
        h["ipv4"] = host.ipv4.to_string();
        if (host.mac) h["mac"] = host.mac->to_string();
        if (host.uptime_seconds) h["uptime_seconds"] = *host.uptime_seconds;
        h["open_tcp_ports"] = host.open_tcp_ports;
        h["fingerprint"] = host.fingerprint;
        if (host.os_label) h["os_label"] = *host.os_label;
        hosts.push_back(std::move(h));
    }
    doc["hosts"] = std::move(hosts);
    return doc.dump(2) + "\n";
}

Inventory inventory_from_json_text(std::string_view text, std::string source) {
    constexpr const char* what = "inventory JSON";
    constexpr const char* host_what = "inventory JSON host";

    const json doc = parse_document(text, what);
    expect_object(doc, what);
    allow_only(doc, {"version", "scan_time", "hosts"}, what);
    check_version(doc, what);

    Inventory inv;
    inv.source = std::move(source);
    inv.scan_time = as_int(field(doc, "scan_time", what), "scan_time", what);

    const json& hosts = field(doc, "hosts", what);
    expect_array(hosts, "hosts", what);
    for (const auto& h : hosts) {
        expect_object(h, host_what);
        allow_only(h,
                   {"id", "ipv4", "mac", "uptime_seconds", "open_tcp_ports", "fingerprint",
                    "os_label"},
                   host_what);
        HostRecord host;
        host.id = as_string(field(h, "id", host_what), "id", host_what);
        host.ipv4 = Ipv4::parse(as_string(field(h, "ipv4", host_what), "ipv4", host_what));
        if (const auto it = h.find("mac"); it != h.end())
            host.mac = Mac::parse(as_string(*it, "mac", host_what));
        if (const auto it = h.find("uptime_seconds"); it != h.end())
            host.uptime_seconds = as_uint(*it, "uptime_seconds", host_what);
        host.scan_time = inv.scan_time;
        host.open_tcp_ports = as_ports(field(h, "open_tcp_ports", host_what), "open_tcp_ports",
                                       host_what);
        host.fingerprint =
            as_string_map(field(h, "fingerprint", host_what), "fingerprint", host_what);
        if (const auto it = h.find("os_label"); it != h.end())
            host.os_label = as_string(*it, "os_label", host_what);
        inv.hosts.push_back(std::move(host));
    }
    validate(inv);
    return inv;
}

void save_inventory(const Inventory& inv, const std::filesystem::path& path) {
    write_text_file(path, to_json_text(inv));
}

Inventory load_inventory(const std::filesystem::path& path) {
    return inventory_from_json_text(read_text_file(path), path.string());
}

std::string to_json_text(const ClusteringReport& report) {
    json doc;
    doc["k"] = report.clustering.k;
    doc["total_variance"] = report.clustering.total_variance;
    json clusters = json::array();
    for (const auto& cluster : report.clustering.clusters) {
        json c;
        c["members"] = cluster.member_ids;
        c["representative"] = cluster.representative_id;
        c["variance"] = cluster.variance;
        clusters.push_back(std::move(c));
    }
    doc["clusters"] = std::move(clusters);
    json trace = json::array();
    for (const auto& [k, sigma] : report.trace.sigma_by_k)
        trace.push_back(json::array({k, sigma}));
    doc["trace"] = std::move(trace);
    doc["seed"] = report.clustering.rng_seed;
    doc["mu"] = report.trace.mu;
    doc["converged"] = report.trace.converged;
    return doc.dump(2) + "\n";
}

ClusteringReport report_from_json_text(std::string_view text) {
    constexpr const char* what = "clustering report JSON";

    const json doc = parse_document(text, what);
    expect_object(doc, what);
    allow_only(doc, {"k", "total_variance", "clusters", "trace", "seed", "mu", "converged"},
               what);

    ClusteringReport report;
    report.clustering.k = static_cast<int>(as_int(field(doc, "k", what), "k", what));
    report.clustering.total_variance =
        as_double(field(doc, "total_variance", what), "total_variance", what);
    report.clustering.rng_seed = as_uint(field(doc, "seed", what), "seed", what);
    report.trace.mu = as_double(field(doc, "mu", what), "mu", what);
    report.trace.converged = as_bool(field(doc, "converged", what), "converged", what);
    report.trace.chosen_k = report.clustering.k;

    const json& clusters = field(doc, "clusters", what);
    expect_array(clusters, "clusters", what);
    for (const auto& c : clusters) {
        expect_object(c, what);
        allow_only(c, {"members", "representative", "variance"}, what);
        Cluster cluster;
        const json& members = field(c, "members", what);
        expect_array(members, "members", what);
        for (const auto& m : members)
            cluster.member_ids.push_back(as_string(m, "members", what));
        if (cluster.member_ids.empty()) throw Error(std::string(what) + ": empty cluster");
        cluster.representative_id =
            as_string(field(c, "representative", what), "representative", what);
        if (!std::binary_search(cluster.member_ids.begin(), cluster.member_ids.end(),
                                cluster.representative_id))
            throw Error(std::string(what) + ": representative \"" + cluster.representative_id +
                        "\" is not a member of its cluster");
        cluster.variance = as_double(field(c, "variance", what), "variance", what);
        report.clustering.clusters.push_back(std::move(cluster));
    }
    if (report.clustering.k != static_cast<int>(report.clustering.clusters.size()))
        throw Error(std::string(what) + ": k does not match the number of clusters");

    const json& trace = field(doc, "trace", what);
    expect_array(trace, "trace", what);
    for (const auto& entry : trace) {
        if (!entry.is_array() || entry.size() != 2)
            throw Error(std::string(what) + ": each trace entry must be a [k, sigma] pair");
        report.trace.sigma_by_k.emplace_back(
            static_cast<int>(as_int(entry[0], "trace", what)),
            as_double(entry[1], "trace", what));
    }
    return report;
}

void save_report(const ClusteringReport& report, const std::filesystem::path& path) {
    write_text_file(path, to_json_text(report));
}

ClusteringReport load_report(const std::filesystem::path& path) {
    return report_from_json_text(read_text_file(path));
}

std::string to_json_text(const DeploymentPlan& plan) {
    json doc;
    doc["version"] = 1;
    doc["created_at"] = plan.created_at;
    doc["clustering_seed"] = plan.source_clustering_seed;
    doc["seed"] = plan.plan_seed;
    doc["picks"] = plan.cluster_pick_sequence;
    json reassignments = json::array();
    for (const auto& r : plan.reassignments) {
        json entry;
        entry["pick"] = r.pick_index;
        entry["from"] = r.from_cluster;
        entry["to"] = r.to_cluster;
        reassignments.push_back(std::move(entry));
    }
    doc["reassignments"] = std::move(reassignments);
    json specs = json::array();
    for (const auto& spec : plan.specs) {
        json s;
        s["name"] = spec.name;
        s["cluster"] = spec.source_cluster;
        s["template"] = spec.template_host_id;
        s["personality"] = spec.personality_label;
        s["ipv4"] = spec.ipv4.to_string();
        s["mac"] = spec.mac.to_string();
        s["uptime_seconds"] = spec.uptime_seconds;
        s["open_tcp_ports"] = spec.open_tcp_ports;
        s["fingerprint"] = spec.fingerprint;
        specs.push_back(std::move(s));
    }
    doc["specs"] = std::move(specs);
    return doc.dump(2) + "\n";
}

DeploymentPlan plan_from_json_text(std::string_view text) {
    constexpr const char* what = "plan JSON";
    constexpr const char* spec_what = "plan JSON spec";

    const json doc = parse_document(text, what);
    expect_object(doc, what);
    allow_only(doc,
               {"version", "created_at", "clustering_seed", "seed", "picks", "reassignments",
                "specs"},
               what);
    check_version(doc, what);

    DeploymentPlan plan;
    plan.created_at = as_int(field(doc, "created_at", what), "created_at", what);
    plan.source_clustering_seed =
        as_uint(field(doc, "clustering_seed", what), "clustering_seed", what);
    plan.plan_seed = as_uint(field(doc, "seed", what), "seed", what);

    const json& picks = field(doc, "picks", what);
    expect_array(picks, "picks", what);
    for (const auto& p : picks)
        plan.cluster_pick_sequence.push_back(static_cast<int>(as_int(p, "picks", what)));

    const json& reassignments = field(doc, "reassignments", what);
    expect_array(reassignments, "reassignments", what);
    for (const auto& r : reassignments) {
        expect_object(r, what);
        allow_only(r, {"pick", "from", "to"}, what);
        PickReassignment entry;
        entry.pick_index = static_cast<int>(as_int(field(r, "pick", what), "pick", what));
        entry.from_cluster = static_cast<int>(as_int(field(r, "from", what), "from", what));
        entry.to_cluster = static_cast<int>(as_int(field(r, "to", what), "to", what));
        plan.reassignments.push_back(entry);
    }

    const json& specs = field(doc, "specs", what);
    expect_array(specs, "specs", what);
    for (const auto& s : specs) {
        expect_object(s, spec_what);
        allow_only(s,
                   {"name", "cluster", "template", "personality", "ipv4", "mac",
                    "uptime_seconds", "open_tcp_ports", "fingerprint"},
                   spec_what);
        HoneypotSpec spec;
        spec.name = as_string(field(s, "name", spec_what), "name", spec_what);
        if (spec.name.empty()) throw Error(std::string(spec_what) + ": empty name");
        spec.source_cluster =
            static_cast<int>(as_int(field(s, "cluster", spec_what), "cluster", spec_what));
        spec.template_host_id =
            as_string(field(s, "template", spec_what), "template", spec_what);
        spec.personality_label =
            as_string(field(s, "personality", spec_what), "personality", spec_what);
        spec.ipv4 = Ipv4::parse(as_string(field(s, "ipv4", spec_what), "ipv4", spec_what));
        spec.mac = Mac::parse(as_string(field(s, "mac", spec_what), "mac", spec_what));
        spec.uptime_seconds =
            as_uint(field(s, "uptime_seconds", spec_what), "uptime_seconds", spec_what);
        spec.open_tcp_ports = as_ports(field(s, "open_tcp_ports", spec_what), "open_tcp_ports",
                                       spec_what);
        spec.fingerprint =
            as_string_map(field(s, "fingerprint", spec_what), "fingerprint", spec_what);
        plan.specs.push_back(std::move(spec));
    }
    return plan;
}

void save_plan(const DeploymentPlan& plan, const std::filesystem::path& path) {
    write_text_file(path, to_json_text(plan));
}

DeploymentPlan load_plan(const std::filesystem::path& path) {
    return plan_from_json_text(read_text_file(path));
}

}  // namespace hpforge
