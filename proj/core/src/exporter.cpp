#include "hpforge/exporter.hpp"

#include <fstream>
#include <sstream>

#include "hpforge/errors.hpp"

namespace hpforge {

namespace {

// honeyd's documented virtual-host ceiling.
constexpr std::size_t kMaxHoneydHosts = 65000;

std::string quoted(const std::string& text) {
    if (text.find('"') != std::string::npos || text.find('\n') != std::string::npos)
        throw Error("personality label cannot be quoted for honeyd: \"" + text + "\"");
    return "\"" + text + "\"";
}

}  // namespace

std::string HoneydDocument::text() const {
    std::string out;
    for (const auto& line : lines) {
        out += line;
        out += '\n';
    }
    return out;
}

HoneydDocument render_honeyd(const DeploymentPlan& plan, const PersonalityMap& personalities) {
    if (plan.specs.size() > kMaxHoneydHosts)
        throw Error("plan exceeds honeyd's limit of " + std::to_string(kMaxHoneydHosts) +
                    " virtual hosts");

    HoneydDocument doc;
    bool first = true;
    for (const auto& spec : plan.specs) {
        if (!first) doc.lines.emplace_back();
        first = false;

        doc.lines.push_back("create " + spec.name);
        if (spec.personality_label != "unknown") {
            const auto it = personalities.find(spec.personality_label);
            const auto& label = it == personalities.end() ? spec.personality_label : it->second;
            doc.lines.push_back("set " + spec.name + " personality " + quoted(label));
        }
        doc.lines.push_back("set " + spec.name + " default tcp action reset");
        for (const auto port : spec.open_tcp_ports)
            doc.lines.push_back("add " + spec.name + " tcp port " + std::to_string(port) + " open");
        doc.lines.push_back("set " + spec.name + " ethernet \"" + spec.mac.to_string() + "\"");
        doc.lines.push_back("set " + spec.name + " uptime " + std::to_string(spec.uptime_seconds));
        doc.lines.push_back("bind " + spec.ipv4.to_string() + " " + spec.name);
    }
    return doc;
}

std::string render_plan_report(const DeploymentPlan& plan, const Clustering& clustering) {
    std::ostringstream out;
    out << "deployment plan: " << plan.specs.size() << " honeypot"
        << (plan.specs.size() == 1 ? "" : "s") << " from " << clustering.clusters.size()
        << " cluster" << (clustering.clusters.size() == 1 ? "" : "s") << " (seed "
        << plan.plan_seed << ")\n";

    out << "picks:";
    for (const auto pick : plan.cluster_pick_sequence) out << ' ' << pick;
    out << '\n';

    for (const auto& r : plan.reassignments)
        out << "note: pick " << r.pick_index << " moved from cluster " << r.from_cluster
            << " to cluster " << r.to_cluster << " (no free address)\n";

    out << '\n';
    for (const auto& spec : plan.specs) {
        const auto& cluster = clustering.clusters.at(static_cast<std::size_t>(spec.source_cluster - 1));
        out << spec.name << ": cluster " << spec.source_cluster << " (" << cluster.size()
            << " hosts), template " << spec.template_host_id << '\n';
        out << "  ipv4 " << spec.ipv4.to_string() << ", mac " << spec.mac.to_string()
            << ", uptime " << spec.uptime_seconds << "s, personality \""
            << spec.personality_label << "\"\n";
        out << "  ports";
        if (spec.open_tcp_ports.empty()) out << " none";
        for (const auto port : spec.open_tcp_ports) out << ' ' << port;
        out << '\n';
    }
    return out.str();
}

PersonalityMap parse_personality_map(std::string_view text) {
    PersonalityMap map;
    std::size_t start = 0;
    int line_no = 0;
    while (start <= text.size()) {
        const auto end = text.find('\n', start);
        auto line = text.substr(start, end == std::string_view::npos ? std::string_view::npos
                                                                     : end - start);
        ++line_no;
        start = end == std::string_view::npos ? text.size() + 1 : end + 1;

        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') continue;

        const auto tab = line.find('\t');
        if (tab == std::string_view::npos || tab == 0 || tab + 1 >= line.size())
            throw Error("personality map line " + std::to_string(line_no) +
                        ": expected \"<label>\\t<honeyd name>\"");
        map.emplace(std::string(line.substr(0, tab)), std::string(line.substr(tab + 1)));
    }
    return map;
}

PersonalityMap load_personality_map(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open \"" + path.string() + "\"");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_personality_map(buffer.str());
}

}  // namespace hpforge
