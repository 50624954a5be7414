#include "hpforge/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <ctime>
#include <set>
#include <thread>

#include "hpforge/errors.hpp"
#include "hpforge/io.hpp"
#include "hpforge/nmap_xml.hpp"

namespace hpforge {

namespace {

std::string run_scanner(const std::string& target) {
    const bool clean = !target.empty() &&
                       std::all_of(target.begin(), target.end(), [](unsigned char c) {
                           return std::isalnum(c) || c == '.' || c == '/' || c == ':' ||
                                  c == '-';
                       });
    if (!clean) throw Error("scan target contains unsupported characters: " + target);

    const std::string command = "nmap -O -oX - " + target;
    FILE* pipe = ::popen(command.c_str(), "r");
    if (!pipe) throw Error("failed to start scanner: " + command);
    std::string output;
    char buffer[4096];
    std::size_t n = 0;
    while ((n = std::fread(buffer, 1, sizeof buffer, pipe)) > 0) output.append(buffer, n);
    const int status = ::pclose(pipe);
    if (status != 0) throw Error("scanner exited with status " + std::to_string(status));
    return output;
}

std::string field_change(const std::string& field, const std::string& from,
                         const std::string& to) {
    return field + " " + from + " -> " + to;
}

std::string plan_file_name(int cycle) {
    std::string number = std::to_string(cycle);
    while (number.size() < 4) number.insert(0, "0");
    return "plan-" + number + "-" + std::to_string(static_cast<long long>(std::time(nullptr))) +
           ".json";
}

}  // namespace

ImportOutcome run_import(const ImportOptions& options) {
    const int inputs = static_cast<int>(options.nmap_xml.has_value()) +
                       static_cast<int>(options.inventory.has_value()) +
                       static_cast<int>(options.scan_target.has_value());
    if (inputs != 1)
        throw Error("exactly one input is required: scanner XML, native inventory, or a scan "
                    "target");

    ImportOutcome outcome;
    if (options.nmap_xml) {
        auto scan = load_scanner_xml(*options.nmap_xml);
        outcome.inventory = std::move(scan.inventory);
        outcome.skipped_without_ipv4 = scan.skipped_without_ipv4;
    } else if (options.scan_target) {
        auto scan = parse_scanner_xml(run_scanner(*options.scan_target),
                                      "scan:" + *options.scan_target);
        outcome.inventory = std::move(scan.inventory);
        outcome.skipped_without_ipv4 = scan.skipped_without_ipv4;
    } else {
        outcome.inventory = load_inventory(*options.inventory);
    }
    save_inventory(outcome.inventory, options.output);
    return outcome;
}

ClusteringReport run_cluster(const ClusterOptions& options) {
    const auto inventory = load_inventory(options.inventory);
    if (inventory.hosts.empty()) throw Error("cannot cluster an empty inventory");
    const auto schema = build_schema(inventory);
    const auto vectors = vectorize(inventory, schema);
    const auto k_max =
        std::min<int>(options.k_max, static_cast<int>(vectors.size()));
    const auto selection =
        select_k(vectors, options.mu, options.n_evaluations, k_max, options.seed);
    ClusteringReport report{selection.clustering, selection.trace};
    save_report(report, options.output);
    return report;
}

PlanOutcome run_plan(const PlanOptions& options) {
    const auto inventory = load_inventory(options.inventory);
    auto report = load_report(options.clustering);
    const auto deploy_time = options.deploy_time.value_or(inventory.scan_time);
    PlanOutcome outcome{build_plan(report.clustering, inventory, options.n_honeypots,
                                   deploy_time, options.seed),
                        std::move(report.clustering)};
    save_plan(outcome.plan, options.output);
    return outcome;
}

HoneydDocument run_emit(const EmitOptions& options) {
    const auto plan = load_plan(options.plan);
    PersonalityMap personalities;
    if (options.personality_map)
        personalities = load_personality_map(*options.personality_map);
    auto document = render_honeyd(plan, personalities);
    write_text_file(options.output, document.text());
    return document;
}

std::vector<std::string> diff_plans(const DeploymentPlan& before, const DeploymentPlan& after) {
    std::map<std::string, const HoneypotSpec*> old_specs;
    std::map<std::string, const HoneypotSpec*> new_specs;
    for (const auto& spec : before.specs) old_specs[spec.name] = &spec;
    for (const auto& spec : after.specs) new_specs[spec.name] = &spec;

    std::set<std::string> names;
    for (const auto& [name, spec] : old_specs) names.insert(name);
    for (const auto& [name, spec] : new_specs) names.insert(name);

    std::vector<std::string> lines;
    for (const auto& name : names) {
        const auto old_it = old_specs.find(name);
        const auto new_it = new_specs.find(name);
        if (old_it == old_specs.end()) {
            const auto& s = *new_it->second;
            lines.push_back("+ " + name + " (cluster " + std::to_string(s.source_cluster) +
                            ", " + s.ipv4.to_string() + ")");
            continue;
        }
        if (new_it == new_specs.end()) {
            const auto& s = *old_it->second;
            lines.push_back("- " + name + " (cluster " + std::to_string(s.source_cluster) +
                            ", " + s.ipv4.to_string() + ")");
            continue;
        }
        const auto& a = *old_it->second;
        const auto& b = *new_it->second;
        std::vector<std::string> changes;
        if (a.source_cluster != b.source_cluster)
            changes.push_back(field_change("cluster", std::to_string(a.source_cluster),
                                           std::to_string(b.source_cluster)));
        if (a.template_host_id != b.template_host_id)
            changes.push_back(field_change("template", a.template_host_id, b.template_host_id));
        if (a.personality_label != b.personality_label)
            changes.push_back(field_change("personality", a.personality_label,
                                           b.personality_label));
        if (a.ipv4 != b.ipv4)
            changes.push_back(field_change("ipv4", a.ipv4.to_string(), b.ipv4.to_string()));
        if (a.mac != b.mac)
            changes.push_back(field_change("mac", a.mac.to_string(), b.mac.to_string()));
        if (a.uptime_seconds != b.uptime_seconds)
            changes.push_back(field_change("uptime", std::to_string(a.uptime_seconds),
                                           std::to_string(b.uptime_seconds)));
        if (a.open_tcp_ports != b.open_tcp_ports) changes.push_back("ports changed");
        if (a.fingerprint != b.fingerprint) changes.push_back("fingerprint changed");
        if (changes.empty()) continue;
        std::string line = "~ " + name + ": " + changes.front();
        for (std::size_t i = 1; i < changes.size(); ++i) line += ", " + changes[i];
        lines.push_back(std::move(line));
    }
    return lines;
}

std::chrono::seconds parse_duration(std::string_view text) {
    const auto original = std::string(text);
    std::uint64_t multiplier = 1;
    if (!text.empty()) {
        switch (text.back()) {
            case 's': multiplier = 1; text.remove_suffix(1); break;
            case 'm': multiplier = 60; text.remove_suffix(1); break;
            case 'h': multiplier = 3600; text.remove_suffix(1); break;
            default: break;
        }
    }
    std::uint64_t value = 0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (text.empty() || ec != std::errc() || ptr != last)
        throw Error("invalid duration \"" + original + "\"; use forms like 90s, 5m or 1h");
    if (value == 0) throw Error("duration must be positive");
    return std::chrono::seconds(value * multiplier);
}

int run_maintain(const MaintainOptions& options, const std::function<bool()>& interrupted,
                 const std::function<void(const std::string&)>& log) {
    if (options.interval <= std::chrono::seconds::zero())
        throw Error("maintenance interval must be positive");
    if (options.cycles && *options.cycles < 1) throw Error("cycle count must be at least 1");

    std::error_code ec;
    std::filesystem::create_directories(options.out_dir, ec);
    if (ec) throw Error("cannot create output directory " + options.out_dir.string());

    const auto is_interrupted = [&] { return interrupted && interrupted(); };
    const auto emit_log = [&](const std::string& line) {
        if (log) log(line);
    };

    std::optional<DeploymentPlan> previous;
    int cycle = 0;
    while (!is_interrupted()) {
        ++cycle;
        try {
            ImportOptions import_options;
            import_options.nmap_xml = options.nmap_xml;
            import_options.inventory = options.inventory;
            import_options.scan_target = options.scan_target;
            import_options.output = options.out_dir / "inventory.json";
            run_import(import_options);

            ClusterOptions cluster_options;
            cluster_options.inventory = import_options.output;
            cluster_options.mu = options.mu;
            cluster_options.n_evaluations = options.n_evaluations;
            cluster_options.k_max = options.k_max;
            cluster_options.seed = options.seed;
            cluster_options.output = options.out_dir / "clustering.json";
            const auto report = run_cluster(cluster_options);

            PlanOptions plan_options;
            plan_options.inventory = import_options.output;
            plan_options.clustering = cluster_options.output;
            plan_options.n_honeypots = options.n_honeypots;
            plan_options.seed = options.seed;
            plan_options.output = options.out_dir / plan_file_name(cycle);
            const auto planned = run_plan(plan_options);

            EmitOptions emit_options;
            emit_options.plan = plan_options.output;
            emit_options.personality_map = options.personality_map;
            emit_options.output = options.out_dir / "honeyd.conf";
            run_emit(emit_options);

            emit_log("cycle " + std::to_string(cycle) + ": " +
                     std::to_string(planned.plan.specs.size()) + " honeypots (k=" +
                     std::to_string(report.clustering.k) + ") -> " +
                     plan_options.output.filename().string());
            if (previous) {
                const auto lines = diff_plans(*previous, planned.plan);
                if (lines.empty()) {
                    emit_log("no changes");
                } else {
                    for (const auto& line : lines) emit_log(line);
                }
            }
            previous = planned.plan;
        } catch (const Error& e) {
            emit_log("cycle " + std::to_string(cycle) + " failed: " + std::string(e.what()));
        }

        if (options.cycles && cycle >= *options.cycles) break;

        auto remaining = std::chrono::milliseconds(options.interval);
        while (remaining > std::chrono::milliseconds::zero()) {
            if (is_interrupted()) return 0;
            const auto slice = std::min(remaining, std::chrono::milliseconds(200));
            std::this_thread::sleep_for(slice);
            remaining -= slice;
        }
    }
    return 0;
}

}  // namespace hpforge
