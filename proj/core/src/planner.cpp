#include "hpforge/planner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hpforge/errors.hpp"
#include "hpforge/rng.hpp"

namespace hpforge {

namespace {

std::string prefix24_to_string(std::uint32_t prefix) {
    return Ipv4{prefix}.to_string() + "/24";
}

// Ranked candidate order over cluster slots: descending effective size, ties
// to the lowest slot, exhausted slots excluded.
std::vector<std::size_t> ranked_order(const std::vector<double>& effective,
                                      const std::set<std::size_t>& exhausted) {
    std::vector<std::size_t> order;
    for (std::size_t c = 0; c < effective.size(); ++c)
        if (!exhausted.contains(c)) order.push_back(c);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return effective[a] > effective[b];
    });
    return order;
}

}  // namespace

std::vector<int> rank_and_pick(std::span<const std::size_t> cluster_sizes, int n_honeypots) {
    if (n_honeypots < 1) throw Error("n_honeypots must be at least 1");
    if (cluster_sizes.empty()) throw Error("at least one cluster is required");
    for (const auto size : cluster_sizes)
        if (size == 0) throw Error("cluster sizes must be positive");

    // Effective sizes are size / 2^picks, kept exact as dyadic doubles.
    std::vector<double> effective(cluster_sizes.begin(), cluster_sizes.end());
    std::vector<int> picks;
    picks.reserve(static_cast<std::size_t>(n_honeypots));
    for (int i = 0; i < n_honeypots; ++i) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < effective.size(); ++c)
            if (effective[c] > effective[best]) best = c;
        picks.push_back(static_cast<int>(best) + 1);
        effective[best] /= 2.0;
    }
    return picks;
}

Ipv4 synthesize_ip(const std::vector<const HostRecord*>& cluster_hosts,
                   const std::set<Ipv4>& occupied, std::uint64_t seed) {
    if (cluster_hosts.empty()) throw Error("cannot synthesize an address for an empty cluster");

    // Modal /24 of the cluster, ties to the numerically lowest prefix.
    std::map<std::uint32_t, int> prefixes;
    for (const auto* host : cluster_hosts) ++prefixes[host->ipv4.prefix24()];
    std::uint32_t prefix = prefixes.begin()->first;
    int prefix_count = prefixes.begin()->second;
    for (const auto& [p, count] : prefixes) {
        if (count > prefix_count) {
            prefix = p;
            prefix_count = count;
        }
    }

    // Observed last-octet range within the modal /24, widened by 10 percent
    // of the range split over both ends, clamped to assignable octets.
    int min_octet = 256;
    int max_octet = -1;
    for (const auto* host : cluster_hosts) {
        if (host->ipv4.prefix24() != prefix) continue;
        min_octet = std::min(min_octet, host->ipv4.last_octet());
        max_octet = std::max(max_octet, host->ipv4.last_octet());
    }
    const int margin = static_cast<int>(std::llround(0.05 * (max_octet - min_octet)));
    int lo = std::clamp(min_octet - margin, 1, 254);
    int hi = std::clamp(max_octet + margin, 1, 254);

    const auto free_in = [&](int from, int to) {
        std::vector<Ipv4> free;
        for (int octet = from; octet <= to; ++octet) {
            const Ipv4 addr{prefix | static_cast<std::uint32_t>(octet)};
            if (!occupied.contains(addr)) free.push_back(addr);
        }
        return free;
    };

    auto free = free_in(lo, hi);
    if (free.empty()) free = free_in(1, 254);  // fitted range exhausted, widen
    if (free.empty())
        throw Error("no free address left in " + prefix24_to_string(prefix));

    Rng rng(seed);
    return free[rng.bounded(free.size())];
}

std::optional<Oui> modal_oui(const std::vector<const HostRecord*>& hosts) {
    std::map<Oui, int> counts;
    for (const auto* host : hosts) {
        const auto oui = host->vendor_oui();
        if (oui) ++counts[*oui];
    }
    if (counts.empty()) return std::nullopt;
    auto best = counts.begin();
    for (auto it = counts.begin(); it != counts.end(); ++it)
        if (it->second > best->second) best = it;
    return best->first;
}

Mac synthesize_mac(const std::vector<const HostRecord*>& cluster_hosts,
                   std::optional<Oui> fallback_oui, const std::set<Mac>& occupied,
                   std::uint64_t seed) {
    auto oui = modal_oui(cluster_hosts);
    if (!oui) oui = fallback_oui;
    if (!oui) throw Error("no MAC address available to derive a vendor prefix from");

    std::size_t taken = 0;
    for (const auto& mac : occupied)
        if (mac.oui() == *oui) ++taken;
    if (taken >= (1u << 24))
        throw Error("vendor prefix " + oui->to_string() + " has no free suffix left");

    Rng rng(seed);
    for (;;) {
        const auto suffix = static_cast<std::uint32_t>(rng.bounded(1u << 24));
        const Mac mac{{oui->bytes[0], oui->bytes[1], oui->bytes[2],
                       static_cast<std::uint8_t>(suffix >> 16),
                       static_cast<std::uint8_t>((suffix >> 8) & 0xff),
                       static_cast<std::uint8_t>(suffix & 0xff)}};
        if (!occupied.contains(mac)) return mac;
    }
}

std::uint64_t synthesize_uptime(const std::vector<const HostRecord*>& cluster_hosts,
                                std::int64_t scan_time, std::int64_t deploy_time) {
    if (deploy_time < scan_time)
        throw Error("deploy time precedes the scan time");
    const auto delay = static_cast<std::uint64_t>(deploy_time - scan_time);

    std::uint64_t sum = 0;
    std::size_t reporting = 0;
    for (const auto* host : cluster_hosts) {
        if (!host->uptime_seconds) continue;
        sum += *host->uptime_seconds;
        ++reporting;
    }
    if (reporting == 0) return delay;
    const auto mean = static_cast<std::uint64_t>(
        std::llround(static_cast<double>(sum) / static_cast<double>(reporting)));
    return mean + delay;
}

DeploymentPlan build_plan(const Clustering& clustering, const Inventory& inventory,
                          int n_honeypots, std::int64_t deploy_time, std::uint64_t seed) {
    if (n_honeypots < 1) throw Error("n_honeypots must be at least 1");
    if (clustering.clusters.empty()) throw Error("clustering has no clusters");

    // The clustering must partition exactly this inventory.
    std::map<std::string_view, const HostRecord*> by_id;
    for (const auto& host : inventory.hosts) by_id.emplace(host.id, &host);
    std::size_t covered = 0;
    for (const auto& cluster : clustering.clusters) {
        if (cluster.member_ids.empty()) throw Error("clustering contains an empty cluster");
        for (const auto& id : cluster.member_ids) {
            if (!by_id.contains(id))
                throw Error("clustering references host \"" + id + "\" absent from the inventory");
            ++covered;
        }
    }
    if (covered != inventory.hosts.size())
        throw Error("clustering does not cover the whole inventory");

    std::vector<std::vector<const HostRecord*>> cluster_hosts;
    for (const auto& cluster : clustering.clusters) {
        auto& hosts = cluster_hosts.emplace_back();
        for (const auto& id : cluster.member_ids) hosts.push_back(by_id.at(id));
    }

    std::set<Ipv4> occupied_ips;
    std::set<Mac> occupied_macs;
    std::vector<const HostRecord*> all_hosts;
    for (const auto& host : inventory.hosts) {
        occupied_ips.insert(host.ipv4);
        if (host.mac) occupied_macs.insert(*host.mac);
        all_hosts.push_back(&host);
    }
    const auto fallback_oui = modal_oui(all_hosts);

    DeploymentPlan plan;
    plan.created_at = deploy_time;
    plan.source_clustering_seed = clustering.rng_seed;
    plan.plan_seed = seed;

    std::vector<double> effective;
    for (const auto& cluster : clustering.clusters)
        effective.push_back(static_cast<double>(cluster.size()));
    std::set<std::size_t> exhausted;

    for (int pick = 0; pick < n_honeypots; ++pick) {
        const auto order = ranked_order(effective, exhausted);
        if (order.empty()) throw Error("every cluster's /24 is exhausted");
        const auto preferred = order.front();

        bool placed = false;
        for (const auto slot : order) {
            Ipv4 ip;
            try {
                ip = synthesize_ip(cluster_hosts[slot], occupied_ips,
                                   derive_seed(seed, static_cast<std::uint64_t>(pick), 1));
            } catch (const Error&) {
                exhausted.insert(slot);  // this pick and all later ones skip it
                continue;
            }

            const auto* tmpl = by_id.at(clustering.clusters[slot].representative_id);
            HoneypotSpec spec;
            spec.name = "hp" + std::to_string(pick);
            spec.source_cluster = static_cast<int>(slot) + 1;
            spec.template_host_id = tmpl->id;
            spec.fingerprint = tmpl->fingerprint;
            spec.open_tcp_ports = tmpl->open_tcp_ports;
            spec.ipv4 = ip;
            spec.mac = synthesize_mac(cluster_hosts[slot], fallback_oui, occupied_macs,
                                      derive_seed(seed, static_cast<std::uint64_t>(pick), 2));
            spec.uptime_seconds =
                synthesize_uptime(cluster_hosts[slot], inventory.scan_time, deploy_time);
            spec.personality_label = tmpl->os_label.value_or("unknown");

            occupied_ips.insert(spec.ipv4);
            occupied_macs.insert(spec.mac);
            plan.cluster_pick_sequence.push_back(spec.source_cluster);
            if (slot != preferred)
                plan.reassignments.push_back(PickReassignment{
                    pick, static_cast<int>(preferred) + 1, static_cast<int>(slot) + 1});
            plan.specs.push_back(std::move(spec));
            effective[slot] /= 2.0;
            placed = true;
            break;
        }
        if (!placed) throw Error("every cluster's /24 is exhausted");
    }
    return plan;
}

}  // namespace hpforge
