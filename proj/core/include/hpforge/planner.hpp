#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "hpforge/clustering.hpp"
#include "hpforge/inventory.hpp"
#include "hpforge/net.hpp"

namespace hpforge {

// One synthesized honeypot. Fingerprint and ports are exact clones of the
// template host (the cluster medoid); address, MAC and uptime are drawn from
// the cluster's distributions.
struct HoneypotSpec {
    std::string name;              // "hp" + ordinal
    int source_cluster = 0;        // 1-based cluster number
    std::string template_host_id;
    std::map<std::string, std::string> fingerprint;
    std::vector<std::uint16_t> open_tcp_ports;
    Ipv4 ipv4;
    Mac mac;
    std::uint64_t uptime_seconds = 0;
    std::string personality_label;  // "unknown" when the template has no OS label
};

// A pick that had to move to another cluster because the preferred cluster's
// /24 ran out of free addresses.
struct PickReassignment {
    int pick_index = 0;  // 0-based position in the pick sequence
    int from_cluster = 0;
    int to_cluster = 0;
};

struct DeploymentPlan {
    std::vector<HoneypotSpec> specs;
    std::int64_t created_at = 0;
    std::uint64_t source_clustering_seed = 0;
    std::uint64_t plan_seed = 0;
    std::vector<int> cluster_pick_sequence;  // 1-based, in pick order
    std::vector<PickReassignment> reassignments;
};

// Cluster significance ranking: repeatedly picks the cluster with the highest
// effective size, where every pick halves that cluster's effective size.
// Ties go to the lowest cluster number. Returns 1-based cluster numbers.
std::vector<int> rank_and_pick(std::span<const std::size_t> cluster_sizes, int n_honeypots);

// Address synthesis: uniform over the observed last-octet range of the
// cluster's addresses inside its modal /24, widened by 10 percent of the
// range (split evenly over both ends) and clamped to [1, 254]. Falls back to
// the whole /24 when the fitted range is fully occupied; throws Error when
// the /24 itself is exhausted.
Ipv4 synthesize_ip(const std::vector<const HostRecord*>& cluster_hosts,
                   const std::set<Ipv4>& occupied, std::uint64_t seed);

// Most prevalent vendor prefix among the given hosts; std::nullopt when none
// of them carries a MAC. Ties go to the lexicographically smallest prefix.
std::optional<Oui> modal_oui(const std::vector<const HostRecord*>& hosts);

// Vendor prefix of the cluster (or the fallback when the cluster has no
// MACs), suffix drawn uniformly, retrying on collisions with occupied.
Mac synthesize_mac(const std::vector<const HostRecord*>& cluster_hosts,
                   std::optional<Oui> fallback_oui, const std::set<Mac>& occupied,
                   std::uint64_t seed);

// Mean of the member uptimes (rounded to the nearest second) corrected by the
// scan-to-deployment delay; just the delay when no member reports an uptime.
std::uint64_t synthesize_uptime(const std::vector<const HostRecord*>& cluster_hosts,
                                std::int64_t scan_time, std::int64_t deploy_time);

DeploymentPlan build_plan(const Clustering& clustering, const Inventory& inventory,
                          int n_honeypots, std::int64_t deploy_time, std::uint64_t seed);

std::string to_json_text(const DeploymentPlan& plan);
DeploymentPlan plan_from_json_text(std::string_view text);
void save_plan(const DeploymentPlan& plan, const std::filesystem::path& path);
DeploymentPlan load_plan(const std::filesystem::path& path);

}  // namespace hpforge
