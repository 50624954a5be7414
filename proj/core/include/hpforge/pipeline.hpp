#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hpforge/clustering.hpp"
#include "hpforge/exporter.hpp"
#include "hpforge/inventory.hpp"
#include "hpforge/planner.hpp"

namespace hpforge {

// Stage drivers shared by the command-line tool and the maintenance loop.
// Each run_* function reads its inputs, writes its output file, and returns
// the produced artifact; failures surface as Error.

struct ImportOptions {
    std::optional<std::filesystem::path> nmap_xml;    // scanner XML input
    std::optional<std::filesystem::path> inventory;   // native JSON input
    std::optional<std::string> scan_target;           // run the scanner ourselves
    std::filesystem::path output;
};

struct ImportOutcome {
    Inventory inventory;
    int skipped_without_ipv4 = 0;
};

ImportOutcome run_import(const ImportOptions& options);

struct ClusterOptions {
    std::filesystem::path inventory;
    double mu = 0.68;
    int n_evaluations = 15;
    int k_max = 20;
    std::uint64_t seed = 0;
    std::filesystem::path output;
};

ClusteringReport run_cluster(const ClusterOptions& options);

struct PlanOptions {
    std::filesystem::path inventory;
    std::filesystem::path clustering;
    int n_honeypots = 1;
    std::optional<std::int64_t> deploy_time;  // defaults to the inventory scan time
    std::uint64_t seed = 0;
    std::filesystem::path output;
};

struct PlanOutcome {
    DeploymentPlan plan;
    Clustering clustering;  // the clustering the plan was built from
};

PlanOutcome run_plan(const PlanOptions& options);

struct EmitOptions {
    std::filesystem::path plan;
    std::optional<std::filesystem::path> personality_map;
    std::filesystem::path output;
};

HoneydDocument run_emit(const EmitOptions& options);

// Spec-level difference between two plans, one line per added ("+"), removed
// ("-") or changed ("~") honeypot, ordered by name. Changed lines list the
// fields that moved. Empty when the plans describe the same honeypots.
std::vector<std::string> diff_plans(const DeploymentPlan& before, const DeploymentPlan& after);

// "90", "90s", "5m" or "2h" -> seconds. Throws Error on anything else.
std::chrono::seconds parse_duration(std::string_view text);

struct MaintainOptions {
    std::optional<std::filesystem::path> nmap_xml;
    std::optional<std::filesystem::path> inventory;
    std::optional<std::string> scan_target;
    std::filesystem::path out_dir;
    std::chrono::seconds interval{60};
    std::optional<int> cycles;  // absent: run until interrupted
    double mu = 0.68;
    int n_evaluations = 15;
    int k_max = 20;
    int n_honeypots = 1;
    std::uint64_t seed = 0;
    std::optional<std::filesystem::path> personality_map;
};

// Re-runs import -> cluster -> plan -> emit every interval, writing artifacts
// under out_dir (plans carry cycle number and timestamp in their file names)
// and logging a plan diff after every cycle. A failing cycle is logged and the
// loop keeps going. `interrupted` is polled while waiting; once it returns
// true the loop winds down and the function returns 0.
int run_maintain(const MaintainOptions& options, const std::function<bool()>& interrupted,
                 const std::function<void(const std::string&)>& log);

}  // namespace hpforge
