#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "hpforge/planner.hpp"

namespace hpforge {

struct HoneydDocument {
    std::vector<std::string> lines;

    // Joined with LF endings and a trailing newline.
    std::string text() const;
};

// Optional relabeling of scanner OS names onto honeyd personality names.
using PersonalityMap = std::map<std::string, std::string>;

// One contiguous directive block per honeypot, blocks in plan order and
// separated by one blank line:
//
//   create <name>
//   set <name> personality "<label>"        (omitted for label "unknown")
//   set <name> default tcp action reset
//   add <name> tcp port <p> open            (ascending, one per open port)
//   set <name> ethernet "<mac>"
//   set <name> uptime <seconds>
//   bind <ipv4> <name>
//
// Throws Error for plans beyond honeyd's 65000-host ceiling and for
// personality labels that cannot be quoted.
HoneydDocument render_honeyd(const DeploymentPlan& plan, const PersonalityMap& personalities = {});

// Human-readable deployment summary: picks per cluster, template hosts and
// the synthesized parameters. Deterministic for a given plan and clustering.
std::string render_plan_report(const DeploymentPlan& plan, const Clustering& clustering);

// Two-column personality map file: "<label>\t<honeyd name>" per line, blank
// lines and '#' comments ignored. An empty file behaves like no map at all.
PersonalityMap parse_personality_map(std::string_view text);
PersonalityMap load_personality_map(const std::filesystem::path& path);

}  // namespace hpforge
