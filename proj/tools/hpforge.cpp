#include <algorithm>
#include <charconv>
#include <chrono>
#include <csignal>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hpforge/errors.hpp"
#include "hpforge/evaluation.hpp"
#include "hpforge/exporter.hpp"
#include "hpforge/format.hpp"
#include "hpforge/io.hpp"
#include "hpforge/pipeline.hpp"
#include "hpforge/rng.hpp"

namespace {

volatile std::sig_atomic_t g_interrupted = 0;

extern "C" void handle_interrupt(int) { g_interrupted = 1; }

constexpr int kExitOk = 0;
constexpr int kExitData = 2;
constexpr int kExitUsage = 64;

// Default seed: HPFORGE_SEED when set, else 0. An explicit --seed always wins.
std::uint64_t env_seed() {
    const char* env = std::getenv("HPFORGE_SEED");
    if (!env) return 0;
    const std::string text(env);
    std::uint64_t value = 0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (text.empty() || ec != std::errc() || ptr != last)
        throw hpforge::UsageError("HPFORGE_SEED must be a non-negative integer, got \"" +
                                  text + "\"");
    return value;
}

std::optional<std::filesystem::path> to_optional_path(const std::string& text) {
    if (text.empty()) return std::nullopt;
    return std::filesystem::path(text);
}

std::optional<std::string> to_optional(const std::string& text) {
    if (text.empty()) return std::nullopt;
    return text;
}

void require_one_input(const std::string& nmap_xml, const std::string& inventory,
                       const std::string& scan_target) {
    const int given = static_cast<int>(!nmap_xml.empty()) +
                      static_cast<int>(!inventory.empty()) +
                      static_cast<int>(!scan_target.empty());
    if (given != 1)
        throw hpforge::UsageError(
            "choose exactly one input: --nmap-xml, --inventory or --scan");
}

struct ImportArgs {
    std::string nmap_xml;
    std::string inventory;
    std::string scan_target;
    std::string output;
};

struct ClusterArgs {
    std::string inventory;
    double mu = 0.68;
    int evaluations = 15;
    int k_max = 20;
    std::optional<std::uint64_t> seed;
    std::string output;
};

struct PlanArgs {
    std::string inventory;
    std::string clustering;
    int honeypots = 1;
    std::optional<std::int64_t> deploy_time;
    std::optional<std::uint64_t> seed;
    std::string output;
};

struct EmitArgs {
    std::string plan;
    std::string personality_map;
    std::string output;
};

struct EvalArgs {
    std::string experiment;
    int true_k = 5;
    int hosts_per_cluster = 10;
    int fingerprint_dims = 10;
    int port_dims = 16;
    double beta = 0.0;
    double mu = 0.68;
    int evaluations = 15;
    int k_lo = 1;
    int k_hi = 10;
    int count_lo = 1;
    int count_hi = 20;
    int trials = 20;
    std::vector<double> betas;
    std::optional<std::uint64_t> seed;
    std::string output;
};

struct MaintainArgs {
    std::string nmap_xml;
    std::string inventory;
    std::string scan_target;
    std::string out_dir;
    std::string interval = "5m";
    std::optional<int> cycles;
    double mu = 0.68;
    int evaluations = 15;
    int k_max = 20;
    int honeypots = 1;
    std::optional<std::uint64_t> seed;
    std::string personality_map;
};

int cmd_import(const ImportArgs& args) {
    require_one_input(args.nmap_xml, args.inventory, args.scan_target);
    hpforge::ImportOptions options;
    options.nmap_xml = to_optional_path(args.nmap_xml);
    options.inventory = to_optional_path(args.inventory);
    options.scan_target = to_optional(args.scan_target);
    options.output = args.output;
    const auto outcome = hpforge::run_import(options);
    if (outcome.skipped_without_ipv4 > 0)
        std::cerr << "skipped " << outcome.skipped_without_ipv4
                  << " up host(s) without an IPv4 address\n";
    std::cout << outcome.inventory.hosts.size() << " hosts imported\n";
    return kExitOk;
}

int cmd_cluster(const ClusterArgs& args) {
    hpforge::ClusterOptions options;
    options.inventory = args.inventory;
    options.mu = args.mu;
    options.n_evaluations = args.evaluations;
    options.k_max = args.k_max;
    options.seed = args.seed ? *args.seed : env_seed();
    options.output = args.output;
    const auto report = hpforge::run_cluster(options);
    for (const auto& [k, sigma] : report.trace.sigma_by_k)
        std::cerr << "sigma(k=" << k << ") = " << hpforge::format_double(sigma) << "\n";
    if (!report.trace.converged)
        std::cerr << "warning: variance never converged below k=" << report.clustering.k
                  << "\n";
    std::cout << "k=" << report.clustering.k << "\n";
    return kExitOk;
}

int cmd_plan(const PlanArgs& args) {
    hpforge::PlanOptions options;
    options.inventory = args.inventory;
    options.clustering = args.clustering;
    options.n_honeypots = args.honeypots;
    options.deploy_time = args.deploy_time;
    options.seed = args.seed ? *args.seed : env_seed();
    options.output = args.output;
    const auto outcome = hpforge::run_plan(options);
    std::cout << hpforge::render_plan_report(outcome.plan, outcome.clustering);
    return kExitOk;
}

int cmd_emit(const EmitArgs& args) {
    hpforge::EmitOptions options;
    options.plan = args.plan;
    options.personality_map = to_optional_path(args.personality_map);
    options.output = args.output;
    const auto document = hpforge::run_emit(options);
    std::cerr << "wrote " << document.lines.size() << " lines of honeyd configuration\n";
    return kExitOk;
}

int cmd_eval(const EvalArgs& args) {
    const auto seed = args.seed ? *args.seed : env_seed();
    std::string csv;

    if (args.experiment == "sweep" || args.experiment == "convergence") {
        auto network = hpforge::generate_planted(args.true_k, args.hosts_per_cluster,
                                                 args.fingerprint_dims, args.port_dims,
                                                 hpforge::derive_seed(seed, 11));
        if (args.beta > 0.0) {
            hpforge::MutationConfig config;
            config.beta = args.beta;
            config.seed = hpforge::derive_seed(seed, 12);
            network = hpforge::mutate(network, config);
        }
        if (args.experiment == "sweep") {
            if (args.k_lo < 1 || args.k_hi < args.k_lo)
                throw hpforge::UsageError("--k-lo/--k-hi must satisfy 1 <= k-lo <= k-hi");
            const auto rows = hpforge::sweep_variance(network, args.k_lo, args.k_hi,
                                                      args.evaluations, seed);
            csv = hpforge::to_csv(std::span<const hpforge::SweepRow>(rows));
        } else {
            if (args.count_lo < 1 || args.count_hi < args.count_lo)
                throw hpforge::UsageError(
                    "--count-lo/--count-hi must satisfy 1 <= count-lo <= count-hi");
            std::vector<int> counts;
            for (int n = args.count_lo; n <= args.count_hi; ++n) counts.push_back(n);
            const auto rows = hpforge::convergence_vs_evaluations(
                network, std::span<const int>(counts), args.mu, seed);
            csv = hpforge::to_csv(std::span<const hpforge::ConvergenceRow>(rows));
        }
    } else {
        const auto betas = args.betas.empty()
                               ? std::vector<double>{0.0, 0.05, 0.1, 0.2}
                               : args.betas;
        for (const auto beta : betas)
            if (beta < 0.0 || beta > 1.0)
                throw hpforge::UsageError("--betas entries must lie in [0, 1]");
        hpforge::PlantedShape shape;
        shape.hosts_per_cluster = args.hosts_per_cluster;
        shape.fingerprint_dims = args.fingerprint_dims;
        shape.port_dims = args.port_dims;
        const auto rows = hpforge::k_recovery_histogram(
            args.true_k, std::span<const double>(betas), args.trials, args.evaluations,
            args.mu, seed, shape);
        csv = hpforge::to_csv(std::span<const hpforge::RecoveryRow>(rows));
    }

    hpforge::write_text_file(args.output, csv);
    const auto rows = std::count(csv.begin(), csv.end(), '\n') - 1;
    std::cerr << "wrote " << rows << " rows to " << args.output << "\n";
    return kExitOk;
}

int cmd_maintain(const MaintainArgs& args) {
    require_one_input(args.nmap_xml, args.inventory, args.scan_target);

    std::chrono::seconds interval{};
    try {
        interval = hpforge::parse_duration(args.interval);
    } catch (const hpforge::Error& e) {
        throw hpforge::UsageError(e.what());
    }
    if (interval < std::chrono::minutes(1))
        throw hpforge::UsageError("--interval must be at least one minute");
    if (args.cycles && *args.cycles < 1)
        throw hpforge::UsageError("--cycles must be at least 1");

    hpforge::MaintainOptions options;
    options.nmap_xml = to_optional_path(args.nmap_xml);
    options.inventory = to_optional_path(args.inventory);
    options.scan_target = to_optional(args.scan_target);
    options.out_dir = args.out_dir;
    options.interval = interval;
    options.cycles = args.cycles;
    options.mu = args.mu;
    options.n_evaluations = args.evaluations;
    options.k_max = args.k_max;
    options.n_honeypots = args.honeypots;
    options.seed = args.seed ? *args.seed : env_seed();
    options.personality_map = to_optional_path(args.personality_map);

    std::signal(SIGINT, handle_interrupt);
    std::signal(SIGTERM, handle_interrupt);
    const int code = hpforge::run_maintain(
        options, [] { return g_interrupted != 0; },
        [](const std::string& line) { std::cerr << line << "\n"; });
    if (g_interrupted) std::cerr << "interrupted; exiting\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"honeypot deployment planner: scan import, clustering, planning, honeyd "
                 "emission and evaluation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "hpforge 1.0.0");

    ImportArgs import_args;
    auto* import_cmd =
        app.add_subcommand("import", "ingest a scan into the native host inventory");
    import_cmd->add_option("--nmap-xml", import_args.nmap_xml, "scanner XML file to ingest");
    import_cmd->add_option("--inventory", import_args.inventory,
                           "native inventory JSON to re-validate");
    import_cmd->add_option("--scan", import_args.scan_target,
                           "run the scanner against this target (needs nmap on PATH)");
    import_cmd->add_option("-o,--out", import_args.output, "inventory JSON output path")
        ->required();

    ClusterArgs cluster_args;
    auto* cluster_cmd =
        app.add_subcommand("cluster", "group inventory hosts by fingerprint and open ports");
    cluster_cmd->add_option("--inventory", cluster_args.inventory, "inventory JSON input")
        ->required();
    cluster_cmd->add_option("--mu", cluster_args.mu, "variance-drop convergence threshold")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cluster_cmd
        ->add_option("--evaluations", cluster_args.evaluations,
                     "independent clustering runs per k")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cluster_cmd->add_option("--k-max", cluster_args.k_max, "largest cluster count to try")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cluster_cmd->add_option("--seed", cluster_args.seed, "random seed (default 0)");
    cluster_cmd->add_option("-o,--out", cluster_args.output, "clustering report output path")
        ->required();

    PlanArgs plan_args;
    auto* plan_cmd =
        app.add_subcommand("plan", "synthesize honeypot specs from a clustering report");
    plan_cmd->add_option("--inventory", plan_args.inventory, "inventory JSON input")
        ->required();
    plan_cmd->add_option("--clustering", plan_args.clustering, "clustering report input")
        ->required();
    plan_cmd->add_option("-n,--honeypots", plan_args.honeypots, "number of honeypots to plan")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    plan_cmd->add_option("--deploy-time", plan_args.deploy_time,
                         "deployment unix time (default: inventory scan time)");
    plan_cmd->add_option("--seed", plan_args.seed, "random seed (default 0)");
    plan_cmd->add_option("-o,--out", plan_args.output, "plan JSON output path")->required();

    EmitArgs emit_args;
    auto* emit_cmd = app.add_subcommand("emit", "render a plan as a honeyd configuration");
    emit_cmd->add_option("--plan", emit_args.plan, "plan JSON input")->required();
    emit_cmd->add_option("--personality-map", emit_args.personality_map,
                         "TAB-separated scanner-name to honeyd-personality map");
    emit_cmd->add_option("-o,--out", emit_args.output, "honeyd configuration output path")
        ->required();

    EvalArgs eval_args;
    auto* eval_cmd =
        app.add_subcommand("eval", "run a planted-network experiment and write its CSV");
    eval_cmd
        ->add_option("--experiment", eval_args.experiment,
                     "one of: sweep, recovery, convergence")
        ->required()
        ->check(CLI::IsMember({"sweep", "recovery", "convergence"}));
    eval_cmd->add_option("--true-k", eval_args.true_k, "planted cluster count")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    eval_cmd
        ->add_option("--hosts-per-cluster", eval_args.hosts_per_cluster,
                     "hosts per planted cluster")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    eval_cmd
        ->add_option("--fingerprint-dims", eval_args.fingerprint_dims,
                     "fingerprint dimensions")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    eval_cmd->add_option("--port-dims", eval_args.port_dims, "port dimensions")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    eval_cmd->add_option("--beta", eval_args.beta, "mutation rate for sweep/convergence")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    eval_cmd->add_option("--mu", eval_args.mu, "variance-drop convergence threshold")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    eval_cmd
        ->add_option("--evaluations", eval_args.evaluations,
                     "independent clustering runs per k")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    eval_cmd->add_option("--k-lo", eval_args.k_lo, "sweep: first k")->capture_default_str();
    eval_cmd->add_option("--k-hi", eval_args.k_hi, "sweep: last k")->capture_default_str();
    eval_cmd->add_option("--count-lo", eval_args.count_lo, "convergence: first count")
        ->capture_default_str();
    eval_cmd->add_option("--count-hi", eval_args.count_hi, "convergence: last count")
        ->capture_default_str();
    eval_cmd->add_option("--trials", eval_args.trials, "recovery: trials per beta")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    eval_cmd
        ->add_option("--betas", eval_args.betas,
                     "recovery: comma-separated mutation rates (default 0,0.05,0.1,0.2)")
        ->delimiter(',');
    eval_cmd->add_option("--seed", eval_args.seed, "random seed (default 0)");
    eval_cmd->add_option("-o,--out", eval_args.output, "CSV output path")->required();

    MaintainArgs maintain_args;
    auto* maintain_cmd = app.add_subcommand(
        "maintain", "re-run the whole pipeline on a schedule and report plan drift");
    maintain_cmd->add_option("--nmap-xml", maintain_args.nmap_xml,
                             "scanner XML re-read every cycle");
    maintain_cmd->add_option("--inventory", maintain_args.inventory,
                             "native inventory JSON re-read every cycle");
    maintain_cmd->add_option("--scan", maintain_args.scan_target,
                             "run the scanner against this target every cycle");
    maintain_cmd->add_option("--out-dir", maintain_args.out_dir, "artifact directory")
        ->required();
    maintain_cmd
        ->add_option("--interval", maintain_args.interval,
                     "time between cycles, at least 1m (forms: 90s, 5m, 1h)")
        ->capture_default_str();
    maintain_cmd->add_option("--cycles", maintain_args.cycles,
                             "stop after this many cycles (default: run until interrupted)");
    maintain_cmd->add_option("--mu", maintain_args.mu, "variance-drop convergence threshold")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    maintain_cmd
        ->add_option("--evaluations", maintain_args.evaluations,
                     "independent clustering runs per k")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    maintain_cmd->add_option("--k-max", maintain_args.k_max, "largest cluster count to try")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    maintain_cmd
        ->add_option("-n,--honeypots", maintain_args.honeypots,
                     "number of honeypots to plan per cycle")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    maintain_cmd->add_option("--seed", maintain_args.seed, "random seed (default 0)");
    maintain_cmd->add_option("--personality-map", maintain_args.personality_map,
                             "TAB-separated scanner-name to honeyd-personality map");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (import_cmd->parsed()) return cmd_import(import_args);
        if (cluster_cmd->parsed()) return cmd_cluster(cluster_args);
        if (plan_cmd->parsed()) return cmd_plan(plan_args);
        if (emit_cmd->parsed()) return cmd_emit(emit_args);
        if (eval_cmd->parsed()) return cmd_eval(eval_args);
        if (maintain_cmd->parsed()) return cmd_maintain(maintain_args);
    } catch (const hpforge::UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const hpforge::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
