// Acceptance gate for the honeypot planning toolchain. Runs ten independent
// checks — each prints exactly one [PASS]/[FAIL] line — and exits nonzero if
// any of them fail. argv[1] must be the path to the command-line binary; it
// is exercised by the end-to-end determinism check.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include "hpforge/clustering.hpp"
#include "hpforge/evaluation.hpp"
#include "hpforge/exporter.hpp"
#include "hpforge/inventory.hpp"
#include "hpforge/io.hpp"
#include "hpforge/planner.hpp"
#include "hpforge/rng.hpp"

using namespace hpforge;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = HPFORGE_FIXTURES_DIR;

int g_failures = 0;

void report(int number, bool ok, const std::string& label, const std::string& detail = "") {
    std::printf("[%s] %d: %s%s%s\n", ok ? "PASS" : "FAIL", number, label.c_str(),
                detail.empty() ? "" : " — ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

void run(int number, const std::string& label,
         const std::function<std::pair<bool, std::string>()>& check) {
    try {
        const auto [ok, detail] = check();
        report(number, ok, label, detail);
    } catch (const std::exception& e) {
        report(number, false, label, std::string("exception: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Shared helpers

FeatureVector random_vector(Rng& rng, const std::string& id, int df, int dp) {
    FeatureVector v;
    v.host_id = id;
    for (int d = 0; d < df; ++d)
        v.fingerprint_values.push_back(std::to_string(rng.bounded(5)));
    for (int d = 0; d < dp; ++d)
        v.port_flags.push_back(static_cast<std::uint8_t>(rng.bounded(2)));
    return v;
}

// Mismatch count computed without the library's distance function.
int naive_mismatches(const FeatureVector& a, const FeatureVector& b) {
    int count = 0;
    for (std::size_t d = 0; d < a.fingerprint_values.size(); ++d)
        if (a.fingerprint_values[d] != b.fingerprint_values[d]) ++count;
    for (std::size_t d = 0; d < a.port_flags.size(); ++d)
        if (a.port_flags[d] != b.port_flags[d]) ++count;
    return count;
}

// Variance of a fixed partition, with centroids recomputed from scratch
// using the same modal tie rules as the library but none of its code.
double partition_variance(const std::vector<FeatureVector>& vs,
                          const std::vector<int>& labels, int k) {
    const auto df = vs[0].fingerprint_values.size();
    const auto dp = vs[0].port_flags.size();
    long long ssd = 0;
    for (int c = 0; c < k; ++c) {
        std::vector<int> members;
        for (int i = 0; i < static_cast<int>(vs.size()); ++i)
            if (labels[i] == c) members.push_back(i);
        if (members.empty()) return -1.0;
        std::vector<std::string> mode_f(df);
        std::vector<int> mode_p(dp);
        for (std::size_t d = 0; d < df; ++d) {
            std::map<std::string, int> counts;
            for (const int m : members) counts[vs[m].fingerprint_values[d]]++;
            int best = 0;
            for (const auto& [value, n] : counts) best = std::max(best, n);
            const std::string* holder = nullptr;
            for (const int m : members)
                if (counts[vs[m].fingerprint_values[d]] == best &&
                    (!holder || vs[m].host_id < *holder)) {
                    holder = &vs[m].host_id;
                    mode_f[d] = vs[m].fingerprint_values[d];
                }
        }
        for (std::size_t d = 0; d < dp; ++d) {
            int open = 0;
            for (const int m : members) open += vs[m].port_flags[d];
            const int closed = static_cast<int>(members.size()) - open;
            if (open != closed) {
                mode_p[d] = open > closed;
            } else {
                const std::string* holder = nullptr;
                for (const int m : members)
                    if (!holder || vs[m].host_id < *holder) {
                        holder = &vs[m].host_id;
                        mode_p[d] = vs[m].port_flags[d];
                    }
            }
        }
        for (const int m : members) {
            long long d = 0;
            for (std::size_t i = 0; i < df; ++i) d += vs[m].fingerprint_values[i] != mode_f[i];
            for (std::size_t i = 0; i < dp; ++i) d += vs[m].port_flags[i] != mode_p[i];
            ssd += d * d;
        }
    }
    return static_cast<double>(ssd) / static_cast<double>(vs.size());
}

// Small clusterable instance: k prototypes, members copy a prototype with a
// 15 percent per-dimension perturbation.
std::vector<FeatureVector> small_instance(std::uint64_t seed, int& k_out) {
    Rng gen(seed);
    const int n = 2 + static_cast<int>(gen.bounded(7));
    const int k = 1 + static_cast<int>(gen.bounded(static_cast<std::uint64_t>(std::min(n, 3))));
    const int df = 2 + static_cast<int>(gen.bounded(3));
    const int dp = 2 + static_cast<int>(gen.bounded(4));
    std::vector<std::vector<std::string>> proto_f(k);
    std::vector<std::vector<std::uint8_t>> proto_p(k);
    for (int c = 0; c < k; ++c) {
        for (int d = 0; d < df; ++d) proto_f[c].push_back(std::to_string(gen.bounded(10)));
        for (int d = 0; d < dp; ++d)
            proto_p[c].push_back(static_cast<std::uint8_t>(gen.bounded(2)));
    }
    std::vector<FeatureVector> vs(n);
    for (int i = 0; i < n; ++i) {
        const int c = i % k;
        char id[8];
        std::snprintf(id, sizeof id, "h%02d", i);
        vs[i].host_id = id;
        for (int d = 0; d < df; ++d)
            vs[i].fingerprint_values.push_back(
                gen.chance(0.15) ? std::to_string(gen.bounded(10)) : proto_f[c][d]);
        for (int d = 0; d < dp; ++d)
            vs[i].port_flags.push_back(gen.chance(0.15)
                                           ? static_cast<std::uint8_t>(gen.bounded(2))
                                           : proto_p[c][d]);
    }
    k_out = k;
    return vs;
}

bool sweep_is_monotone(const std::vector<SweepRow>& rows) {
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].sigma > rows[i - 1].sigma + 1e-9) return false;
    return true;
}

// Mutated planted-5 network, the shared input of the sweep and convergence
// checks. The derivation chain is fixed so results are reproducible.
PlantedNetwork noisy_planted(std::uint64_t base, std::uint64_t run) {
    auto net = generate_planted(5, 10, 10, 16, derive_seed(base, run));
    MutationConfig config;
    config.beta = 0.05;
    config.seed = derive_seed(base, run, 1);
    return mutate(net, config);
}

// Cluster index (0-based) holding the given host id, or -1.
int cluster_of(const Clustering& clustering, const std::string& id) {
    for (std::size_t c = 0; c < clustering.clusters.size(); ++c) {
        const auto& members = clustering.clusters[c].member_ids;
        if (std::binary_search(members.begin(), members.end(), id))
            return static_cast<int>(c);
    }
    return -1;
}

std::string shell_quote(const fs::path& path) { return "\"" + path.string() + "\""; }

// ---------------------------------------------------------------------------
// Criteria

std::pair<bool, std::string> criterion_metric() {
    Rng rng(101);
    for (int i = 0; i < 100000; ++i) {
        const int df = 3 + static_cast<int>(rng.bounded(6));
        const int dp = 3 + static_cast<int>(rng.bounded(6));
        const auto a = random_vector(rng, "a", df, dp);
        const auto b = random_vector(rng, "b", df, dp);
        if (distance(a, b) != naive_mismatches(a, b))
            return {false, "disagrees with the mismatch counter on pair " + std::to_string(i)};
    }
    Rng axiom_rng(202);
    for (int i = 0; i < 10000; ++i) {
        const int df = 3 + static_cast<int>(axiom_rng.bounded(6));
        const int dp = 3 + static_cast<int>(axiom_rng.bounded(6));
        const auto a = random_vector(axiom_rng, "a", df, dp);
        const auto b = random_vector(axiom_rng, "b", df, dp);
        const auto c = random_vector(axiom_rng, "c", df, dp);
        if (distance(a, a) != 0) return {false, "identity fails on triple " + std::to_string(i)};
        if (distance(a, b) != distance(b, a))
            return {false, "symmetry fails on triple " + std::to_string(i)};
        if (distance(a, c) > distance(a, b) + distance(b, c))
            return {false, "triangle inequality fails on triple " + std::to_string(i)};
        if (distance(a, b) == 0 && a.fingerprint_values == b.fingerprint_values &&
            a.port_flags != b.port_flags)
            return {false, "zero distance on distinct vectors at triple " + std::to_string(i)};
    }
    return {true, "100000 pairs, 10000 triples"};
}

std::pair<bool, std::string> criterion_small_optimality() {
    int misses = 0;
    for (std::uint64_t instance = 0; instance < 50; ++instance) {
        int k = 0;
        const auto vs = small_instance(derive_seed(0, instance), k);
        const int n = static_cast<int>(vs.size());

        double best = -1.0;
        std::vector<int> labels(n);
        long long total = 1;
        for (int i = 0; i < n; ++i) total *= k;
        for (long long code = 0; code < total; ++code) {
            long long rest = code;
            bool used[3] = {false, false, false};
            for (int i = 0; i < n; ++i) {
                labels[i] = static_cast<int>(rest % k);
                used[labels[i]] = true;
                rest /= k;
            }
            bool all_used = true;
            for (int j = 0; j < k; ++j) all_used = all_used && used[j];
            if (!all_used) continue;
            const double v = partition_variance(vs, labels, k);
            if (best < 0.0 || v < best) best = v;
        }

        const auto got = kmeans_best_of(vs, k, 64, derive_seed(0, instance, 1));
        if (got.total_variance != best) ++misses;
    }
    return {misses == 0, "50 instances, " + std::to_string(misses) + " above the optimum"};
}

std::pair<bool, std::string> criterion_planted_recovery() {
    const std::vector<double> betas{0.0, 0.05};
    const auto rows = k_recovery_histogram(5, betas, 100, 15, 0.68, 4, PlantedShape{});
    int exact_at_0 = 0;
    int exact_at_05 = 0;
    for (const auto& row : rows) {
        if (row.beta == 0.0 && row.chosen_k == 5) exact_at_0 = row.count;
        if (row.beta == 0.05 && row.chosen_k == 5) exact_at_05 = row.count;
    }
    const bool ok = exact_at_0 == 100 && exact_at_05 >= 70;
    return {ok, "k=5 in " + std::to_string(exact_at_0) + "/100 at beta 0 and " +
                    std::to_string(exact_at_05) + "/100 at beta 0.05"};
}

std::pair<bool, std::string> criterion_sweep_monotonicity() {
    int violations_at_15 = 0;
    int violations_at_1 = 0;
    for (std::uint64_t run = 0; run < 20; ++run) {
        const auto net = noisy_planted(0, run);
        if (!sweep_is_monotone(sweep_variance(net, 1, 10, 15, derive_seed(0, run, 2))))
            ++violations_at_15;
        if (!sweep_is_monotone(sweep_variance(net, 1, 10, 1, derive_seed(0, run, 2))))
            ++violations_at_1;
    }
    const bool ok = violations_at_15 <= 1 && violations_at_1 >= 1;
    return {ok, std::to_string(20 - violations_at_15) +
                    "/20 monotone with 15 evaluations, " + std::to_string(violations_at_1) +
                    " fluctuating runs with 1"};
}

std::pair<bool, std::string> criterion_convergence_stability() {
    int stable = 0;
    for (std::uint64_t run = 0; run < 20; ++run) {
        const auto net = noisy_planted(0, run);
        std::vector<int> counts;
        for (int n = 1; n <= 20; ++n) counts.push_back(n);
        const auto rows = convergence_vs_evaluations(net, counts, 0.68, derive_seed(0, run, 2));
        const int final_k = rows.back().chosen_k;
        int stable_from = 20;
        for (int i = 19; i >= 0; --i) {
            if (rows[i].chosen_k != final_k) break;
            stable_from = i + 1;
        }
        if (stable_from <= 15) ++stable;
    }
    return {stable >= 18, std::to_string(stable) + "/20 seeds settle by 15 evaluations"};
}

std::pair<bool, std::string> criterion_case_study() {
    const auto inventory = load_inventory(kFixtures / "lab31_inventory.json");
    const auto schema = build_schema(inventory);
    const auto vectors = vectorize(inventory, schema);
    const auto selection = select_k(vectors, 0.68, 15, 20, 0);
    const auto& clustering = selection.clustering;
    if (clustering.k != 5) return {false, "chose k=" + std::to_string(clustering.k)};

    std::vector<std::size_t> sizes;
    for (const auto& cluster : clustering.clusters) sizes.push_back(cluster.size());
    std::sort(sizes.rbegin(), sizes.rend());
    if (sizes != std::vector<std::size_t>{12, 9, 4, 4, 2})
        return {false, "cluster sizes do not match the expected composition"};

    // Ground-truth composition of the fixture: each system's machines must
    // land in one cluster (row sums 12, 9, 4, 4, 2 after the strays join
    // their nearest prototype group).
    const std::map<std::string, std::vector<int>> systems = {
        {"pi-like", {20, 21, 22, 23, 24, 25, 26, 27, 28, 29, 30}},
        {"win10-like", {60, 61, 62, 63, 64, 65, 66}},
        {"server-like", {10, 11, 12, 13}},
        {"embedded-like", {70, 71, 72, 73}},
        {"router-like", {3, 4}},
    };
    std::set<int> used_clusters;
    for (const auto& [label, octets] : systems) {
        std::set<int> hit;
        for (const int octet : octets)
            hit.insert(cluster_of(clustering, "192.168.1." + std::to_string(octet)));
        if (hit.size() != 1 || hit.count(-1))
            return {false, label + " machines are split across clusters"};
        used_clusters.insert(*hit.begin());
    }
    if (used_clusters.size() != 5)
        return {false, "two system groups merged into one cluster"};
    return {true, "k=5, sizes 12/9/4/4/2, all five system groups intact"};
}

std::pair<bool, std::string> criterion_halving_rule() {
    const std::vector<std::size_t> sizes{12, 9, 4, 4, 2};
    const auto picks = rank_and_pick(sizes, 3);
    const bool ok = picks == std::vector<int>{1, 2, 1};
    std::string got = "picks";
    for (const auto pick : picks) got += " " + std::to_string(pick);
    return {ok, got};
}

std::pair<bool, std::string> criterion_clone_indistinguishability() {
    for (std::uint64_t i = 0; i < 100; ++i) {
        const int true_k = 2 + static_cast<int>(i % 5);
        const int hosts_per_cluster = 3 + static_cast<int>(i % 4);
        const auto net =
            generate_planted(true_k, hosts_per_cluster, 10, 16, derive_seed(8, i));
        const auto schema = build_schema(net.inventory);
        const auto vectors = vectorize(net.inventory, schema);
        const auto k_max = std::min<int>(static_cast<int>(vectors.size()), 20);
        const auto selection = select_k(vectors, 0.68, 15, k_max, derive_seed(8, i, 1));

        const int n_honeypots = 1 + static_cast<int>(i % 5);
        const auto plan = build_plan(selection.clustering, net.inventory, n_honeypots,
                                     net.inventory.scan_time, derive_seed(8, i, 2));

        auto extended = net.inventory;
        for (const auto& spec : plan.specs) {
            HostRecord decoy;
            decoy.id = spec.name;
            decoy.ipv4 = spec.ipv4;
            decoy.mac = spec.mac;
            decoy.uptime_seconds = spec.uptime_seconds;
            decoy.scan_time = net.inventory.scan_time;
            decoy.open_tcp_ports = spec.open_tcp_ports;
            decoy.fingerprint = spec.fingerprint;
            if (spec.personality_label != "unknown") decoy.os_label = spec.personality_label;
            extended.hosts.push_back(decoy);
        }
        validate(extended);

        const auto schema2 = build_schema(extended);
        const auto vectors2 = vectorize(extended, schema2);
        const auto reclustered =
            kmeans_best_of(vectors2, selection.clustering.k, 15, derive_seed(8, i, 3));

        std::map<std::string, const FeatureVector*> by_id;
        for (const auto& v : vectors2) by_id[v.host_id] = &v;
        for (const auto& spec : plan.specs) {
            if (distance(*by_id.at(spec.name), *by_id.at(spec.template_host_id)) != 0)
                return {false, "honeypot differs from its template in inventory " +
                                   std::to_string(i)};
            if (cluster_of(reclustered, spec.name) !=
                cluster_of(reclustered, spec.template_host_id))
                return {false, "honeypot strayed from its template's cluster in inventory " +
                                   std::to_string(i)};
        }
    }
    return {true, "100 inventories, every honeypot at distance 0 in its template's cluster"};
}

std::pair<bool, std::string> criterion_exporter_golden() {
    const auto plan = load_plan(kFixtures / "lab31_plan.json");
    const auto document = render_honeyd(plan, PersonalityMap{});
    const auto golden = read_text_file(kFixtures / "golden_honeyd.conf");
    if (document.text() != golden) return {false, "rendered bytes differ from the golden file"};

    const std::vector<std::regex> grammar = {
        std::regex(R"(create hp\d+)"),
        std::regex(R"(set hp\d+ personality "[^"]+")"),
        std::regex(R"(set hp\d+ default tcp action reset)"),
        std::regex(R"(add hp\d+ tcp port \d+ open)"),
        std::regex(R"(set hp\d+ ethernet "[0-9a-f]{2}(:[0-9a-f]{2}){5}")"),
        std::regex(R"(set hp\d+ uptime \d+)"),
        std::regex(R"(bind \d{1,3}(\.\d{1,3}){3} hp\d+)"),
        std::regex(R"()"),
    };
    int line_number = 0;
    for (const auto& line : document.lines) {
        ++line_number;
        bool matched = false;
        for (const auto& rule : grammar)
            if (std::regex_match(line, rule)) {
                matched = true;
                break;
            }
        if (!matched)
            return {false, "line " + std::to_string(line_number) + " is outside the grammar: " +
                               line};
    }
    return {true, std::to_string(line_number) + " lines, all inside the directive grammar"};
}

std::pair<bool, std::string> criterion_end_to_end_determinism(const std::string& cli) {
    const auto root = fs::temp_directory_path() / "hpforge-acceptance";
    fs::remove_all(root);
    for (const auto* run : {"a", "b"}) {
        const auto dir = root / run;
        fs::create_directories(dir);
        const std::vector<std::string> commands = {
            cli + " import --nmap-xml " + shell_quote(kFixtures / "lab31.xml") + " -o " +
                shell_quote(dir / "inventory.json"),
            cli + " cluster --inventory " + shell_quote(dir / "inventory.json") + " --seed 0 -o " +
                shell_quote(dir / "clustering.json"),
            cli + " plan --inventory " + shell_quote(dir / "inventory.json") + " --clustering " +
                shell_quote(dir / "clustering.json") + " -n 3 --seed 0 -o " +
                shell_quote(dir / "plan.json"),
            cli + " emit --plan " + shell_quote(dir / "plan.json") + " -o " +
                shell_quote(dir / "honeyd.conf"),
        };
        for (const auto& command : commands) {
            const auto muted = command + " >/dev/null 2>&1";
            if (std::system(muted.c_str()) != 0)
                return {false, "pipeline stage failed: " + command};
        }
    }
    for (const auto* name : {"inventory.json", "clustering.json", "plan.json", "honeyd.conf"})
        if (read_text_file(root / "a" / name) != read_text_file(root / "b" / name))
            return {false, std::string(name) + " differs between identical runs"};
    fs::remove_all(root);
    return {true, "4 artifacts byte-identical across two seeded runs"};
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: acceptance <path-to-cli-binary>\n");
        return 2;
    }
    const std::string cli = shell_quote(argv[1]);

    run(1, "pairwise distance equals the independent mismatch count and is a metric",
        criterion_metric);
    run(2, "best-of-64 clustering reaches the exhaustive optimum on small instances",
        criterion_small_optimality);
    run(3, "cluster count recovery on planted-5 networks", criterion_planted_recovery);
    run(4, "variance sweeps are monotone with 15 evaluations and fluctuate with 1",
        criterion_sweep_monotonicity);
    run(5, "chosen k settles by 15 evaluations on noisy planted-5 networks",
        criterion_convergence_stability);
    run(6, "31-host case study clusters into the expected five system groups",
        criterion_case_study);
    run(7, "halving rule picks [1, 2, 1] from sizes [12, 9, 4, 4, 2]", criterion_halving_rule);
    run(8, "honeypots are indistinguishable from their template hosts",
        criterion_clone_indistinguishability);
    run(9, "committed plan renders byte-identically to the golden honeyd file",
        criterion_exporter_golden);
    run(10, "full pipeline is byte-deterministic end to end",
        [&] { return criterion_end_to_end_determinism(cli); });

    if (g_failures > 0) {
        std::printf("%d of 10 criteria failed\n", g_failures);
        return 1;
    }
    std::printf("all 10 criteria passed\n");
    return 0;
}
