#include "hpforge/evaluation.hpp"

#include <algorithm>

#include "hpforge/errors.hpp"
#include "hpforge/format.hpp"
#include "hpforge/rng.hpp"

namespace hpforge {

namespace {

constexpr std::int64_t kSyntheticScanTime = 1700000000;
constexpr int kPrototypeRedrawBudget = 10000;

struct Prototype {
    std::vector<std::string> fingerprint;  // one digit per dimension
    std::vector<std::uint8_t> ports;
};

int prototype_distance(const Prototype& a, const Prototype& b) {
    int d = 0;
    for (std::size_t i = 0; i < a.fingerprint.size(); ++i)
        d += a.fingerprint[i] != b.fingerprint[i];
    for (std::size_t i = 0; i < a.ports.size(); ++i) d += a.ports[i] != b.ports[i];
    return d;
}

std::string attr_name(int dim) {
    std::string n = std::to_string(dim);
    if (n.size() < 2) n.insert(0, "0");
    return "f" + n;
}

std::string host_name(int index) {
    std::string n = std::to_string(index);
    while (n.size() < 4) n.insert(0, "0");
    return "h" + n;
}

int effective_k_max(std::size_t n_hosts) {
    return static_cast<int>(std::min<std::size_t>(n_hosts, 20));
}

}  // namespace

std::vector<std::string> default_mutation_alphabet() {
    std::vector<std::string> a;
    for (int digit = 0; digit <= 9; ++digit) a.push_back(std::to_string(digit));
    return a;
}

PlantedNetwork generate_planted(int true_k, int hosts_per_cluster, int n_fingerprint_dims,
                                int n_port_dims, std::uint64_t seed) {
    if (true_k < 1 || hosts_per_cluster < 1 || n_fingerprint_dims < 1 || n_port_dims < 1)
        throw Error("planted network counts must all be at least 1");
    if (true_k > 250) throw Error("at most 250 planted clusters are supported");
    if (hosts_per_cluster > 254)
        throw Error("at most 254 hosts per planted cluster are supported");
    if (n_fingerprint_dims > 99) throw Error("at most 99 fingerprint dimensions are supported");

    const double separation =
        std::max(3.0, static_cast<double>(n_fingerprint_dims + n_port_dims) / 4.0);

    Rng rng(seed);
    std::vector<Prototype> prototypes;
    int redraws = 0;
    while (prototypes.size() < static_cast<std::size_t>(true_k)) {
        Prototype p;
        for (int d = 0; d < n_fingerprint_dims; ++d)
            p.fingerprint.push_back(std::to_string(rng.bounded(10)));
        for (int d = 0; d < n_port_dims; ++d)
            p.ports.push_back(static_cast<std::uint8_t>(rng.bounded(2)));

        const bool separated =
            std::all_of(prototypes.begin(), prototypes.end(), [&](const Prototype& q) {
                return prototype_distance(p, q) >= separation;
            });
        if (separated) {
            prototypes.push_back(std::move(p));
        } else if (++redraws > kPrototypeRedrawBudget) {
            throw Error("could not separate " + std::to_string(true_k) +
                        " prototypes; increase the number of dimensions");
        }
    }

    PlantedNetwork network;
    network.true_k = true_k;
    network.inventory.source = "synthetic";
    network.inventory.scan_time = kSyntheticScanTime;

    int host_index = 0;
    for (int c = 1; c <= true_k; ++c) {
        const auto& proto = prototypes[static_cast<std::size_t>(c - 1)];
        const auto cluster_uptime_base = derive_seed(seed, static_cast<std::uint64_t>(c), 3) %
                                         static_cast<std::uint64_t>(30 * 86400);
        for (int i = 0; i < hosts_per_cluster; ++i, ++host_index) {
            HostRecord host;
            host.id = host_name(host_index);
            host.scan_time = kSyntheticScanTime;
            host.ipv4 = Ipv4{(10u << 24) | (static_cast<std::uint32_t>(c) << 8) |
                             static_cast<std::uint32_t>(i + 1)};
            host.mac = Mac{{0x02, 0x00, static_cast<std::uint8_t>(c),
                            0x00, static_cast<std::uint8_t>((i + 1) >> 8),
                            static_cast<std::uint8_t>((i + 1) & 0xff)}};
            host.uptime_seconds = cluster_uptime_base + static_cast<std::uint64_t>(i) * 60;
            for (int d = 0; d < n_fingerprint_dims; ++d)
                host.fingerprint[attr_name(d)] = proto.fingerprint[static_cast<std::size_t>(d)];
            for (int d = 0; d < n_port_dims; ++d)
                if (proto.ports[static_cast<std::size_t>(d)])
                    host.open_tcp_ports.push_back(static_cast<std::uint16_t>(1000 + d));
            network.true_assignment[host.id] = c;
            network.inventory.hosts.push_back(std::move(host));
        }
    }
    return network;
}

PlantedNetwork mutate(const PlantedNetwork& network, const MutationConfig& config) {
    if (config.beta < 0.0 || config.beta > 1.0) throw Error("beta must lie in [0, 1]");
    if (config.alphabet.empty()) throw Error("mutation alphabet must not be empty");

    PlantedNetwork out = network;
    Rng rng(config.seed);
    for (auto& host : out.inventory.hosts) {
        for (auto& [attr, value] : host.fingerprint) {
            if (rng.chance(config.beta))
                value = config.alphabet[rng.bounded(config.alphabet.size())];
        }
        // Open ports close with probability beta; closed ports never open.
        std::vector<std::uint16_t> kept;
        kept.reserve(host.open_tcp_ports.size());
        for (const auto port : host.open_tcp_ports)
            if (!rng.chance(config.beta)) kept.push_back(port);
        host.open_tcp_ports = std::move(kept);
    }
    return out;
}

std::vector<SweepRow> sweep_variance(const PlantedNetwork& network, int k_lo, int k_hi,
                                     int n_evaluations, std::uint64_t seed) {
    if (k_lo < 1 || k_hi < k_lo) throw Error("invalid k range");
    const auto schema = build_schema(network.inventory);
    const auto vectors = vectorize(network.inventory, schema);
    const int k_cap = static_cast<int>(vectors.size());

    std::vector<SweepRow> rows;
    for (int k = k_lo; k <= std::min(k_hi, k_cap); ++k) {
        const auto clustering = kmeans_best_of(vectors, k, n_evaluations, seed);
        rows.push_back(SweepRow{k, clustering.total_variance});
    }
    return rows;
}

std::vector<RecoveryRow> k_recovery_histogram(int true_k, std::span<const double> betas,
                                              int trials, int n_evaluations, double mu,
                                              std::uint64_t seed, const PlantedShape& shape) {
    if (trials < 1) throw Error("trials must be at least 1");

    std::vector<RecoveryRow> rows;
    for (std::size_t b = 0; b < betas.size(); ++b) {
        std::map<int, int> tally;
        for (int trial = 0; trial < trials; ++trial) {
            const auto trial_seed =
                derive_seed(seed, static_cast<std::uint64_t>(b), static_cast<std::uint64_t>(trial));
            auto network = generate_planted(true_k, shape.hosts_per_cluster,
                                            shape.fingerprint_dims, shape.port_dims,
                                            derive_seed(trial_seed, 1));
            MutationConfig config;
            config.beta = betas[b];
            config.seed = derive_seed(trial_seed, 2);
            network = mutate(network, config);

            const auto schema = build_schema(network.inventory);
            const auto vectors = vectorize(network.inventory, schema);
            const auto selection = select_k(vectors, mu, n_evaluations,
                                            effective_k_max(vectors.size()),
                                            derive_seed(trial_seed, 3));
            ++tally[selection.trace.chosen_k];
        }
        for (const auto& [chosen_k, count] : tally)
            rows.push_back(RecoveryRow{betas[b], chosen_k, count});
    }
    return rows;
}

std::vector<ConvergenceRow> convergence_vs_evaluations(const PlantedNetwork& network,
                                                       std::span<const int> evaluation_counts,
                                                       double mu, std::uint64_t seed) {
    const auto schema = build_schema(network.inventory);
    const auto vectors = vectorize(network.inventory, schema);

    std::vector<ConvergenceRow> rows;
    for (const auto n : evaluation_counts) {
        if (n < 1) throw Error("evaluation counts must be at least 1");
        const auto selection =
            select_k(vectors, mu, n, effective_k_max(vectors.size()), seed);
        rows.push_back(ConvergenceRow{n, selection.trace.chosen_k});
    }
    return rows;
}

std::string to_csv(std::span<const SweepRow> rows) {
    std::string out = "k,sigma\n";
    for (const auto& row : rows)
        out += std::to_string(row.k) + "," + format_double(row.sigma) + "\n";
    return out;
}

std::string to_csv(std::span<const RecoveryRow> rows) {
    std::string out = "beta,chosen_k,count\n";
    for (const auto& row : rows)
        out += format_double(row.beta) + "," + std::to_string(row.chosen_k) + "," +
               std::to_string(row.count) + "\n";
    return out;
}

std::string to_csv(std::span<const ConvergenceRow> rows) {
    std::string out = "n_evaluations,chosen_k\n";
    for (const auto& row : rows)
        out += std::to_string(row.n_evaluations) + "," + std::to_string(row.chosen_k) + "\n";
    return out;
}

}  // namespace hpforge
