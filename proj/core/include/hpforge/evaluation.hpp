#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hpforge/clustering.hpp"
#include "hpforge/inventory.hpp"

namespace hpforge {

std::vector<std::string> default_mutation_alphabet();  // "0" .. "9"

// Per-feature mutation model for synthetic databases. With probability beta a
// fingerprint value is redrawn uniformly from the alphabet (possibly onto
// itself) and an open port is closed; closed ports never mutate.
struct MutationConfig {
    double beta = 0.0;
    std::vector<std::string> alphabet = default_mutation_alphabet();
    std::uint64_t seed = 0;
};

// Synthetic inventory with known ground-truth cluster labels (1-based).
struct PlantedNetwork {
    Inventory inventory;
    int true_k = 0;
    std::map<std::string, int> true_assignment;
};

// Sizing of a generated network; the defaults roughly match a scanner's
// attribute count plus a small port universe.
struct PlantedShape {
    int hosts_per_cluster = 10;
    int fingerprint_dims = 10;
    int port_dims = 16;
};

// Draws true_k prototype vectors (fingerprint dimensions uniform over the
// digit alphabet, ports open with probability one half), redrawing until all
// pairwise prototype distances reach max(3, dims/4), then fills each cluster
// with exact copies of its prototype. Address, MAC and uptime fields are
// derived deterministically from the seed.
PlantedNetwork generate_planted(int true_k, int hosts_per_cluster, int n_fingerprint_dims,
                                int n_port_dims, std::uint64_t seed);

PlantedNetwork mutate(const PlantedNetwork& network, const MutationConfig& config);

struct SweepRow {
    int k = 0;
    double sigma = 0.0;
};

struct RecoveryRow {
    double beta = 0.0;
    int chosen_k = 0;
    int count = 0;
};

struct ConvergenceRow {
    int n_evaluations = 0;
    int chosen_k = 0;
};

// Sigma-versus-k table over k in [k_lo, k_hi] (clamped to the host count).
std::vector<SweepRow> sweep_variance(const PlantedNetwork& network, int k_lo, int k_hi,
                                     int n_evaluations, std::uint64_t seed);

// Repeated generate -> mutate -> select_k runs; tallies the chosen cluster
// count per mutation rate.
std::vector<RecoveryRow> k_recovery_histogram(int true_k, std::span<const double> betas,
                                              int trials, int n_evaluations, double mu,
                                              std::uint64_t seed,
                                              const PlantedShape& shape = {});

// Chosen cluster count as a function of the evaluation budget. The same base
// seed feeds every budget, so the restart families are nested.
std::vector<ConvergenceRow> convergence_vs_evaluations(const PlantedNetwork& network,
                                                       std::span<const int> evaluation_counts,
                                                       double mu, std::uint64_t seed);

// CSV emission, one header row, LF endings.
std::string to_csv(std::span<const SweepRow> rows);         // k,sigma
std::string to_csv(std::span<const RecoveryRow> rows);      // beta,chosen_k,count
std::string to_csv(std::span<const ConvergenceRow> rows);   // n_evaluations,chosen_k

}  // namespace hpforge
