#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hpforge/inventory.hpp"

namespace hpforge {

// Per-dimension modal values of a cluster's members. Same dimension layout as
// the FeatureVectors it was computed from.
struct Centroid {
    std::vector<std::string> fingerprint_values;
    std::vector<std::uint8_t> port_flags;
};

struct Cluster {
    std::vector<std::string> member_ids;  // sorted, non-empty
    Centroid centroid;
    double variance = 0.0;                // mean squared member-to-centroid distance
    std::string representative_id;        // medoid

    std::size_t size() const { return member_ids.size(); }
};

// A full partition of the input vectors for one k. Clusters are ordered by
// descending size (ties by smallest member id), so clusters[0] is always the
// biggest group; user-facing cluster numbers are 1-based positions herein.
struct Clustering {
    int k = 0;
    std::vector<Cluster> clusters;
    double total_variance = 0.0;  // mean squared distance per entity
    int restarts_used = 1;
    std::uint64_t rng_seed = 0;
};

// The sigma-versus-k record behind a dynamic-k selection.
struct KSelectionTrace {
    std::vector<std::pair<int, double>> sigma_by_k;  // k ascending from 1
    int chosen_k = 0;
    double mu = 0.0;
    bool converged = false;  // false when k_max was hit without triggering
};

struct KSelection {
    Clustering clustering;
    KSelectionTrace trace;
};

// Optional per-run diagnostics from a single Lloyd-style run. The iteration
// loop descends the mean plain distance (cost_per_iteration); the squared
// variance is reported alongside but may blip upward when a modal centroid
// update trades squared error for plain error.
struct LloydStats {
    std::vector<double> cost_per_iteration;      // mean distance, non-increasing
    std::vector<double> variance_per_iteration;  // mean squared distance
    int iterations = 0;
};

// Binary Manhattan metric: counts the dimensions (fingerprint attributes plus
// port flags) where the two sides differ. Throws Error when the dimension
// counts do not match.
int distance(const FeatureVector& x, const FeatureVector& y);
int distance(const FeatureVector& x, const Centroid& c);

// One seeded k-means run adapted to categorical data: Forgy initialization
// over k distinct input vectors, nearest-centroid assignment (ties to the
// lowest cluster index), per-dimension modal centroid update (ties to the
// value held by the lexicographically smallest member id), emptied clusters
// reseeded with the farthest member of the largest cluster. Deterministic in
// (vectors, k, seed).
Clustering kmeans_once(std::span<const FeatureVector> vectors, int k, std::uint64_t seed,
                       LloydStats* stats = nullptr);

// Restart heuristic: runs kmeans_once with sub-seeds seed+0 .. seed+(n-1) and
// keeps the run with the smallest total variance (ties to the lowest
// sub-seed index).
Clustering kmeans_best_of(std::span<const FeatureVector> vectors, int k, int n_evaluations,
                          std::uint64_t seed);

// Convergence heuristic for the cluster count: sweeps k = 1, 2, ... and stops
// at the first k whose variance improvement over k-1 falls below mu,
// returning the clustering for k-1. Hits k_max with converged=false when no
// k triggers the criterion.
KSelection select_k(std::span<const FeatureVector> vectors, double mu, int n_evaluations,
                    int k_max, std::uint64_t seed);

// The member minimizing the summed distance to all other members; ties go to
// the lexicographically smallest host id.
std::string medoid_of(const Cluster& cluster, std::span<const FeatureVector> vectors);

// Report persistence: clustering plus its selection trace as one JSON
// document (centroid values are not part of the report).
struct ClusteringReport {
    Clustering clustering;
    KSelectionTrace trace;
};

std::string to_json_text(const ClusteringReport& report);
ClusteringReport report_from_json_text(std::string_view text);
void save_report(const ClusteringReport& report, const std::filesystem::path& path);
ClusteringReport load_report(const std::filesystem::path& path);

}  // namespace hpforge
