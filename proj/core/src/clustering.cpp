#include "hpforge/clustering.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>

#include "hpforge/errors.hpp"
#include "hpforge/rng.hpp"

namespace hpforge {

namespace {

constexpr int kMaxLloydIterations = 100;

void check_same_shape(const FeatureVector& x, std::size_t fp_dims, std::size_t port_dims) {
    if (x.fingerprint_values.size() != fp_dims || x.port_flags.size() != port_dims)
        throw Error("schema mismatch: feature vectors have different dimension counts");
}

// Members of one cluster as indices into the input span.
using Members = std::vector<std::size_t>;

Centroid centroid_of_vector(const FeatureVector& v) {
    return Centroid{v.fingerprint_values, v.port_flags};
}

// Modal value for one dimension. Among the members whose value has maximal
// count, the one with the lexicographically smallest host id supplies the
// value; for binary port flags this reduces to "majority, ties follow the
// smallest-id member".
template <typename Value, typename Getter>
Value modal_value(const Members& members, std::span<const FeatureVector> vectors, Getter get) {
    std::map<Value, int> counts;
    for (const auto idx : members) ++counts[get(vectors[idx])];
    int best = 0;
    for (const auto& [value, count] : counts) best = std::max(best, count);

    const std::string* best_id = nullptr;
    const Value* best_value = nullptr;
    for (const auto idx : members) {
        const auto& v = vectors[idx];
        if (counts[get(v)] != best) continue;
        if (best_id == nullptr || v.host_id < *best_id) {
            best_id = &v.host_id;
            best_value = &get(vectors[idx]);
        }
    }
    return *best_value;
}

Centroid compute_centroid(const Members& members, std::span<const FeatureVector> vectors) {
    const auto& first = vectors[members.front()];
    Centroid c;
    c.fingerprint_values.reserve(first.fingerprint_values.size());
    for (std::size_t d = 0; d < first.fingerprint_values.size(); ++d) {
        c.fingerprint_values.push_back(modal_value<std::string>(
            members, vectors,
            [d](const FeatureVector& v) -> const std::string& { return v.fingerprint_values[d]; }));
    }
    c.port_flags.reserve(first.port_flags.size());
    for (std::size_t d = 0; d < first.port_flags.size(); ++d) {
        c.port_flags.push_back(modal_value<std::uint8_t>(
            members, vectors,
            [d](const FeatureVector& v) -> const std::uint8_t& { return v.port_flags[d]; }));
    }
    return c;
}

std::vector<Members> members_by_cluster(const std::vector<int>& assignment, int k) {
    std::vector<Members> members(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < assignment.size(); ++i)
        members[static_cast<std::size_t>(assignment[i])].push_back(i);
    return members;
}

// Sum over all vectors of the squared distance to their assigned centroid.
// Accumulated as an integer so that equal partitions always produce
// bit-identical variance values.
std::uint64_t squared_error(std::span<const FeatureVector> vectors, const std::vector<int>& assignment,
                            const std::vector<Centroid>& centroids) {
    std::uint64_t sum = 0;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        const auto d = distance(vectors[i], centroids[static_cast<std::size_t>(assignment[i])]);
        sum += static_cast<std::uint64_t>(d) * static_cast<std::uint64_t>(d);
    }
    return sum;
}

// Sum of plain distances to the assigned centroid: the quantity a modal
// centroid update actually minimizes.
std::uint64_t plain_error(std::span<const FeatureVector> vectors, const std::vector<int>& assignment,
                          const std::vector<Centroid>& centroids) {
    std::uint64_t sum = 0;
    for (std::size_t i = 0; i < vectors.size(); ++i)
        sum += static_cast<std::uint64_t>(
            distance(vectors[i], centroids[static_cast<std::size_t>(assignment[i])]));
    return sum;
}

// Moves one member into each emptied cluster: the farthest member (ties to
// the smallest host id) of the currently largest cluster (ties to the lowest
// index), measured from that cluster's centroid.
void repair_empty_clusters(std::span<const FeatureVector> vectors, const std::vector<Centroid>& centroids,
                           std::vector<int>& assignment, int k) {
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (const auto a : assignment) ++counts[static_cast<std::size_t>(a)];

    for (int empty = 0; empty < k; ++empty) {
        if (counts[static_cast<std::size_t>(empty)] != 0) continue;

        std::size_t largest = 0;
        for (std::size_t c = 1; c < counts.size(); ++c)
            if (counts[c] > counts[largest]) largest = c;

        std::size_t victim = std::numeric_limits<std::size_t>::max();
        int victim_distance = -1;
        for (std::size_t i = 0; i < assignment.size(); ++i) {
            if (assignment[i] != static_cast<int>(largest)) continue;
            const int d = distance(vectors[i], centroids[largest]);
            const bool farther = d > victim_distance;
            const bool tie_smaller_id =
                d == victim_distance && vectors[i].host_id < vectors[victim].host_id;
            if (farther || tie_smaller_id) {
                victim = i;
                victim_distance = d;
            }
        }
        assignment[victim] = empty;
        --counts[largest];
        ++counts[static_cast<std::size_t>(empty)];
    }
}

std::vector<int> assign_to_nearest(std::span<const FeatureVector> vectors,
                                   const std::vector<Centroid>& centroids) {
    std::vector<int> assignment(vectors.size(), 0);
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        int best = 0;
        int best_distance = distance(vectors[i], centroids[0]);
        for (std::size_t c = 1; c < centroids.size(); ++c) {
            const int d = distance(vectors[i], centroids[c]);
            if (d < best_distance) {
                best = static_cast<int>(c);
                best_distance = d;
            }
        }
        assignment[i] = best;
    }
    return assignment;
}

std::string medoid_of_members(const Members& members, std::span<const FeatureVector> vectors) {
    std::size_t best = members.front();
    long long best_sum = std::numeric_limits<long long>::max();
    for (const auto candidate : members) {
        long long sum = 0;
        for (const auto other : members)
            if (other != candidate) sum += distance(vectors[candidate], vectors[other]);
        const bool better = sum < best_sum;
        const bool tie_smaller_id = sum == best_sum && vectors[candidate].host_id < vectors[best].host_id;
        if (better || tie_smaller_id) {
            best = candidate;
            best_sum = sum;
        }
    }
    return vectors[best].host_id;
}

Clustering package(std::span<const FeatureVector> vectors, const std::vector<int>& assignment,
                   std::vector<Centroid> centroids, int k, std::uint64_t seed) {
    Clustering result;
    result.k = k;
    result.rng_seed = seed;

    const auto members = members_by_cluster(assignment, k);
    std::uint64_t total_sq = 0;
    for (int c = 0; c < k; ++c) {
        const auto& idxs = members[static_cast<std::size_t>(c)];
        Cluster cluster;
        cluster.centroid = std::move(centroids[static_cast<std::size_t>(c)]);
        std::uint64_t sq = 0;
        for (const auto i : idxs) {
            const auto d = distance(vectors[i], cluster.centroid);
            sq += static_cast<std::uint64_t>(d) * static_cast<std::uint64_t>(d);
            cluster.member_ids.push_back(vectors[i].host_id);
        }
        std::sort(cluster.member_ids.begin(), cluster.member_ids.end());
        cluster.variance = static_cast<double>(sq) / static_cast<double>(idxs.size());
        cluster.representative_id = medoid_of_members(idxs, vectors);
        total_sq += sq;
        result.clusters.push_back(std::move(cluster));
    }
    result.total_variance = static_cast<double>(total_sq) / static_cast<double>(vectors.size());

    // Canonical order: biggest first, ties by smallest member id.
    std::sort(result.clusters.begin(), result.clusters.end(), [](const Cluster& a, const Cluster& b) {
        if (a.size() != b.size()) return a.size() > b.size();
        return a.member_ids.front() < b.member_ids.front();
    });
    return result;
}

}  // namespace

int distance(const FeatureVector& x, const FeatureVector& y) {
    if (x.fingerprint_values.size() != y.fingerprint_values.size() ||
        x.port_flags.size() != y.port_flags.size())
        throw Error("schema mismatch: cannot compare vectors of different dimension counts");
    int mismatches = 0;
    for (std::size_t d = 0; d < x.fingerprint_values.size(); ++d)
        mismatches += x.fingerprint_values[d] != y.fingerprint_values[d];
    for (std::size_t d = 0; d < x.port_flags.size(); ++d)
        mismatches += x.port_flags[d] != y.port_flags[d];
    return mismatches;
}

int distance(const FeatureVector& x, const Centroid& c) {
    if (x.fingerprint_values.size() != c.fingerprint_values.size() ||
        x.port_flags.size() != c.port_flags.size())
        throw Error("schema mismatch: cannot compare a vector against a centroid of different shape");
    int mismatches = 0;
    for (std::size_t d = 0; d < x.fingerprint_values.size(); ++d)
        mismatches += x.fingerprint_values[d] != c.fingerprint_values[d];
    for (std::size_t d = 0; d < x.port_flags.size(); ++d)
        mismatches += x.port_flags[d] != c.port_flags[d];
    return mismatches;
}

Clustering kmeans_once(std::span<const FeatureVector> vectors, int k, std::uint64_t seed,
                       LloydStats* stats) {
    const std::size_t n = vectors.size();
    if (n == 0) throw Error("cannot cluster an empty vector set");
    if (k < 1) throw Error("k must be at least 1");
    if (static_cast<std::size_t>(k) > n)
        throw Error("k (" + std::to_string(k) + ") exceeds the number of vectors (" +
                    std::to_string(n) + ")");

    const std::size_t fp_dims = vectors[0].fingerprint_values.size();
    const std::size_t port_dims = vectors[0].port_flags.size();
    for (const auto& v : vectors) check_same_shape(v, fp_dims, port_dims);

    // Forgy-style start: walk a random draw order and seed centroids on
    // value-distinct vectors, so duplicate hosts cannot collapse the start
    // configuration.  Duplicates are used only when the data holds fewer than
    // k distinct vectors.
    Rng rng(seed);
    const auto order = rng.sample_without_replacement(n, n);
    std::vector<std::size_t> chosen;
    chosen.reserve(static_cast<std::size_t>(k));
    std::vector<std::size_t> duplicates;
    const auto is_novel = [&](std::size_t idx) {
        for (const auto c : chosen)
            if (vectors[idx].fingerprint_values == vectors[c].fingerprint_values &&
                vectors[idx].port_flags == vectors[c].port_flags)
                return false;
        return true;
    };
    for (const auto idx : order) {
        if (chosen.size() == static_cast<std::size_t>(k)) break;
        if (is_novel(idx)) chosen.push_back(idx);
        else duplicates.push_back(idx);
    }
    for (std::size_t i = 0; chosen.size() < static_cast<std::size_t>(k); ++i)
        chosen.push_back(duplicates[i]);

    std::vector<Centroid> centroids;
    centroids.reserve(static_cast<std::size_t>(k));
    for (const auto idx : chosen) centroids.push_back(centroid_of_vector(vectors[idx]));

    if (stats != nullptr) *stats = LloydStats{};

    std::vector<int> assignment;
    for (int iteration = 0; iteration < kMaxLloydIterations; ++iteration) {
        auto next = assign_to_nearest(vectors, centroids);
        repair_empty_clusters(vectors, centroids, next, k);
        if (next == assignment) break;
        assignment = std::move(next);

        // Recompute every centroid as the per-dimension mode of its members.
        const auto members = members_by_cluster(assignment, k);
        for (int c = 0; c < k; ++c)
            centroids[static_cast<std::size_t>(c)] = compute_centroid(members[static_cast<std::size_t>(c)], vectors);

        if (stats != nullptr) {
            stats->cost_per_iteration.push_back(
                static_cast<double>(plain_error(vectors, assignment, centroids)) /
                static_cast<double>(n));
            stats->variance_per_iteration.push_back(
                static_cast<double>(squared_error(vectors, assignment, centroids)) /
                static_cast<double>(n));
            stats->iterations = iteration + 1;
        }
    }

    return package(vectors, assignment, std::move(centroids), k, seed);
}

Clustering kmeans_best_of(std::span<const FeatureVector> vectors, int k, int n_evaluations,
                          std::uint64_t seed) {
    if (n_evaluations < 1) throw Error("n_evaluations must be at least 1");

    Clustering best;
    bool have_best = false;
    for (int i = 0; i < n_evaluations; ++i) {
        auto run = kmeans_once(vectors, k, seed + static_cast<std::uint64_t>(i));
        if (!have_best || run.total_variance < best.total_variance) {
            best = std::move(run);
            have_best = true;
        }
    }
    best.restarts_used = n_evaluations;
    return best;
}

KSelection select_k(std::span<const FeatureVector> vectors, double mu, int n_evaluations,
                    int k_max, std::uint64_t seed) {
    if (vectors.empty()) throw Error("cannot select a cluster count for an empty vector set");
    if (mu <= 0.0) throw Error("mu must be positive");
    if (k_max < 1) throw Error("k_max must be at least 1");
    if (static_cast<std::size_t>(k_max) > vectors.size())
        throw Error("k_max exceeds the number of vectors");

    KSelection result;
    result.trace.mu = mu;

    Clustering previous = kmeans_best_of(vectors, 1, n_evaluations, seed);
    result.trace.sigma_by_k.emplace_back(1, previous.total_variance);

    for (int k = 2; k <= k_max; ++k) {
        Clustering current = kmeans_best_of(vectors, k, n_evaluations, seed);
        result.trace.sigma_by_k.emplace_back(k, current.total_variance);
        const double drop = previous.total_variance - current.total_variance;
        if (drop < mu) {
            result.trace.chosen_k = k - 1;
            result.trace.converged = true;
            result.clustering = std::move(previous);
            return result;
        }
        previous = std::move(current);
    }

    result.trace.chosen_k = k_max;
    result.trace.converged = false;
    result.clustering = std::move(previous);
    return result;
}

std::string medoid_of(const Cluster& cluster, std::span<const FeatureVector> vectors) {
    if (cluster.member_ids.empty()) throw Error("cannot take the medoid of an empty cluster");
    Members members;
    for (const auto& id : cluster.member_ids) {
        bool found = false;
        for (std::size_t i = 0; i < vectors.size(); ++i) {
            if (vectors[i].host_id == id) {
                members.push_back(i);
                found = true;
                break;
            }
        }
        if (!found) throw Error("cluster member \"" + id + "\" has no feature vector");
    }
    return medoid_of_members(members, vectors);
}

}  // namespace hpforge
