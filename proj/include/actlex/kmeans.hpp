#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "actlex/epa.hpp"
#include "actlex/lexicon.hpp"

namespace actlex {

struct ClusterModel {
    std::size_t k = 0;
    std::vector<Epa> centroids;
    // Cluster id per input point, in input order.
    std::vector<int> assignment;
    // Within-cluster sum of squared distances.
    double inertia = 0.0;
    std::size_t iterations = 0;
};

struct KMeansOptions {
    std::size_t max_iterations = 300;
    double tolerance = 1e-9;
    // Independent k-means++ starts; the lowest-inertia run wins.
    std::size_t restarts = 4;
};

// Lloyd iteration from seeded k-means++ starts. Throws InvalidInputError when
// k is 0 or exceeds the number of points.
ClusterModel kmeans(std::span<const Epa> points, std::size_t k, std::uint64_t seed, const KMeansOptions& options = {});

double inertia_of(std::span<const Epa> points, const ClusterModel& model);

inline constexpr std::size_t kDefaultClusterCount = 5;

struct ElbowReport {
    // inertia[i] is the inertia for k = i + 1.
    std::vector<double> inertia;
    // Knee: the k with the largest second difference of log inertia.
    std::size_t suggested_k = 0;
};

ElbowReport elbow_diagnostic(std::span<const Epa> points, std::size_t k_max, std::uint64_t seed);
void write_elbow_csv(std::ostream& out, const ElbowReport& report);

/// Per-category cluster models over one lexicon, with term lookup.
struct ClusterSet {
    std::map<Category, ClusterModel> models;
    std::map<LexiconKey, int> lookup;

    // Throws NotFoundError for unclustered entries.
    int cluster_of(const std::string& term, Category category) const;
    std::size_t cluster_count(Category category) const;
};

// Clusters each category with min(k, size) clusters.
ClusterSet cluster_lexicon(const SentimentLexicon& lexicon, std::size_t k, std::uint64_t seed);

// CSV `term,category,cluster`.
void write_cluster_csv(std::ostream& out, const SentimentLexicon& lexicon, const ClusterSet& clusters);

}  // namespace actlex
