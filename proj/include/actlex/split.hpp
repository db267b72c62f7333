#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "actlex/kmeans.hpp"
#include "actlex/lexicon.hpp"

namespace actlex {

struct SplitSpec {
    double train = 0.80;
    double test = 0.08;
    double validation = 0.12;
    std::uint64_t seed = 0;

    // Throws ConfigError unless each fraction is in (0, 1) and they sum to 1.
    void validate() const;
};

struct StratumCounts {
    Category category = Category::identity;
    int cluster = 0;
    std::size_t total = 0;
    std::array<std::size_t, 3> realized{};
};

struct LexiconSplit {
    SentimentLexicon train;
    SentimentLexicon test;
    SentimentLexicon validation;
    std::vector<StratumCounts> strata;
};

// Largest-remainder allocation of n items to (train, test, validation).
std::array<std::size_t, 3> allocate_counts(std::size_t n, const SplitSpec& spec);

// Each (category, cluster) stratum is shuffled with its own seeded stream and
// cut according to allocate_counts.
LexiconSplit stratified_split(const SentimentLexicon& lexicon, const ClusterSet& clusters, const SplitSpec& spec);

}  // namespace actlex
