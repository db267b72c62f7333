#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include "actlex/events.hpp"
#include "actlex/kmeans.hpp"
#include "actlex/split.hpp"

namespace actlex {

struct CorpusOptions {
    std::size_t clusters = kDefaultClusterCount;
    std::size_t elbow_k_max = 10;
    SplitSpec split;
    std::size_t n_train = 10000;
    std::size_t n_test = 1000;
    std::size_t n_validation = 1000;
    std::uint64_t seed = 0;
    EnumerationOptions enumeration;
};

/// Output of the full preprocessing pipeline: cluster, split, code, sample.
struct CorpusBuild {
    ClusterSet clusters;
    std::map<Category, ElbowReport> elbow;
    LexiconSplit split;
    std::map<std::string, std::size_t> distinct_codes;
    std::vector<MabmoEvent> events;
};

CorpusBuild generate_corpus(const SentimentLexicon& lexicon, const CoefficientSet& coeffs,
                            const CorpusOptions& options);

// Clusters the whole lexicon and indexes its codes; the context used for
// pinned expansion outside a generated corpus.
CorpusContext expansion_context(const SentimentLexicon& lexicon, const CoefficientSet& coeffs, std::size_t clusters,
                                std::uint64_t seed, EnumerationOptions enumeration = {});

// Seed streams shared by the pipeline and lexicon expansion.
namespace seed_stream {
inline constexpr std::uint64_t cluster = 1;
inline constexpr std::uint64_t split = 2;
inline constexpr std::uint64_t enumerate = 3;
inline constexpr std::uint64_t sample = 4;
inline constexpr std::uint64_t pin = 5;
inline constexpr std::uint64_t elbow = 6;
}  // namespace seed_stream

}  // namespace actlex
