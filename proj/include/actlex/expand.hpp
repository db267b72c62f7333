#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "actlex/embeddings.hpp"
#include "actlex/events.hpp"
#include "actlex/head.hpp"
#include "actlex/lexicon.hpp"

namespace actlex {

struct EpaSummary {
    std::size_t n = 0;
    Epa mean;
    Epa sd;  // population
    Epa min;
    Epa max;
    Epa trimmed_mean;
};

// Throws InvalidInputError on an empty sample. `trim_fraction` in [0, 0.5)
// drops that share of samples from each tail, per dimension.
EpaSummary aggregate(std::span<const Epa> samples, double trim_fraction = 0.0);

Epa extract_slot(const TargetVector& values, Slot slot);

struct EstimateDistribution {
    std::string term;
    Category category = Category::identity;
    Slot slot = Slot::actor;
    std::vector<Epa> samples;
    EpaSummary summary;
    std::vector<std::string> sentences;
};

struct ExpansionOptions {
    std::size_t n_events = 300;
    std::uint64_t seed = 0;
    bool use_object_slot = false;
    double trim_fraction = 0.0;
};

// Seed of the pinned-event stream for one concept.
std::uint64_t pin_seed(std::uint64_t seed, const std::string& term, Category category);

// Events with the concept pinned into its role slot. The concept's own EPA
// is filled in only when it is known to `ctx`'s lexicon.
std::vector<MabmoEvent> pinned_events(const std::string& term, Category category, const CorpusContext& ctx,
                                      const ExpansionOptions& options);

// Generates pinned events, predicts each and aggregates the pinned slot.
// Throws DependencyError listing sentences the provider cannot embed.
EstimateDistribution pin_and_estimate(const std::string& term, Category category, const CorpusContext& ctx,
                                      const HeadModel& model, const EmbeddingProvider& provider,
                                      const ExpansionOptions& options = {});

// Same aggregation over events that were already generated and embedded.
EstimateDistribution estimate_from_events(const std::string& term, Category category, Slot slot,
                                          const std::vector<MabmoEvent>& events, const HeadModel& model,
                                          const EmbeddingProvider& provider, double trim_fraction = 0.0);

// Co-occurrence mode: aggregates existing predictions of every event whose
// `slot` holds the concept.
EstimateDistribution estimate_from_predictions(const std::string& term, Category category, Slot slot,
                                               const std::vector<MabmoEvent>& events,
                                               const std::vector<std::pair<std::string, TargetVector>>& predictions);

struct EmitOptions {
    bool clamp = false;
    bool overwrite = false;
    std::string model_id;
};

struct ExpandedEntry {
    LexiconEntry entry;
    std::size_t n_events = 0;
    Epa sd;
    std::string model_id;
};

// One entry per distribution, valued at its mean. Throws ConflictError when a
// key already exists in `target` unless overwriting.
std::vector<ExpandedEntry> emit_entries(std::span<const EstimateDistribution> distributions,
                                        const SentimentLexicon& target, const EmitOptions& options);

// Lexicon CSV plus `n_events,sd_E,sd_P,sd_A,model_id`.
void write_expanded_csv(std::ostream& out, std::span<const ExpandedEntry> entries);

// Mean/SD/Min/Max rows per dimension.
void write_distribution_table(std::ostream& out, const EstimateDistribution& dist);

}  // namespace actlex
