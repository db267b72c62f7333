#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "actlex/impression.hpp"
#include "actlex/kmeans.hpp"
#include "actlex/lexicon.hpp"

namespace actlex {

inline constexpr int kAboCodeCount = 512;

// Nine-bit sign pattern of transient minus fundamental, Ae as the most
// significant bit. Ties count as a decrease.
int abo_code(const EventProfile& fundamentals, const CoefficientSet& coeffs);
std::string abo_bits(int code);

struct AboTriple {
    std::uint32_t actor = 0;
    std::uint32_t behavior = 0;
    std::uint32_t object = 0;
};

/// Event-type histogram over all actor x behavior x object combinations.
struct CodeIndex {
    std::vector<LexiconEntry> identities;
    std::vector<LexiconEntry> behaviors;
    std::array<std::uint64_t, kAboCodeCount> histogram{};
    // Uniform reservoir of example triples per code.
    std::array<std::vector<AboTriple>, kAboCodeCount> exemplars;
    std::uint64_t events = 0;
    bool sampled = false;

    std::size_t distinct() const;
    std::vector<int> observed_codes() const;
};

struct EnumerationOptions {
    // Above this many combinations, events are drawn at random instead.
    std::uint64_t budget = 10'000'000;
    std::size_t reservoir = 256;
    std::uint64_t seed = 0;
};

CodeIndex enumerate_codes(const SentimentLexicon& lexicon, const CoefficientSet& coeffs,
                          const EnumerationOptions& options = {});

enum class Slot { modifier1 = 0, actor = 1, behavior = 2, modifier2 = 3, object = 4 };

inline constexpr std::array<Category, 5> kSlotCategories = {Category::modifier, Category::identity, Category::behavior,
                                                            Category::modifier, Category::identity};

std::string_view to_string(Slot slot);
Slot parse_slot(std::string_view name);
// First index of the slot's three dimensions within the 15-dim target.
constexpr std::size_t slot_offset(Slot slot) { return 3 * static_cast<std::size_t>(slot); }

inline constexpr std::size_t kTargetSize = 15;
using TargetVector = std::array<double, kTargetSize>;

/// Modifier-actor-behavior-modifier-object event with its training target.
struct MabmoEvent {
    std::string id;
    std::array<LexiconEntry, 5> slots;
    std::string sentence;
    // Slot-ordered fundamentals; NaN where the concept has no known EPA.
    TargetVector targets{};
    std::optional<int> abo_code;
    std::string split;

    const LexiconEntry& slot(Slot s) const { return slots[static_cast<std::size_t>(s)]; }
};

std::string render_sentence(const std::array<std::string, 5>& terms);
std::string render_sentence(const MabmoEvent& event);

// Concepts of one split grouped by cluster, per category.
struct Strata {
    std::map<Category, std::vector<std::vector<LexiconEntry>>> members;

    static Strata build(const SentimentLexicon& subset, const ClusterSet& clusters);
    bool has(Category c) const;
};

/// Everything needed to synthesise events from one split's concepts.
struct CorpusContext {
    SentimentLexicon lexicon;
    Strata strata;
    CodeIndex codes;
    CoefficientSet coeffs;

    static CorpusContext build(const SentimentLexicon& subset, const ClusterSet& clusters,
                               const CoefficientSet& coeffs, const EnumerationOptions& options = {});
};

// Draws ABO triples round-robin over observed event codes and each modifier
// slot round-robin over modifier clusters. Throws ConfigError when a category
// is empty.
std::vector<MabmoEvent> sample_mabmo(const CorpusContext& ctx, std::size_t n, std::uint64_t seed,
                                     const std::string& id_prefix = "ev", const std::string& split = "train");

/// A concept fixed into one slot of every generated event.
struct PinSpec {
    LexiconEntry entry;
    Slot slot = Slot::actor;
    // False when the concept is new and its EPA is unknown.
    bool known = false;
};

// Slot a concept of this category occupies when pinned. Identities use the
// object slot only when requested.
Slot pinned_slot(Category category, bool use_object_slot = false);

// Pinned events: the remaining slots are drawn round-robin over their
// category's clusters.
std::vector<MabmoEvent> sample_pinned(const CorpusContext& ctx, const PinSpec& pin, std::size_t n, std::uint64_t seed,
                                      const std::string& id_prefix);

// Corpus JSONL: one object per line with id, sentence, slots, targets,
// abo_code and split.
void write_corpus_jsonl(std::ostream& out, const std::vector<MabmoEvent>& events);
std::vector<MabmoEvent> read_corpus_jsonl(std::istream& in);

}  // namespace actlex
