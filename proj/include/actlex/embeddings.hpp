#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "actlex/events.hpp"
#include "actlex/head.hpp"
#include "actlex/lexicon.hpp"

namespace actlex {

/// Sentence vectors keyed by corpus event id.
struct EmbeddingTable {
    std::size_t dim = 0;
    std::map<std::string, std::vector<double>> vectors;
};

// Embedding JSONL: a `{"dim": d}` header line, then one
// `{"id": ..., "vector": [...]}` object per line.
EmbeddingTable read_embeddings_jsonl(std::istream& in);
EmbeddingTable load_embeddings(const std::filesystem::path& path);
void write_embeddings_jsonl(std::ostream& out, const EmbeddingTable& table);

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::size_t dim() const = 0;
    virtual std::optional<std::vector<double>> embed(const MabmoEvent& event) const = 0;
};

class PrecomputedEmbeddings : public EmbeddingProvider {
public:
    explicit PrecomputedEmbeddings(EmbeddingTable table) : table_(std::move(table)) {}
    std::size_t dim() const override { return table_.dim; }
    std::optional<std::vector<double>> embed(const MabmoEvent& event) const override;

private:
    EmbeddingTable table_;
};

/// Stand-in sentence encoder: looks up each slot's true EPA in a reference
/// lexicon and emits a fixed random linear map of the 15 values plus
/// Gaussian noise. Noise is seeded per event id, so vectors are reproducible.
class SyntheticLinearEncoder : public EmbeddingProvider {
public:
    SyntheticLinearEncoder(SentimentLexicon truth, std::size_t dim, double noise_sd, std::uint64_t seed);

    std::size_t dim() const override { return dim_; }
    std::optional<std::vector<double>> embed(const MabmoEvent& event) const override;
    std::vector<double> encode(const TargetVector& values, const std::string& id) const;

    // dim x 15, row-major.
    const std::vector<double>& matrix() const { return matrix_; }

private:
    SentimentLexicon truth_;
    std::size_t dim_;
    double noise_sd_;
    std::uint64_t seed_;
    std::vector<double> matrix_;
};

// Pairs every event with its vector. Throws DependencyError naming the
// sentences that have no embedding.
std::vector<TrainingExample> make_examples(const std::vector<MabmoEvent>& events, const EmbeddingProvider& provider);

// Prediction JSONL: `{"id": ..., "prediction": [15 numbers]}` per line.
void write_predictions_jsonl(std::ostream& out, const std::vector<std::pair<std::string, TargetVector>>& predictions);
std::vector<std::pair<std::string, TargetVector>> read_predictions_jsonl(std::istream& in);

std::uint64_t stable_hash(std::string_view text);

}  // namespace actlex
