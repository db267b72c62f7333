#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "actlex/epa.hpp"

namespace actlex {

struct LexiconEntry {
    std::string term;
    Category category = Category::identity;
    Epa epa;
    std::string note;

    friend bool operator==(const LexiconEntry&, const LexiconEntry&) = default;
};

struct LexiconMetadata {
    std::string name;
    std::string year;
    std::string source;
};

using LexiconKey = std::pair<std::string, Category>;

/// Affective dictionary keyed by (term, category).
///
/// Iteration is lexicographic by term, then by category. Fundamentals are
/// range checked on insertion; the same term may live under several
/// categories with unrelated EPA values.
class SentimentLexicon {
public:
    SentimentLexicon() = default;
    explicit SentimentLexicon(LexiconMetadata meta) : meta_(std::move(meta)) {}

    // Throws InvalidInputError for empty terms, non-finite or out-of-range
    // EPA, and ConflictError if the key exists and overwrite is false.
    void insert(LexiconEntry entry, bool overwrite = false);
    bool erase(const std::string& term, Category category);

    bool contains(const std::string& term, Category category) const;
    // Throws NotFoundError.
    const LexiconEntry& at(const std::string& term, Category category) const;
    const LexiconEntry* find(const std::string& term, Category category) const;

    // Entries of one category in iteration order.
    std::vector<LexiconEntry> entries(Category category) const;
    std::size_t count(Category category) const;
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

    const LexiconMetadata& metadata() const { return meta_; }
    LexiconMetadata& metadata() { return meta_; }

    friend bool operator==(const SentimentLexicon& x, const SentimentLexicon& y) {
        return x.entries_ == y.entries_;
    }

private:
    LexiconMetadata meta_;
    std::map<LexiconKey, LexiconEntry> entries_;
};

// Lexicon CSV: header `term,category,E,P,A`, extra trailing columns are
// ignored on read. Errors carry the offending line number.
SentimentLexicon read_lexicon_csv(std::istream& in, const std::string& source_name = "<stream>");
SentimentLexicon load_lexicon(const std::filesystem::path& path);
void write_lexicon_csv(std::ostream& out, const SentimentLexicon& lexicon);
void save_lexicon(const std::filesystem::path& path, const SentimentLexicon& lexicon);

}  // namespace actlex
