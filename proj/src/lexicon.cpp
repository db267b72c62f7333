#include "actlex/lexicon.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <istream>
#include <ostream>

#include "actlex/csv.hpp"
#include "actlex/errors.hpp"

namespace actlex {

void SentimentLexicon::insert(LexiconEntry entry, bool overwrite) {
    if (csv::trim(entry.term).empty()) throw InvalidInputError("lexicon entry with empty term");
    if (!entry.epa.finite()) throw InvalidInputError("non-finite EPA for '" + entry.term + "'");
    if (!entry.epa.in_range()) {
        throw InvalidInputError("EPA for '" + entry.term + "' outside [-4.3, 4.3]");
    }
    LexiconKey key{entry.term, entry.category};
    auto it = entries_.find(key);
    if (it != entries_.end()) {
        if (!overwrite) {
            throw ConflictError("duplicate entry '" + entry.term + "' (" +
                                std::string(to_string(entry.category)) + ")");
        }
        it->second = std::move(entry);
        return;
    }
    entries_.emplace(std::move(key), std::move(entry));
}

bool SentimentLexicon::erase(const std::string& term, Category category) {
    return entries_.erase({term, category}) > 0;
}

bool SentimentLexicon::contains(const std::string& term, Category category) const {
    return entries_.contains({term, category});
}

const LexiconEntry* SentimentLexicon::find(const std::string& term, Category category) const {
    auto it = entries_.find({term, category});
    return it == entries_.end() ? nullptr : &it->second;
}

const LexiconEntry& SentimentLexicon::at(const std::string& term, Category category) const {
    if (const auto* e = find(term, category)) return *e;
    throw NotFoundError("no " + std::string(to_string(category)) + " '" + term + "' in lexicon");
}

std::vector<LexiconEntry> SentimentLexicon::entries(Category category) const {
    std::vector<LexiconEntry> out;
    for (const auto& [key, entry] : entries_) {
        if (key.second == category) out.push_back(entry);
    }
    return out;
}

std::size_t SentimentLexicon::count(Category category) const {
    std::size_t n = 0;
    for (const auto& [key, entry] : entries_) n += key.second == category;
    return n;
}

SentimentLexicon read_lexicon_csv(std::istream& in, const std::string& source_name) {
    SentimentLexicon lex(LexiconMetadata{source_name, {}, source_name});
    std::string line;
    std::size_t lineno = 0;
    std::array<int, 5> col{-1, -1, -1, -1, -1};
    bool have_header = false;
    constexpr std::array<std::string_view, 5> names = {"term", "category", "e", "p", "a"};
    std::size_t needed = 0;

    while (std::getline(in, line)) {
        ++lineno;
        std::string t = csv::trim(line);
        if (t.empty() || t.front() == '#') continue;
        auto where = [&] { return source_name + ":" + std::to_string(lineno); };
        std::vector<std::string> fields;
        try {
            fields = csv::split_line(line);
        } catch (const ParseError& e) {
            throw ParseError(where() + ": " + e.what());
        }
        if (!have_header) {
            for (std::size_t i = 0; i < fields.size(); ++i) {
                std::string f = csv::lower(csv::trim(fields[i]));
                for (std::size_t k = 0; k < names.size(); ++k) {
                    if (f == names[k] && col[k] < 0) col[k] = static_cast<int>(i);
                }
            }
            for (std::size_t k = 0; k < names.size(); ++k) {
                if (col[k] < 0) {
                    throw ParseError(where() + ": header lacks column '" + std::string(names[k]) +
                                     "' (expected term,category,E,P,A)");
                }
                needed = std::max(needed, static_cast<std::size_t>(col[k]) + 1);
            }
            have_header = true;
            continue;
        }
        if (fields.size() < needed) {
            throw ParseError(where() + ": expected at least " + std::to_string(needed) + " fields, got " +
                             std::to_string(fields.size()));
        }
        LexiconEntry entry;
        entry.term = csv::trim(fields[col[0]]);
        try {
            entry.category = parse_category(csv::lower(csv::trim(fields[col[1]])));
            entry.epa = {csv::parse_double(fields[col[2]], "E"), csv::parse_double(fields[col[3]], "P"),
                         csv::parse_double(fields[col[4]], "A")};
            lex.insert(std::move(entry));
        } catch (const Error& e) {
            throw ParseError(where() + ": " + e.what());
        }
    }
    if (!have_header) throw ParseError(source_name + ": empty lexicon file (no header)");
    return lex;
}

SentimentLexicon load_lexicon(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open lexicon file " + path.string());
    auto lex = read_lexicon_csv(in, path.string());
    lex.metadata().name = path.stem().string();
    return lex;
}

void write_lexicon_csv(std::ostream& out, const SentimentLexicon& lexicon) {
    out << "term,category,E,P,A\n";
    for (const auto& [key, e] : lexicon) {
        csv::write_row(out, {e.term, std::string(to_string(e.category)), csv::format_double(e.epa.e),
                             csv::format_double(e.epa.p), csv::format_double(e.epa.a)});
    }
}

void save_lexicon(const std::filesystem::path& path, const SentimentLexicon& lexicon) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path.string());
    write_lexicon_csv(out, lexicon);
}

}  // namespace actlex
