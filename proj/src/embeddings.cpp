#include "actlex/embeddings.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "actlex/errors.hpp"
#include "actlex/rng.hpp"

namespace actlex {

using nlohmann::json;

EmbeddingTable read_embeddings_jsonl(std::istream& in) {
    EmbeddingTable table;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = "embeddings line " + std::to_string(lineno);
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(where + ": " + e.what());
        }
        if (!have_header) {
            if (!j.contains("dim") || !j["dim"].is_number_unsigned()) {
                throw ParseError(where + ": expected header {\"dim\": d}");
            }
            table.dim = j["dim"].get<std::size_t>();
            have_header = true;
            continue;
        }
        if (!j.contains("id") || !j.contains("vector")) throw ParseError(where + ": expected id and vector");
        std::string id = j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump();
        std::vector<double> v;
        try {
            v = j["vector"].get<std::vector<double>>();
        } catch (const json::exception& e) {
            throw ParseError(where + ": " + e.what());
        }
        if (v.size() != table.dim) {
            throw ShapeError(where + ": vector has " + std::to_string(v.size()) + " values, header declares " +
                             std::to_string(table.dim));
        }
        if (!table.vectors.emplace(id, std::move(v)).second) throw ParseError(where + ": duplicate id '" + id + "'");
    }
    if (!have_header) throw ParseError("embedding file has no header line");
    return table;
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DependencyError("cannot open embedding file " + path.string());
    return read_embeddings_jsonl(in);
}

void write_embeddings_jsonl(std::ostream& out, const EmbeddingTable& table) {
    out << json{{"dim", table.dim}}.dump() << '\n';
    for (const auto& [id, v] : table.vectors) out << json{{"id", id}, {"vector", v}}.dump() << '\n';
}

std::optional<std::vector<double>> PrecomputedEmbeddings::embed(const MabmoEvent& event) const {
    auto it = table_.vectors.find(event.id);
    if (it == table_.vectors.end()) return std::nullopt;
    return it->second;
}

std::uint64_t stable_hash(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

SyntheticLinearEncoder::SyntheticLinearEncoder(SentimentLexicon truth, std::size_t dim, double noise_sd,
                                               std::uint64_t seed)
    : truth_(std::move(truth)), dim_(dim), noise_sd_(noise_sd), seed_(seed), matrix_(dim * kTargetSize) {
    if (dim == 0) throw ShapeError("encoder dimension must be positive");
    Rng rng(seed);
    const double scale = 1.0 / std::sqrt(static_cast<double>(kTargetSize));
    for (double& w : matrix_) w = scale * rng.normal();
}

std::vector<double> SyntheticLinearEncoder::encode(const TargetVector& values, const std::string& id) const {
    std::vector<double> out(dim_, 0.0);
    Rng noise(derive_seed(seed_, stable_hash(id)));
    for (std::size_t r = 0; r < dim_; ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < kTargetSize; ++c) s += matrix_[r * kTargetSize + c] * values[c];
        out[r] = s + noise_sd_ * noise.normal();
    }
    return out;
}

std::optional<std::vector<double>> SyntheticLinearEncoder::embed(const MabmoEvent& event) const {
    TargetVector values{};
    for (std::size_t s = 0; s < 5; ++s) {
        const auto* e = truth_.find(event.slots[s].term, event.slots[s].category);
        if (!e) return std::nullopt;
        for (std::size_t d = 0; d < 3; ++d) values[3 * s + d] = e->epa[d];
    }
    return encode(values, event.id);
}

std::vector<TrainingExample> make_examples(const std::vector<MabmoEvent>& events, const EmbeddingProvider& provider) {
    std::vector<TrainingExample> out;
    out.reserve(events.size());
    std::vector<std::string> missing;
    for (const auto& ev : events) {
        auto v = provider.embed(ev);
        if (!v) {
            missing.push_back(ev.id + " \"" + ev.sentence + "\"");
            continue;
        }
        out.push_back({ev.id, std::move(*v), ev.targets});
    }
    if (!missing.empty()) {
        std::string msg = "no embedding for " + std::to_string(missing.size()) + " sentence(s):";
        for (std::size_t i = 0; i < missing.size() && i < 10; ++i) msg += "\n  " + missing[i];
        if (missing.size() > 10) msg += "\n  ...";
        throw DependencyError(msg);
    }
    return out;
}

void write_predictions_jsonl(std::ostream& out, const std::vector<std::pair<std::string, TargetVector>>& predictions) {
    for (const auto& [id, p] : predictions) out << json{{"id", id}, {"prediction", p}}.dump() << '\n';
}

std::vector<std::pair<std::string, TargetVector>> read_predictions_jsonl(std::istream& in) {
    std::vector<std::pair<std::string, TargetVector>> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const json j = json::parse(line);
            const auto v = j.at("prediction").get<std::vector<double>>();
            if (v.size() != kTargetSize) throw ShapeError("prediction must have 15 values");
            TargetVector p{};
            std::copy(v.begin(), v.end(), p.begin());
            out.emplace_back(j.at("id").get<std::string>(), p);
        } catch (const json::exception& e) {
            throw ParseError("predictions line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace actlex
