#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "actlex/amalgamation.hpp"
#include "actlex/embeddings.hpp"
#include "actlex/events.hpp"
#include "actlex/expand.hpp"
#include "actlex/head.hpp"
#include "actlex/impression.hpp"
#include "actlex/lexicon.hpp"
#include "actlex/simulation.hpp"

namespace actlex {

/// Read-only resources shared by the CLI and the HTTP service.
struct EngineResources {
    SentimentLexicon lexicon;
    // Always holds "identity"; other sets are keyed by their id.
    std::map<std::string, CoefficientSet> coefficient_sets{{"identity", CoefficientSet::identity()}};
    std::string default_coefficients = "identity";
    AmalgamationCoefficients amalgamation;

    // Needed only for estimation.
    std::optional<HeadModel> head;
    std::shared_ptr<const EmbeddingProvider> embeddings;
    std::optional<CorpusContext> context;
    std::uint64_t estimate_seed = 0;

    // Throws NotFoundError.
    const CoefficientSet& coefficients(const std::string& id) const;
    void add_coefficients(CoefficientSet set);
};

struct Session {
    std::string id;
    PartySpec actor;
    PartySpec object;
    std::string coefficients;
    SimulationState state;
    std::string created;
    std::string updated;
};

struct BehaviorSuggestion {
    Epa behavior;
    double deflection = 0.0;
    struct Neighbor {
        LexiconEntry entry;
        double distance = 0.0;
        double deflection = 0.0;
    };
    std::vector<Neighbor> neighbors;
};

// Deflection-minimising behavior for the acting side, plus the k lexicon
// behaviors nearest to it with the deflection each would produce.
BehaviorSuggestion suggest_behavior(const SimulationState& state, Side side, const SentimentLexicon& lexicon,
                                    const CoefficientSet& coeffs, std::size_t k = 5);

nlohmann::json to_json(const Epa& x);
Epa epa_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SimulationState& state);
SimulationState state_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Session& session);
Session session_from_json(const nlohmann::json& j);
nlohmann::json to_json(const BehaviorSuggestion& s);
nlohmann::json to_json(const EstimateDistribution& d);

/// In-memory sessions, optionally snapshotted as JSON files in a state
/// directory. Mutations of one session are serialised; distinct sessions
/// proceed concurrently.
class SessionStore {
public:
    explicit SessionStore(std::shared_ptr<const EngineResources> resources,
                          std::optional<std::filesystem::path> state_dir = std::nullopt);

    Session create(const PartySpec& actor, const PartySpec& object, const std::string& coefficients = {});
    // Throws NotFoundError for unknown ids.
    Session get(const std::string& id) const;
    Session apply_event(const std::string& id, Side side, const std::string& behavior);
    // What-if: the state after the event, without touching the session.
    SimulationState preview(const std::string& id, Side side, const std::string& behavior) const;
    BehaviorSuggestion suggest(const std::string& id, Side side, std::size_t k = 5) const;
    bool erase(const std::string& id);
    std::vector<std::string> ids() const;

    const EngineResources& resources() const { return *resources_; }

private:
    struct Slot {
        mutable std::mutex mutex;
        Session session;
    };
    std::shared_ptr<Slot> slot(const std::string& id) const;
    void persist(const Session& session) const;

    std::shared_ptr<const EngineResources> resources_;
    std::optional<std::filesystem::path> state_dir_;
    mutable std::mutex mutex_;
    std::map<std::string, std::shared_ptr<Slot>> sessions_;
    std::uint64_t next_id_ = 1;
};

}  // namespace actlex
