#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "actlex/amalgamation.hpp"
#include "actlex/epa.hpp"
#include "actlex/impression.hpp"
#include "actlex/lexicon.hpp"

namespace actlex {

enum class Side { actor, object };

std::string_view to_string(Side side);
Side parse_side(std::string_view name);

struct StepRecord {
    Side acting_side = Side::actor;
    std::string behavior;
    Epa behavior_fundamental;
    // Post-event transients in the interaction's own frame: `actor` is always
    // the party that started as actor, regardless of who acted.
    Epa actor_transient;
    Epa behavior_transient;
    Epa object_transient;
    double deflection = 0.0;

    friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

/// Two-party interaction state. Passed by value; stepping never mutates.
struct SimulationState {
    Epa actor_fundamental;
    Epa object_fundamental;
    Epa actor_transient;
    Epa object_transient;
    std::vector<StepRecord> history;

    static SimulationState start(const Epa& actor_fundamental, const Epa& object_fundamental);

    double current_deflection() const { return history.empty() ? 0.0 : history.back().deflection; }

    friend bool operator==(const SimulationState&, const SimulationState&) = default;
};

// Applies one event. The acting party occupies the actor slot of the
// equations; results are mapped back to the interaction frame. Throws
// CategoryError if the entry is not a behavior.
SimulationState step_event(const SimulationState& state, const LexiconEntry& behavior, Side acting_side,
                           const CoefficientSet& coeffs);

struct PartySpec {
    std::string identity;
    std::optional<std::string> modifier;
};

// Looks up the identity (and modifier) and amalgamates when a modifier is given.
Epa resolve_party(const PartySpec& spec, const SentimentLexicon& lexicon,
                  const AmalgamationCoefficients& amalgamation = {});

std::string describe(const PartySpec& spec);

struct ScriptEvent {
    Side side = Side::actor;
    std::string behavior;
};

struct InteractionScript {
    PartySpec actor;
    PartySpec object;
    std::vector<ScriptEvent> events;
    // Optional paths, resolved relative to the script file by the CLI.
    std::string lexicon;
    std::string coefficients;
};

// JSON script: {"actor": {"identity": ..., "modifier": ...}, "object": {...},
//               "events": [{"side": "actor", "behavior": "greet"}, ...]}
InteractionScript parse_script(std::string_view json_text);
InteractionScript load_script(const std::string& path);

SimulationState run_script(const InteractionScript& script, const SentimentLexicon& lexicon,
                           const CoefficientSet& coeffs, const AmalgamationCoefficients& amalgamation = {});

// Fixed-width table of per-step transients and deflection (step 0 = fundamentals).
void write_trajectory_table(std::ostream& out, const InteractionScript& script, const SimulationState& state);

}  // namespace actlex
