#include "actlex/simulation.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "actlex/errors.hpp"

namespace actlex {

std::string_view to_string(Side side) { return side == Side::actor ? "actor" : "object"; }

Side parse_side(std::string_view name) {
    if (name == "actor") return Side::actor;
    if (name == "object") return Side::object;
    throw ParseError("unknown side '" + std::string(name) + "' (expected actor or object)");
}

SimulationState SimulationState::start(const Epa& actor_fundamental, const Epa& object_fundamental) {
    if (!actor_fundamental.finite() || !object_fundamental.finite()) {
        throw InvalidInputError("simulation fundamentals must be finite");
    }
    SimulationState s;
    s.actor_fundamental = actor_fundamental;
    s.object_fundamental = object_fundamental;
    s.actor_transient = actor_fundamental;
    s.object_transient = object_fundamental;
    return s;
}

SimulationState step_event(const SimulationState& state, const LexiconEntry& behavior, Side acting_side,
                           const CoefficientSet& coeffs) {
    if (behavior.category != Category::behavior) {
        throw CategoryError("'" + behavior.term + "' is a " + std::string(to_string(behavior.category)) +
                            ", not a behavior");
    }
    const bool actor_acts = acting_side == Side::actor;
    const Epa& doer_t = actor_acts ? state.actor_transient : state.object_transient;
    const Epa& target_t = actor_acts ? state.object_transient : state.actor_transient;
    const Epa& doer_f = actor_acts ? state.actor_fundamental : state.object_fundamental;
    const Epa& target_f = actor_acts ? state.object_fundamental : state.actor_fundamental;

    const EventProfile input{doer_t, behavior.epa, target_t};
    const EventProfile fundamentals{doer_f, behavior.epa, target_f};
    const EventProfile out = impression(input, coeffs);

    SimulationState next = state;
    next.actor_transient = actor_acts ? out.actor : out.object;
    next.object_transient = actor_acts ? out.object : out.actor;

    StepRecord rec;
    rec.acting_side = acting_side;
    rec.behavior = behavior.term;
    rec.behavior_fundamental = behavior.epa;
    rec.actor_transient = next.actor_transient;
    rec.object_transient = next.object_transient;
    rec.behavior_transient = out.behavior;
    rec.deflection = deflection(fundamentals, out);
    next.history.push_back(std::move(rec));
    return next;
}

Epa resolve_party(const PartySpec& spec, const SentimentLexicon& lexicon, const AmalgamationCoefficients& amalgamation) {
    const Epa identity = lexicon.at(spec.identity, Category::identity).epa;
    if (!spec.modifier || spec.modifier->empty()) return identity;
    const Epa modifier = lexicon.at(*spec.modifier, Category::modifier).epa;
    return amalgamate(modifier, identity, amalgamation);
}

std::string describe(const PartySpec& spec) {
    if (spec.modifier && !spec.modifier->empty()) return *spec.modifier + " " + spec.identity;
    return spec.identity;
}

namespace {

PartySpec parse_party(const nlohmann::json& j, const char* which) {
    if (!j.is_object() || !j.contains("identity") || !j["identity"].is_string()) {
        throw ParseError(std::string("script: '") + which + "' needs an 'identity' string");
    }
    PartySpec p;
    p.identity = j["identity"].get<std::string>();
    if (j.contains("modifier") && j["modifier"].is_string()) p.modifier = j["modifier"].get<std::string>();
    return p;
}

}  // namespace

InteractionScript parse_script(std::string_view json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("script: ") + e.what());
    }
    InteractionScript s;
    s.actor = parse_party(j.value("actor", nlohmann::json{}), "actor");
    s.object = parse_party(j.value("object", nlohmann::json{}), "object");
    if (!j.contains("events") || !j["events"].is_array()) throw ParseError("script: missing 'events' array");
    for (const auto& ev : j["events"]) {
        if (!ev.contains("behavior") || !ev["behavior"].is_string()) {
            throw ParseError("script: each event needs a 'behavior' string");
        }
        s.events.push_back({parse_side(ev.value("side", std::string("actor"))), ev["behavior"].get<std::string>()});
    }
    s.lexicon = j.value("lexicon", std::string{});
    s.coefficients = j.value("coefficients", std::string{});
    return s;
}

InteractionScript load_script(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open script " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_script(buf.str());
}

SimulationState run_script(const InteractionScript& script, const SentimentLexicon& lexicon,
                           const CoefficientSet& coeffs, const AmalgamationCoefficients& amalgamation) {
    auto state = SimulationState::start(resolve_party(script.actor, lexicon, amalgamation),
                                        resolve_party(script.object, lexicon, amalgamation));
    for (const auto& ev : script.events) {
        state = step_event(state, lexicon.at(ev.behavior, Category::behavior), ev.side, coeffs);
    }
    return state;
}

void write_trajectory_table(std::ostream& out, const InteractionScript& script, const SimulationState& state) {
    const std::string actor = describe(script.actor);
    const std::string object = describe(script.object);
    out << "actor: " << actor << "\nobject: " << object << '\n';
    char line[256];
    std::snprintf(line, sizeof line, "%-4s %-24s %9s %9s %9s %9s %9s %9s %10s\n", "step", "event", "Ae", "Ap", "Aa",
                  "Oe", "Op", "Oa", "deflection");
    out << line;
    auto row = [&](std::size_t step, const std::string& label, const Epa& a, const Epa& o, double d) {
        std::snprintf(line, sizeof line, "%-4zu %-24s %9.4f %9.4f %9.4f %9.4f %9.4f %9.4f %10.4f\n", step,
                      label.c_str(), a.e, a.p, a.a, o.e, o.p, o.a, d);
        out << line;
    };
    row(0, "s", state.actor_fundamental, state.object_fundamental, 0.0);
    for (std::size_t i = 0; i < state.history.size(); ++i) {
        const auto& h = state.history[i];
        std::string label = std::string(to_string(h.acting_side)) + ": " + h.behavior;
        row(i + 1, label, h.actor_transient, h.object_transient, h.deflection);
    }
}

}  // namespace actlex
