#include "actlex/engine.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>

#include "actlex/control.hpp"
#include "actlex/errors.hpp"

namespace actlex {

using nlohmann::json;

const CoefficientSet& EngineResources::coefficients(const std::string& id) const {
    auto it = coefficient_sets.find(id.empty() ? default_coefficients : id);
    if (it == coefficient_sets.end()) throw NotFoundError("unknown coefficient set '" + id + "'");
    return it->second;
}

void EngineResources::add_coefficients(CoefficientSet set) {
    std::string id = set.id();
    coefficient_sets.insert_or_assign(std::move(id), std::move(set));
}

BehaviorSuggestion suggest_behavior(const SimulationState& state, Side side, const SentimentLexicon& lexicon,
                                    const CoefficientSet& coeffs, std::size_t k) {
    const bool actor = side == Side::actor;
    BehaviorSuggestion out;
    out.behavior = optimal_behavior(actor ? state.actor_transient : state.object_transient,
                                    actor ? state.object_transient : state.actor_transient,
                                    actor ? state.actor_fundamental : state.object_fundamental,
                                    actor ? state.object_fundamental : state.actor_fundamental, coeffs);
    const LexiconEntry ideal{"(optimal)", Category::behavior, out.behavior, {}};
    out.deflection = step_event(state, ideal, side, coeffs).history.back().deflection;

    auto behaviors = lexicon.entries(Category::behavior);
    std::stable_sort(behaviors.begin(), behaviors.end(), [&](const auto& x, const auto& y) {
        return squared_distance(x.epa, out.behavior) < squared_distance(y.epa, out.behavior);
    });
    behaviors.resize(std::min(k, behaviors.size()));
    for (auto& b : behaviors) {
        const double d = step_event(state, b, side, coeffs).history.back().deflection;
        const double dist = distance(b.epa, out.behavior);
        out.neighbors.push_back({std::move(b), dist, d});
    }
    return out;
}

json to_json(const Epa& x) { return json::array({x.e, x.p, x.a}); }

Epa epa_from_json(const json& j) {
    if (!j.is_array() || j.size() != 3) throw ParseError("expected [E, P, A]");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json to_json(const SimulationState& s) {
    json history = json::array();
    for (const auto& h : s.history) {
        history.push_back({{"side", to_string(h.acting_side)},
                           {"behavior", h.behavior},
                           {"behavior_fundamental", to_json(h.behavior_fundamental)},
                           {"actor_transient", to_json(h.actor_transient)},
                           {"behavior_transient", to_json(h.behavior_transient)},
                           {"object_transient", to_json(h.object_transient)},
                           {"deflection", h.deflection}});
    }
    return {{"actor_fundamental", to_json(s.actor_fundamental)},
            {"object_fundamental", to_json(s.object_fundamental)},
            {"actor_transient", to_json(s.actor_transient)},
            {"object_transient", to_json(s.object_transient)},
            {"deflection", s.current_deflection()},
            {"history", std::move(history)}};
}

SimulationState state_from_json(const json& j) {
    try {
        SimulationState s;
        s.actor_fundamental = epa_from_json(j.at("actor_fundamental"));
        s.object_fundamental = epa_from_json(j.at("object_fundamental"));
        s.actor_transient = epa_from_json(j.at("actor_transient"));
        s.object_transient = epa_from_json(j.at("object_transient"));
        for (const auto& h : j.at("history")) {
            StepRecord r;
            r.acting_side = parse_side(h.at("side").get<std::string>());
            r.behavior = h.at("behavior").get<std::string>();
            r.behavior_fundamental = epa_from_json(h.at("behavior_fundamental"));
            r.actor_transient = epa_from_json(h.at("actor_transient"));
            r.behavior_transient = epa_from_json(h.at("behavior_transient"));
            r.object_transient = epa_from_json(h.at("object_transient"));
            r.deflection = h.at("deflection").get<double>();
            s.history.push_back(std::move(r));
        }
        return s;
    } catch (const json::exception& e) {
        throw ParseError(std::string("simulation state: ") + e.what());
    }
}

namespace {

json party_json(const PartySpec& p) {
    return {{"identity", p.identity}, {"modifier", p.modifier ? json(*p.modifier) : json(nullptr)}};
}

PartySpec party_from_json(const json& j) {
    PartySpec p;
    p.identity = j.at("identity").get<std::string>();
    if (j.contains("modifier") && j["modifier"].is_string()) p.modifier = j["modifier"].get<std::string>();
    return p;
}

std::string now_iso8601() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

json to_json(const Session& s) {
    return {{"id", s.id},
            {"actor", party_json(s.actor)},
            {"object", party_json(s.object)},
            {"coefficients", s.coefficients},
            {"state", to_json(s.state)},
            {"created", s.created},
            {"updated", s.updated}};
}

Session session_from_json(const json& j) {
    try {
        Session s;
        s.id = j.at("id").get<std::string>();
        s.actor = party_from_json(j.at("actor"));
        s.object = party_from_json(j.at("object"));
        s.coefficients = j.at("coefficients").get<std::string>();
        s.state = state_from_json(j.at("state"));
        s.created = j.value("created", std::string{});
        s.updated = j.value("updated", std::string{});
        return s;
    } catch (const json::exception& e) {
        throw ParseError(std::string("session: ") + e.what());
    }
}

json to_json(const BehaviorSuggestion& s) {
    json neighbors = json::array();
    for (const auto& n : s.neighbors) {
        neighbors.push_back(
            {{"term", n.entry.term}, {"epa", to_json(n.entry.epa)}, {"distance", n.distance}, {"deflection", n.deflection}});
    }
    return {{"behavior", to_json(s.behavior)}, {"deflection", s.deflection}, {"neighbors", std::move(neighbors)}};
}

json to_json(const EstimateDistribution& d) {
    json samples = json::array();
    for (const auto& x : d.samples) samples.push_back(to_json(x));
    return {{"term", d.term},
            {"category", to_string(d.category)},
            {"slot", to_string(d.slot)},
            {"n", d.summary.n},
            {"mean", to_json(d.summary.mean)},
            {"sd", to_json(d.summary.sd)},
            {"min", to_json(d.summary.min)},
            {"max", to_json(d.summary.max)},
            {"samples", std::move(samples)}};
}

SessionStore::SessionStore(std::shared_ptr<const EngineResources> resources,
                           std::optional<std::filesystem::path> state_dir)
    : resources_(std::move(resources)), state_dir_(std::move(state_dir)) {
    if (!state_dir_) return;
    std::filesystem::create_directories(*state_dir_);
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(*state_dir_)) {
        if (entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
        std::ifstream in(path);
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw ParseError("session snapshot " + path.string() + ": " + e.what());
        }
        auto slot = std::make_shared<Slot>();
        slot->session = session_from_json(j);
        const std::string& id = slot->session.id;
        if (id.size() > 1 && id[0] == 's') {
            try {
                next_id_ = std::max<std::uint64_t>(next_id_, std::stoull(id.substr(1)) + 1);
            } catch (const std::exception&) {
            }
        }
        sessions_[id] = std::move(slot);
    }
}

std::shared_ptr<SessionStore::Slot> SessionStore::slot(const std::string& id) const {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw NotFoundError("unknown session '" + id + "'");
    return it->second;
}

void SessionStore::persist(const Session& session) const {
    if (!state_dir_) return;
    const auto path = *state_dir_ / (session.id + ".json");
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp);
        out << to_json(session).dump(2) << '\n';
    }
    std::filesystem::rename(tmp, path);
}

Session SessionStore::create(const PartySpec& actor, const PartySpec& object, const std::string& coefficients) {
    const auto& res = *resources_;
    const std::string coeff_id = coefficients.empty() ? res.default_coefficients : coefficients;
    res.coefficients(coeff_id);
    auto slot = std::make_shared<Slot>();
    Session& s = slot->session;
    s.actor = actor;
    s.object = object;
    s.coefficients = coeff_id;
    s.state = SimulationState::start(resolve_party(actor, res.lexicon, res.amalgamation),
                                     resolve_party(object, res.lexicon, res.amalgamation));
    s.created = s.updated = now_iso8601();
    {
        std::lock_guard lock(mutex_);
        s.id = "s" + std::to_string(next_id_++);
        sessions_[s.id] = slot;
    }
    std::lock_guard lock(slot->mutex);
    persist(s);
    return s;
}

Session SessionStore::get(const std::string& id) const {
    auto sl = slot(id);
    std::lock_guard lock(sl->mutex);
    return sl->session;
}

Session SessionStore::apply_event(const std::string& id, Side side, const std::string& behavior) {
    auto sl = slot(id);
    std::lock_guard lock(sl->mutex);
    Session& s = sl->session;
    const auto& res = *resources_;
    s.state = step_event(s.state, res.lexicon.at(behavior, Category::behavior), side, res.coefficients(s.coefficients));
    s.updated = now_iso8601();
    persist(s);
    return s;
}

SimulationState SessionStore::preview(const std::string& id, Side side, const std::string& behavior) const {
    const Session s = get(id);
    const auto& res = *resources_;
    return step_event(s.state, res.lexicon.at(behavior, Category::behavior), side, res.coefficients(s.coefficients));
}

BehaviorSuggestion SessionStore::suggest(const std::string& id, Side side, std::size_t k) const {
    const Session s = get(id);
    const auto& res = *resources_;
    return suggest_behavior(s.state, side, res.lexicon, res.coefficients(s.coefficients), k);
}

bool SessionStore::erase(const std::string& id) {
    std::shared_ptr<Slot> removed;
    {
        std::lock_guard lock(mutex_);
        auto it = sessions_.find(id);
        if (it == sessions_.end()) return false;
        removed = it->second;
        sessions_.erase(it);
    }
    std::lock_guard lock(removed->mutex);
    if (state_dir_) std::filesystem::remove(*state_dir_ / (id + ".json"));
    return true;
}

std::vector<std::string> SessionStore::ids() const {
    std::lock_guard lock(mutex_);
    std::vector<std::string> out;
    for (const auto& [id, _] : sessions_) out.push_back(id);
    return out;
}

}  // namespace actlex
