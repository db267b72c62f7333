#include "actlex/events.hpp"

#include <cctype>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "actlex/errors.hpp"
#include "actlex/rng.hpp"

namespace actlex {

using nlohmann::json;

int abo_code(const EventProfile& fundamentals, const CoefficientSet& coeffs) {
    const auto f = fundamentals.flatten();
    const auto t = impression(fundamentals, coeffs).flatten();
    int code = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        code = (code << 1) | (t[i] - f[i] > 0.0 ? 1 : 0);
    }
    return code;
}

std::string abo_bits(int code) {
    std::string bits(9, '0');
    for (int i = 0; i < 9; ++i) {
        if (code & (1 << (8 - i))) bits[i] = '1';
    }
    return bits;
}

std::size_t CodeIndex::distinct() const {
    std::size_t n = 0;
    for (auto h : histogram) n += h > 0;
    return n;
}

std::vector<int> CodeIndex::observed_codes() const {
    std::vector<int> out;
    for (int c = 0; c < kAboCodeCount; ++c) {
        if (histogram[c] > 0) out.push_back(c);
    }
    return out;
}

CodeIndex enumerate_codes(const SentimentLexicon& lexicon, const CoefficientSet& coeffs,
                          const EnumerationOptions& options) {
    CodeIndex index;
    index.identities = lexicon.entries(Category::identity);
    index.behaviors = lexicon.entries(Category::behavior);
    const std::uint64_t ni = index.identities.size();
    const std::uint64_t nb = index.behaviors.size();
    if (ni == 0 || nb == 0) return index;

    Rng rng(options.seed);
    auto record = [&](std::uint32_t a, std::uint32_t b, std::uint32_t o) {
        const EventProfile x{index.identities[a].epa, index.behaviors[b].epa, index.identities[o].epa};
        const int code = abo_code(x, coeffs);
        const std::uint64_t seen = ++index.histogram[code];
        auto& pool = index.exemplars[code];
        if (pool.size() < options.reservoir) {
            pool.push_back({a, b, o});
        } else if (options.reservoir > 0) {
            const std::size_t j = rng.index(static_cast<std::size_t>(seen));
            if (j < options.reservoir) pool[j] = {a, b, o};
        }
        ++index.events;
    };

    const std::uint64_t total = ni * ni * nb;
    if (total <= options.budget) {
        for (std::uint32_t a = 0; a < ni; ++a) {
            for (std::uint32_t b = 0; b < nb; ++b) {
                for (std::uint32_t o = 0; o < ni; ++o) record(a, b, o);
            }
        }
    } else {
        index.sampled = true;
        for (std::uint64_t s = 0; s < options.budget; ++s) {
            const auto a = static_cast<std::uint32_t>(rng.index(ni));
            const auto b = static_cast<std::uint32_t>(rng.index(nb));
            const auto o = static_cast<std::uint32_t>(rng.index(ni));
            record(a, b, o);
        }
    }
    return index;
}

std::string_view to_string(Slot slot) {
    switch (slot) {
        case Slot::modifier1: return "modifier1";
        case Slot::actor: return "actor";
        case Slot::behavior: return "behavior";
        case Slot::modifier2: return "modifier2";
        case Slot::object: return "object";
    }
    return "unknown";
}

Slot parse_slot(std::string_view name) {
    for (Slot s : {Slot::modifier1, Slot::actor, Slot::behavior, Slot::modifier2, Slot::object}) {
        if (to_string(s) == name) return s;
    }
    throw ParseError("unknown slot '" + std::string(name) + "'");
}

std::string render_sentence(const std::array<std::string, 5>& terms) {
    std::string out;
    for (const auto& t : terms) {
        if (t.empty()) continue;
        if (!out.empty()) out.push_back(' ');
        out += t;
    }
    if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
    return out;
}

std::string render_sentence(const MabmoEvent& event) {
    std::array<std::string, 5> terms;
    for (std::size_t i = 0; i < 5; ++i) terms[i] = event.slots[i].term;
    return render_sentence(terms);
}

Strata Strata::build(const SentimentLexicon& subset, const ClusterSet& clusters) {
    Strata s;
    for (Category c : kCategories) {
        auto entries = subset.entries(c);
        if (entries.empty()) continue;
        auto& groups = s.members[c];
        groups.resize(std::max<std::size_t>(1, clusters.cluster_count(c)));
        for (auto& e : entries) {
            const int id = clusters.cluster_of(e.term, c);
            if (static_cast<std::size_t>(id) >= groups.size()) groups.resize(id + 1);
            groups[id].push_back(std::move(e));
        }
        std::erase_if(groups, [](const auto& g) { return g.empty(); });
    }
    return s;
}

bool Strata::has(Category c) const {
    auto it = members.find(c);
    return it != members.end() && !it->second.empty();
}

CorpusContext CorpusContext::build(const SentimentLexicon& subset, const ClusterSet& clusters,
                                   const CoefficientSet& coeffs, const EnumerationOptions& options) {
    CorpusContext ctx;
    ctx.lexicon = subset;
    ctx.strata = Strata::build(subset, clusters);
    ctx.codes = enumerate_codes(subset, coeffs, options);
    ctx.coeffs = coeffs;
    return ctx;
}

namespace {

// Cycles through strata in an order reshuffled every round, so each stratum
// is visited equally often.
class RoundRobin {
public:
    explicit RoundRobin(std::size_t n) : order_(n) {
        for (std::size_t i = 0; i < n; ++i) order_[i] = i;
        pos_ = n;
    }
    std::size_t next(Rng& rng) {
        if (pos_ == order_.size()) {
            rng.shuffle(order_);
            pos_ = 0;
        }
        return order_[pos_++];
    }

private:
    std::vector<std::size_t> order_;
    std::size_t pos_ = 0;
};

void require_category(const CorpusContext& ctx, Category c) {
    if (!ctx.strata.has(c)) {
        throw ConfigError("cannot sample events: no " + std::string(to_string(c)) + " concepts available");
    }
}

class StratifiedDraw {
public:
    StratifiedDraw(const CorpusContext& ctx, Category c)
        : groups_(&ctx.strata.members.at(c)), cycle_(groups_->size()) {}
    const LexiconEntry& next(Rng& rng) {
        const auto& g = (*groups_)[cycle_.next(rng)];
        return g[rng.index(g.size())];
    }

private:
    const std::vector<std::vector<LexiconEntry>>* groups_;
    RoundRobin cycle_;
};

std::string make_id(const std::string& prefix, std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%06zu", i);
    return prefix + "-" + buf;
}

void finalize(MabmoEvent& ev, const CoefficientSet& coeffs, bool known) {
    for (std::size_t s = 0; s < 5; ++s) {
        for (std::size_t d = 0; d < 3; ++d) ev.targets[3 * s + d] = ev.slots[s].epa[d];
    }
    ev.sentence = render_sentence(ev);
    if (known) {
        ev.abo_code = abo_code(EventProfile{ev.slot(Slot::actor).epa, ev.slot(Slot::behavior).epa, ev.slot(Slot::object).epa},
                               coeffs);
    }
}

}  // namespace

std::vector<MabmoEvent> sample_mabmo(const CorpusContext& ctx, std::size_t n, std::uint64_t seed,
                                     const std::string& id_prefix, const std::string& split) {
    for (Category c : kCategories) require_category(ctx, c);
    const auto codes = ctx.codes.observed_codes();
    if (codes.empty()) throw ConfigError("cannot sample events: event-code index is empty");

    Rng rng(seed);
    RoundRobin code_cycle(codes.size());
    StratifiedDraw first_modifier(ctx, Category::modifier);
    StratifiedDraw second_modifier(ctx, Category::modifier);

    std::vector<MabmoEvent> events;
    events.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int code = codes[code_cycle.next(rng)];
        const auto& pool = ctx.codes.exemplars[code];
        const AboTriple t = pool[rng.index(pool.size())];
        MabmoEvent ev;
        ev.id = make_id(id_prefix, i);
        ev.split = split;
        ev.slots[0] = first_modifier.next(rng);
        ev.slots[1] = ctx.codes.identities[t.actor];
        ev.slots[2] = ctx.codes.behaviors[t.behavior];
        ev.slots[3] = second_modifier.next(rng);
        ev.slots[4] = ctx.codes.identities[t.object];
        finalize(ev, ctx.coeffs, true);
        events.push_back(std::move(ev));
    }
    return events;
}

Slot pinned_slot(Category category, bool use_object_slot) {
    switch (category) {
        case Category::identity: return use_object_slot ? Slot::object : Slot::actor;
        case Category::behavior: return Slot::behavior;
        case Category::modifier: return use_object_slot ? Slot::modifier2 : Slot::modifier1;
    }
    return Slot::actor;
}

std::vector<MabmoEvent> sample_pinned(const CorpusContext& ctx, const PinSpec& pin, std::size_t n, std::uint64_t seed,
                                      const std::string& id_prefix) {
    const auto slot_index = static_cast<std::size_t>(pin.slot);
    if (kSlotCategories[slot_index] != pin.entry.category) {
        throw CategoryError("cannot pin a " + std::string(to_string(pin.entry.category)) + " into the " +
                            std::string(to_string(pin.slot)) + " slot");
    }
    for (std::size_t s = 0; s < 5; ++s) {
        if (s != slot_index) require_category(ctx, kSlotCategories[s]);
    }
    Rng rng(seed);
    std::vector<std::optional<StratifiedDraw>> draws(5);
    for (std::size_t s = 0; s < 5; ++s) {
        if (s != slot_index) draws[s].emplace(ctx, kSlotCategories[s]);
    }
    LexiconEntry pinned = pin.entry;
    if (!pin.known) pinned.epa = {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN(),
                                   std::numeric_limits<double>::quiet_NaN()};

    std::vector<MabmoEvent> events;
    events.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        MabmoEvent ev;
        ev.id = make_id(id_prefix, i);
        ev.split = "pinned";
        for (std::size_t s = 0; s < 5; ++s) ev.slots[s] = s == slot_index ? pinned : draws[s]->next(rng);
        finalize(ev, ctx.coeffs, pin.known);
        events.push_back(std::move(ev));
    }
    return events;
}

namespace {

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

void write_corpus_jsonl(std::ostream& out, const std::vector<MabmoEvent>& events) {
    for (const auto& ev : events) {
        json j;
        j["id"] = ev.id;
        j["sentence"] = ev.sentence;
        json slots = json::array();
        for (const auto& s : ev.slots) slots.push_back({{"term", s.term}, {"category", to_string(s.category)}});
        j["slots"] = std::move(slots);
        json targets = json::array();
        for (double t : ev.targets) targets.push_back(number_or_null(t));
        j["targets"] = std::move(targets);
        j["abo_code"] = ev.abo_code ? json(*ev.abo_code) : json(nullptr);
        j["split"] = ev.split;
        out << j.dump() << '\n';
    }
}

std::vector<MabmoEvent> read_corpus_jsonl(std::istream& in) {
    std::vector<MabmoEvent> events;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const json j = json::parse(line);
            MabmoEvent ev;
            ev.id = j.at("id").get<std::string>();
            ev.sentence = j.at("sentence").get<std::string>();
            const auto& slots = j.at("slots");
            const auto& targets = j.at("targets");
            if (slots.size() != 5 || targets.size() != kTargetSize) throw ParseError("expected 5 slots and 15 targets");
            for (std::size_t s = 0; s < 5; ++s) {
                ev.slots[s].term = slots[s].at("term").get<std::string>();
                ev.slots[s].category = parse_category(slots[s].at("category").get<std::string>());
            }
            for (std::size_t t = 0; t < kTargetSize; ++t) {
                ev.targets[t] = targets[t].is_null() ? std::numeric_limits<double>::quiet_NaN() : targets[t].get<double>();
            }
            for (std::size_t s = 0; s < 5; ++s) {
                ev.slots[s].epa = {ev.targets[3 * s], ev.targets[3 * s + 1], ev.targets[3 * s + 2]};
            }
            if (j.contains("abo_code") && !j["abo_code"].is_null()) ev.abo_code = j["abo_code"].get<int>();
            ev.split = j.value("split", std::string{});
            events.push_back(std::move(ev));
        } catch (const json::exception& e) {
            throw ParseError("corpus line " + std::to_string(lineno) + ": " + e.what());
        } catch (const Error& e) {
            throw ParseError("corpus line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return events;
}

}  // namespace actlex
