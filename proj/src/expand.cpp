#include "actlex/expand.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

#include "actlex/csv.hpp"
#include "actlex/errors.hpp"
#include "actlex/rng.hpp"

namespace actlex {

EpaSummary aggregate(std::span<const Epa> samples, double trim_fraction) {
    if (samples.empty()) throw InvalidInputError("cannot aggregate an empty sample");
    if (!(trim_fraction >= 0.0 && trim_fraction < 0.5)) throw InvalidInputError("trim fraction must lie in [0, 0.5)");
    EpaSummary s;
    s.n = samples.size();
    const double n = static_cast<double>(s.n);
    for (std::size_t d = 0; d < 3; ++d) {
        std::vector<double> v;
        v.reserve(s.n);
        for (const auto& x : samples) v.push_back(x[d]);
        double sum = 0.0;
        for (double x : v) sum += x;
        const double mean = sum / n;
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        std::sort(v.begin(), v.end());
        s.mean[d] = mean;
        s.sd[d] = std::sqrt(ss / n);
        s.min[d] = v.front();
        s.max[d] = v.back();
        const auto cut = static_cast<std::size_t>(std::floor(trim_fraction * n));
        double tsum = 0.0;
        for (std::size_t i = cut; i < v.size() - cut; ++i) tsum += v[i];
        s.trimmed_mean[d] = cut == 0 ? mean : tsum / static_cast<double>(v.size() - 2 * cut);
    }
    return s;
}

Epa extract_slot(const TargetVector& values, Slot slot) {
    const std::size_t o = slot_offset(slot);
    return {values[o], values[o + 1], values[o + 2]};
}

std::uint64_t pin_seed(std::uint64_t seed, const std::string& term, Category category) {
    return derive_seed(seed, stable_hash(term + "|" + std::string(to_string(category))));
}

std::vector<MabmoEvent> pinned_events(const std::string& term, Category category, const CorpusContext& ctx,
                                      const ExpansionOptions& options) {
    PinSpec pin;
    pin.entry.term = term;
    pin.entry.category = category;
    pin.slot = pinned_slot(category, options.use_object_slot);
    if (const auto* known = ctx.lexicon.find(term, category)) {
        pin.entry = *known;
        pin.known = true;
    }
    std::string prefix = "pin-" + term + "-" + std::string(to_string(category));
    std::replace(prefix.begin(), prefix.end(), ' ', '_');
    return sample_pinned(ctx, pin, options.n_events, pin_seed(options.seed, term, category), prefix);
}

EstimateDistribution estimate_from_events(const std::string& term, Category category, Slot slot,
                                          const std::vector<MabmoEvent>& events, const HeadModel& model,
                                          const EmbeddingProvider& provider, double trim_fraction) {
    const auto examples = make_examples(events, provider);
    EstimateDistribution dist;
    dist.term = term;
    dist.category = category;
    dist.slot = slot;
    for (std::size_t i = 0; i < examples.size(); ++i) {
        dist.samples.push_back(extract_slot(forward(model, examples[i].embedding), slot));
        dist.sentences.push_back(events[i].sentence);
    }
    dist.summary = aggregate(dist.samples, trim_fraction);
    return dist;
}

EstimateDistribution pin_and_estimate(const std::string& term, Category category, const CorpusContext& ctx,
                                      const HeadModel& model, const EmbeddingProvider& provider,
                                      const ExpansionOptions& options) {
    if (options.n_events == 0) throw InvalidInputError("need at least one pinned event");
    const auto events = pinned_events(term, category, ctx, options);
    return estimate_from_events(term, category, pinned_slot(category, options.use_object_slot), events, model, provider,
                                options.trim_fraction);
}

EstimateDistribution estimate_from_predictions(const std::string& term, Category category, Slot slot,
                                               const std::vector<MabmoEvent>& events,
                                               const std::vector<std::pair<std::string, TargetVector>>& predictions) {
    std::map<std::string, const TargetVector*> by_id;
    for (const auto& [id, p] : predictions) by_id[id] = &p;
    EstimateDistribution dist;
    dist.term = term;
    dist.category = category;
    dist.slot = slot;
    for (const auto& ev : events) {
        const auto& s = ev.slot(slot);
        if (s.term != term || s.category != category) continue;
        auto it = by_id.find(ev.id);
        if (it == by_id.end()) throw DependencyError("no prediction for event " + ev.id + " \"" + ev.sentence + "\"");
        dist.samples.push_back(extract_slot(*it->second, slot));
        dist.sentences.push_back(ev.sentence);
    }
    if (dist.samples.empty()) {
        throw InvalidInputError("no events place '" + term + "' in the " + std::string(to_string(slot)) + " slot");
    }
    dist.summary = aggregate(dist.samples);
    return dist;
}

std::vector<ExpandedEntry> emit_entries(std::span<const EstimateDistribution> distributions,
                                        const SentimentLexicon& target, const EmitOptions& options) {
    if (distributions.empty()) throw InvalidInputError("no distributions to emit");
    std::vector<ExpandedEntry> out;
    for (const auto& d : distributions) {
        if (!options.overwrite && target.contains(d.term, d.category)) {
            throw ConflictError("'" + d.term + "' (" + std::string(to_string(d.category)) +
                                ") already exists in the target lexicon");
        }
        ExpandedEntry e;
        e.entry.term = d.term;
        e.entry.category = d.category;
        e.entry.epa = options.clamp ? clamp(d.summary.mean) : d.summary.mean;
        e.n_events = d.summary.n;
        e.sd = d.summary.sd;
        e.model_id = options.model_id;
        e.entry.note = "estimated from " + std::to_string(e.n_events) + " events by model " +
                       (options.model_id.empty() ? std::string("<unnamed>") : options.model_id);
        out.push_back(std::move(e));
    }
    return out;
}

void write_expanded_csv(std::ostream& out, std::span<const ExpandedEntry> entries) {
    out << "term,category,E,P,A,n_events,sd_E,sd_P,sd_A,model_id\n";
    for (const auto& e : entries) {
        csv::write_row(out, {e.entry.term, std::string(to_string(e.entry.category)), csv::format_double(e.entry.epa.e),
                             csv::format_double(e.entry.epa.p), csv::format_double(e.entry.epa.a),
                             std::to_string(e.n_events), csv::format_double(e.sd.e), csv::format_double(e.sd.p),
                             csv::format_double(e.sd.a), e.model_id});
    }
}

void write_distribution_table(std::ostream& out, const EstimateDistribution& dist) {
    out << dist.term << " (" << to_string(dist.category) << ", " << to_string(dist.slot) << " slot, "
        << dist.summary.n << " events)\n";
    char line[128];
    std::snprintf(line, sizeof line, "%-20s %8s %8s %8s\n", "", "E", "P", "A");
    out << line;
    auto row = [&](const char* name, const Epa& x) {
        std::snprintf(line, sizeof line, "%-20s %8.2f %8.2f %8.2f\n", name, x.e, x.p, x.a);
        out << line;
    };
    row("Mean", dist.summary.mean);
    row("Standard deviation", dist.summary.sd);
    row("Minimum", dist.summary.min);
    row("Maximum", dist.summary.max);
}

}  // namespace actlex
