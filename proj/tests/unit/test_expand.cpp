#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "../test_util.hpp"
#include "actlex/corpus.hpp"
#include "actlex/errors.hpp"
#include "actlex/expand.hpp"
#include "actlex/lexicon.hpp"

using namespace actlex;

namespace {

// Every sentence maps to the same vector, so the head's bias alone decides
// the prediction.
struct ConstantProvider : EmbeddingProvider {
    std::size_t dim() const override { return 2; }
    std::optional<std::vector<double>> embed(const MabmoEvent&) const override { return std::vector<double>{0.0, 0.0}; }
};

HeadModel bias_model(const TargetVector& bias) {
    auto m = HeadModel::zeros(2, 2);
    std::copy(bias.begin(), bias.end(), m.b2.begin());
    return m;
}

EstimateDistribution dist_of(const std::string& term, Category c, std::vector<Epa> samples) {
    EstimateDistribution d;
    d.term = term;
    d.category = c;
    d.slot = pinned_slot(c);
    d.samples = std::move(samples);
    d.summary = aggregate(d.samples);
    return d;
}

}  // namespace

TEST_SUITE("aggregate") {
    TEST_CASE("single sample has itself as every statistic and zero spread") {
        const std::vector<Epa> s{{1, 1, 1}};
        const auto a = aggregate(s);
        CHECK(a.n == 1);
        CHECK(a.mean == Epa{1, 1, 1});
        CHECK(a.sd == Epa{0, 0, 0});
        CHECK(a.min == Epa{1, 1, 1});
        CHECK(a.max == Epa{1, 1, 1});
    }

    TEST_CASE("two symmetric samples have population sd 1") {
        const std::vector<Epa> s{{0, 0, 0}, {2, 2, 2}};
        const auto a = aggregate(s);
        CHECK(a.mean == Epa{1, 1, 1});
        CHECK(a.sd == Epa{1, 1, 1});
        CHECK(a.min == Epa{0, 0, 0});
        CHECK(a.max == Epa{2, 2, 2});
    }

    TEST_CASE("matches a streaming brute-force computation on 385 samples") {
        std::mt19937_64 gen(385);
        std::normal_distribution<double> z(0.5, 1.3);
        std::vector<Epa> s(385);
        for (auto& x : s) x = {z(gen), z(gen), z(gen)};
        const auto a = aggregate(s);
        for (std::size_t d = 0; d < 3; ++d) {
            // Welford's update, independent of the two-pass implementation.
            double mean = 0.0, m2 = 0.0, lo = INFINITY, hi = -INFINITY;
            for (std::size_t i = 0; i < s.size(); ++i) {
                const double x = s[i][d], delta = x - mean;
                mean += delta / static_cast<double>(i + 1);
                m2 += delta * (x - mean);
                lo = std::min(lo, x);
                hi = std::max(hi, x);
            }
            CHECK(a.mean[d] == doctest::Approx(mean).epsilon(1e-12));
            CHECK(a.sd[d] == doctest::Approx(std::sqrt(m2 / 385.0)).epsilon(1e-12));
            CHECK(a.min[d] == lo);
            CHECK(a.max[d] == hi);
        }
    }

    TEST_CASE("statistics do not depend on sample order") {
        std::mt19937_64 gen(8);
        std::uniform_real_distribution<double> u(-4, 4);
        std::vector<Epa> s(60);
        for (auto& x : s) x = {u(gen), u(gen), u(gen)};
        const auto a = aggregate(s, 0.1);
        for (int round = 0; round < 5; ++round) {
            std::shuffle(s.begin(), s.end(), gen);
            const auto b = aggregate(s, 0.1);
            CHECK(testutil::near(a.mean, b.mean, 1e-12));
            CHECK(testutil::near(a.sd, b.sd, 1e-12));
            CHECK(a.min == b.min);
            CHECK(a.max == b.max);
            CHECK(testutil::near(a.trimmed_mean, b.trimmed_mean, 1e-12));
        }
    }

    TEST_CASE("trimming drops the tails per dimension") {
        std::vector<Epa> s;
        for (int i = 0; i < 9; ++i) s.push_back({static_cast<double>(i), 0, 0});
        s.push_back({1000, 0, 0});
        const auto a = aggregate(s, 0.1);
        CHECK(a.trimmed_mean.e == doctest::Approx((1 + 2 + 3 + 4 + 5 + 6 + 7 + 8) / 8.0));
        CHECK(aggregate(s).trimmed_mean.e == a.mean.e);
        CHECK_THROWS_AS(aggregate(s, 0.5), InvalidInputError);
        CHECK_THROWS_AS(aggregate(std::vector<Epa>{}), InvalidInputError);
    }
}

TEST_SUITE("expand") {
    TEST_CASE("extract_slot reads each slot's three values") {
        TargetVector v{};
        for (std::size_t i = 0; i < 15; ++i) v[i] = static_cast<double>(i);
        CHECK(extract_slot(v, Slot::modifier1) == Epa{0, 1, 2});
        CHECK(extract_slot(v, Slot::actor) == Epa{3, 4, 5});
        CHECK(extract_slot(v, Slot::behavior) == Epa{6, 7, 8});
        CHECK(extract_slot(v, Slot::modifier2) == Epa{9, 10, 11});
        CHECK(extract_slot(v, Slot::object) == Epa{12, 13, 14});
    }

    TEST_CASE("pinned slot follows the category") {
        CHECK(pinned_slot(Category::identity) == Slot::actor);
        CHECK(pinned_slot(Category::identity, true) == Slot::object);
        CHECK(pinned_slot(Category::behavior) == Slot::behavior);
        CHECK(pinned_slot(Category::modifier) == Slot::modifier1);
    }

    TEST_CASE("300 pinned events for a known behavior") {
        const auto lex = load_lexicon(testutil::data("lexicons/sample.csv"));
        const auto ctx = expansion_context(lex, load_coefficients(testutil::data("coefficients/synthetic.tsv")), 2, 7);
        ExpansionOptions opt;
        opt.seed = 7;
        const auto events = pinned_events("fight", Category::behavior, ctx, opt);
        REQUIRE(events.size() == 300);
        std::set<std::string> ids, actors;
        for (const auto& e : events) {
            CHECK(e.slot(Slot::behavior).term == "fight");
            CHECK(e.split == "pinned");
            CHECK(e.sentence.find("fight") != std::string::npos);
            ids.insert(e.id);
            actors.insert(e.slot(Slot::actor).term);
            CHECK(extract_slot(e.targets, Slot::behavior) == lex.at("fight", Category::behavior).epa);
        }
        CHECK(ids.size() == 300);
        CHECK(actors.size() > 5);
        CHECK(pinned_events("fight", Category::behavior, ctx, opt)[123].sentence == events[123].sentence);
    }

    TEST_CASE("an unknown concept gets NaN targets in its slot only") {
        const auto lex = testutil::random_lexicon(15, 12, 10, 2);
        const auto ctx = expansion_context(lex, CoefficientSet::identity(), 2, 3);
        ExpansionOptions opt;
        opt.n_events = 20;
        for (const auto& e : pinned_events("zookeeper", Category::identity, ctx, opt)) {
            CHECK(e.slot(Slot::actor).term == "zookeeper");
            CHECK(std::isnan(e.targets[slot_offset(Slot::actor)]));
            CHECK(std::isfinite(e.targets[slot_offset(Slot::object)]));
            CHECK_FALSE(e.abo_code.has_value());
        }
    }

    TEST_CASE("pin_and_estimate aggregates the pinned slot of each prediction") {
        const auto lex = testutil::random_lexicon(15, 12, 10, 2);
        const auto ctx = expansion_context(lex, CoefficientSet::identity(), 2, 3);
        TargetVector bias{};
        for (std::size_t i = 0; i < 15; ++i) bias[i] = 0.1 * static_cast<double>(i);
        ExpansionOptions opt;
        opt.n_events = 40;
        const auto d = pin_and_estimate("surgeon", Category::identity, ctx, bias_model(bias), ConstantProvider{}, opt);
        CHECK(d.summary.n == 40);
        CHECK(testutil::near(d.summary.mean, {0.3, 0.4, 0.5}, 1e-12));
        CHECK(testutil::near(d.summary.sd, {0, 0, 0}, 1e-12));
        CHECK(d.sentences.size() == 40);
        opt.use_object_slot = true;
        const auto o = pin_and_estimate("surgeon", Category::identity, ctx, bias_model(bias), ConstantProvider{}, opt);
        CHECK(testutil::near(o.summary.mean, {1.2, 1.3, 1.4}, 1e-12));
        opt.n_events = 0;
        CHECK_THROWS_AS(pin_and_estimate("surgeon", Category::identity, ctx, bias_model(bias), ConstantProvider{}, opt),
                        InvalidInputError);
    }

    TEST_CASE("co-occurrence mode uses existing predictions") {
        const auto lex = testutil::random_lexicon(15, 12, 10, 2);
        const auto ctx = expansion_context(lex, CoefficientSet::identity(), 2, 3);
        const auto events = sample_mabmo(ctx, 200, 4);
        const std::string term = events[0].slot(Slot::behavior).term;
        std::vector<std::pair<std::string, TargetVector>> preds;
        std::vector<Epa> expected;
        for (const auto& e : events) {
            TargetVector p{};
            p[6] = static_cast<double>(preds.size());
            preds.emplace_back(e.id, p);
            if (e.slot(Slot::behavior).term == term) expected.push_back({p[6], 0, 0});
        }
        const auto d = estimate_from_predictions(term, Category::behavior, Slot::behavior, events, preds);
        CHECK(d.samples == expected);
        preds.pop_back();
        preds.erase(preds.begin());
        CHECK_THROWS_AS(estimate_from_predictions(term, Category::behavior, Slot::behavior, events, preds),
                        DependencyError);
        CHECK_THROWS_AS(estimate_from_predictions("nobody", Category::behavior, Slot::behavior, events, {}),
                        InvalidInputError);
    }

    TEST_CASE("emit clamps on request and refuses to overwrite") {
        const auto lex = load_lexicon(testutil::data("lexicons/sample.csv"));
        const std::vector dists{dist_of("astronaut", Category::identity, {{5, 0, 0}, {5, 0, -6}})};
        EmitOptions opt;
        opt.model_id = "m1";
        auto out = emit_entries(dists, lex, opt);
        CHECK(out[0].entry.epa == Epa{5, 0, -3});
        opt.clamp = true;
        out = emit_entries(dists, lex, opt);
        CHECK(out[0].entry.epa == Epa{4.3, 0, -3});
        CHECK(out[0].n_events == 2);
        CHECK(out[0].model_id == "m1");

        const std::vector taken{dist_of("employee", Category::identity, {{1, 1, 1}})};
        CHECK_THROWS_AS(emit_entries(taken, lex, {}), ConflictError);
        EmitOptions over;
        over.overwrite = true;
        CHECK(emit_entries(taken, lex, over).size() == 1);
    }

    TEST_CASE("expanded CSV reads back through the lexicon importer") {
        const std::vector dists{dist_of("astronaut", Category::identity, {{1.25, 2, -0.5}, {1.75, 2, 0.5}}),
                                dist_of("whisper to", Category::behavior, {{0.5, -1, -2}}),
                                dist_of("sleepy, but kind", Category::modifier, {{0.125, 0.25, 0.375}})};
        EmitOptions opt;
        opt.model_id = "head-1";
        const auto out = emit_entries(dists, SentimentLexicon{}, opt);
        std::stringstream s;
        write_expanded_csv(s, out);
        const auto back = read_lexicon_csv(s);
        CHECK(back.size() == 3);
        CHECK(back.at("astronaut", Category::identity).epa == Epa{1.5, 2, 0});
        CHECK(back.at("whisper to", Category::behavior).epa == Epa{0.5, -1, -2});
        CHECK(back.at("sleepy, but kind", Category::modifier).epa == Epa{0.125, 0.25, 0.375});
    }

    TEST_CASE("distribution table has mean, sd, min and max rows") {
        const auto d = dist_of("fight", Category::behavior, {{-2, 1, 2}, {-1, 2, 3}});
        std::ostringstream s;
        write_distribution_table(s, d);
        const auto text = s.str();
        CHECK(text.find("fight (behavior, behavior slot, 2 events)") == 0);
        CHECK(text.find("Mean                    -1.50     1.50     2.50") != std::string::npos);
        CHECK(text.find("Standard deviation       0.50     0.50     0.50") != std::string::npos);
        CHECK(text.find("Minimum                 -2.00     1.00     2.00") != std::string::npos);
        CHECK(text.find("Maximum                 -1.00     2.00     3.00") != std::string::npos);
    }
}
