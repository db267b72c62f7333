#include <doctest.h>

#include <map>
#include <random>
#include <set>
#include <sstream>

#include "../oracles.hpp"
#include "../test_util.hpp"
#include "actlex/corpus.hpp"
#include "actlex/errors.hpp"
#include "actlex/events.hpp"
#include "actlex/kmeans.hpp"
#include "actlex/rng.hpp"
#include "actlex/split.hpp"

using namespace actlex;

TEST_SUITE("rng") {
    TEST_CASE("streams are reproducible and independent") {
        Rng a(42), b(42);
        for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
        CHECK(derive_seed(1, 2) != derive_seed(1, 3));
        CHECK(derive_seed(1, 2) != derive_seed(2, 2));
        CHECK(derive_seed(7, 9) == derive_seed(7, 9));
    }

    TEST_CASE("uniform, index and normal stay in range with plausible moments") {
        Rng r(3);
        double sum = 0, sq = 0;
        const int n = 200000;
        std::vector<int> counts(7);
        for (int i = 0; i < n; ++i) {
            const double u = r.uniform();
            CHECK((u >= 0.0 && u < 1.0));
            ++counts[r.index(7)];
            const double z = r.normal();
            sum += z;
            sq += z * z;
        }
        for (int c : counts) CHECK(std::abs(c - n / 7.0) < 0.02 * n);
        CHECK(std::abs(sum / n) < 0.01);
        CHECK(std::abs(sq / n - 1.0) < 0.02);
    }

    TEST_CASE("shuffle is a permutation") {
        Rng r(5);
        std::vector<int> v(50);
        for (int i = 0; i < 50; ++i) v[i] = i;
        r.shuffle(v);
        std::set<int> s(v.begin(), v.end());
        CHECK(s.size() == 50);
    }
}

namespace {

std::vector<Epa> blobs(const std::vector<Epa>& centers, std::size_t per, double sd, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> z(0.0, sd);
    std::vector<Epa> pts;
    for (const auto& c : centers)
        for (std::size_t i = 0; i < per; ++i) pts.push_back({c.e + z(gen), c.p + z(gen), c.a + z(gen)});
    return pts;
}

}  // namespace

TEST_SUITE("kmeans") {
    TEST_CASE("degenerate cases have zero inertia") {
        const std::vector<Epa> same(6, Epa{1, 2, 3});
        CHECK(kmeans(same, 1, 1).inertia == 0.0);
        const std::vector<Epa> distinct{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
        const auto m = kmeans(distinct, 4, 1);
        CHECK(m.inertia == 0.0);
        std::set<int> ids(m.assignment.begin(), m.assignment.end());
        CHECK(ids.size() == 4);
        CHECK_THROWS_AS(kmeans(distinct, 5, 1), InvalidInputError);
        CHECK_THROWS_AS(kmeans(distinct, 0, 1), InvalidInputError);
    }

    TEST_CASE("two blobs match the exhaustive best 2-partition") {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const auto pts = blobs({{-2, -1, 0}, {2, 1, 0.5}}, 6, 0.4, seed);
            std::uint32_t mask = 0;
            const double best = oracle::best_two_partition(pts, &mask);
            const auto m = kmeans(pts, 2, seed);
            CHECK(m.inertia == doctest::Approx(best).epsilon(1e-9));
            CHECK(inertia_of(pts, m) == doctest::Approx(m.inertia).epsilon(1e-12));
            for (std::size_t i = 0; i < pts.size(); ++i) {
                const bool same_as_first = m.assignment[i] == m.assignment[0];
                const bool oracle_same = ((mask >> i) & 1u) == (mask & 1u);
                CHECK(same_as_first == oracle_same);
            }
        }
    }

    TEST_CASE("elbow suggests five for five separated blobs") {
        const auto pts = blobs({{-3, -3, -3}, {3, 3, 3}, {-3, 3, 0}, {3, -3, 0}, {0, 0, 3.5}}, 20, 0.25, 9);
        const auto r = elbow_diagnostic(pts, 10, 4);
        CHECK(r.inertia.size() == 10);
        for (std::size_t k = 1; k < r.inertia.size(); ++k) CHECK(r.inertia[k] <= r.inertia[k - 1] + 1e-9);
        CHECK(r.suggested_k == 5);
        std::ostringstream out;
        write_elbow_csv(out, r);
        CHECK(out.str().rfind("k,inertia\n1,", 0) == 0);
    }

    TEST_CASE("clustering a lexicon caps k at the category size") {
        const auto lex = testutil::random_lexicon(12, 3, 8, 2);
        const auto set = cluster_lexicon(lex, 5, 1);
        CHECK(set.cluster_count(Category::identity) == 5);
        CHECK(set.cluster_count(Category::behavior) == 3);
        for (const auto& [key, e] : lex) CHECK(set.cluster_of(e.term, e.category) < 5);
        CHECK(kDefaultClusterCount == 5);
    }
}

TEST_SUITE("split") {
    TEST_CASE("allocation arithmetic") {
        CHECK(allocate_counts(100, {}) == std::array<std::size_t, 3>{80, 8, 12});
        CHECK(allocate_counts(10, {0.8, 0.1, 0.1, 0}) == std::array<std::size_t, 3>{8, 1, 1});
        CHECK_THROWS_AS(SplitSpec({1.0, 0.0, 0.0, 0}).validate(), ConfigError);
        CHECK_THROWS_AS(SplitSpec({0.85, 0.08, 0.12, 0}).validate(), ConfigError);
        for (std::size_t n = 0; n < 60; ++n) {
            const auto c = allocate_counts(n, {});
            CHECK(c[0] + c[1] + c[2] == n);
            CHECK(std::abs(static_cast<double>(c[1]) - 0.08 * n) < 1.0 + 1e-9);
            CHECK(std::abs(static_cast<double>(c[2]) - 0.12 * n) < 1.0 + 1e-9);
        }
    }

    TEST_CASE("ten strata of ten give 8/1/1 each and partition the lexicon") {
        SentimentLexicon lex;
        ClusterSet clusters;
        for (int s = 0; s < 10; ++s)
            for (int i = 0; i < 10; ++i) {
                const std::string term = "t" + std::to_string(s) + "_" + std::to_string(i);
                lex.insert({term, Category::identity, {0.1 * s, 0.01 * i, 0}, {}});
                clusters.lookup[{term, Category::identity}] = s;
            }
        clusters.models[Category::identity].k = 10;
        const auto split = stratified_split(lex, clusters, {0.8, 0.1, 0.1, 3});
        CHECK(split.strata.size() == 10);
        for (const auto& st : split.strata) CHECK(st.realized == std::array<std::size_t, 3>{8, 1, 1});
        std::set<std::string> seen;
        for (const auto* part : {&split.train, &split.test, &split.validation})
            for (const auto& [key, e] : *part) CHECK(seen.insert(e.term).second);
        CHECK(seen.size() == lex.size());

        const auto again = stratified_split(lex, clusters, {0.8, 0.1, 0.1, 3});
        CHECK(again.test == split.test);
        CHECK(again.validation == split.validation);
        const auto other = stratified_split(lex, clusters, {0.8, 0.1, 0.1, 4});
        CHECK_FALSE(other.test == split.test);
    }
}

TEST_SUITE("events") {
    TEST_CASE("code semantics") {
        const EventProfile x{{1, -1, 0.5}, {2, 0, -1}, {-0.5, 0.3, 1}};
        CHECK(abo_code(x, CoefficientSet::identity()) == 0);
        auto shifted = CoefficientSet::identity();
        for (std::size_t j = 0; j < 9; ++j) shifted.set(0, j, 1.0);
        CHECK(abo_code(x, shifted) == 511);
        auto pattern = CoefficientSet::identity();
        for (std::size_t j = 0; j < 9; ++j) pattern.set(0, j, (j >= 3 && j < 6) ? -1.0 : 1.0);
        CHECK(abo_code(x, pattern) == 455);
        CHECK(abo_bits(455) == "111000111");
        CHECK(abo_bits(1) == "000000001");
    }

    TEST_CASE("code matches the oracle and ignores positive rescaling of transient shifts") {
        std::mt19937_64 gen(12);
        const auto lc = oracle::random_coeffs(gen);
        const std::vector<std::string> linear = {"Ae", "Ap", "Aa", "Be", "Bp", "Ba", "Oe", "Op", "Oa"};
        // identity + s * (lc - identity) moves every transient s times as far.
        auto rescaled = [&](double s) {
            auto out = lc;
            for (auto& [label, row] : out) {
                for (int c = 0; c < 9; ++c) {
                    const double id = label == linear[c] ? 1.0 : 0.0;
                    row[c] = id + s * (row[c] - id);
                }
            }
            return oracle::to_set(out);
        };
        for (int k = 0; k < 50; ++k) {
            const auto f = oracle::random_profile(gen);
            const int code = abo_code(EventProfile::unflatten(f), oracle::to_set(lc));
            CHECK(code == oracle::abo_code(lc, f));
            for (double s : {0.01, 0.5, 7.0}) CHECK(abo_code(EventProfile::unflatten(f), rescaled(s)) == code);
        }
    }

    TEST_CASE("enumeration matches a nested-loop histogram") {
        std::mt19937_64 gen(44);
        const auto lex = testutil::random_lexicon(3, 2, 0, 5);
        const auto lc = oracle::random_coeffs(gen, 0.8);
        const auto idx = enumerate_codes(lex, oracle::to_set(lc));
        std::array<std::uint64_t, 512> want{};
        const auto ids = lex.entries(Category::identity);
        const auto bs = lex.entries(Category::behavior);
        for (const auto& a : ids)
            for (const auto& b : bs)
                for (const auto& o : ids) {
                    ++want[oracle::abo_code(lc, {a.epa.e, a.epa.p, a.epa.a, b.epa.e, b.epa.p, b.epa.a, o.epa.e, o.epa.p, o.epa.a})];
                }
        CHECK(idx.histogram == want);
        CHECK(idx.events == 18);
        CHECK_FALSE(idx.sampled);

        const auto single = enumerate_codes(testutil::random_lexicon(1, 1, 0, 2), CoefficientSet::identity());
        CHECK(single.distinct() == 1);
        CHECK(single.observed_codes() == std::vector<int>{0});
    }

    TEST_CASE("budget switches to seeded sampling") {
        const auto lex = testutil::random_lexicon(20, 10, 0, 5);
        std::mt19937_64 gen(1);
        const auto set = oracle::to_set(oracle::random_coeffs(gen));
        EnumerationOptions opt;
        opt.budget = 500;
        opt.seed = 9;
        const auto a = enumerate_codes(lex, set, opt);
        CHECK(a.sampled);
        CHECK(a.events == 500);
        CHECK(a.histogram == enumerate_codes(lex, set, opt).histogram);
        for (int c : a.observed_codes()) CHECK(a.exemplars[c].size() == std::min<std::uint64_t>(a.histogram[c], 256));
    }

    TEST_CASE("sentences") {
        CHECK(render_sentence({"happy", "employee", "greets", "bossy", "employer"}) ==
              "Happy employee greets bossy employer");
        CHECK(render_sentence({"peaceful", "decorator", "fight", "amused", "cement worker"}) ==
              "Peaceful decorator fight amused cement worker");
        CHECK(render_sentence({"old fashioned", "casual laborer", "fight", "petty", "undergraduate"}) ==
              "Old fashioned casual laborer fight petty undergraduate");
    }

    TEST_CASE("singleton lexicons yield the unique event") {
        SentimentLexicon lex;
        lex.insert({"kind", Category::modifier, {2, 1, 0}, {}});
        lex.insert({"nurse", Category::identity, {2, 1, 0}, {}});
        lex.insert({"help", Category::behavior, {2, 2, 1}, {}});
        const auto clusters = cluster_lexicon(lex, 5, 1);
        const auto ctx = CorpusContext::build(lex, clusters, CoefficientSet::identity());
        const auto ev = sample_mabmo(ctx, 1, 3);
        REQUIRE(ev.size() == 1);
        CHECK(ev[0].sentence == "Kind nurse help kind nurse");
        CHECK(ev[0].abo_code == 0);
    }

    TEST_CASE("targets reconstruct from lexicon lookups and sampling is seeded") {
        const auto lex = testutil::random_lexicon(30, 15, 25, 8);
        const auto clusters = cluster_lexicon(lex, 5, 2);
        std::mt19937_64 gen(3);
        const auto set = oracle::to_set(oracle::random_coeffs(gen));
        const auto ctx = CorpusContext::build(lex, clusters, set);
        const auto ev = sample_mabmo(ctx, 10000, 77);
        std::map<int, std::size_t> modifier_clusters;
        for (const auto& e : ev) {
            for (std::size_t s = 0; s < 5; ++s) {
                const auto& entry = lex.at(e.slots[s].term, kSlotCategories[s]);
                for (std::size_t d = 0; d < 3; ++d) CHECK_EQ(e.targets[3 * s + d], entry.epa[d]);
            }
            ++modifier_clusters[clusters.cluster_of(e.slot(Slot::modifier1).term, Category::modifier)];
            REQUIRE(e.abo_code);
            CHECK(*e.abo_code == abo_code({e.slot(Slot::actor).epa, e.slot(Slot::behavior).epa, e.slot(Slot::object).epa}, set));
        }
        CHECK(modifier_clusters.size() == 5);
        for (const auto& [c, n] : modifier_clusters) CHECK(std::abs(static_cast<double>(n) - 2000.0) <= 0.02 * 2000.0);

        const auto again = sample_mabmo(ctx, 10000, 77);
        std::ostringstream a, b, c;
        write_corpus_jsonl(a, ev);
        write_corpus_jsonl(b, again);
        write_corpus_jsonl(c, sample_mabmo(ctx, 10000, 78));
        CHECK(a.str() == b.str());
        CHECK(a.str() != c.str());
    }

    TEST_CASE("pinned sampling fixes the concept and hides unknown targets") {
        const auto lex = load_lexicon(testutil::data("lexicons/sample.csv"));
        const auto clusters = cluster_lexicon(lex, 5, 1);
        const auto ctx = CorpusContext::build(lex, clusters, CoefficientSet::identity());
        PinSpec pin{lex.at("fight", Category::behavior), Slot::behavior, true};
        const auto ev = sample_pinned(ctx, pin, 300, 5, "pin-fight");
        CHECK(ev.size() == 300);
        for (const auto& e : ev) {
            CHECK(e.slot(Slot::behavior).term == "fight");
            CHECK(e.split == "pinned");
            CHECK(e.targets[6] == lex.at("fight", Category::behavior).epa.e);
        }
        PinSpec unknown{{"dentist", Category::identity, {}, {}}, Slot::actor, false};
        const auto u = sample_pinned(ctx, unknown, 10, 5, "pin-dentist");
        for (const auto& e : u) {
            CHECK(std::isnan(e.targets[3]));
            CHECK_FALSE(e.abo_code.has_value());
        }
        PinSpec wrong{lex.at("fight", Category::behavior), Slot::actor, true};
        CHECK_THROWS_AS(sample_pinned(ctx, wrong, 1, 1, "x"), CategoryError);
        CHECK(pinned_slot(Category::identity) == Slot::actor);
        CHECK(pinned_slot(Category::identity, true) == Slot::object);
        CHECK(pinned_slot(Category::modifier) == Slot::modifier1);
        CHECK(pinned_slot(Category::behavior) == Slot::behavior);
    }

    TEST_CASE("corpus JSONL round-trips, with null for unknown targets") {
        const auto lex = load_lexicon(testutil::data("lexicons/sample.csv"));
        const auto ctx = CorpusContext::build(lex, cluster_lexicon(lex, 3, 1), CoefficientSet::identity());
        auto ev = sample_mabmo(ctx, 20, 1, "x", "train");
        const auto pinned = sample_pinned(ctx, {{"dentist", Category::identity, {}, {}}, Slot::actor, false}, 3, 1, "p");
        ev.insert(ev.end(), pinned.begin(), pinned.end());
        std::stringstream buf;
        write_corpus_jsonl(buf, ev);
        CHECK(buf.str().find("null") != std::string::npos);
        const auto back = read_corpus_jsonl(buf);
        REQUIRE(back.size() == ev.size());
        for (std::size_t i = 0; i < ev.size(); ++i) {
            CHECK(back[i].id == ev[i].id);
            CHECK(back[i].sentence == ev[i].sentence);
            CHECK(back[i].abo_code == ev[i].abo_code);
            for (std::size_t j = 0; j < kTargetSize; ++j) {
                if (std::isnan(ev[i].targets[j])) CHECK(std::isnan(back[i].targets[j]));
                else CHECK(back[i].targets[j] == ev[i].targets[j]);
            }
        }
        std::istringstream bad("{\"id\": 3}\n");
        CHECK_THROWS_AS(read_corpus_jsonl(bad), ParseError);
    }
}

TEST_SUITE("corpus") {
    TEST_CASE("generation is deterministic, stratified and split-consistent") {
        const auto lex = testutil::random_lexicon(150, 80, 60, 21);
        std::mt19937_64 gen(6);
        const auto set = oracle::to_set(oracle::random_coeffs(gen));
        CorpusOptions opt;
        opt.seed = 7;
        opt.n_train = 2000;
        opt.n_test = 200;
        opt.n_validation = 200;
        const auto a = generate_corpus(lex, set, opt);
        const auto b = generate_corpus(lex, set, opt);
        std::ostringstream ja, jb;
        write_corpus_jsonl(ja, a.events);
        write_corpus_jsonl(jb, b.events);
        CHECK(ja.str() == jb.str());
        CHECK(a.events.size() == 2400);

        const std::map<std::string, const SentimentLexicon*> parts{
            {"train", &a.split.train}, {"test", &a.split.test}, {"validation", &a.split.validation}};
        for (const auto& e : a.events) {
            const auto* part = parts.at(e.split);
            for (std::size_t s = 0; s < 5; ++s) CHECK(part->contains(e.slots[s].term, kSlotCategories[s]));
        }
        CHECK(a.split.train.size() + a.split.test.size() + a.split.validation.size() == lex.size());
        for (const auto& st : a.split.strata) {
            const auto want = allocate_counts(st.total, opt.split);
            for (int i = 0; i < 3; ++i) {
                const double target = st.total * std::array<double, 3>{0.8, 0.08, 0.12}[i];
                CHECK(std::abs(static_cast<double>(st.realized[i]) - target) <= 1.0);
                CHECK(st.realized[i] == want[i]);
            }
        }
        CHECK(a.elbow.size() == 3);
    }

    TEST_CASE("a split without behaviors is reported with its name") {
        const auto lex = testutil::random_lexicon(40, 3, 20, 1);
        CorpusOptions opt;
        opt.n_train = 10;
        opt.n_test = 10;
        opt.n_validation = 10;
        CHECK_THROWS_WITH_AS(generate_corpus(lex, CoefficientSet::identity(), opt), doctest::Contains("split"),
                             ConfigError);
    }
}
