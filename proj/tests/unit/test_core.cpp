#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "../oracles.hpp"
#include "../test_util.hpp"
#include "actlex/amalgamation.hpp"
#include "actlex/control.hpp"
#include "actlex/csv.hpp"
#include "actlex/errors.hpp"
#include "actlex/impression.hpp"
#include "actlex/lexicon.hpp"
#include "actlex/simulation.hpp"

using namespace actlex;
using testutil::near;

TEST_SUITE("epa") {
    TEST_CASE("category names round-trip and reject unknowns") {
        for (Category c : kCategories) CHECK(parse_category(to_string(c)) == c);
        CHECK_THROWS_AS(parse_category("verb"), ParseError);
    }

    TEST_CASE("range check and clamp") {
        CHECK(Epa{4.3, -4.3, 0}.in_range());
        CHECK_FALSE(Epa{4.31, 0, 0}.in_range());
        CHECK(clamp(Epa{5.0, 0, -9}) == Epa{4.3, 0, -4.3});
    }

    TEST_CASE("profile flattening order") {
        EventProfile x{{1, 2, 3}, {4, 5, 6}, {7, 8, 9}};
        const auto f = x.flatten();
        for (int i = 0; i < 9; ++i) CHECK(f[i] == i + 1);
        CHECK(EventProfile::unflatten(f).object == Epa{7, 8, 9});
    }
}

TEST_SUITE("csv") {
    TEST_CASE("quoted fields with commas and escaped quotes") {
        const auto f = csv::split_line(R"(a,"b, c","say ""hi""",)");
        REQUIRE(f.size() == 4);
        CHECK(f[1] == "b, c");
        CHECK(f[2] == "say \"hi\"");
        CHECK(f[3].empty());
        CHECK(csv::split_line(csv::quote("x,\"y\"")).at(0) == "x,\"y\"");
    }

    TEST_CASE("doubles format shortest and parse strictly") {
        for (double x : {0.1, -2.07, 1e-300, 4.3, 1.0 / 3.0}) CHECK(csv::parse_double(csv::format_double(x), "x") == x);
        CHECK_THROWS_AS(csv::parse_double("1.2abc", "x"), ParseError);
        CHECK_THROWS_AS(csv::parse_double("", "x"), ParseError);
        CHECK(csv::format_double(std::nan("")) == "nan");
    }
}

TEST_SUITE("lexicon") {
    TEST_CASE("reads header in any case and order, skipping comments and extra columns") {
        std::istringstream in("# note\nA,p,E,Term,extra,CATEGORY\n0.5,1,2,reply to,zz,behavior\n");
        const auto lex = read_lexicon_csv(in);
        CHECK(lex.at("reply to", Category::behavior).epa == Epa{2, 1, 0.5});
    }

    TEST_CASE("rejects out-of-range, duplicate and malformed rows with line numbers") {
        std::istringstream range("term,category,E,P,A\nx,identity,4.4,0,0\n");
        CHECK_THROWS_WITH_AS(read_lexicon_csv(range, "f.csv"), doctest::Contains("f.csv:2"), ParseError);
        std::istringstream dup("term,category,E,P,A\nx,identity,1,0,0\nx,identity,2,0,0\n");
        CHECK_THROWS_AS(read_lexicon_csv(dup), ParseError);
        std::istringstream cat("term,category,E,P,A\nx,noun,1,0,0\n");
        CHECK_THROWS_AS(read_lexicon_csv(cat), ParseError);
        std::istringstream header("term,E,P,A\n");
        CHECK_THROWS_AS(read_lexicon_csv(header), ParseError);
    }

    TEST_CASE("same term may appear in different categories") {
        SentimentLexicon lex;
        lex.insert({"cook", Category::identity, {1, 1, 1}, {}});
        lex.insert({"cook", Category::behavior, {2, 0, 1}, {}});
        CHECK(lex.size() == 2);
        CHECK_THROWS_AS(lex.insert({"cook", Category::identity, {0, 0, 0}, {}}), ConflictError);
        lex.insert({"cook", Category::identity, {0, 0, 0}, {}}, true);
        CHECK(lex.at("cook", Category::identity).epa == Epa{});
        CHECK_THROWS_AS(lex.at("cook", Category::modifier), NotFoundError);
    }

    TEST_CASE("write then read is lossless") {
        const auto lex = testutil::random_lexicon(7, 5, 4, 11);
        std::stringstream buf;
        write_lexicon_csv(buf, lex);
        CHECK(read_lexicon_csv(buf) == lex);
    }

    TEST_CASE("sample lexicon loads") {
        const auto lex = load_lexicon(testutil::data("lexicons/sample.csv"));
        for (const char* t : {"employee", "employer"}) CHECK(lex.contains(t, Category::identity));
        CHECK(lex.contains("bossy", Category::modifier));
        for (const char* b : {"greet", "ask", "reply to", "argue with", "listen to", "disobey", "fight"})
            CHECK(lex.contains(b, Category::behavior));
    }
}

TEST_SUITE("amalgamation") {
    TEST_CASE("published intercept and hand-multiplied cases") {
        CHECK(amalgamate({0, 0, 0}, {0, 0, 0}) == Epa{-0.17, -0.18, 0.00});
        CHECK(near(amalgamate({1, 0, 0}, {0, 0, 0}), {0.45, -0.29, 0.00}, 1e-12));
        CHECK(near(amalgamate({0, 0, 0}, {1, 1, 1}), {0.33, 0.45, 0.55}, 1e-12));
    }

    TEST_CASE("affine in the modifier") {
        std::mt19937_64 gen(5);
        std::uniform_real_distribution<double> u(-4.3, 4.3);
        const AmalgamationCoefficients k;
        for (int i = 0; i < 200; ++i) {
            const Epa m{u(gen), u(gen), u(gen)}, id{u(gen), u(gen), u(gen)};
            const Epa theta_m{0.62 * m.e - 0.14 * m.p - 0.18 * m.a, -0.11 * m.e + 0.63 * m.p, 0.61 * m.a};
            CHECK(near(amalgamate(m, id) - amalgamate({}, id), theta_m, 1e-12));
            CHECK(near(amalgamate(m, id) - amalgamate(m, {}), multiply(k.identity_weights, id) , 1e-12));
        }
    }

    TEST_CASE("non-finite input is rejected") {
        CHECK_THROWS_AS(amalgamate({std::nan(""), 0, 0}, {}), InvalidInputError);
    }
}

TEST_SUITE("impression") {
    TEST_CASE("basis has 64 distinct labels matching an independently built set") {
        const auto& labels = basis_labels();
        const auto want = oracle::all_labels();
        CHECK(std::set<std::string>(labels.begin(), labels.end()) == std::set<std::string>(want.begin(), want.end()));
        CHECK(labels[0] == "1");
        CHECK(labels[1] == "Ae");
        CHECK(labels[10] == "AeBe");
        CHECK(labels[11] == "AeBp");
        CHECK(labels[63] == "AaBaOa");
        for (std::size_t i = 0; i < labels.size(); ++i) CHECK(basis_index(labels[i]) == static_cast<int>(i));
        CHECK(basis_index("BeAe") == -1);
    }

    TEST_CASE("basis expansion of zeros, ones and random profiles") {
        const auto zero = basis_expand({});
        CHECK(zero[0] == 1.0);
        CHECK(std::all_of(zero.begin() + 1, zero.end(), [](double v) { return v == 0.0; }));
        const auto ones = basis_expand({{1, 1, 1}, {1, 1, 1}, {1, 1, 1}});
        CHECK(std::all_of(ones.begin(), ones.end(), [](double v) { return v == 1.0; }));

        std::mt19937_64 gen(17);
        for (int k = 0; k < 50; ++k) {
            const auto x = oracle::random_profile(gen);
            const auto b = basis_expand(EventProfile::unflatten(x));
            for (const auto& label : oracle::all_labels()) {
                CHECK(b[basis_index(label)] == doctest::Approx(oracle::term_value(label, x)).epsilon(1e-15));
            }
        }
    }

    TEST_CASE("basis is multilinear in the behavior components") {
        std::mt19937_64 gen(3);
        const auto x = oracle::random_profile(gen);
        auto scaled = x;
        const double t = 1.7;
        for (int i = 3; i < 6; ++i) scaled[i] *= t;
        const auto b0 = basis_expand(EventProfile::unflatten(x));
        const auto b1 = basis_expand(EventProfile::unflatten(scaled));
        for (std::size_t r = 0; r < kBasisSize; ++r) {
            const bool has_b = basis_labels()[r].find('B') != std::string::npos;
            CHECK(b1[r] == doctest::Approx(has_b ? t * b0[r] : b0[r]).epsilon(1e-14));
        }
    }

    TEST_CASE("identity coefficients reproduce every profile exactly") {
        std::mt19937_64 gen(23);
        const auto id = CoefficientSet::identity();
        for (int k = 0; k < 1000; ++k) {
            const auto x = EventProfile::unflatten(oracle::random_profile(gen));
            CHECK(impression(x, id).flatten() == x.flatten());
        }
    }

    TEST_CASE("constant-only coefficients give a constant map") {
        auto c = CoefficientSet::zero();
        for (std::size_t j = 0; j < 9; ++j) c.set(0, j, 0.1 * static_cast<double>(j) - 0.3);
        std::mt19937_64 gen(1);
        const auto out = impression(EventProfile::unflatten(oracle::random_profile(gen)), c).flatten();
        for (std::size_t j = 0; j < 9; ++j) CHECK(out[j] == 0.1 * static_cast<double>(j) - 0.3);
    }

    TEST_CASE("random coefficients match the term-by-term polynomial") {
        std::mt19937_64 gen(29);
        for (int k = 0; k < 100; ++k) {
            const auto lc = oracle::random_coeffs(gen, 0.5, 0.5);
            const auto set = oracle::to_set(lc);
            const auto x = oracle::random_profile(gen);
            const auto got = impression(EventProfile::unflatten(x), set).flatten();
            const auto want = oracle::evaluate(lc, x);
            for (int j = 0; j < 9; ++j) CHECK(std::abs(got[j] - want[j]) < 1e-12);
        }
    }

    TEST_CASE("deflection constants and symmetry") {
        const EventProfile zero{}, ones{{1, 1, 1}, {1, 1, 1}, {1, 1, 1}};
        CHECK(deflection(ones, ones) == 0.0);
        CHECK(deflection(zero, ones) == 9.0);
        CHECK(deflection(zero, EventProfile{{1, 2, 3}, {}, {}}) == 14.0);
        std::mt19937_64 gen(2);
        for (int k = 0; k < 100; ++k) {
            const auto a = EventProfile::unflatten(oracle::random_profile(gen));
            const auto b = EventProfile::unflatten(oracle::random_profile(gen));
            CHECK(deflection(a, b) == deflection(b, a));
            CHECK(deflection(a, b) >= 0.0);
            CHECK(deflection(a, a) == 0.0);
        }
    }

    TEST_CASE("coefficient TSV round-trip and validation") {
        std::mt19937_64 gen(4);
        const auto set = oracle::to_set(oracle::random_coeffs(gen, 0.5, 0.3));
        std::stringstream buf;
        write_coefficients(buf, set);
        const auto back = read_coefficients(buf);
        CHECK(back.rows() == set.rows());

        std::istringstream shuffled("label\tOa'\tOp'\tOe'\tBa'\tBp'\tBe'\tAa'\tAp'\tAe'\nAe\t0\t0\t0\t0\t0\t0\t0\t0\t2\n");
        CHECK(read_coefficients(shuffled)(basis_index("Ae"), 0) == 2.0);
        std::istringstream unknown("label\tAe'\tAp'\tAa'\tBe'\tBp'\tBa'\tOe'\tOp'\tOa'\nAeAe\t1\t0\t0\t0\t0\t0\t0\t0\t0\n");
        CHECK_THROWS_AS(read_coefficients(unknown), ConfigError);
        std::istringstream missing("label\tAe'\tAp'\n");
        CHECK_THROWS_AS(read_coefficients(missing), ConfigError);

        for (const char* f : {"coefficients/identity.tsv", "coefficients/synthetic.tsv"}) {
            const auto c = load_coefficients(testutil::data(f));
            CHECK_NOTHROW(c.validate());
        }
        CHECK(load_coefficients(testutil::data("coefficients/identity.tsv")).rows() == CoefficientSet::identity().rows());
    }
}

namespace {

oracle::Placement behavior_placement(Epa at, Epa ot, Epa af, Epa of) {
    return [=](const std::array<double, 3>& v, oracle::Profile& in, oracle::Profile& f) {
        in = {at.e, at.p, at.a, v[0], v[1], v[2], ot.e, ot.p, ot.a};
        f = {af.e, af.p, af.a, v[0], v[1], v[2], of.e, of.p, of.a};
    };
}

}  // namespace

TEST_SUITE("control") {
    TEST_CASE("identity coefficients give the minimum-norm zero solution") {
        const auto id = CoefficientSet::identity();
        const Epa s = optimal_behavior({1, 2, 3}, {-1, 0, 1}, {0.5, 0.5, 0.5}, {2, 2, 2}, id);
        CHECK(near(s, {}, 1e-12));
        CHECK(near(optimal_actor({1, 1, 1}, {2, 0, 0}, {1, 1, 1}, id), {}, 1e-12));
        const auto r = solve_affine_least_squares(behavior_residual({1, 2, 3}, {-1, 0, 1}, {}, {}, id));
        CHECK(r.regularized);
    }

    TEST_CASE("decoupled gain coefficients match the scalar closed form") {
        // Behavior outputs: B' = c + 0.5 B; actor outputs: A' = g B.
        const double gain = 0.5, g = 0.8;
        const Epa c{0.3, -0.2, 0.7}, actor_f{1.0, -0.5, 2.0};
        auto set = CoefficientSet::zero();
        const char* b[] = {"Be", "Bp", "Ba"};
        for (std::size_t i = 0; i < 3; ++i) {
            set.set(0, 3 + i, c[i]);
            set.set(b[i], 3 + i, gain);
            set.set(b[i], i, g);
        }
        // Residual per dimension: (c - 0.5 v)^2 + (g v - Af)^2 + Of^2.
        const Epa v = optimal_behavior({9, 9, 9}, {1, 1, 1}, actor_f, {0, 0, 0}, set);
        for (std::size_t i = 0; i < 3; ++i) {
            const double want = ((1 - gain) * c[i] + g * actor_f[i]) / ((1 - gain) * (1 - gain) + g * g);
            CHECK(v[i] == doctest::Approx(want).epsilon(1e-12));
        }
        // Actor unknown: A' = a0 + 0.5 A gives v = a0 / 0.5 per dimension.
        auto actor_set = CoefficientSet::zero();
        const char* a[] = {"Ae", "Ap", "Aa"};
        for (std::size_t i = 0; i < 3; ++i) {
            actor_set.set(0, i, c[i]);
            actor_set.set(a[i], i, gain);
        }
        const Epa va = optimal_actor({1, 2, 3}, {0, 0, 0}, {0, 0, 0}, actor_set);
        for (std::size_t i = 0; i < 3; ++i) CHECK(va[i] == doctest::Approx(c[i] / (1 - gain)).epsilon(1e-12));
    }

    TEST_CASE("solution is no worse than a coarse grid and the residual is affine") {
        std::mt19937_64 gen(31);
        for (int k = 0; k < 10; ++k) {
            const auto lc = oracle::random_coeffs(gen, 0.6);
            const auto set = oracle::to_set(lc);
            const auto x = oracle::random_profile(gen, -3, 3);
            const Epa at{x[0], x[1], x[2]}, af{x[3], x[4], x[5]}, ot{x[6], x[7], x[8]};
            const Epa of{x[6] * 0.5 - 0.3, x[7] * 0.5 - 0.3, x[8] * 0.5 - 0.3};
            const auto model = oracle::affine_residual(lc, behavior_placement(at, ot, af, of), gen);
            CHECK(model.max_affinity_error < 1e-9);
            const Epa v = optimal_behavior(at, ot, af, of, set);
            const auto q = model.quadratic();
            CHECK(q(v.e, v.p, v.a) <= oracle::grid_minimum(q, 0.2) + 1e-6);
            // Engine objective agrees with the oracle's quadratic.
            const auto r = behavior_residual(at, ot, af, of, set);
            CHECK(r.objective(v) == doctest::Approx(q(v.e, v.p, v.a)).epsilon(1e-9));
        }
    }

    TEST_CASE("non-finite input is rejected") {
        CHECK_THROWS_AS(optimal_behavior({std::nan(""), 0, 0}, {}, {}, {}, CoefficientSet::identity()), InvalidInputError);
        CHECK_THROWS_AS(optimal_actor({}, {INFINITY, 0, 0}, {}, CoefficientSet::identity()), InvalidInputError);
    }
}

TEST_SUITE("simulation") {
    const Epa employee{1.0, 0.3, 0.4}, employer{0.6, 2.0, 0.9};

    TEST_CASE("start state and category check") {
        const auto s = SimulationState::start(employee, employer);
        CHECK(s.actor_transient == employee);
        CHECK(s.object_transient == employer);
        CHECK(s.current_deflection() == 0.0);
        CHECK_THROWS_AS(step_event(s, {"employer", Category::identity, employer, {}}, Side::actor,
                                   CoefficientSet::identity()),
                        CategoryError);
    }

    TEST_CASE("identity coefficients leave transients at fundamentals") {
        auto s = SimulationState::start(employee, employer);
        const LexiconEntry greet{"greet", Category::behavior, {2, 1, 0.5}, {}};
        for (int i = 0; i < 5; ++i) s = step_event(s, greet, i % 2 ? Side::object : Side::actor, CoefficientSet::identity());
        CHECK(s.actor_transient == employee);
        CHECK(s.object_transient == employer);
        for (const auto& h : s.history) CHECK(h.deflection == 0.0);
    }

    TEST_CASE("two events compose impression twice, with sides swapped when the object acts") {
        std::mt19937_64 gen(8);
        const auto set = oracle::to_set(oracle::random_coeffs(gen, 0.4));
        const LexiconEntry b1{"b1", Category::behavior, {1, -1, 0.5}, {}}, b2{"b2", Category::behavior, {-2, 0.3, 1}, {}};
        auto s0 = SimulationState::start(employee, employer);
        auto s2 = step_event(step_event(s0, b1, Side::actor, set), b2, Side::object, set);

        const auto t1 = impression({employee, b1.epa, employer}, set);
        // Object acts: it takes the actor slot of the equations.
        const auto t2 = impression({t1.object, b2.epa, t1.actor}, set);
        CHECK(s2.actor_transient == t2.object);
        CHECK(s2.object_transient == t2.actor);
        CHECK(s2.history[1].behavior_transient == t2.behavior);
        CHECK(s2.history[1].deflection == deflection({employer, b2.epa, employee}, t2));
        // Pure: re-running yields identical state.
        CHECK(step_event(step_event(s0, b1, Side::actor, set), b2, Side::object, set) == s2);
    }

    TEST_CASE("script parsing and modifier resolution") {
        const auto script = parse_script(R"({"actor":{"identity":"employee"},
            "object":{"identity":"employer","modifier":"bossy"},
            "events":[{"side":"actor","behavior":"greet"},{"side":"object","behavior":"ask"}]})");
        CHECK(script.events.size() == 2);
        CHECK(script.events[1].side == Side::object);
        const auto lex = load_lexicon(testutil::data("lexicons/sample.csv"));
        CHECK(resolve_party(script.actor, lex) == lex.at("employee", Category::identity).epa);
        CHECK(resolve_party(script.object, lex) ==
              amalgamate(lex.at("bossy", Category::modifier).epa, lex.at("employer", Category::identity).epa));
        CHECK_THROWS_AS(parse_script(R"({"actor":{}})"), ParseError);
        CHECK_THROWS_AS(resolve_party({"nobody", {}}, lex), NotFoundError);
    }

    TEST_CASE("trajectory table has one row per step plus the start") {
        const auto script = load_script(testutil::data("scripts/fig2_employee_employer.json").string());
        const auto lex = load_lexicon(testutil::data("lexicons/sample.csv"));
        const auto state = run_script(script, lex, CoefficientSet::identity());
        std::ostringstream out;
        write_trajectory_table(out, script, state);
        const std::string text = out.str();
        CHECK(std::count(text.begin(), text.end(), '\n') == 2 + 1 + 6);
        CHECK(text.find("argue with") != std::string::npos);
    }
}
