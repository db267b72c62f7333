#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <fstream>
#include <sstream>

#include "actlex/amalgamation.hpp"
#include "actlex/cli.hpp"
#include "actlex/control.hpp"
#include "actlex/corpus.hpp"
#include "actlex/engine.hpp"
#include "actlex/errors.hpp"
#include "actlex/events.hpp"
#include "actlex/head.hpp"
#include "actlex/impression.hpp"
#include "actlex/lexicon.hpp"
#include "actlex/metrics.hpp"
#include "actlex/simulation.hpp"

namespace py = pybind11;

// EPA values cross the boundary as (E, P, A) tuples.
namespace pybind11::detail {
template <>
struct type_caster<actlex::Epa> {
    PYBIND11_TYPE_CASTER(actlex::Epa, const_name("tuple[float, float, float]"));

    bool load(handle src, bool) {
        if (!isinstance<sequence>(src) || isinstance<str>(src)) return false;
        auto seq = reinterpret_borrow<sequence>(src);
        if (seq.size() != 3) return false;
        try {
            value = {seq[0].cast<double>(), seq[1].cast<double>(), seq[2].cast<double>()};
        } catch (const cast_error&) {
            return false;
        }
        return true;
    }

    static handle cast(const actlex::Epa& x, return_value_policy, handle) {
        return make_tuple(x.e, x.p, x.a).release();
    }
};
}  // namespace pybind11::detail

namespace {

using actlex::Category;

actlex::EventProfile profile_from(const std::array<double, 9>& x) { return actlex::EventProfile::unflatten(x); }

py::object json_to_py(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

py::dict stats_dict(const actlex::CategoryComparison& row) {
    py::dict d;
    d["category"] = std::string(actlex::to_string(row.category));
    d["source"] = row.source;
    d["count"] = row.count;
    py::list abs, rms, r, p;
    for (const auto& s : row.dims) {
        abs.append(s.abs_error);
        rms.append(s.root_mean_sq);
        r.append(s.r);
        p.append(s.p);
    }
    d["mad"] = abs;
    d["rmsd"] = rms;
    d["r"] = r;
    d["p"] = p;
    return d;
}

}  // namespace

PYBIND11_MODULE(_actlex, m) {
    m.doc() = "Affect-control simulation, synthetic event corpora and EPA lexicon expansion.";
    m.attr("__version__") = "0.1.0";

    py::register_exception<actlex::Error>(m, "ActlexError", PyExc_ValueError);

    m.def(
        "amalgamate", [](const actlex::Epa& modifier, const actlex::Epa& identity) {
            return actlex::amalgamate(modifier, identity);
        },
        py::arg("modifier"), py::arg("identity"), "EPA of a modified identity.");

    py::class_<actlex::CoefficientSet>(m, "CoefficientSet")
        .def_static("identity", &actlex::CoefficientSet::identity)
        .def_static("zero", [] { return actlex::CoefficientSet::zero(); })
        .def_static("load", [](const std::filesystem::path& p) { return actlex::load_coefficients(p); })
        .def_property_readonly("id", &actlex::CoefficientSet::id)
        .def("set", [](actlex::CoefficientSet& c, const std::string& label, std::size_t col, double v) { c.set(label, col, v); })
        .def("__call__", [](const actlex::CoefficientSet& c, std::size_t row, std::size_t col) {
            if (row >= actlex::kBasisSize || col >= 9) throw py::index_error("coefficient index out of range");
            return c(row, col);
        })
        .def_static("basis_labels", [] {
            const auto& l = actlex::basis_labels();
            return std::vector<std::string>(l.begin(), l.end());
        });

    m.def(
        "impression",
        [](const std::array<double, 9>& x, const actlex::CoefficientSet& c) {
            return actlex::impression(profile_from(x), c).flatten();
        },
        py::arg("profile"), py::arg("coefficients"), "Post-event transients of a 9-value actor/behavior/object profile.");
    m.def(
        "deflection",
        [](const std::array<double, 9>& f, const std::array<double, 9>& t) {
            return actlex::deflection(profile_from(f), profile_from(t));
        },
        py::arg("fundamentals"), py::arg("transients"));
    m.def("optimal_behavior", &actlex::optimal_behavior, py::arg("actor_transient"), py::arg("object_transient"),
          py::arg("actor_fundamental"), py::arg("object_fundamental"), py::arg("coefficients"));
    m.def("optimal_actor", &actlex::optimal_actor, py::arg("behavior"), py::arg("object_transient"),
          py::arg("object_fundamental"), py::arg("coefficients"));
    m.def(
        "abo_code", [](const std::array<double, 9>& f, const actlex::CoefficientSet& c) {
            return actlex::abo_code(profile_from(f), c);
        },
        py::arg("fundamentals"), py::arg("coefficients"));
    m.def("abo_bits", &actlex::abo_bits);

    py::class_<actlex::SentimentLexicon>(m, "Lexicon")
        .def(py::init<>())
        .def_static("load", [](const std::filesystem::path& p) { return actlex::load_lexicon(p); })
        .def("save", [](const actlex::SentimentLexicon& l, const std::filesystem::path& p) { actlex::save_lexicon(p, l); })
        .def("__len__", &actlex::SentimentLexicon::size)
        .def("count", [](const actlex::SentimentLexicon& l, const std::string& c) { return l.count(actlex::parse_category(c)); })
        .def("contains", [](const actlex::SentimentLexicon& l, const std::string& term, const std::string& c) {
            return l.contains(term, actlex::parse_category(c));
        })
        .def("get", [](const actlex::SentimentLexicon& l, const std::string& term, const std::string& c) {
            return l.at(term, actlex::parse_category(c)).epa;
        })
        .def(
            "insert",
            [](actlex::SentimentLexicon& l, const std::string& term, const std::string& c, const actlex::Epa& epa,
               bool overwrite) { l.insert({term, actlex::parse_category(c), epa, {}}, overwrite); },
            py::arg("term"), py::arg("category"), py::arg("epa"), py::arg("overwrite") = false)
        .def("entries", [](const actlex::SentimentLexicon& l, const std::string& c) {
            std::vector<std::pair<std::string, actlex::Epa>> out;
            for (const auto& e : l.entries(actlex::parse_category(c))) out.emplace_back(e.term, e.epa);
            return out;
        });

    m.def(
        "run_script",
        [](const std::filesystem::path& script, const actlex::SentimentLexicon& lexicon,
           const actlex::CoefficientSet& coefficients) {
            const auto s = actlex::load_script(script.string());
            return json_to_py(actlex::to_json(actlex::run_script(s, lexicon, coefficients)));
        },
        py::arg("script"), py::arg("lexicon"), py::arg("coefficients"),
        "Steps a JSON interaction script; returns the simulation state as a dict.");

    m.def(
        "generate_corpus",
        [](const actlex::SentimentLexicon& lexicon, const actlex::CoefficientSet& coefficients, std::size_t n,
           std::uint64_t seed, std::size_t clusters, std::optional<std::size_t> n_test,
           std::optional<std::size_t> n_validation) {
            actlex::CorpusOptions opt;
            opt.seed = seed;
            opt.clusters = clusters;
            opt.n_train = n;
            opt.n_test = n_test.value_or(n / 10);
            opt.n_validation = n_validation.value_or(n / 10);
            std::vector<actlex::MabmoEvent> events;
            {
                py::gil_scoped_release release;
                events = actlex::generate_corpus(lexicon, coefficients, opt).events;
            }
            std::ostringstream out;
            actlex::write_corpus_jsonl(out, events);
            return out.str();
        },
        py::arg("lexicon"), py::arg("coefficients"), py::arg("n"), py::arg("seed"),
        py::arg("clusters") = actlex::kDefaultClusterCount, py::arg("n_test") = py::none(),
        py::arg("n_validation") = py::none(), "Corpus JSONL text for the train/test/validation events.");

    py::class_<actlex::HeadModel>(m, "HeadModel")
        .def_static("glorot", &actlex::HeadModel::glorot, py::arg("input_dim"), py::arg("hidden_dim"), py::arg("seed"))
        .def_static("load", [](const std::filesystem::path& p) { return actlex::load_model(p); })
        .def("save", [](const actlex::HeadModel& h, const std::filesystem::path& p) { actlex::save_model(p, h); })
        .def_readonly("input_dim", &actlex::HeadModel::input_dim)
        .def_readonly("hidden_dim", &actlex::HeadModel::hidden_dim)
        .def_readwrite("model_id", &actlex::HeadModel::model_id)
        .def("forward", [](const actlex::HeadModel& h, const std::vector<double>& x) { return actlex::forward(h, x); });

    m.def(
        "compare_lexicons",
        [](const actlex::SentimentLexicon& a, const actlex::SentimentLexicon& b) {
            const auto report = actlex::compare_lexicons(a, b);
            report.check_invariants();
            py::list rows;
            for (const auto& r : report.rows) rows.append(stats_dict(r));
            return rows;
        },
        "Per-category MAD/RMSD/Pearson r over shared entries.");
    m.def("pearson", [](const std::vector<double>& x, const std::vector<double>& y) { return actlex::pearson(x, y); });

    m.def(
        "cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            int code = 0;
            {
                py::gil_scoped_release release;
                code = actlex::cli_dispatch(args, out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command-line tool in-process; returns (exit_code, stdout, stderr).");
}
