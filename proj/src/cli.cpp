#include "actlex/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include "actlex/corpus.hpp"
#include "actlex/csv.hpp"
#include "actlex/engine.hpp"
#include "actlex/errors.hpp"
#include "actlex/expand.hpp"
#include "actlex/metrics.hpp"
#include "actlex/reports.hpp"
#include "actlex/rng.hpp"
#include "actlex/service.hpp"
#include "actlex/training.hpp"

namespace actlex {

namespace fs = std::filesystem;

namespace {

std::ifstream open_in(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw NotFoundError("cannot open " + path.string());
    return in;
}

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInputError("cannot write " + path.string());
    return out;
}

// Default resource paths. Precedence: command-line flag, then environment
// (ACTLEX_LEXICON, ACTLEX_COEFFICIENTS), then the config file given by
// --config or ACTLEX_CONFIG.
struct Defaults {
    std::string config;
    std::map<std::string, std::string> values;

    void load() {
        if (config.empty()) {
            if (const char* env = std::getenv("ACTLEX_CONFIG")) config = env;
        }
        if (config.empty()) return;
        auto in = open_in(config);
        std::stringstream buf;
        buf << in.rdbuf();
        const std::string text = buf.str();
        const fs::path base = fs::path(config).parent_path();
        auto store = [&](const std::string& key, std::string value) {
            if ((key == "lexicon" || key == "coefficients") && !value.empty() && fs::path(value).is_relative()) {
                value = (base / value).string();
            }
            values[key] = std::move(value);
        };
        const auto first = text.find_first_not_of(" \t\r\n");
        if (first != std::string::npos && text[first] == '{') {
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(text);
            } catch (const nlohmann::json::exception& e) {
                throw ParseError(config + ": " + e.what());
            }
            for (const auto& [k, v] : j.items()) store(k, v.is_string() ? v.get<std::string>() : v.dump());
            return;
        }
        // key = value lines; '#' starts a comment, values may be quoted.
        std::istringstream lines(text);
        std::string line;
        int lineno = 0;
        while (std::getline(lines, line)) {
            ++lineno;
            line = csv::trim(line.substr(0, line.find('#')));
            if (line.empty() || line.front() == '[') continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw ParseError(config + ":" + std::to_string(lineno) + ": expected key = value");
            std::string value = csv::trim(line.substr(eq + 1));
            if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front()) {
                value = value.substr(1, value.size() - 2);
            }
            store(csv::trim(line.substr(0, eq)), value);
        }
    }

    std::string resolve(const std::string& flag, const char* env, const std::string& key) const {
        if (!flag.empty()) return flag;
        if (const char* v = std::getenv(env); v && *v) return v;
        auto it = values.find(key);
        return it == values.end() ? std::string{} : it->second;
    }

    std::string lexicon(const std::string& flag) const { return resolve(flag, "ACTLEX_LEXICON", "lexicon"); }
    std::string coefficients(const std::string& flag) const {
        return resolve(flag, "ACTLEX_COEFFICIENTS", "coefficients");
    }
};

SentimentLexicon require_lexicon(const std::string& path) {
    if (path.empty()) throw UsageError("no lexicon given (use --lexicon, ACTLEX_LEXICON or a config file)");
    return load_lexicon(path);
}

CoefficientSet coefficients_or_identity(const std::string& path) {
    return path.empty() ? CoefficientSet::identity() : load_coefficients(path);
}

void print_counts(std::ostream& out, const SentimentLexicon& lex) {
    out << "entries: " << lex.size() << '\n';
    for (Category c : kCategories) out << to_string(c) << ": " << lex.count(c) << '\n';
}

std::vector<TrainingExample> split_examples(const std::vector<MabmoEvent>& events, const std::string& split,
                                            const EmbeddingProvider& provider) {
    std::vector<MabmoEvent> subset;
    std::copy_if(events.begin(), events.end(), std::back_inserter(subset),
                 [&](const MabmoEvent& e) { return e.split == split; });
    return make_examples(subset, provider);
}

std::vector<MabmoEvent> read_corpus_file(const std::string& path) {
    auto in = open_in(path);
    return read_corpus_jsonl(in);
}

// Per-slot EPA rows keyed "<event id>#<slot>"; unknown targets are skipped.
std::vector<LabeledEpa> slot_rows(const std::string& id, const TargetVector& values) {
    std::vector<LabeledEpa> rows;
    for (std::size_t s = 0; s < 5; ++s) {
        const Slot slot = static_cast<Slot>(s);
        const Epa x = extract_slot(values, slot);
        if (!x.finite()) continue;
        rows.push_back({id + "#" + std::string(to_string(slot)), kSlotCategories[s], x});
    }
    return rows;
}

struct ConceptRequest {
    std::string term;
    Category category;
};

std::vector<ConceptRequest> read_concepts(const std::string& path) {
    auto in = open_in(path);
    std::vector<ConceptRequest> out;
    std::string line;
    int lineno = 0;
    bool header = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (csv::trim(line).empty() || line.front() == '#') continue;
        const auto cells = csv::split_line(line);
        if (header) {
            header = false;
            if (cells.size() >= 2 && csv::lower(csv::trim(cells[0])) == "term") continue;
        }
        if (cells.size() < 2) throw ParseError(path + ":" + std::to_string(lineno) + ": expected term,category");
        out.push_back({csv::trim(cells[0]), parse_category(csv::trim(cells[1]))});
    }
    return out;
}

std::string file_slug(const std::string& term, Category c) {
    std::string s = term + "_" + std::string(to_string(c));
    std::replace_if(s.begin(), s.end(), [](char ch) { return !std::isalnum(static_cast<unsigned char>(ch)); }, '_');
    return s;
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sentiment lexicon expansion and affect-control simulation toolkit", "actlex"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);
    Defaults defaults;
    app.add_option("--config", defaults.config, "Config file with default lexicon/coefficients paths (JSON or key = value)");

    std::function<void()> action;

    // dict ------------------------------------------------------------------
    auto* dict = app.add_subcommand("dict", "Lexicon import, validation and comparison");
    dict->require_subcommand(1);

    std::string imp_in, imp_out, imp_name, imp_year, imp_source;
    auto* dict_import = dict->add_subcommand("import", "Normalise a lexicon CSV into the canonical format");
    dict_import->add_option("input", imp_in, "CSV with term,category,E,P,A columns")->required();
    dict_import->add_option("--out,-o", imp_out, "Output CSV")->required();
    dict_import->add_option("--name", imp_name);
    dict_import->add_option("--year", imp_year);
    dict_import->add_option("--source", imp_source);
    dict_import->callback([&] {
        action = [&] {
            auto lex = load_lexicon(imp_in);
            if (!imp_name.empty()) lex.metadata().name = imp_name;
            if (!imp_year.empty()) lex.metadata().year = imp_year;
            if (!imp_source.empty()) lex.metadata().source = imp_source;
            save_lexicon(imp_out, lex);
            print_counts(out, lex);
        };
    });

    std::string val_path;
    auto* dict_validate = dict->add_subcommand("validate", "Check a lexicon CSV and print per-category counts");
    dict_validate->add_option("path", val_path)->required();
    dict_validate->callback([&] {
        action = [&] {
            const auto lex = load_lexicon(val_path);
            out << "ok: " << val_path << '\n';
            print_counts(out, lex);
        };
    });

    std::string cmp_a, cmp_b, cmp_source, cmp_csv, cmp_matrices;
    auto* dict_compare = dict->add_subcommand("compare", "MAD/RMSD/correlation of shared entries between two lexicons");
    dict_compare->add_option("first", cmp_a)->required();
    dict_compare->add_option("second", cmp_b)->required();
    dict_compare->add_option("--source", cmp_source, "Label for the comparison rows");
    dict_compare->add_option("--csv", cmp_csv, "Write the comparison table as CSV");
    dict_compare->add_option("--matrices", cmp_matrices, "Write within-lexicon category correlation matrices as CSV");
    dict_compare->callback([&] {
        action = [&] {
            const auto a = load_lexicon(cmp_a);
            const auto b = load_lexicon(cmp_b);
            const auto report = compare_lexicons(a, b, cmp_source.empty() ? b.metadata().name : cmp_source);
            report.check_invariants();
            const std::vector<ComparisonReport> reports{report};
            render_comparison_table(out, reports);
            if (!cmp_csv.empty()) {
                auto f = open_out(cmp_csv);
                write_comparison_csv(f, reports);
            }
            if (!cmp_matrices.empty()) {
                std::vector<NamedMatrix> mats;
                for (const auto* lex : {&a, &b}) {
                    mats.emplace_back(lex->metadata().name + ":identity-modifier",
                                      category_pair_correlations(*lex, Category::identity, Category::modifier));
                }
                auto f = open_out(cmp_matrices);
                write_matrices_csv(f, mats);
            }
        };
    });

    // corpus ----------------------------------------------------------------
    auto* corpus = app.add_subcommand("corpus", "Synthetic event corpus generation");
    corpus->require_subcommand(1);

    std::string gen_lex, gen_coeff, gen_out = "corpus";
    std::size_t gen_n = 0, gen_clusters = kDefaultClusterCount, gen_kmax = 10;
    std::optional<std::size_t> gen_n_test, gen_n_val;
    std::uint64_t gen_seed = 0, gen_budget = 10'000'000;
    double gen_train = 0.80, gen_test = 0.08, gen_val = 0.12;
    auto* gen = corpus->add_subcommand("generate", "Cluster, split and sample modifier-identity-behavior events");
    gen->add_option("--lexicon", gen_lex);
    gen->add_option("--coefficients", gen_coeff, "Impression coefficient TSV (identity set if omitted)");
    gen->add_option("--n", gen_n, "Training events")->required();
    gen->add_option("--n-test", gen_n_test, "Test events (default n/10)");
    gen->add_option("--n-validation", gen_n_val, "Validation events (default n/10)");
    gen->add_option("--seed", gen_seed)->required();
    gen->add_option("--out,-o", gen_out, "Output directory")->capture_default_str();
    gen->add_option("--clusters", gen_clusters)->capture_default_str();
    gen->add_option("--elbow-k-max", gen_kmax)->capture_default_str();
    gen->add_option("--budget", gen_budget, "Full enumeration up to this many events, sampling above")
        ->capture_default_str();
    gen->add_option("--train-fraction", gen_train)->capture_default_str();
    gen->add_option("--test-fraction", gen_test)->capture_default_str();
    gen->add_option("--validation-fraction", gen_val)->capture_default_str();
    gen->callback([&] {
        action = [&] {
            const auto lex = require_lexicon(defaults.lexicon(gen_lex));
            const auto coeffs = coefficients_or_identity(defaults.coefficients(gen_coeff));
            CorpusOptions opt;
            opt.seed = gen_seed;
            opt.n_train = gen_n;
            opt.n_test = gen_n_test.value_or(gen_n / 10);
            opt.n_validation = gen_n_val.value_or(gen_n / 10);
            opt.clusters = gen_clusters;
            opt.elbow_k_max = gen_kmax;
            opt.enumeration.budget = gen_budget;
            opt.split.train = gen_train;
            opt.split.test = gen_test;
            opt.split.validation = gen_val;
            const auto build = generate_corpus(lex, coeffs, opt);

            const fs::path dir(gen_out);
            fs::create_directories(dir);
            {
                auto f = open_out(dir / "corpus.jsonl");
                write_corpus_jsonl(f, build.events);
            }
            {
                auto f = open_out(dir / "clusters.csv");
                write_cluster_csv(f, lex, build.clusters);
            }
            for (const auto& [cat, report] : build.elbow) {
                auto f = open_out(dir / ("elbow_" + std::string(to_string(cat)) + ".csv"));
                write_elbow_csv(f, report);
            }
            {
                auto f = open_out(dir / "split.csv");
                f << "term,category,split\n";
                const std::pair<const char*, const SentimentLexicon*> parts[] = {
                    {"train", &build.split.train}, {"test", &build.split.test}, {"validation", &build.split.validation}};
                for (const auto& [name, part] : parts) {
                    for (const auto& [key, e] : *part) {
                        csv::write_row(f, {e.term, std::string(to_string(e.category)), name});
                    }
                }
                auto s = open_out(dir / "strata.csv");
                s << "category,cluster,total,train,test,validation\n";
                for (const auto& st : build.split.strata) {
                    s << to_string(st.category) << ',' << st.cluster << ',' << st.total << ',' << st.realized[0] << ','
                      << st.realized[1] << ',' << st.realized[2] << '\n';
                }
            }
            std::map<std::string, std::size_t> per_split;
            for (const auto& e : build.events) ++per_split[e.split];
            out << "events: " << build.events.size() << '\n';
            for (const auto& [name, n] : per_split) out << "  " << name << ": " << n << '\n';
            for (const auto& [name, n] : build.distinct_codes) out << "distinct ABO codes (" << name << "): " << n << '\n';
            for (const auto& [cat, report] : build.elbow) {
                out << "elbow suggestion (" << to_string(cat) << "): k=" << report.suggested_k << " (using k="
                    << std::min(gen_clusters, lex.count(cat)) << ")\n";
            }
            out << "wrote " << (dir / "corpus.jsonl").string() << '\n';
        };
    });

    std::string emb_corpus, emb_truth, emb_out;
    std::size_t emb_dim = 64;
    double emb_noise = 0.1;
    std::uint64_t emb_seed = 0;
    auto* embed = corpus->add_subcommand(
        "embed-synthetic", "Embed corpus sentences with a fixed random linear encoding of their true EPA values");
    embed->add_option("--corpus", emb_corpus)->required();
    embed->add_option("--truth", emb_truth, "Lexicon supplying the true EPA of every slot (default: --lexicon)");
    embed->add_option("--dim", emb_dim)->capture_default_str();
    embed->add_option("--noise", emb_noise, "Gaussian noise SD")->capture_default_str();
    embed->add_option("--seed", emb_seed)->required();
    embed->add_option("--out,-o", emb_out)->required();
    embed->callback([&] {
        action = [&] {
            const auto events = read_corpus_file(emb_corpus);
            const SyntheticLinearEncoder enc(require_lexicon(defaults.lexicon(emb_truth)), emb_dim, emb_noise,
                                             emb_seed);
            EmbeddingTable table;
            table.dim = emb_dim;
            for (const auto& e : events) {
                auto v = enc.embed(e);
                if (!v) throw DependencyError("cannot embed '" + e.sentence + "': term missing from truth lexicon");
                table.vectors[e.id] = std::move(*v);
            }
            auto f = open_out(emb_out);
            write_embeddings_jsonl(f, table);
            out << "embedded " << table.vectors.size() << " sentences (dim " << emb_dim << ")\n";
        };
    });

    // head ------------------------------------------------------------------
    auto* head = app.add_subcommand("head", "Regression head training and evaluation");
    head->require_subcommand(1);

    std::string tr_corpus, tr_emb, tr_out, tr_history, tr_model_id;
    std::uint64_t tr_seed = 0;
    TrainingConfig tr_cfg;
    std::size_t tr_hidden = kDefaultHiddenDim;
    auto* train_cmd = head->add_subcommand("train", "Train the dense-ReLU-dense head on the train split");
    train_cmd->add_option("--corpus", tr_corpus)->required();
    train_cmd->add_option("--embeddings", tr_emb)->required();
    train_cmd->add_option("--seed", tr_seed)->required();
    train_cmd->add_option("--out,-o", tr_out, "Model JSON")->required();
    train_cmd->add_option("--hidden", tr_hidden)->capture_default_str();
    train_cmd->add_option("--lr", tr_cfg.learning_rate)->capture_default_str();
    train_cmd->add_option("--batch", tr_cfg.batch_size)->capture_default_str();
    train_cmd->add_option("--steps", tr_cfg.max_steps)->capture_default_str();
    train_cmd->add_option("--patience", tr_cfg.patience, "Evaluations without test improvement (0 disables)")
        ->capture_default_str();
    train_cmd->add_option("--eval-interval", tr_cfg.eval_interval)->capture_default_str();
    train_cmd->add_option("--weight-decay", tr_cfg.weight_decay)->capture_default_str();
    train_cmd->add_option("--history", tr_history, "Write step,train_loss,test_loss CSV");
    train_cmd->add_option("--model-id", tr_model_id);
    train_cmd->callback([&] {
        action = [&] {
            const auto events = read_corpus_file(tr_corpus);
            const PrecomputedEmbeddings provider(load_embeddings(tr_emb));
            const auto train_set = split_examples(events, "train", provider);
            const auto test_set = split_examples(events, "test", provider);
            tr_cfg.seed = tr_seed;
            auto model = HeadModel::glorot(provider.dim(), tr_hidden, derive_seed(tr_seed, 1));
            model.model_id = tr_model_id.empty() ? "head-" + std::to_string(tr_seed) : tr_model_id;
            const auto result = train(std::move(model), train_set, test_set, tr_cfg);
            save_model(tr_out, result.model);
            if (!tr_history.empty()) {
                auto f = open_out(tr_history);
                f << "step,train_loss,test_loss\n";
                for (const auto& h : result.history) {
                    f << h.step << ',' << csv::format_double(h.train_loss) << ',' << csv::format_double(h.test_loss)
                      << '\n';
                }
            }
            out << "train examples: " << train_set.size() << ", test examples: " << test_set.size() << '\n';
            out << "steps: " << result.steps << (result.early_stopped ? " (early stopped)" : "") << '\n';
            out << "best step: " << result.best_step << ", test loss: " << result.best_test_loss << '\n';
            out << "wrote " << tr_out << '\n';
        };
    });

    std::string ev_corpus, ev_emb, ev_model, ev_split = "validation", ev_pred, ev_csv;
    auto* eval_cmd = head->add_subcommand("eval", "Per-category MAE/RMSE/r of head predictions against targets");
    eval_cmd->add_option("--corpus", ev_corpus)->required();
    eval_cmd->add_option("--embeddings", ev_emb)->required();
    eval_cmd->add_option("--model", ev_model)->required();
    eval_cmd->add_option("--split", ev_split)->capture_default_str();
    eval_cmd->add_option("--predictions", ev_pred, "Write prediction JSONL");
    eval_cmd->add_option("--csv", ev_csv, "Write the error table as CSV");
    eval_cmd->callback([&] {
        action = [&] {
            const auto events = read_corpus_file(ev_corpus);
            const PrecomputedEmbeddings provider(load_embeddings(ev_emb));
            const auto model = load_model(ev_model);
            const auto examples = split_examples(events, ev_split, provider);
            if (examples.empty()) throw InvalidInputError("no events in split '" + ev_split + "'");
            std::vector<std::pair<std::string, TargetVector>> predictions;
            std::vector<LabeledEpa> pred_rows, target_rows;
            for (const auto& ex : examples) {
                const auto y = forward(model, ex.embedding);
                predictions.emplace_back(ex.id, y);
                for (auto& r : slot_rows(ex.id, ex.target)) {
                    target_rows.push_back(r);
                    pred_rows.push_back({r.id, r.category, extract_slot(y, parse_slot(r.id.substr(r.id.find('#') + 1)))});
                }
            }
            const auto report = model_eval(pred_rows, target_rows, model.model_id.empty() ? "model" : model.model_id);
            report.check_invariants();
            const std::vector<ComparisonReport> reports{report};
            render_comparison_table(out, reports);
            if (!ev_pred.empty()) {
                auto f = open_out(ev_pred);
                write_predictions_jsonl(f, predictions);
            }
            if (!ev_csv.empty()) {
                auto f = open_out(ev_csv);
                write_comparison_csv(f, reports);
            }
        };
    });

    std::string gc_model;
    std::size_t gc_dim = 32, gc_hidden = 16, gc_points = 20;
    double gc_tol = 1e-4;
    std::uint64_t gc_seed = 0;
    auto* gc = head->add_subcommand("gradcheck", "Finite-difference check of the analytic gradient");
    gc->add_option("--seed", gc_seed)->required();
    gc->add_option("--model", gc_model, "Check a saved model instead of a random one");
    gc->add_option("--dim", gc_dim)->capture_default_str();
    gc->add_option("--hidden", gc_hidden)->capture_default_str();
    gc->add_option("--points", gc_points)->capture_default_str();
    gc->add_option("--tolerance", gc_tol)->capture_default_str();
    gc->callback([&] {
        action = [&] {
            Rng rng(gc_seed);
            const auto model = gc_model.empty() ? HeadModel::glorot(gc_dim, gc_hidden, derive_seed(gc_seed, 1))
                                                : load_model(gc_model);
            double worst = 0.0;
            std::size_t checked = 0, excluded = 0;
            for (std::size_t i = 0; i < gc_points; ++i) {
                TrainingExample ex;
                ex.id = "gc-" + std::to_string(i);
                ex.embedding.resize(model.input_dim);
                for (auto& v : ex.embedding) v = rng.normal();
                for (auto& t : ex.target) t = rng.uniform(-4.3, 4.3);
                const auto r = gradient_check(model, ex);
                worst = std::max(worst, r.max_relative_error);
                checked += r.checked;
                excluded += r.excluded;
            }
            out << "points: " << gc_points << ", coordinates checked: " << checked << ", excluded near kinks: "
                << excluded << '\n';
            out << "max relative error: " << worst << '\n';
            if (!(worst < gc_tol)) throw InvalidInputError("gradient check failed (tolerance " + std::to_string(gc_tol) + ")");
            out << "PASS\n";
        };
    });

    // expand ----------------------------------------------------------------
    std::string ex_lex, ex_coeff, ex_term, ex_cat, ex_concepts, ex_emit, ex_model, ex_emb, ex_out, ex_dists;
    std::size_t ex_n = 300, ex_clusters = kDefaultClusterCount;
    std::uint64_t ex_seed = 0, ex_budget = 10'000'000;
    double ex_trim = 0.0;
    bool ex_object = false, ex_clamp = false, ex_overwrite = false;
    auto* expand = app.add_subcommand(
        "expand",
        "Estimate EPA for new concepts from pinned synthetic events. Run once with --emit-corpus to write the "
        "events to embed, then with --model/--embeddings/--out to aggregate predictions");
    expand->add_option("--lexicon", ex_lex, "Reference lexicon supplying the other slots");
    expand->add_option("--coefficients", ex_coeff);
    expand->add_option("--term", ex_term);
    expand->add_option("--category", ex_cat);
    expand->add_option("--concepts", ex_concepts, "CSV of term,category to expand");
    expand->add_option("--n", ex_n, "Pinned events per concept")->capture_default_str();
    expand->add_option("--seed", ex_seed)->required();
    expand->add_option("--clusters", ex_clusters)->capture_default_str();
    expand->add_option("--budget", ex_budget)->capture_default_str();
    expand->add_flag("--object-slot", ex_object, "Pin identities into the object slot instead of the actor slot");
    expand->add_option("--trim", ex_trim, "Trimmed-mean fraction per tail")->capture_default_str();
    expand->add_option("--emit-corpus", ex_emit, "Write the pinned events as corpus JSONL and stop");
    expand->add_option("--model", ex_model);
    expand->add_option("--embeddings", ex_emb);
    expand->add_option("--out,-o", ex_out, "Expanded lexicon CSV");
    expand->add_option("--distributions", ex_dists, "Directory for per-concept distribution tables");
    expand->add_flag("--clamp", ex_clamp, "Clamp emitted means into the EPA range");
    expand->add_flag("--overwrite", ex_overwrite, "Replace entries already present in the reference lexicon");
    expand->callback([&] {
        action = [&] {
            std::vector<ConceptRequest> concepts;
            if (!ex_concepts.empty()) concepts = read_concepts(ex_concepts);
            if (!ex_term.empty()) {
                if (ex_cat.empty()) throw UsageError("--term requires --category");
                concepts.push_back({ex_term, parse_category(ex_cat)});
            }
            if (concepts.empty()) throw UsageError("give --term/--category or --concepts");
            if (ex_emit.empty() && (ex_model.empty() || ex_emb.empty() || ex_out.empty())) {
                throw UsageError("give --emit-corpus, or all of --model, --embeddings and --out");
            }
            const auto lex = require_lexicon(defaults.lexicon(ex_lex));
            const auto coeffs = coefficients_or_identity(defaults.coefficients(ex_coeff));
            EnumerationOptions en;
            en.budget = ex_budget;
            const auto ctx = expansion_context(lex, coeffs, ex_clusters, ex_seed, en);
            ExpansionOptions opts;
            opts.n_events = ex_n;
            opts.seed = derive_seed(ex_seed, seed_stream::pin);
            opts.use_object_slot = ex_object;
            opts.trim_fraction = ex_trim;

            if (!ex_emit.empty()) {
                std::vector<MabmoEvent> all;
                for (const auto& c : concepts) {
                    auto evs = pinned_events(c.term, c.category, ctx, opts);
                    all.insert(all.end(), evs.begin(), evs.end());
                }
                auto f = open_out(ex_emit);
                write_corpus_jsonl(f, all);
                out << "wrote " << all.size() << " pinned events to " << ex_emit << '\n';
                return;
            }

            const auto model = load_model(ex_model);
            const PrecomputedEmbeddings provider(load_embeddings(ex_emb));
            std::vector<EstimateDistribution> dists;
            for (const auto& c : concepts) {
                dists.push_back(pin_and_estimate(c.term, c.category, ctx, model, provider, opts));
            }
            EmitOptions emit;
            emit.clamp = ex_clamp;
            emit.overwrite = ex_overwrite;
            emit.model_id = model.model_id;
            const auto entries = emit_entries(dists, lex, emit);
            auto f = open_out(ex_out);
            write_expanded_csv(f, entries);
            for (const auto& d : dists) {
                write_distribution_table(out, d);
                if (!ex_dists.empty()) {
                    auto t = open_out(fs::path(ex_dists) / (file_slug(d.term, d.category) + ".txt"));
                    write_distribution_table(t, d);
                }
            }
            out << "wrote " << entries.size() << " entries to " << ex_out << '\n';
        };
    });

    // simulate --------------------------------------------------------------
    auto* simulate = app.add_subcommand("simulate", "Affect-control interaction simulation");
    simulate->require_subcommand(1);
    std::string sim_script, sim_lex, sim_coeff, sim_format = "table";
    auto* sim_run = simulate->add_subcommand("run", "Step a scripted interaction and print transients and deflection");
    sim_run->add_option("--script", sim_script)->required();
    sim_run->add_option("--lexicon", sim_lex);
    sim_run->add_option("--coefficients", sim_coeff);
    sim_run->add_option("--format", sim_format)->check(CLI::IsMember({"table", "json"}))->capture_default_str();
    sim_run->callback([&] {
        action = [&] {
            const auto script = load_script(sim_script);
            const fs::path base = fs::path(sim_script).parent_path();
            auto from_script = [&](const std::string& p) {
                return p.empty() || fs::path(p).is_absolute() ? p : (base / p).string();
            };
            std::string lex_path = sim_lex.empty() ? from_script(script.lexicon) : sim_lex;
            std::string coeff_path = sim_coeff.empty() ? from_script(script.coefficients) : sim_coeff;
            const auto lex = require_lexicon(defaults.lexicon(lex_path));
            const auto coeffs = coefficients_or_identity(defaults.coefficients(coeff_path));
            const auto state = run_script(script, lex, coeffs);
            if (sim_format == "json") {
                out << to_json(state).dump(2) << '\n';
            } else {
                write_trajectory_table(out, script, state);
            }
        };
    });

    // serve -----------------------------------------------------------------
    std::string sv_host = "127.0.0.1", sv_state, sv_lex, sv_model, sv_emb;
    std::vector<std::string> sv_coeffs;
    int sv_port = 8080;
    std::optional<std::uint64_t> sv_seed;
    std::size_t sv_clusters = kDefaultClusterCount;
    auto* serve = app.add_subcommand("serve", "Serve the JSON API for interactive simulation and estimation");
    serve->add_option("--port", sv_port)->capture_default_str();
    serve->add_option("--host", sv_host)->capture_default_str();
    serve->add_option("--state-dir", sv_state, "Persist sessions as JSON snapshots here");
    serve->add_option("--lexicon", sv_lex);
    serve->add_option("--coefficients", sv_coeffs, "Coefficient TSVs; the first becomes the default set");
    serve->add_option("--model", sv_model, "Regression head enabling /api/estimate");
    serve->add_option("--embeddings", sv_emb, "Embeddings of the pinned events for /api/estimate");
    serve->add_option("--seed", sv_seed, "Seed for pinned sampling (required with --model)");
    serve->add_option("--clusters", sv_clusters)->capture_default_str();
    serve->callback([&] {
        action = [&] {
            auto res = std::make_shared<EngineResources>();
            res->lexicon = require_lexicon(defaults.lexicon(sv_lex));
            if (sv_coeffs.empty()) {
                if (auto p = defaults.coefficients({}); !p.empty()) sv_coeffs.push_back(p);
            }
            for (const auto& p : sv_coeffs) {
                auto set = load_coefficients(p);
                if (res->default_coefficients == "identity") res->default_coefficients = set.id();
                res->add_coefficients(std::move(set));
            }
            if (!sv_model.empty()) {
                if (!sv_seed) throw UsageError("--model requires --seed");
                res->head = load_model(sv_model);
                res->estimate_seed = derive_seed(*sv_seed, seed_stream::pin);
                res->context = expansion_context(res->lexicon, res->coefficients({}), sv_clusters, *sv_seed);
            }
            if (!sv_emb.empty()) res->embeddings = std::make_shared<PrecomputedEmbeddings>(load_embeddings(sv_emb));
            std::optional<fs::path> state;
            if (!sv_state.empty()) state = fs::path(sv_state);
            Service service(res, state);
            out << "listening on http://" << sv_host << ':' << sv_port << std::endl;
            if (!service.listen(sv_host, sv_port)) throw InvalidInputError("cannot listen on port " + std::to_string(sv_port));
        };
    });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        defaults.load();
        if (action) action();
        return kExitOk;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    }
}

}  // namespace actlex
