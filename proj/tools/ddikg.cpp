// Operator CLI: one subcommand per pipeline stage, each driven by a JSON config file.

#include "ddikg/config.hpp"
#include "ddikg/deduction.hpp"
#include "ddikg/error.hpp"
#include "ddikg/extractor.hpp"
#include "ddikg/forest.hpp"
#include "ddikg/kb.hpp"
#include "ddikg/mapping.hpp"
#include "ddikg/predictor.hpp"
#include "ddikg/rdf.hpp"
#include "ddikg/service.hpp"
#include "ddikg/wedge.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>

namespace fs = std::filesystem;
using namespace ddikg;

namespace {

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    return out;
}

rdf::TripleStore load_store(const config::Config& cfg) {
    if (cfg.store && fs::exists(*cfg.store)) {
        std::ifstream in(*cfg.store);
        return rdf::TripleStore::read_ntriples(in);
    }
    if (cfg.mapping) return mapping::materialize(mapping::parse_mapping_doc(*cfg.mapping));
    throw ConfigError("config sets neither an existing 'store' nor a 'mapping'");
}

const EffectLexicon& effects_for(const config::Config& cfg, std::unique_ptr<EffectLexicon>& holder) {
    if (!cfg.effect_lexicon) return EffectLexicon::builtin();
    holder = std::make_unique<EffectLexicon>(EffectLexicon::load(*cfg.effect_lexicon));
    return *holder;
}

kb::KnowledgeBase load_kb(const config::Config& cfg) {
    std::unique_ptr<EffectLexicon> holder;
    auto kb = kb::KnowledgeBase::from_store(load_store(cfg), effects_for(cfg, holder));
    for (const auto& w : kb.warnings()) std::cerr << "warning: " << w << '\n';
    return kb;
}

deduce::ExtensionalDb load_edb(const config::Config& cfg, const std::string& source) {
    bool csv = source == "csv" || (source == "auto" && !cfg.store && !cfg.mapping);
    if (!csv) return load_kb(cfg).edb();
    std::unique_ptr<EffectLexicon> holder;
    const auto& effects = effects_for(cfg, holder);
    std::map<std::string, DrugId> drugs;
    if (cfg.drugs) drugs = deduce::load_drug_table(*cfg.drugs);
    deduce::ExtensionalDb edb;
    for (auto& d : deduce::load_ddis_csv(cfg.require(cfg.ddis, "ddis"), drugs, effects)) edb.add(std::move(d));
    for (auto& t : deduce::load_treatments_csv(cfg.require(cfg.treatments, "treatments"), drugs)) edb.add(std::move(t));
    return edb;
}

void print_tree(std::ostream& out, const deduce::DerivationNode& node, int indent) {
    out << std::string(static_cast<std::size_t>(indent) * 2, ' ');
    std::visit(
        [&](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, RuleFact>)
                out << to_string(f.kind) << '(' << to_string(f.effect) << ',' << to_string(f.impact) << ')';
            else
                out << deduce::to_string(f);
        },
        node.fact);
    if (node.rule) out << "  [" << deduce::to_string(*node.rule) << ']';
    out << '\n';
    for (const auto& c : node.children) print_tree(out, c, indent + 1);
}

struct Dataset {
    predict::LiteratureGraph graph;
    std::vector<predict::LabeledRow> rows;
    std::vector<predict::Sample> x;
    std::vector<int> y;
};

Dataset load_dataset(const config::Config& cfg) {
    auto vocab = cfg.relations ? predict::RelationVocabulary::load(*cfg.relations)
                               : predict::RelationVocabulary::builtin();
    Dataset ds{predict::load_graph_csv(cfg.require(cfg.graph, "graph"), vocab), {}, {}, {}};
    auto gold = predict::load_pairs_csv(cfg.require(cfg.gold, "gold"));
    std::set<std::string> drugs;
    for (const auto& n : ds.graph.nodes())
        if (DrugId::valid_cui(n)) drugs.insert(n);
    for (const auto& [a, b] : gold.pairs()) drugs.insert({a, b});
    auto pairs = predict::all_pairs({drugs.begin(), drugs.end()});
    ds.rows = predict::build_dataset(ds.graph, pairs, gold, cfg.predictor.max_path_length, cfg.predictor.path_cap);
    for (const auto& r : ds.rows) {
        ds.x.push_back(r.features);
        ds.y.push_back(r.label);
        if (r.truncated) std::cerr << "warning: path enumeration truncated for " << r.a << ',' << r.b << '\n';
    }
    return ds;
}

predict::ForestParams forest_params(const config::Config& cfg) {
    predict::ForestParams p;
    p.trees = cfg.predictor.trees;
    p.max_depth = cfg.predictor.max_depth;
    p.seed = cfg.predictor.seed;
    return p;
}

std::atomic<service::Server*> running_server{nullptr};

void on_signal(int) {
    if (auto* s = running_server.load()) s->stop();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Drug-drug interaction knowledge graph pipeline"};
    app.require_subcommand(1);
    std::string config_path = "ddikg.json";
    app.add_option("-c,--config", config_path, "JSON configuration file")->capture_default_str();

    auto* extract_cmd = app.add_subcommand("extract", "Extract interactions from a sentence corpus");
    std::string extract_out, extract_corpus_path;
    bool verbose = false;
    extract_cmd->add_option("--corpus", extract_corpus_path, "Corpus file (overrides config)");
    extract_cmd->add_option("-o,--out", extract_out, "Output CSV (default <output_dir>/extracted_ddis.csv)");
    extract_cmd->add_flag("-v,--verbose", verbose, "Print unmatched sentences and diagnostics");

    auto* build_cmd = app.add_subcommand("build", "Materialize the mapping document into an N-Triples store");
    std::string build_out;
    build_cmd->add_option("-o,--out", build_out, "Output N-Triples file (default: config store)");

    auto* deduce_cmd = app.add_subcommand("deduce", "Run the deduction rules over every treatment");
    std::string source = "auto";
    bool explain = false;
    deduce_cmd->add_option("--source", source, "Input: store, csv or auto")
        ->check(CLI::IsMember({"auto", "store", "csv"}))
        ->capture_default_str();
    deduce_cmd->add_flag("--explain", explain, "Print derivations of toxicity and effectiveness facts");

    auto* analyze_cmd = app.add_subcommand("analyze", "Rank treatment drugs by wedge frequency");
    std::vector<std::string> treatment_ids;
    std::string mode_text;
    analyze_cmd->add_option("-t,--treatment", treatment_ids, "Treatment id (default: all)");
    analyze_cmd->add_option("--mode", mode_text, "Graph mode: closure, extensional or all-facts");
    analyze_cmd->add_option("--source", source, "Input: store, csv or auto")
        ->check(CLI::IsMember({"auto", "store", "csv"}));

    auto* predict_cmd = app.add_subcommand("predict", "Train on the gold pairs and score unlabelled pairs");
    std::string predict_out;
    bool include_gold = false;
    predict_cmd->add_option("-o,--out", predict_out, "Output CSV (default <output_dir>/predictions.csv)");
    predict_cmd->add_flag("--all-pairs", include_gold, "Also score pairs already in the gold set");

    auto* eval_cmd = app.add_subcommand("eval", "Stratified cross-validation of the predictor");
    std::optional<std::size_t> folds;
    eval_cmd->add_option("-k,--folds", folds, "Number of folds (overrides config)");

    auto* serve_cmd = app.add_subcommand("serve", "Serve the HTTP API");
    std::optional<int> port;
    std::optional<std::string> host;
    serve_cmd->add_option("-p,--port", port, "Port (0 picks a free one)");
    serve_cmd->add_option("--host", host, "Bind address");

    CLI11_PARSE(app, argc, argv);

    try {
        auto cfg = config::load_config(config_path);

        if (*extract_cmd) {
            std::unique_ptr<EffectLexicon> holder;
            const auto& effects = effects_for(cfg, holder);
            auto catalog = extract::load_catalog(cfg.require(cfg.catalog, "catalog"), effects);
            auto lexicon = extract::Lexicon::load(cfg.require(cfg.lexicon, "lexicon"));
            fs::path corpus = extract_corpus_path.empty() ? cfg.require(cfg.corpus, "corpus") : fs::path(extract_corpus_path);
            std::ifstream in(corpus);
            if (!in) throw Error("cannot open corpus " + corpus.string());
            auto result = extract::extract_corpus(in, catalog, lexicon);
            fs::path out_path = extract_out.empty() ? cfg.output_dir / "extracted_ddis.csv" : fs::path(extract_out);
            auto out = open_out(out_path);
            extract::write_ddis_csv(out, result.ddis);
            std::cout << "patterns " << catalog.size() << ", sentences " << result.sentences << ", matched "
                      << result.matched_sentences << ", interactions " << result.ddis.size() << ", unmatched "
                      << result.unmatched.size() << ", multi-interaction " << result.multi_match.size() << '\n';
            if (verbose) {
                for (const auto& s : result.unmatched) std::cout << "unmatched: " << s << '\n';
                for (const auto& s : result.multi_match) std::cout << "multi: " << s << '\n';
                for (const auto& d : result.diagnostics)
                    std::cout << "pattern " << d.pattern_id << ": " << d.message << " in \"" << d.sentence << "\"\n";
            }
            std::cout << "wrote " << out_path.string() << '\n';
            return result.partial ? 1 : 0;
        }

        if (*build_cmd) {
            auto doc = mapping::parse_mapping_doc(cfg.require(cfg.mapping, "mapping"));
            rdf::TripleStore store;
            auto report = mapping::materialize(doc, store);
            for (const auto& m : report.maps)
                std::printf("%-28s rows %6zu  generated %7zu  new %7zu\n", m.id.c_str(), m.rows, m.generated, m.added);
            std::printf("%zu triples in %.3f s\n", store.size(), report.seconds);
            fs::path out_path = build_out.empty() ? cfg.require(cfg.store, "store") : fs::path(build_out);
            auto out = open_out(out_path);
            store.write_ntriples(out);
            std::cout << "wrote " << out_path.string() << '\n';
            return 0;
        }

        if (*deduce_cmd) {
            auto edb = load_edb(cfg, source);
            auto model = deduce::fixpoint(edb);
            auto dir = cfg.output_dir / "model";
            deduce::write_model_csv(dir, model);
            std::cout << "treatments " << model.treatments.size() << ", ddi/5 " << model.ddis.size() << " ("
                      << model.deduced_ddis().size() << " deduced), toxicity " << model.toxicity.size()
                      << ", effectiveness " << model.effectiveness.size() << ", rounds " << model.iterations()
                      << '\n';
            if (explain) {
                for (const auto& f : model.toxicity) print_tree(std::cout, deduce::explain(model, f), 0);
                for (const auto& f : model.effectiveness) print_tree(std::cout, deduce::explain(model, f), 0);
            }
            std::cout << "wrote " << dir.string() << '\n';
            return 0;
        }

        if (*analyze_cmd) {
            auto mode = mode_text.empty() ? cfg.graph_mode : wedge::parse_graph_mode(mode_text);
            auto edb = load_edb(cfg, source);
            auto model = deduce::fixpoint(edb);
            if (treatment_ids.empty())
                for (const auto& t : edb.treatments()) treatment_ids.push_back(t.id());
            std::vector<PkDdi> ddis(edb.ddis().begin(), edb.ddis().end());
            auto dir = cfg.output_dir / "analysis";
            for (const auto& id : treatment_ids) {
                const auto* t = edb.treatment(id);
                if (!t) throw NotFound("unknown treatment " + id);
                auto graph = wedge::build_graph(*t, model, mode);
                auto report = wedge::wedge_frequencies(graph);
                std::map<std::string, wedge::Reduction> reductions;
                for (const auto& d : t->members()) reductions.emplace(d.cui(), wedge::ddi_reduction(ddis, *t, d.cui(), mode));
                std::cout << id << ": " << report.edges << " interactions, " << report.wedge_count << " wedges, "
                          << report.deduced_percentage << "% deduced (" << wedge::to_string(mode) << ")\n";
                for (const auto& e : wedge::rank_drugs(report, graph)) {
                    const auto& r = reductions.at(e.drug.cui());
                    std::printf("  %2zu%s %-24s F=%-4zu", e.rank, e.tied ? "=" : " ", e.drug.label().c_str(),
                                e.frequency);
                    if (r.percent)
                        std::printf(" reduction %.1f%%\n", *r.percent);
                    else
                        std::printf(" reduction n/a\n");
                }
                auto csv = open_out(dir / (id + ".csv"));
                wedge::write_report_csv(csv, report, reductions);
                auto dot = open_out(dir / (id + ".dot"));
                wedge::write_dot(dot, graph, &report);
            }
            std::cout << "wrote " << dir.string() << '\n';
            return 0;
        }

        if (*predict_cmd) {
            auto ds = load_dataset(cfg);
            auto forest = predict::train_random_forest(ds.x, ds.y, forest_params(cfg));
            std::vector<predict::Prediction> predictions;
            for (std::size_t i = 0; i < ds.rows.size(); ++i) {
                if (ds.y[i] == 1 && !include_gold) continue;
                double c = forest.predict(ds.x[i]);
                if (c > cfg.predictor.threshold) predictions.push_back({ds.rows[i].a, ds.rows[i].b, c});
            }
            std::sort(predictions.begin(), predictions.end(), [](const auto& a, const auto& b) {
                return a.confidence != b.confidence ? a.confidence > b.confidence
                                                    : std::tie(a.a, a.b) < std::tie(b.a, b.b);
            });
            fs::path out_path = predict_out.empty() ? cfg.output_dir / "predictions.csv" : fs::path(predict_out);
            auto out = open_out(out_path);
            predict::write_predictions_csv(out, predictions);
            std::cout << ds.rows.size() << " pairs, " << std::count(ds.y.begin(), ds.y.end(), 1) << " gold, "
                      << predictions.size() << " predicted above " << cfg.predictor.threshold << '\n';
            std::cout << "wrote " << out_path.string() << '\n';
            return 0;
        }

        if (*eval_cmd) {
            auto ds = load_dataset(cfg);
            auto cv = predict::evaluate_cv(ds.x, ds.y, folds.value_or(cfg.predictor.folds), forest_params(cfg));
            for (std::size_t f = 0; f < cv.folds.size(); ++f) {
                const auto& m = cv.folds[f];
                std::printf("fold %2zu  rows %4zu  auc %.4f  precision %.4f  recall %.4f  f1 %.4f\n", f + 1, m.rows,
                            m.roc_auc, m.precision, m.recall, m.f1);
            }
            const auto& m = cv.mean;
            std::printf("mean     rows %4zu  auc %.4f  precision %.4f  recall %.4f  f1 %.4f\n", ds.rows.size(),
                        m.roc_auc, m.precision, m.recall, m.f1);
            return 0;
        }

        if (*serve_cmd) {
            auto kb = std::make_shared<const kb::KnowledgeBase>(load_kb(cfg));
            auto api = std::make_shared<const service::Api>(kb, cfg.graph_mode);
            service::ServerOptions options{host.value_or(cfg.server.host), port.value_or(cfg.server.port),
                                           cfg.server.workers};
            service::Server server(api, options);
            int bound = server.bind();
            running_server = &server;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            std::cout << "serving " << kb->drugs().size() << " drugs, " << kb->ddis().size() << " interactions on http://"
                      << options.host << ':' << bound << std::endl;
            server.listen();
            running_server = nullptr;
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
