#include "ddikg/predictor.hpp"

#include "ddikg/csv.hpp"
#include "ddikg/error.hpp"
#include "ddikg/text.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace ddikg::predict {

RelationVocabulary::RelationVocabulary(std::vector<std::string> names) : names_(std::move(names)) {
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i].empty()) throw InvalidInput("empty relation name");
        if (!index_.emplace(names_[i], i).second) throw InvalidInput("duplicate relation name " + names_[i]);
    }
    if (names_.empty()) throw InvalidInput("empty relation vocabulary");
}

const RelationVocabulary& RelationVocabulary::builtin() {
    static const RelationVocabulary v({
        "INTERACTS_WITH", "ASSOCIATED_WITH", "TREATS", "CAUSES", "INHIBITS",
        "STIMULATES", "COEXISTS_WITH", "AFFECTS", "AUGMENTS", "PREDISPOSES",
        "PREVENTS", "DIAGNOSES", "DISRUPTS", "COMPLICATES", "MANIFESTATION_OF",
        "LOCATION_OF", "PART_OF", "PROCESS_OF", "ISA", "CONVERTS_TO",
        "PRODUCES", "USES", "ADMINISTERED_TO", "METHOD_OF", "OCCURS_IN",
        "PRECEDES", "MEASURES", "COMPARED_WITH", "HIGHER_THAN", "LOWER_THAN",
        "SAME_AS", "DIFFERENT_FROM", "NEG_INTERACTS_WITH", "NEG_TREATS", "NEG_ASSOCIATED_WITH",
    });
    return v;
}

RelationVocabulary RelationVocabulary::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw NotFound("cannot open relation vocabulary " + path.string());
    std::vector<std::string> names;
    std::string line;
    while (std::getline(in, line)) {
        auto t = text::trim(line);
        if (t.empty() || t[0] == '#') continue;
        names.push_back(t);
    }
    return RelationVocabulary(std::move(names));
}

bool RelationVocabulary::contains(std::string_view name) const { return index_.count(std::string(name)) > 0; }

std::size_t RelationVocabulary::index(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) throw InvalidInput("unknown relation " + std::string(name));
    return it->second;
}

LiteratureGraph::LiteratureGraph(RelationVocabulary vocabulary) : vocabulary_(std::move(vocabulary)) {}

void LiteratureGraph::add_node(const std::string& id, const std::string& kind) {
    if (id.empty()) throw InvalidInput("empty node id");
    auto [it, fresh] = index_.try_emplace(id, ids_.size());
    if (fresh) {
        ids_.push_back(id);
        kinds_.push_back(kind);
        adjacency_.emplace_back();
    } else if (!kind.empty()) {
        kinds_[it->second] = kind;
    }
}

bool LiteratureGraph::add_edge(const std::string& a, std::string_view relation, const std::string& b) {
    if (a == b) throw InvalidInput("self-loop on " + a);
    auto rel = vocabulary_.index(relation);
    add_node(a);
    add_node(b);
    auto x = index_.at(a), y = index_.at(b);
    if (!seen_.emplace(std::min(x, y), rel, std::max(x, y)).second) return false;
    adjacency_[x].push_back({rel, y});
    adjacency_[y].push_back({rel, x});
    ++edges_;
    return true;
}

bool LiteratureGraph::has_node(std::string_view id) const { return index_.count(std::string(id)) > 0; }

std::size_t LiteratureGraph::id(std::string_view node) const {
    auto it = index_.find(std::string(node));
    if (it == index_.end()) throw NotFound("node not in graph: " + std::string(node));
    return it->second;
}

const std::string& LiteratureGraph::kind(std::string_view node) const { return kinds_[id(node)]; }

LiteratureGraph parse_graph_csv(std::istream& in, const RelationVocabulary& vocabulary) {
    auto table = csv::read_table(in);
    csv::require_header(table, {"src", "relation", "dst"}, "literature graph");
    LiteratureGraph g(vocabulary);
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        try {
            g.add_edge(text::trim(row[0]), text::trim(row[1]), text::trim(row[2]));
        } catch (const InvalidInput& e) {
            throw ParseError(e.what(), table.lines[r]);
        }
    }
    return g;
}

LiteratureGraph load_graph_csv(const std::filesystem::path& path, const RelationVocabulary& vocabulary) {
    std::ifstream in(path);
    if (!in) throw NotFound("cannot open " + path.string());
    return parse_graph_csv(in, vocabulary);
}

PathSet enumerate_paths(const LiteratureGraph& graph, std::string_view a, std::string_view b, std::size_t max_len,
                        std::size_t cap) {
    auto from = graph.id(a), to = graph.id(b);
    if (from == to) throw InvalidInput("path endpoints must differ: " + std::string(a));
    PathSet out;
    std::vector<bool> on_path(graph.node_count(), false);
    RelationPath labels;
    auto dfs = [&](auto&& self, std::size_t node) -> void {
        if (out.truncated) return;
        for (const auto& adj : graph.neighbours(node)) {
            if (on_path[adj.node]) continue;
            labels.push_back(adj.relation);
            if (adj.node == to) {
                if (out.paths.size() == cap) {
                    out.truncated = true;
                    labels.pop_back();
                    return;
                }
                out.paths.push_back(labels);
            } else if (labels.size() < max_len) {
                on_path[adj.node] = true;
                self(self, adj.node);
                on_path[adj.node] = false;
            }
            labels.pop_back();
            if (out.truncated) return;
        }
    };
    if (max_len > 0) {
        on_path[from] = true;
        dfs(dfs, from);
    }
    return out;
}

std::vector<std::vector<std::string>> path_labels(const PathSet& paths, const RelationVocabulary& vocabulary) {
    std::vector<std::vector<std::string>> out;
    for (const auto& p : paths.paths) {
        std::vector<std::string> names;
        for (auto rel : p) names.push_back(vocabulary.name(rel));
        out.push_back(std::move(names));
    }
    return out;
}

std::size_t feature_index(std::size_t position, std::size_t relation, std::size_t r) {
    return (position - 1) * r + relation;
}

Features featurize_pair(const std::vector<RelationPath>& paths, std::size_t n, std::size_t r) {
    Features f(n * r, 0);
    for (const auto& p : paths) {
        if (p.size() > n) throw InvalidInput("path longer than the maximum length");
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (p[i] >= r) throw InvalidInput("relation index out of range");
            ++f[feature_index(i + 1, p[i], r)];
        }
    }
    return f;
}

Features featurize_pair(const std::vector<std::vector<std::string>>& paths, std::size_t n,
                        const RelationVocabulary& vocabulary) {
    std::vector<RelationPath> encoded;
    for (const auto& p : paths) {
        RelationPath e;
        for (const auto& name : p) e.push_back(vocabulary.index(name));
        encoded.push_back(std::move(e));
    }
    return featurize_pair(encoded, n, vocabulary.size());
}

void PairSet::add(const std::string& a, const std::string& b) {
    if (a == b) throw InvalidInput("pair of identical drugs: " + a);
    pairs_.insert(std::minmax(a, b));
}

bool PairSet::contains(const std::string& a, const std::string& b) const {
    return pairs_.count(std::minmax(a, b)) > 0;
}

PairSet parse_pairs_csv(std::istream& in) {
    auto table = csv::read_table(in);
    csv::require_header(table, {"cui_a", "cui_b"}, "pair table");
    PairSet out;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        try {
            out.add(text::trim(table.rows[r][0]), text::trim(table.rows[r][1]));
        } catch (const InvalidInput& e) {
            throw ParseError(e.what(), table.lines[r]);
        }
    }
    return out;
}

PairSet load_pairs_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw NotFound("cannot open " + path.string());
    return parse_pairs_csv(in);
}

std::vector<std::pair<std::string, std::string>> all_pairs(const std::vector<std::string>& drugs) {
    std::vector<std::string> sorted(drugs);
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<std::pair<std::string, std::string>> out;
    for (std::size_t i = 0; i < sorted.size(); ++i)
        for (std::size_t j = i + 1; j < sorted.size(); ++j) out.emplace_back(sorted[i], sorted[j]);
    return out;
}

std::vector<LabeledRow> build_dataset(const LiteratureGraph& graph,
                                      const std::vector<std::pair<std::string, std::string>>& pairs,
                                      const PairSet& gold, std::size_t n, std::size_t cap) {
    std::vector<LabeledRow> rows;
    const auto r = graph.vocabulary().size();
    for (const auto& [a, b] : pairs) {
        if (a == b) throw InvalidInput("pair of identical drugs: " + a);
        LabeledRow row{a, b, Features(n * r, 0), gold.contains(a, b) ? 1 : 0, false};
        if (graph.has_node(a) && graph.has_node(b)) {
            auto paths = enumerate_paths(graph, a, b, n, cap);
            row.features = featurize_pair(paths.paths, n, r);
            row.truncated = paths.truncated;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_predictions_csv(std::ostream& out, const std::vector<Prediction>& predictions, std::string_view method) {
    csv::write_row(out, {"cui_a", "cui_b", "confidence", "method"});
    for (const auto& p : predictions) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4f", p.confidence);
        csv::write_row(out, {p.a, p.b, buf, std::string(method)});
    }
}

} // namespace ddikg::predict
