#pragma once

// Literature-graph path features for drug pairs.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ddikg::predict {

class RelationVocabulary {
public:
    explicit RelationVocabulary(std::vector<std::string> names);

    // 35 semantic relation names.
    static const RelationVocabulary& builtin();
    // One relation name per line; blank lines and '#' comments ignored.
    static RelationVocabulary load(const std::filesystem::path& path);

    std::size_t size() const noexcept { return names_.size(); }
    const std::string& name(std::size_t i) const { return names_.at(i); }
    const std::vector<std::string>& names() const noexcept { return names_; }
    bool contains(std::string_view name) const;
    // Throws InvalidInput for unknown names.
    std::size_t index(std::string_view name) const;

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::size_t> index_;
};

// Undirected multigraph; identical (a, relation, b) edges in either orientation are stored once.
class LiteratureGraph {
public:
    explicit LiteratureGraph(RelationVocabulary vocabulary = RelationVocabulary::builtin());

    void add_node(const std::string& id, const std::string& kind = "");
    // Returns false for a duplicate edge. Throws InvalidInput for self-loops and unknown relations.
    bool add_edge(const std::string& a, std::string_view relation, const std::string& b);

    const RelationVocabulary& vocabulary() const noexcept { return vocabulary_; }
    bool has_node(std::string_view id) const;
    std::size_t node_count() const noexcept { return ids_.size(); }
    std::size_t edge_count() const noexcept { return edges_; }
    const std::vector<std::string>& nodes() const noexcept { return ids_; }
    const std::string& kind(std::string_view id) const;

    struct Adjacent {
        std::size_t relation;
        std::size_t node;
    };
    std::size_t id(std::string_view node) const;  // throws NotFound
    const std::vector<Adjacent>& neighbours(std::size_t node) const { return adjacency_.at(node); }

private:
    RelationVocabulary vocabulary_;
    std::vector<std::string> ids_;
    std::vector<std::string> kinds_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::vector<Adjacent>> adjacency_;
    std::set<std::tuple<std::size_t, std::size_t, std::size_t>> seen_;
    std::size_t edges_ = 0;
};

// CSV `src,relation,dst`.
LiteratureGraph load_graph_csv(const std::filesystem::path& path,
                               const RelationVocabulary& vocabulary = RelationVocabulary::builtin());
LiteratureGraph parse_graph_csv(std::istream& in, const RelationVocabulary& vocabulary = RelationVocabulary::builtin());

using RelationPath = std::vector<std::size_t>;  // relation indices from a towards b

struct PathSet {
    std::vector<RelationPath> paths;
    bool truncated = false;
};

inline constexpr std::size_t default_path_cap = 10'000;

// All simple undirected paths of length 1..max_len from a to b. Throws NotFound for absent
// nodes and InvalidInput when a == b.
PathSet enumerate_paths(const LiteratureGraph& graph, std::string_view a, std::string_view b, std::size_t max_len,
                        std::size_t cap = default_path_cap);

std::vector<std::vector<std::string>> path_labels(const PathSet& paths, const RelationVocabulary& vocabulary);

// count[(p-1)·r + rel] = number of paths whose p-th relation is rel. Length n·r.
using Features = std::vector<std::uint32_t>;

Features featurize_pair(const std::vector<RelationPath>& paths, std::size_t n, std::size_t r);
// Throws InvalidInput for unknown labels or paths longer than n.
Features featurize_pair(const std::vector<std::vector<std::string>>& paths, std::size_t n,
                        const RelationVocabulary& vocabulary);

std::size_t feature_index(std::size_t position, std::size_t relation, std::size_t r);  // position is 1-based

// Unordered drug pairs, stored with the smaller CUI first.
class PairSet {
public:
    void add(const std::string& a, const std::string& b);
    bool contains(const std::string& a, const std::string& b) const;
    std::size_t size() const noexcept { return pairs_.size(); }
    const std::set<std::pair<std::string, std::string>>& pairs() const noexcept { return pairs_; }

private:
    std::set<std::pair<std::string, std::string>> pairs_;
};

// CSV `cui_a,cui_b`.
PairSet load_pairs_csv(const std::filesystem::path& path);
PairSet parse_pairs_csv(std::istream& in);

std::vector<std::pair<std::string, std::string>> all_pairs(const std::vector<std::string>& drugs);

struct LabeledRow {
    std::string a;
    std::string b;
    Features features;
    int label = 0;  // 1 iff the pair is in the gold set
    bool truncated = false;
};

// Drugs absent from the graph get an all-zero vector.
std::vector<LabeledRow> build_dataset(const LiteratureGraph& graph,
                                      const std::vector<std::pair<std::string, std::string>>& pairs,
                                      const PairSet& gold, std::size_t n, std::size_t cap = default_path_cap);

struct Prediction {
    std::string a;
    std::string b;
    double confidence;
};

inline constexpr std::string_view prediction_method = "path-feature-rf";

// CSV `cui_a,cui_b,confidence,method`.
void write_predictions_csv(std::ostream& out, const std::vector<Prediction>& predictions,
                           std::string_view method = prediction_method);

} // namespace ddikg::predict
