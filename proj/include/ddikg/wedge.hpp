#pragma once

// Directed interaction multigraph of a treatment, wedge (two-edge path) counting,
// middle-vertex ranking and drug-withdrawal what-ifs.

#include "ddikg/core.hpp"
#include "ddikg/deduction.hpp"

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace ddikg::wedge {

// closure:     localized interactions plus deduced pharmacokinetic ddi/5 between distinct drugs
// extensional: localized interactions only
// all_facts:   every ddi/5 of the treatment, including deduced self-interactions
enum class GraphMode { closure, extensional, all_facts };

std::string_view to_string(GraphMode mode) noexcept;
GraphMode parse_graph_mode(std::string_view text);

struct Edge {
    std::string precipitant;
    std::string object;
    EffectKind effect;
    Impact impact;
    bool deduced;
};

class InteractionGraph {
public:
    InteractionGraph(std::string treatment, std::vector<DrugId> nodes, std::vector<Edge> edges, GraphMode mode);

    const std::string& treatment() const noexcept { return treatment_; }
    GraphMode mode() const noexcept { return mode_; }
    const std::vector<DrugId>& nodes() const noexcept { return nodes_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    bool has_node(std::string_view cui) const;
    const DrugId& node(std::string_view cui) const;
    std::size_t deduced_edges() const;

private:
    std::string treatment_;
    std::vector<DrugId> nodes_;
    std::vector<Edge> edges_;
    GraphMode mode_;
};

// Throws NotFound when the model was not computed for the treatment.
InteractionGraph build_graph(const Treatment& treatment, const deduce::DeducedModel& model,
                             GraphMode mode = GraphMode::closure);

struct RankEntry {
    DrugId drug;
    std::size_t frequency;
    std::size_t rank;  // competition ranking: equal F share a rank
    bool tied;
};

struct WedgeReport {
    std::vector<std::pair<DrugId, std::size_t>> frequencies;  // every node, in CUI order
    std::size_t wedge_count = 0;
    std::size_t edges = 0;
    std::size_t deduced_edges = 0;
    double deduced_percentage = 0.0;  // D

    std::size_t frequency(std::string_view cui) const;
};

WedgeReport wedge_frequencies(const InteractionGraph& graph);

// Drugs incident to at least one edge, by F descending then CUI.
std::vector<RankEntry> rank_drugs(const WedgeReport& report, const InteractionGraph& graph);

struct Reduction {
    std::string cui;
    std::size_t before = 0;
    std::size_t after = 0;
    std::optional<double> percent;  // nullopt when the treatment has no interactions

    bool no_interactions() const noexcept { return !percent; }
};

// Withdraws `removed` from the treatment, re-runs the fixpoint on the remaining drugs and
// compares edge counts. Throws NotFound when a removed drug is not a treatment member.
Reduction ddi_reduction(std::span<const PkDdi> ddis, const Treatment& treatment, const std::set<std::string>& removed,
                        GraphMode mode = GraphMode::closure);
Reduction ddi_reduction(std::span<const PkDdi> ddis, const Treatment& treatment, const std::string& cui,
                        GraphMode mode = GraphMode::closure);

// Graph of a treatment computed from scratch.
InteractionGraph treatment_graph(std::span<const PkDdi> ddis, const Treatment& treatment,
                                 GraphMode mode = GraphMode::closure);

// CSV `drug_cui,label,F,reduction_percent`; the percentage column is empty when undefined.
void write_report_csv(std::ostream& out, const WedgeReport& report, const std::map<std::string, Reduction>& reductions);
void write_dot(std::ostream& out, const InteractionGraph& graph, const WedgeReport* report = nullptr);

} // namespace ddikg::wedge
