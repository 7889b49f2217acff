#include "ddikg/wedge.hpp"

#include "ddikg/csv.hpp"
#include "ddikg/error.hpp"
#include "ddikg/text.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <unordered_map>

namespace ddikg::wedge {

std::string_view to_string(GraphMode mode) noexcept {
    switch (mode) {
    case GraphMode::closure: return "closure";
    case GraphMode::extensional: return "extensional";
    case GraphMode::all_facts: return "all-facts";
    }
    return "closure";
}

GraphMode parse_graph_mode(std::string_view text) {
    auto t = text::to_lower(text::trim(text));
    if (t == "closure") return GraphMode::closure;
    if (t == "extensional") return GraphMode::extensional;
    if (t == "all-facts" || t == "all_facts") return GraphMode::all_facts;
    throw InvalidInput("unknown graph mode: " + std::string(text));
}

InteractionGraph::InteractionGraph(std::string treatment, std::vector<DrugId> nodes, std::vector<Edge> edges,
                                   GraphMode mode)
    : treatment_(std::move(treatment)), nodes_(std::move(nodes)), edges_(std::move(edges)), mode_(mode) {
    std::sort(nodes_.begin(), nodes_.end());
    nodes_.erase(std::unique(nodes_.begin(), nodes_.end()), nodes_.end());
    for (const auto& e : edges_)
        if (!has_node(e.precipitant) || !has_node(e.object))
            throw ValidationError("edge endpoint is not a treatment member: " + e.precipitant + " -> " + e.object);
}

bool InteractionGraph::has_node(std::string_view cui) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), cui,
                               [](const DrugId& d, std::string_view c) { return d.cui() < c; });
    return it != nodes_.end() && it->cui() == cui;
}

const DrugId& InteractionGraph::node(std::string_view cui) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), cui,
                               [](const DrugId& d, std::string_view c) { return d.cui() < c; });
    if (it == nodes_.end() || it->cui() != cui) throw NotFound("drug is not a node: " + std::string(cui));
    return *it;
}

std::size_t InteractionGraph::deduced_edges() const {
    return static_cast<std::size_t>(std::count_if(edges_.begin(), edges_.end(), [](const Edge& e) { return e.deduced; }));
}

namespace {

bool keep(const deduce::LocalDdi& d, bool deduced, GraphMode mode) {
    if (!deduced) return true;
    switch (mode) {
    case GraphMode::extensional: return false;
    case GraphMode::all_facts: return true;
    case GraphMode::closure: return d.effect.pharmacokinetic() && d.precipitant != d.object;
    }
    return false;
}

} // namespace

InteractionGraph build_graph(const Treatment& treatment, const deduce::DeducedModel& model, GraphMode mode) {
    if (!model.treatments.count(treatment.id()))
        throw NotFound("treatment " + treatment.id() + " is not in the deduced model");
    std::vector<Edge> edges;
    for (const auto& d : model.ddis_of(treatment.id())) {
        bool deduced = model.deduced(d);
        if (keep(d, deduced, mode)) edges.push_back(Edge{d.precipitant, d.object, d.effect, d.impact, deduced});
    }
    auto members = treatment.members();
    return InteractionGraph(treatment.id(), {members.begin(), members.end()}, std::move(edges), mode);
}

std::size_t WedgeReport::frequency(std::string_view cui) const {
    for (const auto& [d, f] : frequencies)
        if (d.cui() == cui) return f;
    throw NotFound("drug is not a node: " + std::string(cui));
}

WedgeReport wedge_frequencies(const InteractionGraph& graph) {
    // F(B) = in(B)·out(B) − Σ_X in(X→B)·out(B→X): all in/out edge pairs at B minus those
    // returning to their own source.
    std::unordered_map<std::string, std::size_t> in, out;
    std::map<std::pair<std::string, std::string>, std::size_t> pair;
    for (const auto& e : graph.edges()) {
        ++out[e.precipitant];
        ++in[e.object];
        ++pair[{e.precipitant, e.object}];
    }
    WedgeReport r;
    for (const auto& n : graph.nodes()) {
        const auto& b = n.cui();
        std::size_t f = in[b] * out[b];
        for (auto it = pair.lower_bound({b, std::string()}); it != pair.end() && it->first.first == b; ++it) {
            auto back = pair.find({it->first.second, b});
            if (back != pair.end()) f -= back->second * it->second;
        }
        r.frequencies.emplace_back(n, f);
        r.wedge_count += f;
    }
    r.edges = graph.edges().size();
    r.deduced_edges = graph.deduced_edges();
    r.deduced_percentage = r.edges ? 100.0 * static_cast<double>(r.deduced_edges) / static_cast<double>(r.edges) : 0.0;
    return r;
}

std::vector<RankEntry> rank_drugs(const WedgeReport& report, const InteractionGraph& graph) {
    std::set<std::string> incident;
    for (const auto& e : graph.edges()) {
        incident.insert(e.precipitant);
        incident.insert(e.object);
    }
    std::vector<RankEntry> out;
    for (const auto& [d, f] : report.frequencies)
        if (incident.count(d.cui())) out.push_back(RankEntry{d, f, 0, false});
    std::stable_sort(out.begin(), out.end(), [](const RankEntry& a, const RankEntry& b) {
        if (a.frequency != b.frequency) return a.frequency > b.frequency;
        return a.drug.cui() < b.drug.cui();
    });
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i].rank = (i > 0 && out[i].frequency == out[i - 1].frequency) ? out[i - 1].rank : i + 1;
        bool same_prev = i > 0 && out[i - 1].frequency == out[i].frequency;
        bool same_next = i + 1 < out.size() && out[i + 1].frequency == out[i].frequency;
        out[i].tied = same_prev || same_next;
    }
    return out;
}

InteractionGraph treatment_graph(std::span<const PkDdi> ddis, const Treatment& treatment, GraphMode mode) {
    auto model = deduce::fixpoint(ddis, treatment.id(), treatment.member_cuis());
    return build_graph(treatment, model, mode);
}

Reduction ddi_reduction(std::span<const PkDdi> ddis, const Treatment& treatment, const std::set<std::string>& removed,
                        GraphMode mode) {
    for (const auto& cui : removed)
        if (!treatment.is_member(cui)) throw NotFound("drug is not a node of " + treatment.id() + ": " + cui);
    Reduction r;
    r.cui = text::join({removed.begin(), removed.end()}, ";");
    r.before = treatment_graph(ddis, treatment, mode).edges().size();
    auto members = treatment.member_cuis();
    for (const auto& cui : removed) members.erase(cui);
    auto reduced = deduce::fixpoint(ddis, treatment.id(), members);
    for (const auto& d : reduced.ddis)
        if (keep(d, reduced.deduced(d), mode)) ++r.after;
    if (r.before > 0)
        r.percent = 100.0 * static_cast<double>(r.before - std::min(r.after, r.before)) / static_cast<double>(r.before);
    return r;
}

Reduction ddi_reduction(std::span<const PkDdi> ddis, const Treatment& treatment, const std::string& cui,
                        GraphMode mode) {
    return ddi_reduction(ddis, treatment, std::set<std::string>{cui}, mode);
}

void write_report_csv(std::ostream& out, const WedgeReport& report, const std::map<std::string, Reduction>& reductions) {
    csv::write_row(out, {"drug_cui", "label", "F", "reduction_percent"});
    for (const auto& [d, f] : report.frequencies) {
        std::string pct;
        if (auto it = reductions.find(d.cui()); it != reductions.end() && it->second.percent) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.1f", *it->second.percent);
            pct = buf;
        }
        csv::write_row(out, {d.cui(), d.label(), std::to_string(f), pct});
    }
}

namespace {

std::string dot_quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

} // namespace

void write_dot(std::ostream& out, const InteractionGraph& graph, const WedgeReport* report) {
    out << "digraph " << dot_quote(graph.treatment()) << " {\n";
    for (const auto& n : graph.nodes()) {
        out << "  " << dot_quote(n.cui()) << " [label=" << dot_quote(n.label());
        if (report) out << ", F=" << report->frequency(n.cui());
        out << "];\n";
    }
    for (const auto& e : graph.edges()) {
        out << "  " << dot_quote(e.precipitant) << " -> " << dot_quote(e.object)
            << " [label=" << dot_quote(e.effect.surface() + " " + std::string(to_string(e.impact)));
        if (e.deduced) out << ", style=dashed";
        out << "];\n";
    }
    out << "}\n";
}

} // namespace ddikg::wedge
