#include "ddikg/error.hpp"
#include "ddikg/wedge.hpp"

#include "fixture_search.hpp"
#include "fixtures.hpp"
#include "generators.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

using namespace ddikg;
using namespace ddikg::wedge;

namespace {

std::vector<DrugId> nodes(int n) {
    std::vector<DrugId> out;
    for (int i = 0; i < n; ++i) out.push_back(gen::drug(i));
    return out;
}

Edge edge(int a, int b, std::string phrase = "x") {
    return Edge{gen::cui(a), gen::cui(b), EffectKind::pharmacodynamic(phrase), Impact::increase, false};
}

// Ordered pairs of distinct edges sharing a middle vertex, with distinct outer vertices.
std::map<std::string, std::size_t> brute_force(const InteractionGraph& g) {
    std::map<std::string, std::size_t> f;
    for (const auto& n : g.nodes()) f[n.cui()] = 0;
    const auto& es = g.edges();
    for (std::size_t i = 0; i < es.size(); ++i)
        for (std::size_t j = 0; j < es.size(); ++j)
            if (i != j && es[i].object == es[j].precipitant && es[i].precipitant != es[j].object) ++f[es[i].object];
    return f;
}

Treatment worked_treatment(const deduce::ExtensionalDb& edb) { return edb.treatments().at(0); }

} // namespace

TEST(Wedge, SimplePath) {
    InteractionGraph g("T", nodes(3), {edge(0, 1), edge(1, 2)}, GraphMode::closure);
    auto r = wedge_frequencies(g);
    EXPECT_EQ(r.frequency(gen::cui(1)), 1u);
    EXPECT_EQ(r.frequency(gen::cui(0)), 0u);
    EXPECT_EQ(r.frequency(gen::cui(2)), 0u);
    EXPECT_EQ(r.wedge_count, 1u);
}

TEST(Wedge, ParallelEdgesCountSeparately) {
    InteractionGraph g("T", nodes(3), {edge(0, 1, "p"), edge(0, 1, "q"), edge(1, 2)}, GraphMode::closure);
    EXPECT_EQ(wedge_frequencies(g).frequency(gen::cui(1)), 2u);
    EXPECT_EQ(brute_force(g)[gen::cui(1)], 2u);
}

TEST(Wedge, BackAndForthIsNotAWedge) {
    InteractionGraph g("T", nodes(2), {edge(0, 1), edge(1, 0)}, GraphMode::closure);
    EXPECT_EQ(wedge_frequencies(g).wedge_count, 0u);
}

TEST(Wedge, RandomMultigraphsMatchBruteForce) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 300; ++trial) {
        int n = std::uniform_int_distribution<int>(1, 10)(rng);
        int m = std::uniform_int_distribution<int>(0, 30)(rng);
        std::uniform_int_distribution<int> pick(0, n - 1);
        std::vector<Edge> es;
        for (int k = 0; k < m; ++k) es.push_back(edge(pick(rng), pick(rng), "e" + std::to_string(k % 3)));
        InteractionGraph g("T", nodes(n), es, GraphMode::all_facts);
        auto r = wedge_frequencies(g);
        auto oracle = brute_force(g);
        std::size_t total = 0;
        for (const auto& [d, f] : r.frequencies) {
            EXPECT_EQ(f, oracle[d.cui()]) << "trial " << trial;
            total += f;
        }
        EXPECT_EQ(total, r.wedge_count);
    }
}

TEST(Wedge, EdgeSlotsAtMiddleVertex) {
    // Every wedge at B uses one in-edge and one out-edge at B.
    InteractionGraph g("T", nodes(4), {edge(0, 1), edge(2, 1), edge(1, 3), edge(1, 0)}, GraphMode::closure);
    auto r = wedge_frequencies(g);
    std::size_t slots = 0;
    const auto& es = g.edges();
    for (std::size_t i = 0; i < es.size(); ++i)
        for (std::size_t j = 0; j < es.size(); ++j)
            if (es[i].object == gen::cui(1) && es[j].precipitant == gen::cui(1) && es[i].precipitant != es[j].object)
                slots += 2;
    EXPECT_EQ(slots, 2 * r.frequency(gen::cui(1)));
}

TEST(Graph, WorkedExampleHasSixEdges) {
    auto edb = fixtures::worked_example();
    auto model = deduce::fixpoint(edb);
    auto g = build_graph(worked_treatment(edb), model);
    EXPECT_EQ(g.edges().size(), 6u);
    EXPECT_EQ(g.deduced_edges(), 1u);
    EXPECT_EQ(build_graph(worked_treatment(edb), model, GraphMode::extensional).edges().size(), 5u);
    EXPECT_EQ(build_graph(worked_treatment(edb), model, GraphMode::all_facts).edges().size(), 10u);
}

TEST(Graph, NoInteractingMembers) {
    auto t = validate_treatment(std::vector<DrugId>{gen::drug(0), gen::drug(1)}, {}, "T");
    auto g = treatment_graph({}, t);
    EXPECT_EQ(g.nodes().size(), 2u);
    EXPECT_TRUE(g.edges().empty());
    EXPECT_TRUE(rank_drugs(wedge_frequencies(g), g).empty());
}

TEST(Graph, SingleInteraction) {
    std::vector<PkDdi> ddis = {PkDdi(gen::drug(0), PkEffect::serum, Impact::increase, gen::drug(1))};
    auto t = validate_treatment(std::vector<DrugId>{gen::drug(0)}, std::vector<DrugId>{gen::drug(1)}, "T");
    auto g = treatment_graph(ddis, t);
    ASSERT_EQ(g.edges().size(), 1u);
    EXPECT_EQ(g.edges()[0].precipitant, gen::cui(0));
    EXPECT_EQ(g.edges()[0].object, gen::cui(1));
    auto r = ddi_reduction(ddis, t, gen::cui(0));
    ASSERT_TRUE(r.percent);
    EXPECT_DOUBLE_EQ(*r.percent, 100.0);
}

TEST(Graph, MissingTreatment) {
    auto edb = fixtures::worked_example();
    auto model = deduce::fixpoint(edb);
    auto other = validate_treatment(std::vector<DrugId>{gen::drug(0)}, {}, "T9");
    EXPECT_THROW(build_graph(other, model), NotFound);
}

TEST(Wedge, WorkedExampleFrequencies) {
    using namespace fixtures::cui;
    auto edb = fixtures::worked_example();
    auto g = build_graph(worked_treatment(edb), deduce::fixpoint(edb));
    auto r = wedge_frequencies(g);
    EXPECT_EQ(r.frequency(azithromycin), 3u);
    EXPECT_EQ(r.frequency(montelukast), 2u);
    EXPECT_EQ(r.frequency(lovastatin), 1u);
    EXPECT_EQ(r.frequency(doxycycline), 0u);
    EXPECT_EQ(r.frequency(hydroxychloroquine), 0u);
    auto ranking = rank_drugs(r, g);
    ASSERT_GE(ranking.size(), 3u);
    EXPECT_EQ(ranking[0].drug.cui(), azithromycin);
    EXPECT_EQ(ranking[1].drug.cui(), montelukast);
    EXPECT_EQ(ranking[2].drug.cui(), lovastatin);
    EXPECT_FALSE(ranking[0].tied);
}

TEST(Wedge, WorkedExampleExtensionalOnly) {
    using namespace fixtures::cui;
    auto edb = fixtures::worked_example();
    auto g = build_graph(worked_treatment(edb), deduce::fixpoint(edb), GraphMode::extensional);
    auto r = wedge_frequencies(g);
    EXPECT_EQ(r.frequency(azithromycin), 3u);
    EXPECT_EQ(r.frequency(montelukast), 1u);
    EXPECT_EQ(r.frequency(lovastatin), 1u);
}

TEST(Reduction, WorkedExampleAzithromycin) {
    auto edb = fixtures::worked_example();
    auto r = ddi_reduction(edb.ddis(), worked_treatment(edb), fixtures::cui::azithromycin);
    EXPECT_EQ(r.before, 6u);
    EXPECT_EQ(r.after, 1u);
    ASSERT_TRUE(r.percent);
    EXPECT_NEAR(*r.percent, 100.0 * 5.0 / 6.0, 1e-9);
}

TEST(Reduction, IsolatedDrug) {
    auto edb = fixtures::worked_example();
    auto r = ddi_reduction(edb.ddis(), worked_treatment(edb), fixtures::cui::hydroxychloroquine);
    ASSERT_TRUE(r.percent);
    EXPECT_DOUBLE_EQ(*r.percent, 0.0);
}

TEST(Reduction, NoInteractions) {
    auto t = validate_treatment(std::vector<DrugId>{gen::drug(0)}, {}, "T");
    auto r = ddi_reduction({}, t, gen::cui(0));
    EXPECT_TRUE(r.no_interactions());
}

TEST(Reduction, NotANode) {
    auto edb = fixtures::worked_example();
    EXPECT_THROW(ddi_reduction(edb.ddis(), worked_treatment(edb), gen::cui(3)), NotFound);
}

TEST(Reduction, BoundsAndMonotoneDeletion) {
    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 60; ++trial) {
        auto r = gen::random_edb(rng, 6, 1);
        const auto& t = r.edb.treatments()[0];
        auto members = t.member_cuis();
        std::size_t previous = treatment_graph(r.edb.ddis(), t).edges().size();
        std::set<std::string> removed;
        for (const auto& cui : members) {
            removed.insert(cui);
            auto red = ddi_reduction(r.edb.ddis(), t, removed);
            EXPECT_LE(red.after, previous);
            previous = red.after;
            if (red.percent) {
                EXPECT_GE(*red.percent, 0.0);
                EXPECT_LE(*red.percent, 100.0);
            }
        }
        auto all = ddi_reduction(r.edb.ddis(), t, members);
        if (all.percent) EXPECT_DOUBLE_EQ(*all.percent, 100.0);
    }
}

TEST(Ranking, TiesShareARank) {
    // Two hubs with two wedges each.
    InteractionGraph g("T", nodes(6), {edge(0, 1), edge(1, 2), edge(3, 1), edge(2, 4), edge(5, 2)}, GraphMode::closure);
    auto r = wedge_frequencies(g);
    auto ranking = rank_drugs(r, g);
    ASSERT_GE(ranking.size(), 2u);
    EXPECT_EQ(ranking[0].frequency, 2u);
    EXPECT_EQ(ranking[1].frequency, 2u);
    EXPECT_EQ(ranking[0].rank, 1u);
    EXPECT_EQ(ranking[1].rank, 1u);
    EXPECT_TRUE(ranking[0].tied);
    EXPECT_TRUE(ranking[1].tied);
    EXPECT_LT(ranking[0].drug.cui(), ranking[1].drug.cui());
}

TEST(Export, ReportAndDot) {
    auto edb = fixtures::worked_example();
    auto g = build_graph(worked_treatment(edb), deduce::fixpoint(edb));
    auto r = wedge_frequencies(g);
    std::map<std::string, Reduction> reductions = {
        {fixtures::cui::azithromycin, ddi_reduction(edb.ddis(), worked_treatment(edb), fixtures::cui::azithromycin)}};
    std::ostringstream csv, dot;
    write_report_csv(csv, r, reductions);
    EXPECT_NE(csv.str().find("drug_cui,label,F,reduction_percent\n"), std::string::npos);
    EXPECT_NE(csv.str().find("C0052796,Azithromycin,3,83.3\n"), std::string::npos);
    write_dot(dot, g, &r);
    auto text = dot.str();
    EXPECT_EQ(std::count(text.begin(), text.end(), '>'), 6);
    EXPECT_NE(text.find("style=dashed"), std::string::npos);
}

TEST(WorkedExampleFixture, IsAReconstructionSolution) {
    auto found = search::solutions();
    ASSERT_FALSE(found.empty());
    // The frozen fixture, in search coordinates.
    std::vector<search::Edge> frozen = {{1, 0, 2}, {1, 3, 3}, {2, 1, 1}, {3, 3, 2}, {4, 1, 1}};
    std::sort(frozen.begin(), frozen.end());
    bool present = false;
    for (auto s : found) {
        std::sort(s.begin(), s.end());
        present |= s == frozen;
        // Every solution leaves hydroxychloroquine isolated.
        for (const auto& [a, l, b] : s) EXPECT_TRUE(a != 0 && b != 0);
    }
    EXPECT_TRUE(present);
}
