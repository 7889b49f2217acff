#include "ddikg/deduction.hpp"
#include "ddikg/error.hpp"

#include "datalog_oracle.hpp"
#include "fixtures.hpp"
#include "generators.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace ddikg;
using namespace ddikg::deduce;

namespace {

DrugId A() { return DrugId("C0000001", "A"); }
DrugId B() { return DrugId("C0000002", "B"); }
DrugId C() { return DrugId("C0000003", "C"); }

ExtensionalDb db(std::vector<PkDdi> ddis, std::vector<Treatment> ts) {
    ExtensionalDb edb;
    for (auto& d : ddis) edb.add(std::move(d));
    for (auto& t : ts) edb.add(std::move(t));
    return edb;
}

Treatment treatment(std::vector<DrugId> covid, std::string id) { return validate_treatment(covid, {}, std::move(id)); }

} // namespace

TEST(Localize, BothMembers) {
    auto edb = db({PkDdi(A(), PkEffect::serum, Impact::increase, B())}, {treatment({A(), B()}, "T")});
    auto out = localize(edb);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(*out.begin(), (LocalDdi{"C0000001", PkEffect::serum, Impact::increase, "C0000002", "T"}));
}

TEST(Localize, ObjectNotMember) {
    auto edb = db({PkDdi(A(), PkEffect::serum, Impact::increase, B())}, {treatment({A(), C()}, "T")});
    EXPECT_TRUE(localize(edb).empty());
}

TEST(Localize, MatchesMembershipEnumeration) {
    std::vector<PkDdi> ddis = {PkDdi(A(), PkEffect::serum, Impact::increase, B()),
                               PkDdi(B(), PkEffect::metabolism, Impact::decrease, C()),
                               PkDdi(C(), EffectKind::pharmacodynamic("bleeding"), Impact::increase, A())};
    std::vector<Treatment> ts = {treatment({A(), B()}, "T1"), treatment({A(), B(), C()}, "T2")};
    auto edb = db(ddis, ts);
    std::size_t expected = 0;
    for (const auto& t : ts)
        for (const auto& d : ddis)
            expected += t.is_member(d.precipitant().cui()) && t.is_member(d.object().cui());
    EXPECT_EQ(expected, 4u);
    EXPECT_EQ(localize(edb).size(), expected);
}

TEST(Fixpoint, MetabolismIncreaseGivesEffectiveness) {
    auto edb = db({PkDdi(A(), PkEffect::metabolism, Impact::increase, B())}, {treatment({A(), B()}, "T")});
    auto m = fixpoint(edb);
    EXPECT_TRUE(m.contains(Effectiveness{"C0000001", "C0000002", "T"}));
    EXPECT_TRUE(m.toxicity.empty());
}

TEST(Fixpoint, PharmacodynamicNeverTriggersRuleTables) {
    auto edb = db({PkDdi(A(), EffectKind::pharmacodynamic("qt prolongation"), Impact::increase, B())},
                  {treatment({A(), B()}, "T")});
    auto m = fixpoint(edb);
    EXPECT_EQ(m.ddis.size(), 1u);
    EXPECT_TRUE(m.toxicity.empty());
    EXPECT_TRUE(m.effectiveness.empty());
}

TEST(Fixpoint, WorkedExample) {
    using namespace fixtures::cui;
    auto m = fixpoint(fixtures::worked_example());
    auto deduced = m.deduced_ddis();
    EXPECT_EQ(deduced.size(), 5u);
    EXPECT_TRUE(m.contains(LocalDdi{doxycycline, PkEffect::metabolism, Impact::decrease, montelukast, "T1"}));
    EXPECT_TRUE(m.deduced(LocalDdi{doxycycline, PkEffect::metabolism, Impact::decrease, montelukast, "T1"}));
    EXPECT_TRUE(m.contains(Toxicity{doxycycline, montelukast, "T1"}));
}

TEST(Fixpoint, WorkedExampleMatchesOracle) {
    auto edb = fixtures::worked_example();
    std::vector<oracle::Ddi4> ddis;
    for (const auto& d : edb.ddis())
        ddis.emplace_back(d.precipitant().cui(), d.effect().surface(), std::string(to_string(d.impact())),
                          d.object().cui());
    auto naive = oracle::naive_saturate(ddis, {{"T1", edb.treatments()[0].member_cuis()}});
    auto got = gen::flatten(fixpoint(edb));
    EXPECT_EQ(got.ddi, naive.ddi);
    EXPECT_EQ(got.toxicity, naive.toxicity);
    EXPECT_EQ(got.effectiveness, naive.effectiveness);
    EXPECT_EQ(naive.ddi.size() - edb.ddis().size(), 5u);
}

TEST(Fixpoint, RandomDatabasesMatchNaiveSaturation) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        auto r = gen::random_edb(rng);
        auto naive = oracle::naive_saturate(r.ddis, r.members);
        auto got = gen::flatten(fixpoint(r.edb));
        ASSERT_EQ(got.ddi, naive.ddi) << "trial " << trial;
        ASSERT_EQ(got.toxicity, naive.toxicity) << "trial " << trial;
        ASSERT_EQ(got.effectiveness, naive.effectiveness) << "trial " << trial;
    }
}

TEST(Fixpoint, RoundsAddFactsUntilTheLast) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        auto r = gen::random_edb(rng);
        auto m = fixpoint(r.edb);
        ASSERT_FALSE(m.round_sizes.empty());
        EXPECT_EQ(m.round_sizes.back(), 0u);
        for (std::size_t i = 0; i + 1 < m.round_sizes.size(); ++i) EXPECT_GT(m.round_sizes[i], 0u);
        std::size_t drugs = 6, labels = 12, treatments = r.edb.treatments().size();
        EXPECT_LE(m.iterations(), treatments * drugs * drugs * (labels + 2));
    }
}

TEST(Fixpoint, Idempotent) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        auto r = gen::random_edb(rng, 6, 1);
        auto m = fixpoint(r.edb);
        // Feed every ddi/5 back as ddi/4; the localized closure over the same treatment must not grow.
        ExtensionalDb again;
        for (const auto& d : r.edb.ddis()) again.add(d);
        for (const auto& d : m.ddis)
            if (d.precipitant != d.object)
                again.add(PkDdi(DrugId(d.precipitant, d.precipitant), d.effect, d.impact, DrugId(d.object, d.object)));
        for (const auto& t : r.edb.treatments()) again.add(t);
        auto m2 = fixpoint(again);
        EXPECT_EQ(gen::flatten(m2).ddi, gen::flatten(m).ddi);
        EXPECT_EQ(m2.toxicity, m.toxicity);
        EXPECT_EQ(m2.effectiveness, m.effectiveness);
    }
}

TEST(Fixpoint, Monotone) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        auto r = gen::random_edb(rng, 6, 1);
        ExtensionalDb smaller;
        for (std::size_t i = 0; i < r.edb.ddis().size(); i += 2) smaller.add(r.edb.ddis()[i]);
        for (const auto& t : r.edb.treatments()) smaller.add(t);
        auto big = gen::flatten(fixpoint(r.edb));
        auto small = gen::flatten(fixpoint(smaller));
        EXPECT_TRUE(std::includes(big.ddi.begin(), big.ddi.end(), small.ddi.begin(), small.ddi.end()));
        EXPECT_TRUE(std::includes(big.toxicity.begin(), big.toxicity.end(), small.toxicity.begin(), small.toxicity.end()));
    }
}

TEST(Fixpoint, ToxicityTransitivelyClosed) {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 30; ++trial) {
        auto m = fixpoint(gen::random_edb(rng).edb);
        for (const auto& x : m.toxicity)
            for (const auto& y : m.toxicity)
                if (x.object == y.precipitant && x.treatment == y.treatment)
                    EXPECT_TRUE(m.toxicity.count(Toxicity{x.precipitant, y.object, x.treatment}));
    }
}

TEST(Fixpoint, DeterministicTraces) {
    auto edb = fixtures::worked_example();
    auto a = fixpoint(edb), b = fixpoint(edb);
    ASSERT_EQ(a.trace.size(), b.trace.size());
    for (auto ia = a.trace.begin(), ib = b.trace.begin(); ia != a.trace.end(); ++ia, ++ib) {
        EXPECT_EQ(ia->first, ib->first);
        EXPECT_EQ(ia->second.rule, ib->second.rule);
        EXPECT_EQ(ia->second.premises, ib->second.premises);
    }
}

TEST(Fixpoint, SingleTreatmentScope) {
    auto edb = fixtures::worked_example();
    const auto& t = edb.treatments()[0];
    auto scoped = fixpoint(edb.ddis(), t.id(), t.member_cuis());
    auto full = fixpoint(edb);
    EXPECT_EQ(scoped.ddis, full.ddis);
    auto empty = fixpoint(edb.ddis(), "T0", {});
    EXPECT_EQ(empty.size(), 0u);
}

TEST(Explain, ToxicityFromDdiHasDepthOne) {
    auto edb = db({PkDdi(A(), PkEffect::serum, Impact::increase, B())}, {treatment({A(), B()}, "T")});
    auto m = fixpoint(edb);
    auto tree = explain(m, Toxicity{"C0000001", "C0000002", "T"});
    EXPECT_EQ(tree.depth(), 1u);
    EXPECT_EQ(tree.rule, Rule::toxicity_from_ddi);
    ASSERT_EQ(tree.children.size(), 2u);
    EXPECT_TRUE(std::holds_alternative<LocalDdi>(tree.children[0].fact));
    EXPECT_EQ(tree.children[0].rule, Rule::localize);
    ASSERT_TRUE(std::holds_alternative<RuleFact>(tree.children[1].fact));
    EXPECT_EQ(std::get<RuleFact>(tree.children[1].fact), (RuleFact{RuleKind::toxicity, PkEffect::serum, Impact::increase}));
}

TEST(Explain, TransitiveToxicityIsDeeper) {
    auto edb = db({PkDdi(A(), PkEffect::serum, Impact::increase, B()), PkDdi(B(), PkEffect::excretion, Impact::decrease, C())},
                  {treatment({A(), B(), C()}, "T")});
    auto m = fixpoint(edb);
    auto tree = explain(m, Toxicity{"C0000001", "C0000003", "T"});
    EXPECT_GE(tree.depth(), 2u);
    EXPECT_EQ(tree.rule, Rule::toxicity_transitive);
}

TEST(Explain, ExtensionalFactIsNotDerived) {
    auto ddi = PkDdi(A(), PkEffect::serum, Impact::increase, B());
    auto m = fixpoint(db({ddi}, {treatment({A(), B()}, "T")}));
    EXPECT_THROW(explain(m, ddi), NotDerived);
    EXPECT_THROW(explain(m, Toxicity{"C0000002", "C0000001", "T"}), NotDerived);
}

TEST(Explain, EveryDeducedFactBottomsOutInLocalizedFacts) {
    auto m = fixpoint(fixtures::worked_example());
    std::function<void(const DerivationNode&)> check = [&](const DerivationNode& n) {
        if (n.children.empty()) {
            bool leaf = std::holds_alternative<RuleFact>(n.fact) || (n.rule == Rule::localize && n.source);
            EXPECT_TRUE(leaf);
        }
        for (const auto& c : n.children) check(c);
    };
    for (const auto& [fact, _] : m.trace)
        check(explain(m, std::visit([](const auto& x) -> Fact { return x; }, fact)));
}

TEST(Csv, ParsesInteractionsAndTreatments) {
    std::istringstream ddis("precipitant_cui,effect,impact,object_cui\nC0000001,serum level,increased,C0000002\n"
                            "C0000001,serum level,increased,C0000002\n");
    auto out = parse_ddis_csv(ddis);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].effect(), EffectKind(PkEffect::serum));
    EXPECT_EQ(out[0].impact(), Impact::increase);

    std::istringstream ts("treatment_id,cui,partition\nT,C0000001,covid\nT,C0000002,comorbidity\n");
    auto t = parse_treatments_csv(ts);
    ASSERT_EQ(t.size(), 1u);
    EXPECT_EQ(t[0].size(), 2u);
}

TEST(Csv, RejectsBadRows) {
    std::istringstream bad_cui("precipitant_cui,effect,impact,object_cui\nX1,serum,increase,C0000002\n");
    EXPECT_THROW(parse_ddis_csv(bad_cui), ParseError);
    std::istringstream bad_partition("treatment_id,cui,partition\nT,C0000001,elsewhere\n");
    EXPECT_THROW(parse_treatments_csv(bad_partition), ParseError);
    std::istringstream overlap("treatment_id,cui,partition\nT,C0000001,covid\nT,C0000001,comorbidity\n");
    EXPECT_THROW(parse_treatments_csv(overlap), ValidationError);
}
