#include "ddikg/core.hpp"
#include "ddikg/csv.hpp"
#include "ddikg/error.hpp"
#include "ddikg/text.hpp"

#include "tempdir.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace ddikg;
using testing_support::TempDir;

namespace {

DrugId hcq() { return DrugId("C0020336", "Hydroxychloroquine"); }
DrugId metformin() { return DrugId("C0025598", "Metformin"); }
DrugId azithromycin() { return DrugId("C0052796", "Azithromycin"); }

} // namespace

TEST(DrugIdTest, ValidatesCui) {
    EXPECT_TRUE(DrugId::valid_cui("C0020336"));
    EXPECT_FALSE(DrugId::valid_cui("C002033"));
    EXPECT_FALSE(DrugId::valid_cui("C00203361"));
    EXPECT_FALSE(DrugId::valid_cui("c0020336"));
    EXPECT_FALSE(DrugId::valid_cui("D0020336"));
    EXPECT_FALSE(DrugId::valid_cui("C00x0336"));
    EXPECT_THROW(DrugId("C12", "x"), InvalidInput);
    EXPECT_THROW(DrugId("C0020336", ""), InvalidInput);
}

TEST(DrugIdTest, IdentityIsCuiOnly) {
    EXPECT_EQ(DrugId("C0020336", "HCQ"), hcq());
    EXPECT_LT(hcq(), azithromycin());
}

TEST(EffectTest, NormalizesClosedVariants) {
    EXPECT_EQ(normalize_effect("excretion rate"), EffectKind(PkEffect::excretion));
    EXPECT_EQ(normalize_effect("excretion"), EffectKind(PkEffect::excretion));
    EXPECT_EQ(normalize_effect("metabolism"), EffectKind(PkEffect::metabolism));
    EXPECT_EQ(normalize_effect("Serum Concentration"), EffectKind(PkEffect::serum));
    EXPECT_EQ(normalize_effect("serum level"), EffectKind(PkEffect::serum));
    EXPECT_EQ(normalize_effect("serum"), EffectKind(PkEffect::serum));
    EXPECT_EQ(normalize_effect("  absorption "), EffectKind(PkEffect::absorption));
}

TEST(EffectTest, KeepsPharmacodynamicPhrase) {
    auto e = normalize_effect("QTc   prolongation");
    EXPECT_FALSE(e.pharmacokinetic());
    EXPECT_EQ(e.phenotype(), "qtc prolongation");
    EXPECT_EQ(e.surface(), "qtc prolongation");
    EXPECT_THROW(e.pk(), InvalidInput);
    EXPECT_THROW(normalize_effect("   "), InvalidInput);
}

TEST(EffectTest, NormalizeIsIdempotent) {
    for (const char* raw : {"excretion rate", "serum level", "absorption", "metabolism", "risk of bleeding"}) {
        auto once = normalize_effect(raw);
        EXPECT_EQ(normalize_effect(once.surface()), once) << raw;
    }
}

TEST(EffectTest, LexiconFileAddsSurfaceForms) {
    TempDir dir;
    auto path = dir.write("effects.csv", "surface_phrase,canonical\nplasma level,serum\nclearance,excretion\n");
    auto lex = EffectLexicon::load(path);
    EXPECT_EQ(lex.size(), 2u);
    EXPECT_EQ(lex.normalize("Plasma Level"), EffectKind(PkEffect::serum));
    EXPECT_FALSE(lex.normalize("metabolism").pharmacokinetic());
    auto bad = dir.write("bad.csv", "surface_phrase,canonical\nx,kidney\n");
    try {
        EffectLexicon::load(bad);
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(ImpactTest, Parses) {
    EXPECT_EQ(parse_impact("increase"), Impact::increase);
    EXPECT_EQ(parse_impact("Decreased"), Impact::decrease);
    EXPECT_THROW(parse_impact("higher"), InvalidInput);
    EXPECT_EQ(to_string(Impact::decrease), "decrease");
}

TEST(RuleFactsTest, ExactlyEightAndComplementary) {
    const auto& facts = ground_rule_facts();
    EXPECT_EQ(facts.size(), 8u);
    EXPECT_TRUE(facts.count(RuleFact{RuleKind::toxicity, PkEffect::excretion, Impact::decrease}));
    std::set<std::pair<PkEffect, Impact>> r1, r2;
    for (const auto& f : facts) (f.kind == RuleKind::toxicity ? r1 : r2).insert({f.effect, f.impact});
    EXPECT_EQ(r1.size(), 4u);
    EXPECT_EQ(r2.size(), 4u);
    for (auto e : {PkEffect::absorption, PkEffect::excretion, PkEffect::metabolism, PkEffect::serum})
        for (auto i : {Impact::increase, Impact::decrease})
            EXPECT_EQ(r1.count({e, i}) + r2.count({e, i}), 1u);
    EXPECT_EQ(&ground_rule_facts(), &facts);
}

TEST(RuleFactsTest, Classify) {
    EXPECT_EQ(classify(PkEffect::serum, Impact::increase), RuleKind::toxicity);
    EXPECT_EQ(classify(PkEffect::metabolism, Impact::decrease), RuleKind::toxicity);
    EXPECT_EQ(classify(PkEffect::absorption, Impact::decrease), RuleKind::effectiveness);
    EXPECT_EQ(classify(PkEffect::excretion, Impact::increase), RuleKind::effectiveness);
    EXPECT_EQ(classify(EffectKind::pharmacodynamic("bleeding"), Impact::increase), std::nullopt);
}

TEST(PkDdiTest, IdentityIgnoresProvenance) {
    PkDdi a(azithromycin(), PkEffect::metabolism, Impact::decrease, hcq(), Provenance::curated);
    PkDdi b(azithromycin(), PkEffect::metabolism, Impact::decrease, hcq(), Provenance::extracted);
    EXPECT_EQ(a, b);
    EXPECT_THROW(PkDdi(hcq(), PkEffect::serum, Impact::increase, hcq()), InvalidInput);
    EXPECT_EQ(parse_provenance("deduced"), Provenance::deduced);
    EXPECT_THROW(parse_provenance("guessed"), InvalidInput);
}

TEST(TreatmentTest, Validation) {
    std::vector<DrugId> covid{hcq(), hcq()}, comorbidity{metformin()};
    auto t = validate_treatment(covid, comorbidity, "T");
    EXPECT_EQ(t.size(), 2u);
    EXPECT_TRUE(t.is_member("C0025598"));
    EXPECT_FALSE(t.is_member("C0052796"));

    std::vector<DrugId> both{hcq()};
    try {
        validate_treatment(both, both, "T");
        FAIL() << "expected a validation error";
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("drug in both partitions"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("C0020336"), std::string::npos);
    }
    try {
        validate_treatment({}, {}, "T");
        FAIL() << "expected a validation error";
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("empty treatment"), std::string::npos);
    }
}

TEST(CsvTest, QuotedFieldsRoundTrip) {
    std::vector<csv::Row> rows{{"a", "b,c", "say \"hi\""}, {"multi\nline", "", "x"}};
    std::ostringstream out;
    for (const auto& r : rows) csv::write_row(out, r);
    std::istringstream in(out.str());
    csv::Reader reader(in);
    for (const auto& expected : rows) {
        auto got = reader.next();
        ASSERT_TRUE(got);
        EXPECT_EQ(*got, expected);
    }
    EXPECT_FALSE(reader.next());
}

TEST(CsvTest, TableChecksShape) {
    std::istringstream ok("x,y\n1,2\n\n3,4\n");
    auto t = csv::read_table(ok);
    EXPECT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(t.lines[1], 4u);
    EXPECT_EQ(t.column("y"), 1u);
    EXPECT_EQ(t.column("z"), std::nullopt);
    std::istringstream bad("x,y\n1\n");
    EXPECT_THROW(csv::read_table(bad), ParseError);
    std::istringstream wrong("a,b\n");
    auto w = csv::read_table(wrong);
    EXPECT_THROW(csv::require_header(w, {"x", "y"}, "t"), ParseError);
}

TEST(TextTest, Helpers) {
    EXPECT_EQ(text::trim("  a b \t"), "a b");
    EXPECT_EQ(text::normalize("  Risk  OF\tBleeding "), "risk of bleeding");
    EXPECT_EQ(text::split("a,,b", ','), (std::vector<std::string>{"a", "", "b"}));
    EXPECT_EQ(text::split_ws(" a  b "), (std::vector<std::string>{"a", "b"}));
    EXPECT_EQ(text::join({"a", "b"}, "-"), "a-b");
    EXPECT_TRUE(text::starts_with_ci("Hydroxy", "hyd"));
    EXPECT_FALSE(text::starts_with_ci("Hy", "hyd"));
}
