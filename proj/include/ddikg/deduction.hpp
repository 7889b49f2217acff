#pragma once

// Semi-naive bottom-up evaluation of the treatment interaction program:
//
//   ddi(A,E,I,B), treatment(T), member(A,T), member(B,T) -> ddi(A,E,I,B,T)
//   ddi(A,E,I,B,T), rule1(E,I)                            -> toxicity(A,increase,B,T)
//   toxicity(A,increase,B,T), toxicity(B,increase,C,T)    -> toxicity(A,increase,C,T)
//   toxicity(A,increase,B,T), ddi(B,E,I,C,T)              -> ddi(A,E,I,C,T)
//   ddi(A,E,I,B,T), rule2(E,I)                            -> effectiveness(A,decrease,B,T)
//   effectiveness(A,decrease,B,T), effectiveness(B,decrease,C,T)
//                                                         -> effectiveness(A,decrease,C,T)
//
// The program is negation-free, so all rules run in a single stratum to saturation.

#include "ddikg/core.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace ddikg::deduce {

// ddi/4, treatment/1 + member/2; rule1/rule2 are always ground_rule_facts().
class ExtensionalDb {
public:
    // Returns false when an identical interaction is already present.
    bool add(PkDdi ddi);
    // Throws ValidationError on a duplicate treatment id.
    void add(Treatment treatment);

    const std::vector<PkDdi>& ddis() const noexcept { return ddis_; }
    const std::vector<Treatment>& treatments() const noexcept { return treatments_; }
    const Treatment* treatment(std::string_view id) const;

    // Label lookup over every drug mentioned by an interaction or a treatment.
    std::optional<DrugId> drug(std::string_view cui) const;

private:
    std::vector<PkDdi> ddis_;
    std::set<PkDdi> seen_;
    std::vector<Treatment> treatments_;
};

enum class Rule {
    localize,
    toxicity_from_ddi,
    toxicity_transitive,
    ddi_propagation,
    effectiveness_from_ddi,
    effectiveness_transitive,
};

std::string_view to_string(Rule rule) noexcept;

// ddi(A,E,I,B,T)
struct LocalDdi {
    std::string precipitant;
    EffectKind effect;
    Impact impact;
    std::string object;
    std::string treatment;

    friend bool operator==(const LocalDdi&, const LocalDdi&) = default;
    friend std::strong_ordering operator<=>(const LocalDdi&, const LocalDdi&) = default;
};

// toxicity(A,increase,B,T)
struct Toxicity {
    std::string precipitant;
    std::string object;
    std::string treatment;

    friend bool operator==(const Toxicity&, const Toxicity&) = default;
    friend std::strong_ordering operator<=>(const Toxicity&, const Toxicity&) = default;
};

// effectiveness(A,decrease,B,T)
struct Effectiveness {
    std::string precipitant;
    std::string object;
    std::string treatment;

    friend bool operator==(const Effectiveness&, const Effectiveness&) = default;
    friend std::strong_ordering operator<=>(const Effectiveness&, const Effectiveness&) = default;
};

using DerivedFact = std::variant<LocalDdi, Toxicity, Effectiveness>;

std::string to_string(const LocalDdi& f);
std::string to_string(const Toxicity& f);
std::string to_string(const Effectiveness& f);
std::string to_string(const DerivedFact& f);

// First-found justification of a derived fact.
struct Justification {
    Rule rule;
    std::vector<DerivedFact> premises;
    std::optional<RuleFact> rule_fact;  // toxicity_from_ddi / effectiveness_from_ddi
    std::optional<PkDdi> source;        // localize
};

struct DeducedModel {
    std::set<LocalDdi> ddis;  // localized and deduced ddi/5
    std::set<Toxicity> toxicity;
    std::set<Effectiveness> effectiveness;
    std::map<DerivedFact, Justification> trace;
    std::vector<std::size_t> round_sizes;  // new facts per round; the last entry is 0
    std::set<std::string> treatments;

    std::size_t iterations() const noexcept { return round_sizes.size(); }
    std::size_t size() const noexcept { return ddis.size() + toxicity.size() + effectiveness.size(); }

    bool contains(const DerivedFact& f) const;
    // ddi/5 produced by propagation rather than localization.
    bool deduced(const LocalDdi& f) const;
    std::vector<LocalDdi> ddis_of(std::string_view treatment) const;
    std::vector<LocalDdi> deduced_ddis() const;
};

// ddi/5 facts for every (interaction, treatment) whose drugs are both members.
std::set<LocalDdi> localize(const ExtensionalDb& edb);

DeducedModel fixpoint(const ExtensionalDb& edb);

// Runs the program for one treatment given by id and member CUIs. The member set may be
// empty (used for what-if withdrawals).
DeducedModel fixpoint(std::span<const PkDdi> ddis, const std::string& treatment_id,
                      const std::set<std::string>& members);

struct DerivationNode {
    std::variant<LocalDdi, Toxicity, Effectiveness, RuleFact> fact;
    std::optional<Rule> rule;       // rule that produced `fact`; nullopt for rule1/rule2 leaves
    std::optional<PkDdi> source;    // for localized ddi/5 leaves
    std::vector<DerivationNode> children;

    // Localized ddi/5 and rule1/rule2 facts are the leaves (depth 0).
    std::size_t depth() const;
    std::size_t leaf_count() const;
};

using Fact = std::variant<PkDdi, LocalDdi, Toxicity, Effectiveness>;

// Throws NotDerived for extensional ddi/4 facts and for facts not in the model.
DerivationNode explain(const DeducedModel& model, const Fact& fact);

// Drug labels keyed by CUI, read from CSV `cui,label`.
std::map<std::string, DrugId> load_drug_table(const std::filesystem::path& path);

// CSV `precipitant_cui,effect,impact,object_cui[,provenance]`. Labels come from `drugs` when present,
// otherwise the CUI doubles as the label.
std::vector<PkDdi> load_ddis_csv(const std::filesystem::path& path, const std::map<std::string, DrugId>& drugs = {},
                                 const EffectLexicon& effects = EffectLexicon::builtin());
std::vector<PkDdi> parse_ddis_csv(std::istream& in, const std::map<std::string, DrugId>& drugs = {},
                                  const EffectLexicon& effects = EffectLexicon::builtin());

// CSV `treatment_id,cui,partition` with partition covid|comorbidity.
std::vector<Treatment> load_treatments_csv(const std::filesystem::path& path,
                                           const std::map<std::string, DrugId>& drugs = {});
std::vector<Treatment> parse_treatments_csv(std::istream& in, const std::map<std::string, DrugId>& drugs = {});

// Writes ddi5.csv, toxicity.csv and effectiveness.csv into `dir`.
void write_model_csv(const std::filesystem::path& dir, const DeducedModel& model);
void write_ddi5_csv(std::ostream& out, const DeducedModel& model);

} // namespace ddikg::deduce
