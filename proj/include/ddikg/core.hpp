#pragma once

// Domain vocabulary shared by every module: drugs, effect kinds, impacts,
// pharmacokinetic interaction facts, treatments and the ground rule table.

#include <compare>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <variant>
#include <vector>

namespace ddikg {

class DrugId {
public:
    // cui must be `C` followed by 7 digits; label must be non-empty.
    DrugId(std::string cui, std::string label);

    static bool valid_cui(std::string_view cui) noexcept;

    const std::string& cui() const noexcept { return cui_; }
    const std::string& label() const noexcept { return label_; }

    // Identity is the CUI alone.
    friend bool operator==(const DrugId& a, const DrugId& b) noexcept { return a.cui_ == b.cui_; }
    friend std::strong_ordering operator<=>(const DrugId& a, const DrugId& b) noexcept { return a.cui_ <=> b.cui_; }

private:
    std::string cui_;
    std::string label_;
};

enum class Impact { increase, decrease };

std::string_view to_string(Impact impact) noexcept;
// Accepts increase/increased/decrease/decreased in any case.
Impact parse_impact(std::string_view text);

enum class PkEffect { absorption, excretion, metabolism, serum };

std::string_view to_string(PkEffect effect) noexcept;
std::optional<PkEffect> parse_pk_effect(std::string_view text) noexcept;

// Either one of the four pharmacokinetic effects or a free-text pharmacodynamic phenotype.
class EffectKind {
public:
    EffectKind(PkEffect effect) : value_(effect) {}  // NOLINT(google-explicit-constructor)

    // Stored lowercased with whitespace collapsed. Throws InvalidInput on an empty phrase.
    static EffectKind pharmacodynamic(std::string_view phrase);

    bool pharmacokinetic() const noexcept { return std::holds_alternative<PkEffect>(value_); }
    PkEffect pk() const;
    const std::string& phenotype() const;

    // Canonical name of a closed variant, or the phenotype phrase.
    std::string surface() const;

    friend bool operator==(const EffectKind&, const EffectKind&) = default;
    friend std::strong_ordering operator<=>(const EffectKind& a, const EffectKind& b) noexcept;

private:
    explicit EffectKind(std::string phrase) : value_(std::move(phrase)) {}
    std::variant<PkEffect, std::string> value_;
};

// Surface phrase -> closed effect variant. Anything not listed is pharmacodynamic.
class EffectLexicon {
public:
    EffectLexicon() = default;

    // The built-in table of surface forms.
    static const EffectLexicon& builtin();

    // Two-column CSV `surface_phrase,canonical`; entries are added on top of an empty lexicon.
    static EffectLexicon load(const std::filesystem::path& path);

    void add(std::string_view surface, PkEffect canonical);
    std::size_t size() const noexcept { return table_.size(); }

    EffectKind normalize(std::string_view raw_phrase) const;

private:
    std::map<std::string, PkEffect, std::less<>> table_;
};

// Uses the built-in lexicon.
EffectKind normalize_effect(std::string_view raw_phrase);

enum class Provenance { extracted, curated, deduced, predicted };

std::string_view to_string(Provenance p) noexcept;
Provenance parse_provenance(std::string_view text);

// ddi(A,E,I,B): precipitant A generates effect E with impact I on object B.
class PkDdi {
public:
    PkDdi(DrugId precipitant, EffectKind effect, Impact impact, DrugId object,
          Provenance provenance = Provenance::curated);

    const DrugId& precipitant() const noexcept { return precipitant_; }
    const EffectKind& effect() const noexcept { return effect_; }
    Impact impact() const noexcept { return impact_; }
    const DrugId& object() const noexcept { return object_; }
    Provenance provenance() const noexcept { return provenance_; }

    // Provenance does not take part in identity.
    auto key() const { return std::tie(precipitant_, effect_, impact_, object_); }
    friend bool operator==(const PkDdi& a, const PkDdi& b) { return a.key() == b.key(); }
    friend bool operator<(const PkDdi& a, const PkDdi& b) { return a.key() < b.key(); }

private:
    DrugId precipitant_;
    EffectKind effect_;
    Impact impact_;
    DrugId object_;
    Provenance provenance_;
};

class Treatment {
public:
    const std::string& id() const noexcept { return id_; }
    const std::set<DrugId>& covid_drugs() const noexcept { return covid_; }
    const std::set<DrugId>& comorbidity_drugs() const noexcept { return comorbidity_; }
    const std::set<std::string>& comorbidities() const noexcept { return comorbidities_; }

    std::set<DrugId> members() const;
    std::set<std::string> member_cuis() const;
    bool is_member(std::string_view cui) const;
    std::size_t size() const noexcept { return covid_.size() + comorbidity_.size(); }

private:
    friend Treatment validate_treatment(std::span<const DrugId>, std::span<const DrugId>, std::string,
                                        std::vector<std::string>);
    std::string id_;
    std::set<DrugId> covid_;
    std::set<DrugId> comorbidity_;
    std::set<std::string> comorbidities_;
};

// Deduplicates both lists. Throws ValidationError when a drug appears in both
// partitions or when the union is empty.
Treatment validate_treatment(std::span<const DrugId> covid, std::span<const DrugId> comorbidity, std::string id,
                             std::vector<std::string> comorbidities = {});

enum class RuleKind { toxicity, effectiveness };  // rule1, rule2

std::string_view to_string(RuleKind kind) noexcept;

struct RuleFact {
    RuleKind kind;
    PkEffect effect;
    Impact impact;

    friend auto operator<=>(const RuleFact&, const RuleFact&) = default;
};

// The eight ground rule1/rule2 facts.
const std::set<RuleFact>& ground_rule_facts();

// Which of rule1/rule2 admits (effect, impact); nullopt for pharmacodynamic effects.
std::optional<RuleKind> classify(const EffectKind& effect, Impact impact);

} // namespace ddikg
