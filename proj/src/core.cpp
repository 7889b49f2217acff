#include "ddikg/core.hpp"

#include "ddikg/csv.hpp"
#include "ddikg/error.hpp"
#include "ddikg/text.hpp"

#include <algorithm>
#include <cctype>

namespace ddikg {

DrugId::DrugId(std::string cui, std::string label) : cui_(std::move(cui)), label_(text::trim(label)) {
    if (!valid_cui(cui_)) throw InvalidInput("malformed CUI `" + cui_ + "`");
    if (label_.empty()) throw InvalidInput("empty label for " + cui_);
}

bool DrugId::valid_cui(std::string_view cui) noexcept {
    if (cui.size() != 8 || cui[0] != 'C') return false;
    return std::all_of(cui.begin() + 1, cui.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

std::string_view to_string(Impact impact) noexcept {
    return impact == Impact::increase ? "increase" : "decrease";
}

Impact parse_impact(std::string_view text) {
    auto t = text::normalize(text);
    if (t == "increase" || t == "increased") return Impact::increase;
    if (t == "decrease" || t == "decreased") return Impact::decrease;
    throw InvalidInput("unknown impact `" + std::string(text) + "`");
}

std::string_view to_string(PkEffect effect) noexcept {
    switch (effect) {
    case PkEffect::absorption: return "absorption";
    case PkEffect::excretion: return "excretion";
    case PkEffect::metabolism: return "metabolism";
    case PkEffect::serum: return "serum";
    }
    return "?";
}

std::optional<PkEffect> parse_pk_effect(std::string_view text) noexcept {
    for (auto e : {PkEffect::absorption, PkEffect::excretion, PkEffect::metabolism, PkEffect::serum})
        if (text == to_string(e)) return e;
    return std::nullopt;
}

EffectKind EffectKind::pharmacodynamic(std::string_view phrase) {
    auto p = text::normalize(phrase);
    if (p.empty()) throw InvalidInput("empty pharmacodynamic phrase");
    return EffectKind(std::move(p));
}

PkEffect EffectKind::pk() const {
    if (auto* e = std::get_if<PkEffect>(&value_)) return *e;
    throw InvalidInput("effect `" + phenotype() + "` is pharmacodynamic");
}

const std::string& EffectKind::phenotype() const {
    if (auto* s = std::get_if<std::string>(&value_)) return *s;
    throw InvalidInput("effect is pharmacokinetic");
}

std::string EffectKind::surface() const {
    if (auto* e = std::get_if<PkEffect>(&value_)) return std::string(to_string(*e));
    return std::get<std::string>(value_);
}

std::strong_ordering operator<=>(const EffectKind& a, const EffectKind& b) noexcept {
    if (a.value_.index() != b.value_.index()) return a.value_.index() <=> b.value_.index();
    if (a.pharmacokinetic()) return std::get<PkEffect>(a.value_) <=> std::get<PkEffect>(b.value_);
    return std::get<std::string>(a.value_) <=> std::get<std::string>(b.value_);
}

const EffectLexicon& EffectLexicon::builtin() {
    static const EffectLexicon lexicon = [] {
        EffectLexicon l;
        l.add("metabolism", PkEffect::metabolism);
        l.add("excretion rate", PkEffect::excretion);
        l.add("excretion", PkEffect::excretion);
        l.add("serum concentration", PkEffect::serum);
        l.add("serum level", PkEffect::serum);
        l.add("serum", PkEffect::serum);
        l.add("absorption", PkEffect::absorption);
        return l;
    }();
    return lexicon;
}

EffectLexicon EffectLexicon::load(const std::filesystem::path& path) {
    auto table = csv::read_table(path);
    csv::require_header(table, {"surface_phrase", "canonical"}, path.string());
    EffectLexicon l;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        auto canonical = parse_pk_effect(text::normalize(row[1]));
        if (!canonical) throw ParseError("unknown canonical effect `" + row[1] + "`", table.lines[i]);
        if (text::normalize(row[0]).empty()) throw ParseError("empty surface phrase", table.lines[i]);
        l.add(row[0], *canonical);
    }
    return l;
}

void EffectLexicon::add(std::string_view surface, PkEffect canonical) {
    table_.insert_or_assign(text::normalize(surface), canonical);
}

EffectKind EffectLexicon::normalize(std::string_view raw_phrase) const {
    auto key = text::normalize(raw_phrase);
    if (key.empty()) throw InvalidInput("empty effect phrase");
    if (auto it = table_.find(key); it != table_.end()) return it->second;
    return EffectKind::pharmacodynamic(key);
}

EffectKind normalize_effect(std::string_view raw_phrase) {
    return EffectLexicon::builtin().normalize(raw_phrase);
}

std::string_view to_string(Provenance p) noexcept {
    switch (p) {
    case Provenance::extracted: return "extracted";
    case Provenance::curated: return "curated";
    case Provenance::deduced: return "deduced";
    case Provenance::predicted: return "predicted";
    }
    return "?";
}

Provenance parse_provenance(std::string_view text) {
    for (auto p : {Provenance::extracted, Provenance::curated, Provenance::deduced, Provenance::predicted})
        if (text == to_string(p)) return p;
    throw InvalidInput("unknown provenance `" + std::string(text) + "`");
}

PkDdi::PkDdi(DrugId precipitant, EffectKind effect, Impact impact, DrugId object, Provenance provenance)
    : precipitant_(std::move(precipitant)),
      effect_(std::move(effect)),
      impact_(impact),
      object_(std::move(object)),
      provenance_(provenance) {
    if (precipitant_ == object_)
        throw InvalidInput("interaction of " + precipitant_.cui() + " with itself");
}

std::set<DrugId> Treatment::members() const {
    std::set<DrugId> all = covid_;
    all.insert(comorbidity_.begin(), comorbidity_.end());
    return all;
}

std::set<std::string> Treatment::member_cuis() const {
    std::set<std::string> out;
    for (const auto& d : covid_) out.insert(d.cui());
    for (const auto& d : comorbidity_) out.insert(d.cui());
    return out;
}

bool Treatment::is_member(std::string_view cui) const {
    auto has = [&](const std::set<DrugId>& s) {
        return std::any_of(s.begin(), s.end(), [&](const DrugId& d) { return d.cui() == cui; });
    };
    return has(covid_) || has(comorbidity_);
}

Treatment validate_treatment(std::span<const DrugId> covid, std::span<const DrugId> comorbidity, std::string id,
                             std::vector<std::string> comorbidities) {
    Treatment t;
    t.id_ = std::move(id);
    if (t.id_.empty()) throw ValidationError("empty treatment id");
    t.covid_.insert(covid.begin(), covid.end());
    t.comorbidity_.insert(comorbidity.begin(), comorbidity.end());
    for (const auto& d : t.covid_)
        if (t.comorbidity_.count(d))
            throw ValidationError("drug in both partitions: " + d.cui() + " (" + d.label() + ")");
    if (t.covid_.empty() && t.comorbidity_.empty()) throw ValidationError("empty treatment");
    for (auto& c : comorbidities)
        if (auto n = text::trim(c); !n.empty()) t.comorbidities_.insert(std::move(n));
    return t;
}

std::string_view to_string(RuleKind kind) noexcept {
    return kind == RuleKind::toxicity ? "rule1" : "rule2";
}

const std::set<RuleFact>& ground_rule_facts() {
    static const std::set<RuleFact> facts = {
        {RuleKind::toxicity, PkEffect::serum, Impact::increase},
        {RuleKind::toxicity, PkEffect::metabolism, Impact::decrease},
        {RuleKind::toxicity, PkEffect::absorption, Impact::increase},
        {RuleKind::toxicity, PkEffect::excretion, Impact::decrease},
        {RuleKind::effectiveness, PkEffect::serum, Impact::decrease},
        {RuleKind::effectiveness, PkEffect::metabolism, Impact::increase},
        {RuleKind::effectiveness, PkEffect::absorption, Impact::decrease},
        {RuleKind::effectiveness, PkEffect::excretion, Impact::increase},
    };
    return facts;
}

std::optional<RuleKind> classify(const EffectKind& effect, Impact impact) {
    if (!effect.pharmacokinetic()) return std::nullopt;
    for (const auto& f : ground_rule_facts())
        if (f.effect == effect.pk() && f.impact == impact) return f.kind;
    return std::nullopt;
}

} // namespace ddikg
