#include "ddikg/deduction.hpp"

#include "ddikg/csv.hpp"
#include "ddikg/error.hpp"
#include "ddikg/text.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

namespace ddikg::deduce {

bool ExtensionalDb::add(PkDdi ddi) {
    if (!seen_.insert(ddi).second) return false;
    ddis_.push_back(std::move(ddi));
    return true;
}

void ExtensionalDb::add(Treatment treatment) {
    if (this->treatment(treatment.id()))
        throw ValidationError("duplicate treatment id: " + treatment.id());
    treatments_.push_back(std::move(treatment));
}

const Treatment* ExtensionalDb::treatment(std::string_view id) const {
    for (const auto& t : treatments_)
        if (t.id() == id) return &t;
    return nullptr;
}

std::optional<DrugId> ExtensionalDb::drug(std::string_view cui) const {
    for (const auto& d : ddis_) {
        if (d.precipitant().cui() == cui) return d.precipitant();
        if (d.object().cui() == cui) return d.object();
    }
    for (const auto& t : treatments_)
        for (const auto& m : t.members())
            if (m.cui() == cui) return m;
    return std::nullopt;
}

std::string_view to_string(Rule rule) noexcept {
    switch (rule) {
    case Rule::localize: return "localize";
    case Rule::toxicity_from_ddi: return "toxicity_from_ddi";
    case Rule::toxicity_transitive: return "toxicity_transitive";
    case Rule::ddi_propagation: return "ddi_propagation";
    case Rule::effectiveness_from_ddi: return "effectiveness_from_ddi";
    case Rule::effectiveness_transitive: return "effectiveness_transitive";
    }
    return "unknown";
}

std::string to_string(const LocalDdi& f) {
    return "ddi(" + f.precipitant + "," + f.effect.surface() + "," + std::string(to_string(f.impact)) + "," +
           f.object + "," + f.treatment + ")";
}

std::string to_string(const Toxicity& f) {
    return "toxicity(" + f.precipitant + ",increase," + f.object + "," + f.treatment + ")";
}

std::string to_string(const Effectiveness& f) {
    return "effectiveness(" + f.precipitant + ",decrease," + f.object + "," + f.treatment + ")";
}

std::string to_string(const DerivedFact& f) {
    return std::visit([](const auto& x) { return to_string(x); }, f);
}

bool DeducedModel::contains(const DerivedFact& f) const {
    return std::visit(
        [this](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, LocalDdi>) return ddis.count(x) > 0;
            else if constexpr (std::is_same_v<T, Toxicity>) return toxicity.count(x) > 0;
            else return effectiveness.count(x) > 0;
        },
        f);
}

bool DeducedModel::deduced(const LocalDdi& f) const {
    auto it = trace.find(DerivedFact{f});
    return it != trace.end() && it->second.rule != Rule::localize;
}

std::vector<LocalDdi> DeducedModel::ddis_of(std::string_view treatment) const {
    std::vector<LocalDdi> out;
    for (const auto& d : ddis)
        if (d.treatment == treatment) out.push_back(d);
    return out;
}

std::vector<LocalDdi> DeducedModel::deduced_ddis() const {
    std::vector<LocalDdi> out;
    for (const auto& d : ddis)
        if (deduced(d)) out.push_back(d);
    return out;
}

std::set<LocalDdi> localize(const ExtensionalDb& edb) {
    std::set<LocalDdi> out;
    for (const auto& t : edb.treatments())
        for (const auto& d : edb.ddis())
            if (t.is_member(d.precipitant().cui()) && t.is_member(d.object().cui()))
                out.insert(LocalDdi{d.precipitant().cui(), d.effect(), d.impact(), d.object().cui(), t.id()});
    return out;
}

namespace {

// Interned evaluation state for one run. Drugs, treatments and (effect, impact) labels are
// small integers; relations are hash sets with adjacency indexes on the join columns.
class Engine {
public:
    struct Scope {
        std::string id;
        std::set<std::string> members;
    };

    Engine(std::span<const PkDdi> ddis, std::vector<Scope> scopes) : scopes_(std::move(scopes)) {
        for (const auto& d : ddis) source_.push_back(&d);
    }

    DeducedModel run() {
        DeducedModel model;
        for (const auto& s : scopes_) model.treatments.insert(s.id);

        // Round 0: localization.
        std::vector<D5> d_ddi;
        std::vector<Pair> d_tox, d_eff;
        for (std::size_t t = 0; t < scopes_.size(); ++t) {
            for (const PkDdi* d : source_) {
                const auto& members = scopes_[t].members;
                if (!members.count(d->precipitant().cui()) || !members.count(d->object().cui())) continue;
                D5 f{drug(d->precipitant().cui()), label(d->effect(), d->impact()), drug(d->object().cui()),
                     static_cast<int>(t)};
                if (ddi_.insert(key(f)).second) {
                    d_ddi.push_back(f);
                    model.trace.emplace(lift(f), Justification{Rule::localize, {}, std::nullopt, *d});
                }
            }
        }
        model.round_sizes.push_back(d_ddi.size());
        index(d_ddi, d_tox, d_eff);

        while (!d_ddi.empty() || !d_tox.empty() || !d_eff.empty()) {
            std::vector<D5> n_ddi;
            std::vector<Pair> n_tox, n_eff;
            std::unordered_set<std::uint64_t> p_ddi, p_tox, p_eff;

            auto emit_ddi = [&](D5 f, Justification j) {
                auto k = key(f);
                if (ddi_.count(k) || !p_ddi.insert(k).second) return;
                n_ddi.push_back(f);
                model.trace.emplace(lift(f), std::move(j));
            };
            auto emit_pair = [&](bool tox, Pair p, Justification j) {
                auto k = key(p);
                auto& full = tox ? tox_ : eff_;
                auto& pending = tox ? p_tox : p_eff;
                if (full.count(k) || !pending.insert(k).second) return;
                (tox ? n_tox : n_eff).push_back(p);
                model.trace.emplace(lift(p, tox), std::move(j));
            };

            // R2 / R5 over new ddi/5.
            for (const auto& f : d_ddi) {
                const auto& l = labels_[f.label];
                if (!l.rule) continue;
                bool tox = l.rule->kind == RuleKind::toxicity;
                emit_pair(tox, Pair{f.a, f.b, f.t},
                          Justification{tox ? Rule::toxicity_from_ddi : Rule::effectiveness_from_ddi,
                                        {lift(f)}, l.rule, std::nullopt});
            }
            // R3 / R6: delta on either side of the join.
            auto transitive = [&](bool tox, const std::vector<Pair>& delta) {
                auto& out = tox ? tox_out_ : eff_out_;
                auto& in = tox ? tox_in_ : eff_in_;
                Rule rule = tox ? Rule::toxicity_transitive : Rule::effectiveness_transitive;
                for (const auto& p : delta) {
                    if (auto it = out.find(node(p.b, p.t)); it != out.end())
                        for (int c : it->second)
                            emit_pair(tox, Pair{p.a, c, p.t},
                                      Justification{rule, {lift(p, tox), lift(Pair{p.b, c, p.t}, tox)}, std::nullopt,
                                                    std::nullopt});
                    if (auto it = in.find(node(p.a, p.t)); it != in.end())
                        for (int z : it->second)
                            emit_pair(tox, Pair{z, p.b, p.t},
                                      Justification{rule, {lift(Pair{z, p.a, p.t}, tox), lift(p, tox)}, std::nullopt,
                                                    std::nullopt});
                }
            };
            transitive(true, d_tox);
            transitive(false, d_eff);
            // R4: toxicity(A,B,T), ddi(B,E,I,C,T).
            for (const auto& p : d_tox)
                if (auto it = ddi_out_.find(node(p.b, p.t)); it != ddi_out_.end())
                    for (auto [lab, c] : it->second) {
                        D5 src{p.b, lab, c, p.t};
                        emit_ddi(D5{p.a, lab, c, p.t},
                                 Justification{Rule::ddi_propagation, {lift(p, true), lift(src)}, std::nullopt,
                                               std::nullopt});
                    }
            for (const auto& f : d_ddi)
                if (auto it = tox_in_.find(node(f.a, f.t)); it != tox_in_.end())
                    for (int z : it->second)
                        emit_ddi(D5{z, f.label, f.b, f.t},
                                 Justification{Rule::ddi_propagation, {lift(Pair{z, f.a, f.t}, true), lift(f)},
                                               std::nullopt, std::nullopt});

            for (const auto& f : n_ddi) ddi_.insert(key(f));
            for (const auto& p : n_tox) tox_.insert(key(p));
            for (const auto& p : n_eff) eff_.insert(key(p));
            index(n_ddi, n_tox, n_eff);
            model.round_sizes.push_back(n_ddi.size() + n_tox.size() + n_eff.size());
            d_ddi = std::move(n_ddi);
            d_tox = std::move(n_tox);
            d_eff = std::move(n_eff);
        }

        for (const auto& [fact, _] : model.trace)
            std::visit(
                [&model](const auto& x) {
                    using T = std::decay_t<decltype(x)>;
                    if constexpr (std::is_same_v<T, LocalDdi>) model.ddis.insert(x);
                    else if constexpr (std::is_same_v<T, Toxicity>) model.toxicity.insert(x);
                    else model.effectiveness.insert(x);
                },
                fact);
        return model;
    }

private:
    struct D5 {
        int a, label, b, t;
    };
    struct Pair {
        int a, b, t;
    };
    struct Label {
        EffectKind effect;
        Impact impact;
        std::optional<RuleFact> rule;
    };

    static std::uint64_t key(const D5& f) {
        return (static_cast<std::uint64_t>(f.t) << 48) ^ (static_cast<std::uint64_t>(f.a) << 32) ^
               (static_cast<std::uint64_t>(f.label) << 16) ^ static_cast<std::uint64_t>(f.b);
    }
    static std::uint64_t key(const Pair& p) {
        return (static_cast<std::uint64_t>(p.t) << 40) ^ (static_cast<std::uint64_t>(p.a) << 20) ^
               static_cast<std::uint64_t>(p.b);
    }
    static std::uint64_t node(int d, int t) { return (static_cast<std::uint64_t>(t) << 32) | static_cast<std::uint32_t>(d); }

    int drug(const std::string& cui) {
        auto [it, fresh] = drug_ids_.try_emplace(cui, static_cast<int>(drugs_.size()));
        if (fresh) {
            if (drugs_.size() >= (1u << 16)) throw ValidationError("too many drugs for one deduction run");
            drugs_.push_back(cui);
        }
        return it->second;
    }

    int label(const EffectKind& e, Impact i) {
        for (std::size_t k = 0; k < labels_.size(); ++k)
            if (labels_[k].effect == e && labels_[k].impact == i) return static_cast<int>(k);
        std::optional<RuleFact> rule;
        if (auto kind = classify(e, i)) rule = RuleFact{*kind, e.pk(), i};
        labels_.push_back(Label{e, i, rule});
        if (labels_.size() >= (1u << 16)) throw ValidationError("too many effect labels for one deduction run");
        return static_cast<int>(labels_.size() - 1);
    }

    DerivedFact lift(const D5& f) const {
        const auto& l = labels_[f.label];
        return LocalDdi{drugs_[f.a], l.effect, l.impact, drugs_[f.b], scopes_[f.t].id};
    }
    DerivedFact lift(const Pair& p, bool tox) const {
        if (tox) return Toxicity{drugs_[p.a], drugs_[p.b], scopes_[p.t].id};
        return Effectiveness{drugs_[p.a], drugs_[p.b], scopes_[p.t].id};
    }

    void index(const std::vector<D5>& ds, const std::vector<Pair>& ts, const std::vector<Pair>& es) {
        for (const auto& f : ds) ddi_out_[node(f.a, f.t)].emplace_back(f.label, f.b);
        for (const auto& p : ts) {
            tox_out_[node(p.a, p.t)].push_back(p.b);
            tox_in_[node(p.b, p.t)].push_back(p.a);
        }
        for (const auto& p : es) {
            eff_out_[node(p.a, p.t)].push_back(p.b);
            eff_in_[node(p.b, p.t)].push_back(p.a);
        }
    }

    std::vector<Scope> scopes_;
    std::vector<const PkDdi*> source_;
    std::unordered_map<std::string, int> drug_ids_;
    std::vector<std::string> drugs_;
    std::vector<Label> labels_;
    std::unordered_set<std::uint64_t> ddi_, tox_, eff_;
    std::unordered_map<std::uint64_t, std::vector<std::pair<int, int>>> ddi_out_;
    std::unordered_map<std::uint64_t, std::vector<int>> tox_out_, tox_in_, eff_out_, eff_in_;
};

} // namespace

DeducedModel fixpoint(const ExtensionalDb& edb) {
    std::vector<Engine::Scope> scopes;
    for (const auto& t : edb.treatments()) scopes.push_back({t.id(), t.member_cuis()});
    if (scopes.size() >= (1u << 16)) throw ValidationError("too many treatments for one deduction run");
    return Engine(edb.ddis(), std::move(scopes)).run();
}

DeducedModel fixpoint(std::span<const PkDdi> ddis, const std::string& treatment_id,
                      const std::set<std::string>& members) {
    return Engine(ddis, {{treatment_id, members}}).run();
}

std::size_t DerivationNode::depth() const {
    std::size_t d = 0;
    for (const auto& c : children) d = std::max(d, c.depth() + 1);
    return d;
}

std::size_t DerivationNode::leaf_count() const {
    if (children.empty()) return 1;
    std::size_t n = 0;
    for (const auto& c : children) n += c.leaf_count();
    return n;
}

namespace {

DerivationNode build(const DeducedModel& model, const DerivedFact& fact) {
    auto it = model.trace.find(fact);
    if (it == model.trace.end()) throw NotDerived("not in the model: " + to_string(fact));
    const auto& j = it->second;
    DerivationNode node{std::visit([](const auto& x) -> decltype(DerivationNode::fact) { return x; }, fact),
                        j.rule, j.source, {}};
    for (const auto& p : j.premises) node.children.push_back(build(model, p));
    if (j.rule_fact) {
        node.children.push_back(DerivationNode{*j.rule_fact, std::nullopt, std::nullopt, {}});
    }
    return node;
}

} // namespace

DerivationNode explain(const DeducedModel& model, const Fact& fact) {
    if (const auto* d = std::get_if<PkDdi>(&fact))
        throw NotDerived("extensional fact ddi(" + d->precipitant().cui() + "," + d->effect().surface() + "," +
                         std::string(to_string(d->impact())) + "," + d->object().cui() + ") has no derivation");
    DerivedFact df = std::visit(
        [](const auto& x) -> DerivedFact {
            if constexpr (std::is_same_v<std::decay_t<decltype(x)>, PkDdi>) throw NotDerived("unreachable");
            else return x;
        },
        fact);
    return build(model, df);
}

namespace {

DrugId lookup(const std::map<std::string, DrugId>& drugs, const std::string& cui) {
    if (auto it = drugs.find(cui); it != drugs.end()) return it->second;
    return DrugId(cui, cui);
}

std::ifstream open(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw NotFound("cannot open " + path.string());
    return in;
}

} // namespace

std::map<std::string, DrugId> load_drug_table(const std::filesystem::path& path) {
    auto table = csv::read_table(path);
    csv::require_header(table, {"cui", "label"}, path.string());
    std::map<std::string, DrugId> out;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        try {
            DrugId d(text::trim(table.rows[r][0]), text::trim(table.rows[r][1]));
            out.insert_or_assign(d.cui(), d);
        } catch (const InvalidInput& e) {
            throw ParseError(e.what(), table.lines[r]);
        }
    }
    return out;
}

std::vector<PkDdi> parse_ddis_csv(std::istream& in, const std::map<std::string, DrugId>& drugs,
                                  const EffectLexicon& effects) {
    auto table = csv::read_table(in);
    bool with_provenance = table.header.size() == 5;
    if (with_provenance)
        csv::require_header(table, {"precipitant_cui", "effect", "impact", "object_cui", "provenance"},
                            "interaction table");
    else
        csv::require_header(table, {"precipitant_cui", "effect", "impact", "object_cui"}, "interaction table");
    std::vector<PkDdi> out;
    std::set<PkDdi> seen;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        try {
            PkDdi d(lookup(drugs, text::trim(row[0])), effects.normalize(row[1]), parse_impact(text::trim(row[2])),
                    lookup(drugs, text::trim(row[3])),
                    with_provenance ? parse_provenance(text::trim(row[4])) : Provenance::curated);
            if (seen.insert(d).second) out.push_back(d);
        } catch (const InvalidInput& e) {
            throw ParseError(e.what(), table.lines[r]);
        }
    }
    return out;
}

std::vector<PkDdi> load_ddis_csv(const std::filesystem::path& path, const std::map<std::string, DrugId>& drugs,
                                 const EffectLexicon& effects) {
    auto in = open(path);
    return parse_ddis_csv(in, drugs, effects);
}

std::vector<Treatment> parse_treatments_csv(std::istream& in, const std::map<std::string, DrugId>& drugs) {
    auto table = csv::read_table(in);
    csv::require_header(table, {"treatment_id", "cui", "partition"}, "treatment table");
    std::vector<std::string> order;
    std::map<std::string, std::pair<std::vector<DrugId>, std::vector<DrugId>>> parts;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        auto id = text::trim(row[0]);
        auto partition = text::to_lower(text::trim(row[2]));
        if (id.empty()) throw ParseError("empty treatment id", table.lines[r]);
        try {
            auto d = lookup(drugs, text::trim(row[1]));
            if (!parts.count(id)) order.push_back(id);
            auto& p = parts[id];
            if (partition == "covid") p.first.push_back(d);
            else if (partition == "comorbidity") p.second.push_back(d);
            else throw ParseError("partition must be covid or comorbidity, got '" + partition + "'", table.lines[r]);
        } catch (const InvalidInput& e) {
            throw ParseError(e.what(), table.lines[r]);
        }
    }
    std::vector<Treatment> out;
    for (const auto& id : order) out.push_back(validate_treatment(parts[id].first, parts[id].second, id));
    return out;
}

std::vector<Treatment> load_treatments_csv(const std::filesystem::path& path,
                                           const std::map<std::string, DrugId>& drugs) {
    auto in = open(path);
    return parse_treatments_csv(in, drugs);
}

void write_ddi5_csv(std::ostream& out, const DeducedModel& model) {
    csv::write_row(out, {"precipitant_cui", "effect", "impact", "object_cui", "treatment_id", "origin"});
    for (const auto& d : model.ddis)
        csv::write_row(out, {d.precipitant, d.effect.surface(), std::string(to_string(d.impact)), d.object,
                             d.treatment, model.deduced(d) ? "deduced" : "localized"});
}

void write_model_csv(const std::filesystem::path& dir, const DeducedModel& model) {
    std::filesystem::create_directories(dir);
    auto create = [&](const char* name) {
        std::ofstream out(dir / name);
        if (!out) throw Error("cannot write " + (dir / name).string());
        return out;
    };
    {
        auto out = create("ddi5.csv");
        write_ddi5_csv(out, model);
    }
    {
        auto out = create("toxicity.csv");
        csv::write_row(out, {"precipitant_cui", "object_cui", "treatment_id"});
        for (const auto& t : model.toxicity) csv::write_row(out, {t.precipitant, t.object, t.treatment});
    }
    {
        auto out = create("effectiveness.csv");
        csv::write_row(out, {"precipitant_cui", "object_cui", "treatment_id"});
        for (const auto& e : model.effectiveness) csv::write_row(out, {e.precipitant, e.object, e.treatment});
    }
}

} // namespace ddikg::deduce
