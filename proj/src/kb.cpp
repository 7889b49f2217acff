#include "ddikg/kb.hpp"

#include "ddikg/error.hpp"

#include <algorithm>
#include <cstdlib>

namespace ddikg::kb {

namespace {

using rdf::Term;
using rdf::vocab::term;

std::optional<std::string> literal(const rdf::TripleStore& store, const Term& s, std::string_view local) {
    auto o = store.object(s, term(local));
    if (!o || o->kind != rdf::TermKind::literal) return std::nullopt;
    return o->value;
}

std::optional<std::string> literal_iri(const rdf::TripleStore& store, const Term& s, std::string_view predicate) {
    auto o = store.object(s, predicate);
    if (!o || o->kind != rdf::TermKind::literal) return std::nullopt;
    return o->value;
}

const std::vector<std::size_t>& lookup(const std::map<std::string, std::vector<std::size_t>, std::less<>>& index,
                                       std::string_view cui) {
    static const std::vector<std::size_t> none;
    auto it = index.find(cui);
    return it == index.end() ? none : it->second;
}

} // namespace

KnowledgeBase KnowledgeBase::from_store(const rdf::TripleStore& store, const EffectLexicon& effects) {
    KnowledgeBase kb;
    std::map<std::string, DrugId> by_iri;
    for (const auto& s : store.instances(term("Drug"))) {
        auto cui = literal(store, s, "cui");
        auto label = literal_iri(store, s, "http://www.w3.org/2000/01/rdf-schema#label");
        try {
            if (!cui) throw InvalidInput("no cui");
            DrugId d(*cui, label.value_or(*cui));
            by_iri.insert_or_assign(s.value, d);
            kb.drugs_.insert_or_assign(d.cui(), d);
        } catch (const InvalidInput& e) {
            kb.warnings_.push_back("drug " + s.value + ": " + e.what());
        }
    }
    auto drug_at = [&](const Term& s, std::string_view predicate) -> DrugId {
        auto o = store.object(s, term(predicate));
        if (!o) throw InvalidInput("missing " + std::string(predicate));
        auto it = by_iri.find(o->value);
        if (it == by_iri.end()) throw InvalidInput("unknown drug " + o->value);
        return it->second;
    };

    std::set<PkDdi> seen;
    for (const auto& s : store.instances(term("DrugDrugInteraction"))) {
        try {
            auto effect = literal(store, s, "effect");
            auto impact = literal(store, s, "impact");
            if (!effect || !impact) throw InvalidInput("missing effect or impact");
            auto prov = literal(store, s, "provenance");
            PkDdi d(drug_at(s, "precipitantDrug"), effects.normalize(*effect), parse_impact(*impact),
                    drug_at(s, "objectDrug"), prov ? parse_provenance(*prov) : Provenance::curated);
            if (seen.insert(d).second) kb.ddis_.push_back(d);
        } catch (const InvalidInput& e) {
            kb.warnings_.push_back("interaction " + s.value + ": " + e.what());
        }
    }
    std::sort(kb.ddis_.begin(), kb.ddis_.end());

    for (const auto& s : store.instances(term("Treatment"))) {
        try {
            auto id = literal(store, s, "treatmentId");
            std::string name = id ? *id : s.value.substr(s.value.find_last_of('/') + 1);
            std::vector<DrugId> covid, comorbidity;
            for (const auto& o : store.objects(s, term("hasCovidDrug")))
                if (auto it = by_iri.find(o.value); it != by_iri.end()) covid.push_back(it->second);
            for (const auto& o : store.objects(s, term("hasComorbidityDrug")))
                if (auto it = by_iri.find(o.value); it != by_iri.end()) comorbidity.push_back(it->second);
            std::vector<std::string> conditions;
            for (const auto& o : store.objects(s, term("comorbidity"))) conditions.push_back(o.value);
            kb.treatments_.push_back(validate_treatment(covid, comorbidity, name, conditions));
        } catch (const Error& e) {
            kb.warnings_.push_back("treatment " + s.value + ": " + e.what());
        }
    }
    std::sort(kb.treatments_.begin(), kb.treatments_.end(),
              [](const Treatment& a, const Treatment& b) { return a.id() < b.id(); });

    for (const auto& s : store.instances(term("PredictedDDI"))) {
        try {
            std::vector<DrugId> pair;
            for (const auto& o : store.objects(s, term("hasInteractingDrug"))) {
                auto it = by_iri.find(o.value);
                if (it == by_iri.end()) throw InvalidInput("unknown drug " + o.value);
                pair.push_back(it->second);
            }
            if (pair.size() != 2) throw InvalidInput("expected two interacting drugs");
            std::sort(pair.begin(), pair.end());
            auto conf = literal(store, s, "confidence");
            if (!conf) throw InvalidInput("missing confidence");
            char* end = nullptr;
            double c = std::strtod(conf->c_str(), &end);
            if (end == conf->c_str() || *end != '\0' || c < 0 || c > 1) throw InvalidInput("bad confidence " + *conf);
            kb.predictions_.push_back(
                PredictedDdi{pair[0], pair[1], c, literal(store, s, "predictionMethod").value_or("")});
        } catch (const InvalidInput& e) {
            kb.warnings_.push_back("prediction " + s.value + ": " + e.what());
        }
    }
    std::sort(kb.predictions_.begin(), kb.predictions_.end(), [](const PredictedDdi& x, const PredictedDdi& y) {
        return std::tie(x.a, x.b, x.method) < std::tie(y.a, y.b, y.method);
    });

    std::map<std::string, Publication> pubs;
    for (const auto& s : store.instances(term("Publication"))) {
        Publication p;
        p.id = s.value.substr(s.value.find_last_of('/') + 1);
        p.title = literal(store, s, "title").value_or("");
        p.year = literal(store, s, "year").value_or("");
        p.journal = literal(store, s, "journal").value_or("");
        p.external_link = literal(store, s, "externalLink").value_or("");
        if (auto link = store.object(s, term("externalLink")); link && link->kind == rdf::TermKind::iri)
            p.external_link = link->value;
        pubs.emplace(s.value, std::move(p));
    }
    for (const auto& s : store.instances(term("Annotation"))) {
        auto pub = store.object(s, term("annotatedPublication"));
        auto drug = store.object(s, term("annotatedDrug"));
        if (!pub || !drug || !pubs.count(pub->value) || !by_iri.count(drug->value)) {
            kb.warnings_.push_back("annotation " + s.value + ": unresolved publication or drug");
            continue;
        }
        pubs[pub->value].cuis.insert(by_iri.at(drug->value).cui());
    }
    for (auto& [_, p] : pubs) kb.publications_.push_back(std::move(p));
    std::sort(kb.publications_.begin(), kb.publications_.end(),
              [](const Publication& a, const Publication& b) { return a.id < b.id; });

    kb.index();
    return kb;
}

void KnowledgeBase::index() {
    for (std::size_t i = 0; i < ddis_.size(); ++i) {
        ddi_index_[ddis_[i].precipitant().cui()].push_back(i);
        if (ddis_[i].object() != ddis_[i].precipitant()) ddi_index_[ddis_[i].object().cui()].push_back(i);
    }
    for (std::size_t i = 0; i < predictions_.size(); ++i) {
        prediction_index_[predictions_[i].a.cui()].push_back(i);
        prediction_index_[predictions_[i].b.cui()].push_back(i);
    }
    for (std::size_t i = 0; i < publications_.size(); ++i)
        for (const auto& c : publications_[i].cuis) publication_index_[c].push_back(i);
}

std::optional<DrugId> KnowledgeBase::drug(std::string_view cui) const {
    auto it = drugs_.find(std::string(cui));
    if (it == drugs_.end()) return std::nullopt;
    return it->second;
}

const std::vector<std::size_t>& KnowledgeBase::ddis_of(std::string_view cui) const { return lookup(ddi_index_, cui); }
const std::vector<std::size_t>& KnowledgeBase::predictions_of(std::string_view cui) const {
    return lookup(prediction_index_, cui);
}
const std::vector<std::size_t>& KnowledgeBase::publications_of(std::string_view cui) const {
    return lookup(publication_index_, cui);
}

deduce::ExtensionalDb KnowledgeBase::edb() const {
    deduce::ExtensionalDb edb;
    for (const auto& d : ddis_) edb.add(d);
    for (const auto& t : treatments_) edb.add(t);
    return edb;
}

} // namespace ddikg::kb
