#pragma once

// Read-only view of a materialized store: drugs, interactions, treatments, predictions and
// annotated publications, indexed by CUI.

#include "ddikg/core.hpp"
#include "ddikg/deduction.hpp"
#include "ddikg/rdf.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace ddikg::kb {

struct PredictedDdi {
    DrugId a;  // smaller CUI
    DrugId b;
    double confidence;
    std::string method;
};

struct Publication {
    std::string id;
    std::string title;
    std::string year;
    std::string journal;
    std::string external_link;
    std::set<std::string> cuis;  // annotated concepts
};

class KnowledgeBase {
public:
    // Entities that cannot be read (missing drug, bad impact, ...) are skipped and reported in warnings().
    static KnowledgeBase from_store(const rdf::TripleStore& store, const EffectLexicon& effects = EffectLexicon::builtin());

    const std::map<std::string, DrugId>& drugs() const noexcept { return drugs_; }
    std::optional<DrugId> drug(std::string_view cui) const;
    const std::vector<PkDdi>& ddis() const noexcept { return ddis_; }
    const std::vector<Treatment>& treatments() const noexcept { return treatments_; }
    const std::vector<PredictedDdi>& predictions() const noexcept { return predictions_; }
    const std::vector<Publication>& publications() const noexcept { return publications_; }
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }

    // Indices into ddis()/predictions()/publications() touching a CUI, ascending.
    const std::vector<std::size_t>& ddis_of(std::string_view cui) const;
    const std::vector<std::size_t>& predictions_of(std::string_view cui) const;
    const std::vector<std::size_t>& publications_of(std::string_view cui) const;

    deduce::ExtensionalDb edb() const;

private:
    void index();

    std::map<std::string, DrugId> drugs_;
    std::vector<PkDdi> ddis_;
    std::vector<Treatment> treatments_;
    std::vector<PredictedDdi> predictions_;
    std::vector<Publication> publications_;
    std::vector<std::string> warnings_;
    std::map<std::string, std::vector<std::size_t>, std::less<>> ddi_index_, prediction_index_, publication_index_;
};

} // namespace ddikg::kb
