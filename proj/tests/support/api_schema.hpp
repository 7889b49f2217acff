#pragma once

// Structural checks of API response bodies. Each returns an empty string when the body
// conforms, otherwise a description of the first problem.

#include "ddikg/core.hpp"

#include <json.hpp>

#include <string>

namespace schema {

using json = nlohmann::ordered_json;

inline std::string check_drug(const json& d, const std::string& where) {
    if (!d.is_object() || d.size() != 2) return where + ": drug must be {cui,label}";
    if (!d.contains("cui") || !d["cui"].is_string() || !ddikg::DrugId::valid_cui(d["cui"].get<std::string>()))
        return where + ": bad cui";
    if (!d.contains("label") || !d["label"].is_string() || d["label"].get<std::string>().empty())
        return where + ": bad label";
    return {};
}

inline std::string check_envelope(const json& r, bool with_target) {
    if (!r.is_object()) return "response is not an object";
    if (with_target && (!r.contains("target") || !r["target"].is_string())) return "missing target";
    if (!r.contains("cuis") || !r["cuis"].is_array() || r["cuis"].empty()) return "missing cuis";
    if (!r.contains("warnings") || !r["warnings"].is_array()) return "missing warnings";
    for (const auto& w : r["warnings"])
        if (!w.is_string()) return "warning is not a string";
    return {};
}

inline std::string check_ddi_response(const json& r) {
    if (auto e = check_envelope(r, true); !e.empty()) return e;
    auto t = r["target"].get<std::string>();
    if (t != "DDI" && t != "DDIS") return "target " + t;
    if (!r.contains("interactions") || !r["interactions"].is_array()) return "missing interactions";
    for (const auto& i : r["interactions"]) {
        if (auto e = check_drug(i.value("effector_drug", json()), "effector_drug"); !e.empty()) return e;
        if (auto e = check_drug(i.value("affected_drug", json()), "affected_drug"); !e.empty()) return e;
        if (!i.contains("effect") || !i["effect"].is_string() || i["effect"].get<std::string>().empty())
            return "bad effect";
        if (!i.contains("effect_kind") || (i["effect_kind"] != "pharmacokinetic" && i["effect_kind"] != "pharmacodynamic"))
            return "bad effect_kind";
        if (!i.contains("impact") || (i["impact"] != "increase" && i["impact"] != "decrease")) return "bad impact";
        if (!i.contains("provenance") || !i["provenance"].is_string()) return "bad provenance";
    }
    return {};
}

inline std::string check_predicted_response(const json& r) {
    if (auto e = check_envelope(r, true); !e.empty()) return e;
    auto t = r["target"].get<std::string>();
    if (t != "DDIP" && t != "DDIPS") return "target " + t;
    if (!r.contains("interactions") || !r["interactions"].is_array()) return "missing interactions";
    for (const auto& i : r["interactions"]) {
        if (auto e = check_drug(i.value("effector_drug", json()), "effector_drug"); !e.empty()) return e;
        if (auto e = check_drug(i.value("affected_drug", json()), "affected_drug"); !e.empty()) return e;
        if (!i.contains("confidence") || !i["confidence"].is_number()) return "bad confidence";
        double c = i["confidence"].get<double>();
        if (!(c > 0.0 && c <= 1.0)) return "confidence out of (0, 1]";
        if (i.value("provenance", "") != "predicted") return "bad provenance";
        if (!i.contains("method") || !i["method"].is_string()) return "bad method";
    }
    return {};
}

inline std::string check_publication_response(const json& r) {
    if (auto e = check_envelope(r, false); !e.empty()) return e;
    if (!r.contains("publications") || !r["publications"].is_array()) return "missing publications";
    for (const auto& p : r["publications"])
        for (const char* key : {"id", "title", "year", "journal", "external_link"})
            if (!p.contains(key) || !p[key].is_string()) return std::string("bad ") + key;
    return {};
}

inline std::string check_analysis_response(const json& r) {
    if (!r.is_object()) return "response is not an object";
    for (const char* key : {"covid_drugs", "comorbidity_drugs", "interactions", "toxicity", "effectiveness", "ranking",
                            "reductions", "warnings"})
        if (!r.contains(key) || !r[key].is_array()) return std::string("missing ") + key;
    for (const char* key : {"edge_count", "deduced_edge_count", "wedge_count", "iterations"})
        if (!r.contains(key) || !r[key].is_number_unsigned()) return std::string("missing ") + key;
    if (!r.contains("deduced_percentage") || !r["deduced_percentage"].is_number()) return "missing deduced_percentage";
    if (r["interactions"].size() != r["edge_count"].get<std::size_t>()) return "edge_count mismatch";
    for (const auto& i : r["interactions"]) {
        if (auto e = check_drug(i.value("effector_drug", json()), "effector_drug"); !e.empty()) return e;
        if (auto e = check_drug(i.value("affected_drug", json()), "affected_drug"); !e.empty()) return e;
        if (!i.contains("deduced") || !i["deduced"].is_boolean()) return "bad deduced flag";
        if (!i.contains("effect") || !i.contains("impact") || !i.contains("provenance")) return "incomplete interaction";
    }
    for (const auto& e : r["ranking"]) {
        if (auto m = check_drug(e.value("drug", json()), "ranking.drug"); !m.empty()) return m;
        if (!e.contains("F") || !e["F"].is_number_unsigned()) return "bad F";
        if (!e.contains("rank") || !e["rank"].is_number_unsigned()) return "bad rank";
        if (!e.contains("tied") || !e["tied"].is_boolean()) return "bad tied";
    }
    for (const auto& e : r["reductions"]) {
        if (auto m = check_drug(e.value("drug", json()), "reductions.drug"); !m.empty()) return m;
        if (!e.contains("reduction_percent") || !(e["reduction_percent"].is_number() || e["reduction_percent"].is_null()))
            return "bad reduction_percent";
    }
    return {};
}

} // namespace schema
