#pragma once

// Reference materializer: parses the mapping document on its own, reads every source row,
// expands templates by hand and resolves joins with nested loops over parent rows.
// Output is the set of N-Triples lines.

#include "ddikg/csv.hpp"

#include <json.hpp>

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace oracle {

struct OMap {
    std::string id, path, format, iterator, subject, cls;
    std::vector<std::vector<std::string>> pos;  // tokens after "PO"
    std::vector<std::string> consts;            // parallel to pos for CONST
};

using ORow = std::map<std::string, std::string>;

inline std::string o_expand(const std::string& t) {
    static const std::map<std::string, std::string> pre = {{"covid-19", "http://research.tib.eu/covid-19/vocab/"},
                                                           {"rdf", "http://www.w3.org/1999/02/22-rdf-syntax-ns#"},
                                                           {"rdfs", "http://www.w3.org/2000/01/rdf-schema#"},
                                                           {"xsd", "http://www.w3.org/2001/XMLSchema#"}};
    auto c = t.find(':');
    if (c != std::string::npos)
        if (auto it = pre.find(t.substr(0, c)); it != pre.end()) return it->second + t.substr(c + 1);
    return t;
}

inline bool o_is_iri(const std::string& t) {
    if (o_expand(t) != t) return true;
    auto c = t.find(':');
    return c != std::string::npos && c > 0 && std::isalpha(static_cast<unsigned char>(t[0])) &&
           t.find(' ') == std::string::npos && c + 1 < t.size();
}

inline std::string o_encode(const std::string& v) {
    std::string out;
    for (unsigned char ch : v) {
        if (std::isalnum(ch) || std::string("-._~").find(static_cast<char>(ch)) != std::string::npos) {
            out += static_cast<char>(ch);
        } else {
            char buf[4];
            std::snprintf(buf, sizeof buf, "%%%02X", ch);
            out += buf;
        }
    }
    return out;
}

inline std::optional<std::string> o_iri(const std::string& tpl, const ORow& row) {
    std::string out;
    for (std::size_t i = 0; i < tpl.size(); ++i) {
        if (tpl[i] != '{') {
            out += tpl[i];
            continue;
        }
        auto j = tpl.find('}', i);
        auto it = row.find(tpl.substr(i + 1, j - i - 1));
        if (it == row.end() || it->second.empty()) return std::nullopt;
        out += o_encode(it->second);
        i = j;
    }
    if (o_is_iri(out)) return o_expand(out);
    return "http://research.tib.eu/covid-19/entity/" + out;
}

inline std::string o_lit(const std::string& v) {
    std::string out = "\"";
    for (char c : v) {
        if (c == '"') out += "\\\"";
        else if (c == '\\') out += "\\\\";
        else if (c == '\n') out += "\\n";
        else if (c == '\r') out += "\\r";
        else if (c == '\t') out += "\\t";
        else out += c;
    }
    return out + "\"";
}

inline std::vector<ORow> o_rows(const OMap& m, const std::filesystem::path& dir) {
    std::vector<ORow> rows;
    if (m.format == "csv") {
        auto t = ddikg::csv::read_table(dir / m.path);
        for (const auto& r : t.rows) {
            ORow row;
            for (std::size_t i = 0; i < r.size(); ++i)
                if (!r[i].empty()) row[t.header[i]] = r[i];
            rows.push_back(row);
        }
        return rows;
    }
    std::ifstream in(dir / m.path);
    auto j = nlohmann::json::parse(in);
    const nlohmann::json* node = &j;
    std::string it = m.iterator.empty() ? "$" : m.iterator;
    if (it.size() >= 3 && it.substr(it.size() - 3) == "[*]") it.resize(it.size() - 3);
    std::stringstream ss(it.substr(1));
    std::string key;
    while (std::getline(ss, key, '.'))
        if (!key.empty()) node = &(*node)[key];
    for (const auto& rec : *node) {
        ORow row;
        for (const auto& [k, v] : rec.items()) {
            if (v.is_string()) row[k] = v.get<std::string>();
            else if (v.is_number_integer()) row[k] = std::to_string(v.get<long long>());
            else if (v.is_boolean()) row[k] = v.get<bool>() ? "true" : "false";
        }
        rows.push_back(row);
    }
    return rows;
}

inline std::set<std::string> nested_loop_materialize(const std::filesystem::path& doc_path) {
    std::vector<OMap> maps;
    std::ifstream in(doc_path);
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) tok.push_back(t);
        if (tok.empty() || tok[0][0] == '#') continue;
        if (tok[0] == "MAP") maps.push_back(OMap{tok[1], "", "", "", "", "", {}, {}});
        else if (tok[0] == "SOURCE") {
            maps.back().path = tok[1];
            maps.back().format = tok[2];
            if (tok.size() > 3) maps.back().iterator = tok[3];
        } else if (tok[0] == "SUBJECT") {
            maps.back().subject = tok[1];
            maps.back().cls = o_expand(tok[3]);
        } else if (tok[0] == "PO") {
            std::string rest;
            if (tok[2] == "CONST") {
                auto p = line.find("CONST") + 5;
                rest = line.substr(line.find_first_not_of(" \t", p));
                while (!rest.empty() && std::isspace(static_cast<unsigned char>(rest.back()))) rest.pop_back();
            }
            maps.back().pos.emplace_back(tok.begin() + 1, tok.end());
            maps.back().consts.push_back(rest);
        }
    }
    auto dir = doc_path.parent_path();
    std::map<std::string, std::vector<ORow>> data;
    std::map<std::string, const OMap*> by_id;
    for (const auto& m : maps) {
        data[m.id] = o_rows(m, dir);
        by_id[m.id] = &m;
    }
    std::set<std::string> out;
    auto triple = [&](const std::string& s, const std::string& p, const std::string& o) {
        out.insert("<" + s + "> <" + p + "> " + o + " .");
    };
    for (const auto& m : maps) {
        for (const auto& row : data[m.id]) {
            auto s = o_iri(m.subject, row);
            if (!s) continue;
            triple(*s, "http://www.w3.org/1999/02/22-rdf-syntax-ns#type", "<" + m.cls + ">");
            for (std::size_t k = 0; k < m.pos.size(); ++k) {
                const auto& po = m.pos[k];
                auto p = o_expand(po[0]);
                if (po[1] == "REF") {
                    if (auto it = row.find(po[2]); it != row.end()) triple(*s, p, o_lit(it->second));
                } else if (po[1] == "TEMPLATE") {
                    if (auto o = o_iri(po[2], row)) triple(*s, p, "<" + *o + ">");
                } else if (po[1] == "CONST") {
                    const auto& v = m.consts[k];
                    triple(*s, p, o_is_iri(v) ? "<" + o_expand(v) + ">" : o_lit(v));
                } else if (po[1] == "JOIN") {
                    const OMap& parent = *by_id.at(po[2]);
                    auto child = row.find(po[3]);
                    if (child == row.end()) continue;
                    for (const auto& prow : data[parent.id]) {
                        auto pv = prow.find(po[4]);
                        if (pv == prow.end() || pv->second != child->second) continue;
                        if (auto ps = o_iri(parent.subject, prow)) triple(*s, p, "<" + *ps + ">");
                    }
                }
            }
        }
    }
    return out;
}

} // namespace oracle
