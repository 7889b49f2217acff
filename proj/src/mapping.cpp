#include "ddikg/mapping.hpp"

#include "ddikg/csv.hpp"
#include "ddikg/error.hpp"
#include "ddikg/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <unordered_map>

namespace ddikg::mapping {

const TriplesMap* MappingDoc::find(std::string_view id) const {
    for (const auto& m : maps)
        if (m.id == id) return &m;
    return nullptr;
}

std::vector<std::string> template_attributes(std::string_view tpl) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < tpl.size()) {
        if (tpl[i] == '}') throw InvalidInput("unbalanced '}' in template " + std::string(tpl));
        if (tpl[i] != '{') {
            ++i;
            continue;
        }
        auto close = tpl.find('}', i);
        if (close == std::string_view::npos) throw InvalidInput("unbalanced '{' in template " + std::string(tpl));
        auto name = tpl.substr(i + 1, close - i - 1);
        if (name.empty() || name.find('{') != std::string_view::npos)
            throw InvalidInput("bad placeholder in template " + std::string(tpl));
        out.emplace_back(name);
        i = close + 1;
    }
    return out;
}

std::string percent_encode(std::string_view value) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : value) {
        if (std::isalnum(c) || c == '-' || c == '.' || c == '_' || c == '~') {
            out += static_cast<char>(c);
        } else {
            out += '%';
            out += hex[c >> 4];
            out += hex[c & 15];
        }
    }
    return out;
}

namespace {

std::string resolve(std::string_view expanded, std::string_view base) {
    if (rdf::looks_like_iri(expanded)) return rdf::expand(expanded);
    return std::string(base) + std::string(expanded);
}

std::optional<std::string> substitute(std::string_view tpl, const Row& row, bool encode) {
    std::string out;
    std::size_t i = 0;
    while (i < tpl.size()) {
        if (tpl[i] != '{') {
            out += tpl[i++];
            continue;
        }
        auto close = tpl.find('}', i);
        auto it = row.find(std::string(tpl.substr(i + 1, close - i - 1)));
        if (it == row.end()) return std::nullopt;
        out += encode ? percent_encode(it->second) : it->second;
        i = close + 1;
    }
    return out;
}

} // namespace

std::optional<std::string> instantiate_iri(std::string_view tpl, const Row& row, std::string_view base) {
    auto s = substitute(tpl, row, true);
    if (!s) return std::nullopt;
    return resolve(*s, base);
}

namespace {

[[noreturn]] void fail(const std::string& map_id, const std::string& what, std::size_t line) {
    throw ParseError(map_id.empty() ? what : "map " + map_id + ": " + what, line);
}

std::string rest_after(const std::string& line, std::size_t tokens) {
    std::size_t i = 0;
    for (std::size_t k = 0; k < tokens; ++k) {
        i = line.find_first_not_of(" \t", i);
        i = line.find_first_of(" \t", i);
        if (i == std::string::npos) return {};
    }
    return text::trim(line.substr(i));
}

void check_template(const TriplesMap& m, const std::string& tpl, std::size_t line) {
    try {
        template_attributes(tpl);
    } catch (const InvalidInput& e) {
        fail(m.id, e.what(), line);
    }
}

} // namespace

MappingDoc parse_mapping_doc(std::istream& in, const std::filesystem::path& data_dir) {
    MappingDoc doc;
    std::string line;
    std::size_t number = 0;
    std::vector<bool> has_source, has_subject;
    std::vector<std::size_t> join_lines;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto tokens = text::split_ws(line);
        if (tokens.empty() || tokens[0][0] == '#') continue;
        const auto& directive = tokens[0];
        if (directive == "MAP") {
            if (tokens.size() != 2) fail("", "MAP takes exactly one id", number);
            if (doc.find(tokens[1])) fail(tokens[1], "duplicate map id", number);
            TriplesMap m;
            m.id = tokens[1];
            m.line = number;
            doc.maps.push_back(std::move(m));
            has_source.push_back(false);
            has_subject.push_back(false);
            continue;
        }
        if (doc.maps.empty()) fail("", directive + " before any MAP", number);
        auto& m = doc.maps.back();
        if (directive == "SOURCE") {
            if (tokens.size() < 3 || tokens.size() > 4) fail(m.id, "SOURCE takes <path> <format> [<iterator>]", number);
            if (has_source.back()) fail(m.id, "duplicate SOURCE", number);
            m.source.path = data_dir / tokens[1];
            if (tokens[2] == "csv") m.source.format = SourceFormat::csv;
            else if (tokens[2] == "json-records") m.source.format = SourceFormat::json_records;
            else fail(m.id, "unknown source format " + tokens[2], number);
            if (tokens.size() == 4) {
                if (m.source.format != SourceFormat::json_records) fail(m.id, "iterator requires json-records", number);
                m.source.iterator = tokens[3];
            }
            std::ifstream probe(m.source.path);
            if (!probe) fail(m.id, "unreadable source " + m.source.path.string(), number);
            has_source.back() = true;
        } else if (directive == "SUBJECT") {
            if (tokens.size() != 4 || tokens[2] != "CLASS") fail(m.id, "SUBJECT takes <template> CLASS <class-iri>", number);
            if (has_subject.back()) fail(m.id, "duplicate SUBJECT", number);
            check_template(m, tokens[1], number);
            if (!rdf::looks_like_iri(tokens[3])) fail(m.id, "class is not an IRI: " + tokens[3], number);
            m.subject_template = tokens[1];
            m.class_iri = rdf::expand(tokens[3]);
            has_subject.back() = true;
        } else if (directive == "PO") {
            if (tokens.size() < 4) fail(m.id, "PO takes <predicate> <kind> <args>", number);
            if (!rdf::looks_like_iri(tokens[1])) fail(m.id, "predicate is not an IRI: " + tokens[1], number);
            PredicateObjectMap po;
            po.predicate = rdf::expand(tokens[1]);
            const auto& kind = tokens[2];
            if (kind == "REF") {
                if (tokens.size() != 4) fail(m.id, "REF takes one attribute", number);
                po.object.kind = ObjectSpec::Kind::reference;
                po.object.value = tokens[3];
            } else if (kind == "TEMPLATE") {
                if (tokens.size() != 4) fail(m.id, "TEMPLATE takes one template", number);
                po.object.kind = ObjectSpec::Kind::templated;
                po.object.value = tokens[3];
                check_template(m, po.object.value, number);
            } else if (kind == "CONST") {
                po.object.kind = ObjectSpec::Kind::constant;
                po.object.value = rest_after(line, 3);
            } else if (kind == "JOIN") {
                if (tokens.size() != 6) fail(m.id, "JOIN takes <map-id> <child-attr> <parent-attr>", number);
                po.object.kind = ObjectSpec::Kind::join;
                po.object.parent_map = tokens[3];
                po.object.child_attr = tokens[4];
                po.object.parent_attr = tokens[5];
            } else {
                fail(m.id, "unknown object kind " + kind, number);
            }
            m.predicate_objects.push_back(std::move(po));
            join_lines.push_back(number);
        } else {
            fail(m.id, "unknown directive " + directive, number);
        }
    }
    std::size_t po_index = 0;
    for (std::size_t i = 0; i < doc.maps.size(); ++i) {
        const auto& m = doc.maps[i];
        if (!has_source[i]) fail(m.id, "missing SOURCE", m.line);
        if (!has_subject[i]) fail(m.id, "missing SUBJECT", m.line);
        for (const auto& po : m.predicate_objects) {
            auto line_no = join_lines[po_index++];
            if (po.object.kind == ObjectSpec::Kind::join && !doc.find(po.object.parent_map))
                fail(m.id, "join to unknown map " + po.object.parent_map, line_no);
        }
    }
    return doc;
}

MappingDoc parse_mapping_doc(const std::filesystem::path& path, std::optional<std::filesystem::path> data_dir) {
    std::ifstream in(path);
    if (!in) throw NotFound("cannot open mapping document " + path.string());
    return parse_mapping_doc(in, data_dir ? *data_dir : path.parent_path());
}

namespace {

std::optional<std::string> scalar(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
    if (v.is_number_float()) {
        double d = v.get<double>();
        char buf[64];
        // Shortest representation that round-trips.
        for (int p = 1; p <= 17; ++p) {
            std::snprintf(buf, sizeof buf, "%.*g", p, d);
            if (std::strtod(buf, nullptr) == d) break;
        }
        return std::string(buf);
    }
    return std::nullopt;
}

const nlohmann::json& navigate(const nlohmann::json& root, const std::string& iterator, const std::string& where) {
    std::string path = iterator;
    if (path.empty() || path[0] != '$') throw ConfigError(where + ": iterator must start with '$': " + iterator);
    path = path.substr(1);
    if (path.size() >= 3 && path.compare(path.size() - 3, 3, "[*]") == 0) path.resize(path.size() - 3);
    const nlohmann::json* node = &root;
    for (const auto& key : text::split(path, '.')) {
        if (key.empty()) continue;
        if (!node->is_object() || !node->contains(key))
            throw ConfigError(where + ": iterator " + iterator + " does not match the document");
        node = &(*node)[key];
    }
    return *node;
}

} // namespace

SourceData load_source(const LogicalSource& source) {
    SourceData out;
    if (source.format == SourceFormat::csv) {
        auto table = csv::read_table(source.path);
        out.attributes = table.header;
        for (const auto& r : table.rows) {
            Row row;
            for (std::size_t i = 0; i < r.size(); ++i)
                if (!r[i].empty()) row[table.header[i]] = r[i];
            out.rows.push_back(std::move(row));
        }
        return out;
    }
    std::ifstream in(source.path);
    if (!in) throw NotFound("cannot open " + source.path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(source.path.string() + ": " + e.what());
    }
    const auto& records = navigate(doc, source.iterator.value_or("$"), source.path.string());
    if (!records.is_array()) throw ConfigError(source.path.string() + ": iterator does not select an array");
    std::set<std::string> attributes;
    for (const auto& rec : records) {
        if (!rec.is_object()) throw ConfigError(source.path.string() + ": records must be JSON objects");
        Row row;
        for (const auto& [k, v] : rec.items()) {
            attributes.insert(k);
            if (auto s = scalar(v)) row[k] = *s;
        }
        out.rows.push_back(std::move(row));
    }
    out.attributes.assign(attributes.begin(), attributes.end());
    return out;
}

std::vector<const TriplesMap*> execution_order(const MappingDoc& doc) {
    // Depth-first topological sort over child -> parent join edges.
    enum class Mark { none, active, done };
    std::map<std::string, Mark> mark;
    std::vector<std::string> stack;
    std::vector<const TriplesMap*> order;
    std::function<void(const TriplesMap&)> visit = [&](const TriplesMap& m) {
        auto& state = mark[m.id];
        if (state == Mark::done) return;
        if (state == Mark::active) {
            auto from = std::find(stack.begin(), stack.end(), m.id);
            std::vector<std::string> cycle(from, stack.end());
            cycle.push_back(m.id);
            throw ConfigError("cyclic join dependency: " + text::join(cycle, " -> "));
        }
        state = Mark::active;
        stack.push_back(m.id);
        for (const auto& po : m.predicate_objects)
            if (po.object.kind == ObjectSpec::Kind::join) visit(*doc.find(po.object.parent_map));
        stack.pop_back();
        mark[m.id] = Mark::done;
        order.push_back(&m);
    };
    for (const auto& m : doc.maps) visit(m);
    return order;
}

namespace {

void require(const SourceData& data, const std::string& attr, const TriplesMap& m, const std::string& what) {
    if (std::find(data.attributes.begin(), data.attributes.end(), attr) == data.attributes.end())
        throw ConfigError("map " + m.id + ": " + what + " references attribute '" + attr +
                          "' absent from source " + m.source.path.filename().string());
}

rdf::Term constant(const std::string& value) {
    if (rdf::looks_like_iri(value)) return rdf::Term::iri(rdf::expand(value));
    return rdf::Term::literal(value);
}

} // namespace

std::size_t execute_triples_map(const TriplesMap& map, const MappingDoc& doc,
                                const std::map<std::string, SourceData>& sources, rdf::TripleStore& store,
                                MapRun* run, std::string_view base) {
    const auto& data = sources.at(map.id);
    for (const auto& a : template_attributes(map.subject_template)) require(data, a, map, "subject template");

    // Join indexes: parent attribute value -> parent subject IRIs.
    std::map<std::size_t, std::unordered_map<std::string, std::vector<std::string>>> joins;
    for (std::size_t k = 0; k < map.predicate_objects.size(); ++k) {
        const auto& o = map.predicate_objects[k].object;
        switch (o.kind) {
        case ObjectSpec::Kind::reference: require(data, o.value, map, "REF"); break;
        case ObjectSpec::Kind::templated:
            for (const auto& a : template_attributes(o.value)) require(data, a, map, "TEMPLATE");
            break;
        case ObjectSpec::Kind::constant: break;
        case ObjectSpec::Kind::join: {
            require(data, o.child_attr, map, "JOIN child");
            const auto& parent = *doc.find(o.parent_map);
            const auto& pdata = sources.at(parent.id);
            require(pdata, o.parent_attr, parent, "JOIN parent");
            for (const auto& a : template_attributes(parent.subject_template))
                require(pdata, a, parent, "subject template");
            auto& index = joins[k];
            for (const auto& row : pdata.rows) {
                auto key = row.find(o.parent_attr);
                if (key == row.end()) continue;
                if (auto s = instantiate_iri(parent.subject_template, row, base)) index[key->second].push_back(*s);
            }
            break;
        }
        }
    }

    MapRun local;
    MapRun& r = run ? *run : local;
    r.id = map.id;
    std::size_t added = 0;
    auto emit = [&](const rdf::Term& s, const std::string& p, const rdf::Term& o) {
        ++r.generated;
        added += store.add(s, p, o);
    };
    for (const auto& row : data.rows) {
        ++r.rows;
        auto subject = instantiate_iri(map.subject_template, row, base);
        if (!subject) continue;
        auto s = rdf::Term::iri(*subject);
        emit(s, std::string(rdf::rdf_type), rdf::Term::iri(map.class_iri));
        for (std::size_t k = 0; k < map.predicate_objects.size(); ++k) {
            const auto& po = map.predicate_objects[k];
            const auto& o = po.object;
            switch (o.kind) {
            case ObjectSpec::Kind::reference:
                if (auto it = row.find(o.value); it != row.end()) emit(s, po.predicate, rdf::Term::literal(it->second));
                break;
            case ObjectSpec::Kind::templated:
                if (auto iri = instantiate_iri(o.value, row, base)) emit(s, po.predicate, rdf::Term::iri(*iri));
                break;
            case ObjectSpec::Kind::constant: emit(s, po.predicate, constant(o.value)); break;
            case ObjectSpec::Kind::join: {
                auto key = row.find(o.child_attr);
                if (key == row.end()) break;
                const auto& index = joins.at(k);
                if (auto it = index.find(key->second); it != index.end())
                    for (const auto& parent : it->second) emit(s, po.predicate, rdf::Term::iri(parent));
                break;
            }
            }
        }
    }
    r.added += added;
    return added;
}

MaterializeReport materialize(const MappingDoc& doc, rdf::TripleStore& store, std::string_view base) {
    auto start = std::chrono::steady_clock::now();
    auto order = execution_order(doc);
    std::map<std::string, SourceData> sources;
    for (const auto& m : doc.maps) sources.emplace(m.id, load_source(m.source));
    MaterializeReport report;
    for (const auto* m : order) {
        MapRun run;
        report.added += execute_triples_map(*m, doc, sources, store, &run, base);
        report.maps.push_back(std::move(run));
    }
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

rdf::TripleStore materialize(const MappingDoc& doc, MaterializeReport* report, std::string_view base) {
    rdf::TripleStore store;
    auto r = materialize(doc, store, base);
    if (report) *report = std::move(r);
    return store;
}

} // namespace ddikg::mapping
