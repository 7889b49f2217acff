#pragma once

// Line-oriented triples-map documents and their execution into a TripleStore.
//
//   MAP <id>
//   SOURCE <path> <csv|json-records> [<iterator>]
//   SUBJECT <template> CLASS <class-iri>
//   PO <predicate-iri> REF <attr> | TEMPLATE <tpl> | CONST <value> | JOIN <map-id> <child-attr> <parent-attr>
//
// Blank lines and lines starting with '#' are ignored. Templates reference attributes as {attr};
// a template that is not an absolute or prefixed IRI is resolved against the entity base.

#include "ddikg/rdf.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ddikg::mapping {

enum class SourceFormat { csv, json_records };

struct LogicalSource {
    std::filesystem::path path;  // resolved against the data directory
    SourceFormat format = SourceFormat::csv;
    std::optional<std::string> iterator;  // json-records only: $, $.a.b or $.a.b[*]
};

struct ObjectSpec {
    enum class Kind { reference, templated, constant, join };
    Kind kind = Kind::reference;
    std::string value;  // attribute, template or constant
    std::string parent_map;
    std::string child_attr;
    std::string parent_attr;
};

struct PredicateObjectMap {
    std::string predicate;  // expanded IRI
    ObjectSpec object;
};

struct TriplesMap {
    std::string id;
    LogicalSource source;
    std::string subject_template;
    std::string class_iri;  // expanded IRI
    std::vector<PredicateObjectMap> predicate_objects;
    std::size_t line = 0;

    // The subject map plus one assertion per predicate-object map.
    std::size_t assertion_count() const noexcept { return 1 + predicate_objects.size(); }
};

struct MappingDoc {
    std::vector<TriplesMap> maps;
    const TriplesMap* find(std::string_view id) const;
};

// Source paths are resolved against `data_dir` and must be readable. Throws ParseError
// naming the map on unknown directives, unknown object kinds, dangling joins and
// unreadable sources.
MappingDoc parse_mapping_doc(std::istream& in, const std::filesystem::path& data_dir);
MappingDoc parse_mapping_doc(const std::filesystem::path& path, std::optional<std::filesystem::path> data_dir = {});

// Rows of a logical source; a missing or null value is absent from the row.
using Row = std::map<std::string, std::string>;

struct SourceData {
    std::vector<std::string> attributes;
    std::vector<Row> rows;
};

SourceData load_source(const LogicalSource& source);

// Attribute names referenced by {..} placeholders.
std::vector<std::string> template_attributes(std::string_view tpl);

// Substitutes percent-encoded values; nullopt when a referenced attribute is missing.
std::optional<std::string> instantiate_iri(std::string_view tpl, const Row& row,
                                           std::string_view base = rdf::vocab::entity);

std::string percent_encode(std::string_view value);

// Maps ordered so that every join parent precedes its children. Throws ConfigError
// listing the cycle when joins are cyclic (a map joining itself is a cycle of one).
std::vector<const TriplesMap*> execution_order(const MappingDoc& doc);

struct MapRun {
    std::string id;
    std::size_t rows = 0;
    std::size_t generated = 0;  // assertions produced before duplicate elimination
    std::size_t added = 0;
};

struct MaterializeReport {
    std::vector<MapRun> maps;
    std::size_t added = 0;
    double seconds = 0.0;
};

// Throws ConfigError when a map references an attribute its source does not provide.
std::size_t execute_triples_map(const TriplesMap& map, const MappingDoc& doc,
                                const std::map<std::string, SourceData>& sources, rdf::TripleStore& store,
                                MapRun* run = nullptr, std::string_view base = rdf::vocab::entity);

MaterializeReport materialize(const MappingDoc& doc, rdf::TripleStore& store,
                              std::string_view base = rdf::vocab::entity);
rdf::TripleStore materialize(const MappingDoc& doc, MaterializeReport* report = nullptr,
                             std::string_view base = rdf::vocab::entity);

} // namespace ddikg::mapping
