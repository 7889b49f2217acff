#pragma once

// Dictionary-encoded in-memory triple store with set semantics.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace ddikg::rdf {

inline constexpr std::string_view rdf_type = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

namespace vocab {
inline constexpr std::string_view ns = "http://research.tib.eu/covid-19/vocab/";
inline constexpr std::string_view entity = "http://research.tib.eu/covid-19/entity/";

inline std::string term(std::string_view local) { return std::string(ns) + std::string(local); }
} // namespace vocab

// Expands `prefix:local` for the built-in prefixes (covid-19, rdf, rdfs, xsd); other text is returned unchanged.
std::string expand(std::string_view text);
// True for absolute IRIs (scheme ':' ...) and known prefixed names.
bool looks_like_iri(std::string_view text);

enum class TermKind : std::uint8_t { iri, literal };

struct Term {
    TermKind kind = TermKind::iri;
    std::string value;

    static Term iri(std::string v) { return {TermKind::iri, std::move(v)}; }
    static Term literal(std::string v) { return {TermKind::literal, std::move(v)}; }

    friend bool operator==(const Term&, const Term&) = default;
    friend auto operator<=>(const Term&, const Term&) = default;
};

struct Triple {
    Term subject;
    Term predicate;
    Term object;

    friend bool operator==(const Triple&, const Triple&) = default;
    friend auto operator<=>(const Triple&, const Triple&) = default;
};

std::string to_ntriples(const Triple& t);

class TripleStore {
public:
    TripleStore() = default;
    TripleStore(const TripleStore& other);
    TripleStore& operator=(const TripleStore& other);

    // Returns true when the triple was not present. Safe to call from several threads.
    bool add(const Term& subject, std::string_view predicate, const Term& object);
    bool add(const Triple& t) { return add(t.subject, t.predicate.value, t.object); }

    bool contains(const Term& subject, std::string_view predicate, const Term& object) const;
    std::size_t size() const noexcept { return size_; }

    std::vector<Triple> triples() const;  // sorted
    std::vector<std::pair<Term, Term>> with_predicate(std::string_view predicate) const;
    std::vector<Term> objects(const Term& subject, std::string_view predicate) const;
    std::optional<Term> object(const Term& subject, std::string_view predicate) const;
    std::vector<Term> instances(std::string_view class_iri) const;  // sorted
    std::size_t class_count() const noexcept { return classes_.size(); }

    void write_ntriples(std::ostream& out) const;
    // Throws ParseError on malformed lines.
    static TripleStore read_ntriples(std::istream& in);

private:
    using Id = std::uint32_t;
    Id intern(const Term& t);
    std::optional<Id> find(const Term& t) const;
    static std::uint64_t pack(Id s, Id o) { return (static_cast<std::uint64_t>(s) << 32) | o; }

    mutable std::mutex mutex_;
    std::vector<Term> terms_;
    std::unordered_map<std::string, Id> iris_;
    std::unordered_map<std::string, Id> literals_;
    std::unordered_map<Id, std::unordered_set<std::uint64_t>> by_predicate_;  // p -> {(s,o)}
    std::unordered_map<std::uint64_t, std::vector<Id>> by_subject_predicate_;  // (s,p) -> [o]
    std::unordered_map<Id, std::vector<Id>> classes_;                          // class -> [s]
    std::size_t size_ = 0;
};

} // namespace ddikg::rdf
