#include "ddikg/rdf.hpp"

#include "ddikg/error.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <istream>
#include <ostream>
#include <string>

namespace ddikg::rdf {

namespace {

struct Prefix {
    std::string_view name;
    std::string_view iri;
};

constexpr std::array<Prefix, 4> prefixes = {{
    {"covid-19", vocab::ns},
    {"rdf", "http://www.w3.org/1999/02/22-rdf-syntax-ns#"},
    {"rdfs", "http://www.w3.org/2000/01/rdf-schema#"},
    {"xsd", "http://www.w3.org/2001/XMLSchema#"},
}};

std::optional<std::string> expand_prefixed(std::string_view text) {
    auto colon = text.find(':');
    if (colon == std::string_view::npos) return std::nullopt;
    for (const auto& p : prefixes)
        if (text.substr(0, colon) == p.name) return std::string(p.iri) + std::string(text.substr(colon + 1));
    return std::nullopt;
}

bool absolute_iri(std::string_view text) {
    auto colon = text.find(':');
    if (colon == std::string_view::npos || colon == 0) return false;
    if (!std::isalpha(static_cast<unsigned char>(text[0]))) return false;
    for (std::size_t i = 0; i < colon; ++i) {
        char c = text[i];
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '-' && c != '.') return false;
    }
    return text.size() > colon + 1 && text.find(' ') == std::string_view::npos;
}

std::string escape_literal(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        case '\t': out += "\\t"; break;
        default: out += c;
        }
    }
    return out;
}

std::string render(const Term& t) {
    if (t.kind == TermKind::iri) return "<" + t.value + ">";
    return "\"" + escape_literal(t.value) + "\"";
}

} // namespace

std::string expand(std::string_view text) {
    if (auto e = expand_prefixed(text)) return *e;
    return std::string(text);
}

bool looks_like_iri(std::string_view text) { return expand_prefixed(text).has_value() || absolute_iri(text); }

std::string to_ntriples(const Triple& t) {
    return render(t.subject) + " " + render(t.predicate) + " " + render(t.object) + " .";
}

TripleStore::TripleStore(const TripleStore& other) {
    std::lock_guard lock(other.mutex_);
    terms_ = other.terms_;
    iris_ = other.iris_;
    literals_ = other.literals_;
    by_predicate_ = other.by_predicate_;
    by_subject_predicate_ = other.by_subject_predicate_;
    classes_ = other.classes_;
    size_ = other.size_;
}

TripleStore& TripleStore::operator=(const TripleStore& other) {
    if (this == &other) return *this;
    TripleStore copy(other);
    std::scoped_lock lock(mutex_);
    terms_ = std::move(copy.terms_);
    iris_ = std::move(copy.iris_);
    literals_ = std::move(copy.literals_);
    by_predicate_ = std::move(copy.by_predicate_);
    by_subject_predicate_ = std::move(copy.by_subject_predicate_);
    classes_ = std::move(copy.classes_);
    size_ = copy.size_;
    return *this;
}

TripleStore::Id TripleStore::intern(const Term& t) {
    auto& table = t.kind == TermKind::iri ? iris_ : literals_;
    auto [it, fresh] = table.try_emplace(t.value, static_cast<Id>(terms_.size()));
    if (fresh) terms_.push_back(t);
    return it->second;
}

std::optional<TripleStore::Id> TripleStore::find(const Term& t) const {
    const auto& table = t.kind == TermKind::iri ? iris_ : literals_;
    auto it = table.find(t.value);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

bool TripleStore::add(const Term& subject, std::string_view predicate, const Term& object) {
    if (subject.kind != TermKind::iri) throw InvalidInput("subject must be an IRI: " + subject.value);
    if (subject.value.empty() || predicate.empty()) throw InvalidInput("empty subject or predicate");
    std::lock_guard lock(mutex_);
    Id s = intern(subject);
    Id p = intern(Term::iri(std::string(predicate)));
    Id o = intern(object);
    if (!by_predicate_[p].insert(pack(s, o)).second) return false;
    by_subject_predicate_[pack(s, p)].push_back(o);
    if (predicate == rdf_type) classes_[o].push_back(s);
    ++size_;
    return true;
}

bool TripleStore::contains(const Term& subject, std::string_view predicate, const Term& object) const {
    std::lock_guard lock(mutex_);
    auto s = find(subject), p = find(Term::iri(std::string(predicate))), o = find(object);
    if (!s || !p || !o) return false;
    auto it = by_predicate_.find(*p);
    return it != by_predicate_.end() && it->second.count(pack(*s, *o));
}

std::vector<Triple> TripleStore::triples() const {
    std::lock_guard lock(mutex_);
    std::vector<Triple> out;
    out.reserve(size_);
    for (const auto& [p, pairs] : by_predicate_)
        for (auto so : pairs)
            out.push_back(Triple{terms_[so >> 32], terms_[p], terms_[static_cast<Id>(so)]});
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::pair<Term, Term>> TripleStore::with_predicate(std::string_view predicate) const {
    std::lock_guard lock(mutex_);
    std::vector<std::pair<Term, Term>> out;
    auto p = find(Term::iri(std::string(predicate)));
    if (!p) return out;
    auto it = by_predicate_.find(*p);
    if (it == by_predicate_.end()) return out;
    for (auto so : it->second) out.emplace_back(terms_[so >> 32], terms_[static_cast<Id>(so)]);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Term> TripleStore::objects(const Term& subject, std::string_view predicate) const {
    std::lock_guard lock(mutex_);
    std::vector<Term> out;
    auto s = find(subject), p = find(Term::iri(std::string(predicate)));
    if (!s || !p) return out;
    auto it = by_subject_predicate_.find(pack(*s, *p));
    if (it == by_subject_predicate_.end()) return out;
    for (Id o : it->second) out.push_back(terms_[o]);
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<Term> TripleStore::object(const Term& subject, std::string_view predicate) const {
    auto all = objects(subject, predicate);
    if (all.empty()) return std::nullopt;
    return all.front();
}

std::vector<Term> TripleStore::instances(std::string_view class_iri) const {
    std::lock_guard lock(mutex_);
    std::vector<Term> out;
    auto c = find(Term::iri(std::string(class_iri)));
    if (!c) return out;
    auto it = classes_.find(*c);
    if (it == classes_.end()) return out;
    for (Id s : it->second) out.push_back(terms_[s]);
    std::sort(out.begin(), out.end());
    return out;
}

void TripleStore::write_ntriples(std::ostream& out) const {
    for (const auto& t : triples()) out << to_ntriples(t) << '\n';
}

namespace {

class LineParser {
public:
    LineParser(std::string_view line, std::size_t number) : s_(line), line_(number) {}

    void skip_ws() {
        while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\t')) ++i_;
    }

    Term term() {
        skip_ws();
        if (i_ >= s_.size()) fail("unexpected end of line");
        if (s_[i_] == '<') {
            auto end = s_.find('>', i_);
            if (end == std::string_view::npos) fail("unterminated IRI");
            Term t = Term::iri(std::string(s_.substr(i_ + 1, end - i_ - 1)));
            i_ = end + 1;
            return t;
        }
        if (s_[i_] == '"') {
            std::string v;
            ++i_;
            while (true) {
                if (i_ >= s_.size()) fail("unterminated literal");
                char c = s_[i_++];
                if (c == '"') break;
                if (c != '\\') {
                    v += c;
                    continue;
                }
                if (i_ >= s_.size()) fail("dangling escape");
                char e = s_[i_++];
                switch (e) {
                case 'n': v += '\n'; break;
                case 'r': v += '\r'; break;
                case 't': v += '\t'; break;
                case '"': v += '"'; break;
                case '\\': v += '\\'; break;
                default: fail(std::string("unknown escape \\") + e);
                }
            }
            return Term::literal(std::move(v));
        }
        fail("expected '<' or '\"'");
    }

    void end() {
        skip_ws();
        if (i_ >= s_.size() || s_[i_] != '.') fail("expected '.'");
        ++i_;
        skip_ws();
        if (i_ != s_.size()) fail("trailing characters");
    }

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line_); }

private:
    std::string_view s_;
    std::size_t i_ = 0;
    std::size_t line_;
};

} // namespace

TripleStore TripleStore::read_ntriples(std::istream& in) {
    TripleStore store;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        LineParser p(line, number);
        Term s = p.term(), pr = p.term(), o = p.term();
        p.end();
        if (s.kind != TermKind::iri || pr.kind != TermKind::iri) p.fail("subject and predicate must be IRIs");
        store.add(s, pr.value, o);
    }
    return store;
}

} // namespace ddikg::rdf
