#include "ddikg/extractor.hpp"

#include "ddikg/csv.hpp"
#include "ddikg/error.hpp"
#include "ddikg/text.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

namespace ddikg::extract {
namespace {

const std::string kSlotX = "\x01X";
const std::string kSlotY = "\x01Y";

bool is_trailing_punct(char c) { return c == ',' || c == ';' || c == '.' || c == ':'; }

// Lowercased whitespace tokens with trailing punctuation split off.
std::vector<std::string> tokenize(std::string_view s) {
    std::vector<std::string> out;
    for (auto& word : text::split_ws(text::to_lower(s))) {
        std::vector<std::string> tail;
        while (word.size() > 1 && is_trailing_punct(word.back())) {
            tail.emplace_back(1, word.back());
            word.pop_back();
        }
        out.push_back(std::move(word));
        out.insert(out.end(), tail.rbegin(), tail.rend());
    }
    return out;
}

bool is_clause_break(const std::string& tok) { return tok == ";" || tok == "."; }

std::vector<std::vector<std::string>> clauses(const std::vector<std::string>& tokens) {
    std::vector<std::vector<std::string>> out(1);
    for (const auto& t : tokens) {
        if (is_clause_break(t)) {
            if (!out.back().empty()) out.emplace_back();
        } else {
            out.back().push_back(t);
        }
    }
    if (out.back().empty()) out.pop_back();
    return out;
}

std::string surface_key(std::string_view surface) { return text::join(tokenize(surface), " "); }

struct Capture {
    std::size_t x_begin = 0, x_end = 0, y_begin = 0, y_end = 0;
};

// Enumerates every way the pattern tokens cover the clause exactly.
void match_from(const std::vector<std::string>& pat, std::size_t i, const std::vector<std::string>& clause,
                std::size_t j, Capture& cur, std::vector<Capture>& out) {
    if (i == pat.size()) {
        if (j == clause.size()) out.push_back(cur);
        return;
    }
    const auto& p = pat[i];
    if (p == kSlotX || p == kSlotY) {
        // leave at least one token for each remaining literal
        std::size_t remaining_literals = 0;
        for (std::size_t k = i + 1; k < pat.size(); ++k) ++remaining_literals;
        for (std::size_t end = j + 1; end + remaining_literals <= clause.size(); ++end) {
            if (p == kSlotX) {
                cur.x_begin = j;
                cur.x_end = end;
            } else {
                cur.y_begin = j;
                cur.y_end = end;
            }
            match_from(pat, i + 1, clause, end, cur, out);
        }
        return;
    }
    if (j < clause.size() && clause[j] == p) match_from(pat, i + 1, clause, j + 1, cur, out);
}

std::string span_text(const std::vector<std::string>& clause, std::size_t b, std::size_t e) {
    std::vector<std::string> parts(clause.begin() + static_cast<std::ptrdiff_t>(b),
                                   clause.begin() + static_cast<std::ptrdiff_t>(e));
    return text::join(parts, " ");
}

Slot parse_slot(std::string_view s) {
    auto t = text::normalize(s);
    if (t == "drugx") return Slot::x;
    if (t == "drugy") return Slot::y;
    throw InvalidInput("precipitant_slot must be DrugX or DrugY, got `" + std::string(s) + "`");
}

} // namespace

std::string_view to_string(Slot s) noexcept { return s == Slot::x ? "DrugX" : "DrugY"; }

Pattern::Pattern(int id, std::string template_text, Slot precipitant, std::string effect_phrase, Impact impact,
                 const EffectLexicon& effects)
    : id_(id),
      template_(std::move(template_text)),
      precipitant_(precipitant),
      effect_phrase_(text::trim(effect_phrase)),
      effect_(effects.normalize(effect_phrase_)),
      impact_(impact) {
    auto toks = tokenize(template_);
    while (!toks.empty() && is_clause_break(toks.back())) toks.pop_back();
    int xs = 0, ys = 0;
    for (auto& t : toks) {
        if (t == "drugx") {
            t = kSlotX;
            ++xs;
        } else if (t == "drugy") {
            t = kSlotY;
            ++ys;
        } else if (is_clause_break(t)) {
            throw InvalidInput("template spans more than one clause");
        }
    }
    if (xs != 1) throw InvalidInput("template must contain DrugX exactly once");
    if (ys != 1) throw InvalidInput("template must contain DrugY exactly once");
    for (std::size_t i = 0; i + 4 < toks.size(); ++i) {
        bool first_slot = toks[i] == kSlotX || toks[i] == kSlotY;
        bool last_slot = toks[i + 4] == kSlotX || toks[i + 4] == kSlotY;
        if (first_slot && last_slot && toks[i + 1] == "is" && toks[i + 2] == "combined" && toks[i + 3] == "with")
            symmetric_ = true;
    }
    tokens_ = std::move(toks);
}

std::string Pattern::instantiate(std::string_view x_surface, std::string_view y_surface) const {
    std::string out;
    std::size_t i = 0;
    while (i < template_.size()) {
        bool boundary = i == 0 || !std::isalnum(static_cast<unsigned char>(template_[i - 1]));
        auto rest = std::string_view(template_).substr(i);
        if (boundary && rest.size() >= 5 && text::starts_with_ci(rest, "drug") &&
            (rest[4] == 'X' || rest[4] == 'x' || rest[4] == 'Y' || rest[4] == 'y') &&
            (rest.size() == 5 || !std::isalnum(static_cast<unsigned char>(rest[5])))) {
            out += (rest[4] == 'X' || rest[4] == 'x') ? x_surface : y_surface;
            i += 5;
        } else {
            out.push_back(template_[i++]);
        }
    }
    return out;
}

std::vector<Pattern> parse_catalog(std::istream& in, const EffectLexicon& effects) {
    auto table = csv::read_table(in);
    csv::require_header(table, {"pattern_id", "template", "precipitant_slot", "effect_phrase", "impact"}, "catalog");
    std::vector<Pattern> patterns;
    std::set<int> ids;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        auto line = table.lines[r];
        try {
            auto id_text = text::trim(row[0]);
            std::size_t used = 0;
            int id = std::stoi(id_text, &used);
            if (used != id_text.size()) throw InvalidInput("pattern_id is not an integer");
            if (!ids.insert(id).second) throw InvalidInput("duplicate pattern_id " + std::to_string(id));
            patterns.emplace_back(id, row[1], parse_slot(row[2]), row[3], parse_impact(row[4]), effects);
        } catch (const InvalidInput& e) {
            throw ParseError(e.what(), line);
        } catch (const std::logic_error&) {
            throw ParseError("pattern_id is not an integer", line);
        }
    }
    std::sort(patterns.begin(), patterns.end(), [](const Pattern& a, const Pattern& b) { return a.id() < b.id(); });
    return patterns;
}

std::vector<Pattern> load_catalog(const std::filesystem::path& path, const EffectLexicon& effects) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open catalog " + path.string());
    try {
        return parse_catalog(in, effects);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what(), e.line());
    }
}

Lexicon Lexicon::parse(std::istream& in) {
    auto table = csv::read_table(in);
    csv::require_header(table, {"surface", "cui", "label"}, "lexicon");
    Lexicon lex;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        try {
            lex.add(row[0], DrugId(text::trim(row[1]), row[2]));
        } catch (const Error& e) {
            throw ParseError(e.what(), table.lines[r]);
        }
    }
    return lex;
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open lexicon " + path.string());
    try {
        return parse(in);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what(), e.line());
    }
}

void Lexicon::add(std::string_view surface, const DrugId& drug) {
    auto key = surface_key(surface);
    if (key.empty()) throw ValidationError("empty lexicon surface for " + drug.cui());
    // keep the first label seen for a CUI
    const DrugId& canonical = by_cui_.try_emplace(drug.cui(), drug).first->second;
    auto [it, inserted] = surfaces_.try_emplace(key, canonical);
    if (!inserted && it->second.cui() != drug.cui())
        throw ValidationError("surface `" + key + "` names both " + it->second.cui() + " and " + drug.cui());
}

const DrugId* Lexicon::find(std::string_view surface) const {
    auto it = surfaces_.find(surface_key(surface));
    return it == surfaces_.end() ? nullptr : &it->second;
}

const DrugId* Lexicon::find_cui(std::string_view cui) const {
    auto it = by_cui_.find(cui);
    return it == by_cui_.end() ? nullptr : &it->second;
}

std::vector<DrugId> Lexicon::drugs() const {
    std::vector<DrugId> out;
    for (const auto& [cui, d] : by_cui_) out.push_back(d);
    return out;
}

SentenceMatch match_sentence_detailed(std::string_view sentence, const std::vector<Pattern>& catalog,
                                      const Lexicon& lexicon) {
    if (catalog.empty()) throw InvalidInput("empty pattern catalog");
    SentenceMatch result;
    std::set<PkDdi> seen;
    for (const auto& clause : clauses(tokenize(sentence))) {
        for (const auto& pattern : catalog) {
            std::vector<Capture> captures;
            Capture cur;
            match_from(pattern.tokens(), 0, clause, 0, cur, captures);
            if (captures.empty()) continue;

            const DrugId* best_x = nullptr;
            const DrugId* best_y = nullptr;
            std::size_t best_len = 0;
            std::string unresolved;
            for (const auto& c : captures) {
                auto xs = span_text(clause, c.x_begin, c.x_end);
                auto ys = span_text(clause, c.y_begin, c.y_end);
                const DrugId* x = lexicon.find(xs);
                const DrugId* y = lexicon.find(ys);
                if (x && y) {
                    std::size_t len = (c.x_end - c.x_begin) + (c.y_end - c.y_begin);
                    if (!best_x || len > best_len) {
                        best_x = x;
                        best_y = y;
                        best_len = len;
                    }
                } else if (unresolved.empty()) {
                    unresolved = !x ? xs : ys;
                }
            }
            if (!best_x) {
                result.diagnostics.push_back(
                    {std::string(sentence), pattern.id(), "unresolved drug mention `" + unresolved + "`"});
                continue;
            }
            if (*best_x == *best_y) {
                result.diagnostics.push_back(
                    {std::string(sentence), pattern.id(), "both mentions resolve to " + best_x->cui()});
                continue;
            }
            const DrugId& precipitant = pattern.precipitant_slot() == Slot::x ? *best_x : *best_y;
            const DrugId& object = pattern.precipitant_slot() == Slot::x ? *best_y : *best_x;
            PkDdi ddi(precipitant, pattern.effect(), pattern.impact(), object, Provenance::extracted);
            if (seen.insert(ddi).second) result.ddis.push_back(std::move(ddi));
        }
    }
    // a sentence with an unresolvable mention contributes no facts at all
    if (!result.diagnostics.empty()) result.ddis.clear();
    return result;
}

std::vector<PkDdi> match_sentence(std::string_view sentence, const std::vector<Pattern>& catalog,
                                  const Lexicon& lexicon) {
    return match_sentence_detailed(sentence, catalog, lexicon).ddis;
}

ExtractionResult extract_corpus(std::istream& sentences, const std::vector<Pattern>& catalog,
                                const Lexicon& lexicon) {
    ExtractionResult result;
    std::set<PkDdi> seen;
    std::string line;
    while (std::getline(sentences, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto sentence = text::trim(line);
        if (sentence.empty()) continue;
        ++result.sentences;
        auto match = match_sentence_detailed(sentence, catalog, lexicon);
        result.diagnostics.insert(result.diagnostics.end(), match.diagnostics.begin(), match.diagnostics.end());
        if (match.ddis.empty()) {
            result.unmatched.push_back(sentence);
            continue;
        }
        ++result.matched_sentences;
        if (match.ddis.size() >= 2) result.multi_match.push_back(sentence);
        for (auto& d : match.ddis)
            if (seen.insert(d).second) result.ddis.push_back(std::move(d));
    }
    if (sentences.bad()) result.partial = true;
    return result;
}

void write_ddis_csv(std::ostream& out, const std::vector<PkDdi>& ddis) {
    csv::write_row(out, {"precipitant_cui", "effect", "impact", "object_cui"});
    for (const auto& d : ddis)
        csv::write_row(out, {d.precipitant().cui(), d.effect().surface(), std::string(to_string(d.impact())),
                             d.object().cui()});
}

} // namespace ddikg::extract
