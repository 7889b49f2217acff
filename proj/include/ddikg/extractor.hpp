#pragma once

// Template-literal sentence matcher turning interaction descriptions into PkDdi facts.
//
// A template is an interaction sentence with the two drug mentions replaced by the
// placeholders DrugX and DrugY. Matching is case-insensitive and anchored to a whole
// clause (clauses are separated by `;` or a sentence-internal `.`); each placeholder
// captures one or more tokens that must name a lexicon entry.

#include "ddikg/core.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace ddikg::extract {

enum class Slot { x, y };

std::string_view to_string(Slot s) noexcept;

class Pattern {
public:
    // Throws InvalidInput unless the template holds DrugX and DrugY exactly once each.
    Pattern(int id, std::string template_text, Slot precipitant, std::string effect_phrase, Impact impact,
            const EffectLexicon& effects = EffectLexicon::builtin());

    int id() const noexcept { return id_; }
    const std::string& template_text() const noexcept { return template_; }
    Slot precipitant_slot() const noexcept { return precipitant_; }
    const std::string& effect_phrase() const noexcept { return effect_phrase_; }
    const EffectKind& effect() const noexcept { return effect_; }
    Impact impact() const noexcept { return impact_; }

    // "... when DrugX is combined with DrugY": the sentence does not say which drug acts
    // on which; the catalog row's precipitant_slot is a convention (first mention).
    bool symmetric() const noexcept { return symmetric_; }

    // Replaces the placeholders with the given surface forms.
    std::string instantiate(std::string_view x_surface, std::string_view y_surface) const;

    // Token form: literals, with "\x01X" / "\x01Y" standing for the slots.
    const std::vector<std::string>& tokens() const noexcept { return tokens_; }

private:
    int id_;
    std::string template_;
    Slot precipitant_;
    std::string effect_phrase_;
    EffectKind effect_;
    Impact impact_;
    bool symmetric_ = false;
    std::vector<std::string> tokens_;
};

// CSV `pattern_id,template,precipitant_slot,effect_phrase,impact`, ordered by pattern_id.
std::vector<Pattern> load_catalog(const std::filesystem::path& path,
                                  const EffectLexicon& effects = EffectLexicon::builtin());
std::vector<Pattern> parse_catalog(std::istream& in, const EffectLexicon& effects = EffectLexicon::builtin());

// Case-insensitive surface form -> drug. One surface may not name two CUIs.
class Lexicon {
public:
    // CSV `surface,cui,label`.
    static Lexicon load(const std::filesystem::path& path);
    static Lexicon parse(std::istream& in);

    // Throws ValidationError on an empty surface or a surface already bound to another CUI.
    void add(std::string_view surface, const DrugId& drug);

    const DrugId* find(std::string_view surface) const;
    const DrugId* find_cui(std::string_view cui) const;

    // One entry per distinct CUI, ordered by CUI.
    std::vector<DrugId> drugs() const;
    // All (surface, drug) entries, ordered by surface.
    const std::map<std::string, DrugId, std::less<>>& entries() const noexcept { return surfaces_; }
    std::size_t size() const noexcept { return surfaces_.size(); }

private:
    std::map<std::string, DrugId, std::less<>> surfaces_;
    std::map<std::string, DrugId, std::less<>> by_cui_;
};

struct Diagnostic {
    std::string sentence;
    int pattern_id;
    std::string message;
};

struct SentenceMatch {
    std::vector<PkDdi> ddis;
    std::vector<Diagnostic> diagnostics;  // unresolved entities; ddis is empty when set
};

SentenceMatch match_sentence_detailed(std::string_view sentence, const std::vector<Pattern>& catalog,
                                      const Lexicon& lexicon);

// Facts only; empty when no pattern matches or a mention cannot be resolved.
std::vector<PkDdi> match_sentence(std::string_view sentence, const std::vector<Pattern>& catalog,
                                  const Lexicon& lexicon);

struct ExtractionResult {
    std::vector<PkDdi> ddis;                // in corpus order, duplicates removed
    std::vector<std::string> unmatched;     // no fact (including unresolved mentions)
    std::vector<std::string> multi_match;   // sentences that yielded two or more facts
    std::vector<Diagnostic> diagnostics;
    std::size_t sentences = 0;
    std::size_t matched_sentences = 0;
    bool partial = false;                   // input failed before end of stream
};

// One sentence per line; blank lines are ignored.
ExtractionResult extract_corpus(std::istream& sentences, const std::vector<Pattern>& catalog,
                                const Lexicon& lexicon);

void write_ddis_csv(std::ostream& out, const std::vector<PkDdi>& ddis);

} // namespace ddikg::extract
