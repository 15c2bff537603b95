#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace meaningbound {

/// Lowercases (Unicode simple case mapping) and splits UTF-8 text into
/// maximal runs of letters and digits. Everything else, hyphens included,
/// separates tokens: "Pet-Fish" -> {"pet", "fish"}. Invalid UTF-8 bytes are
/// treated as separators.
std::vector<std::string> normalize(std::string_view text);

/// A single word or an exact (strictly adjacent) phrase of normalized tokens.
class TermPattern {
public:
    enum class Kind { Word, Phrase };

    static TermPattern word(std::string token);
    static TermPattern phrase(std::vector<std::string> tokens);
    /// Normalizes free text: one token gives a Word, several a Phrase.
    static TermPattern from_text(std::string_view text);

    Kind kind() const noexcept { return kind_; }
    const std::vector<std::string>& tokens() const noexcept { return tokens_; }

    friend bool operator==(const TermPattern&, const TermPattern&) = default;
    friend auto operator<=>(const TermPattern&, const TermPattern&) = default;

private:
    TermPattern(Kind kind, std::vector<std::string> tokens);

    Kind kind_ = Kind::Word;
    std::vector<std::string> tokens_;
};

struct PatternQuery {
    TermPattern pattern;
    friend bool operator==(const PatternQuery&, const PatternQuery&) = default;
};

struct AndQuery {
    TermPattern left;
    TermPattern right;
    friend bool operator==(const AndQuery&, const AndQuery&) = default;
};

struct AndNotQuery {
    TermPattern left;
    TermPattern right;
    friend bool operator==(const AndNotQuery&, const AndNotQuery&) = default;
};

/// Document-level count question: presence of a pattern, of two patterns,
/// or of one pattern without another.
using Query = std::variant<PatternQuery, AndQuery, AndNotQuery>;

inline Query pattern_query(TermPattern p) { return PatternQuery{std::move(p)}; }
inline Query and_query(TermPattern p, TermPattern q) { return AndQuery{std::move(p), std::move(q)}; }
inline Query and_not_query(TermPattern p, TermPattern q) { return AndNotQuery{std::move(p), std::move(q)}; }

/// `w`, `"t1 t2"`; And as `p q`, AndNot as `p -q`.
std::string canonical_string(const TermPattern& pattern);
std::string canonical_query_string(const Query& query);

/// Inverse of canonical_query_string. Accepts un-normalized input (`Pet`,
/// `pet-fish`) and normalizes it. Throws ErrorKind::InvalidQuery.
Query parse_query(std::string_view text);
TermPattern parse_pattern(std::string_view text);

} // namespace meaningbound
