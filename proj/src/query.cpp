#include "meaningbound/query.hpp"

#include "meaningbound/error.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

namespace meaningbound {

std::vector<std::string> normalize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    const auto* bytes = reinterpret_cast<const std::uint8_t*>(text.data());
    const auto length = static_cast<std::int32_t>(text.size());
    std::int32_t i = 0;
    while (i < length) {
        UChar32 c = 0;
        U8_NEXT(bytes, i, length, c);
        if (c >= 0 && u_isalnum(c)) {
            const UChar32 lower = u_tolower(c);
            char buf[U8_MAX_LENGTH];
            std::int32_t n = 0;
            U8_APPEND_UNSAFE(buf, n, lower);
            current.append(buf, static_cast<std::size_t>(n));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

namespace {

void require_normalized(const std::string& token) {
    const auto parts = normalize(token);
    if (parts.size() != 1 || parts.front() != token) {
        throw Error(ErrorKind::InvalidQuery, "token is not normalized: '" + token + "'");
    }
}

} // namespace

TermPattern::TermPattern(Kind kind, std::vector<std::string> tokens)
    : kind_(kind), tokens_(std::move(tokens)) {
    for (const auto& t : tokens_) require_normalized(t);
}

TermPattern TermPattern::word(std::string token) {
    return TermPattern(Kind::Word, {std::move(token)});
}

TermPattern TermPattern::phrase(std::vector<std::string> tokens) {
    if (tokens.size() < 2) {
        throw Error(ErrorKind::InvalidQuery, "a phrase needs at least two tokens");
    }
    return TermPattern(Kind::Phrase, std::move(tokens));
}

TermPattern TermPattern::from_text(std::string_view text) {
    auto tokens = normalize(text);
    if (tokens.empty()) {
        throw Error(ErrorKind::InvalidQuery, "pattern '" + std::string(text) + "' has no tokens");
    }
    if (tokens.size() == 1) return word(std::move(tokens.front()));
    return phrase(std::move(tokens));
}

std::string canonical_string(const TermPattern& pattern) {
    if (pattern.kind() == TermPattern::Kind::Word) return pattern.tokens().front();
    std::string out = "\"";
    for (std::size_t i = 0; i < pattern.tokens().size(); ++i) {
        if (i != 0) out.push_back(' ');
        out += pattern.tokens()[i];
    }
    out.push_back('"');
    return out;
}

std::string canonical_query_string(const Query& query) {
    struct Visitor {
        std::string operator()(const PatternQuery& q) const { return canonical_string(q.pattern); }
        std::string operator()(const AndQuery& q) const {
            return canonical_string(q.left) + " " + canonical_string(q.right);
        }
        std::string operator()(const AndNotQuery& q) const {
            return canonical_string(q.left) + " -" + canonical_string(q.right);
        }
    };
    return std::visit(Visitor{}, query);
}

namespace {

struct Term {
    bool negated = false;
    TermPattern pattern;
};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

std::vector<Term> lex_terms(std::string_view text) {
    std::vector<Term> terms;
    std::size_t i = 0;
    while (i < text.size()) {
        if (is_space(text[i])) {
            ++i;
            continue;
        }
        bool negated = false;
        if (text[i] == '-') {
            negated = true;
            ++i;
        }
        std::string_view body;
        if (i < text.size() && text[i] == '"') {
            const auto close = text.find('"', i + 1);
            if (close == std::string_view::npos) {
                throw Error(ErrorKind::InvalidQuery, "unterminated quote in '" + std::string(text) + "'");
            }
            body = text.substr(i + 1, close - i - 1);
            i = close + 1;
        } else {
            const auto start = i;
            while (i < text.size() && !is_space(text[i])) ++i;
            body = text.substr(start, i - start);
        }
        terms.push_back(Term{negated, TermPattern::from_text(body)});
    }
    return terms;
}

} // namespace

Query parse_query(std::string_view text) {
    auto terms = lex_terms(text);
    if (terms.empty() || terms.size() > 2) {
        throw Error(ErrorKind::InvalidQuery,
                    "query must have one or two terms: '" + std::string(text) + "'");
    }
    if (terms.front().negated) {
        throw Error(ErrorKind::InvalidQuery, "first term cannot be negated: '" + std::string(text) + "'");
    }
    if (terms.size() == 1) return pattern_query(std::move(terms[0].pattern));
    if (terms[1].negated) return and_not_query(std::move(terms[0].pattern), std::move(terms[1].pattern));
    return and_query(std::move(terms[0].pattern), std::move(terms[1].pattern));
}

TermPattern parse_pattern(std::string_view text) {
    const auto query = parse_query(text);
    if (const auto* p = std::get_if<PatternQuery>(&query)) return p->pattern;
    throw Error(ErrorKind::InvalidQuery, "expected a single word or phrase: '" + std::string(text) + "'");
}

} // namespace meaningbound
