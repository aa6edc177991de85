#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace geoagent::sqlguard {

struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;

    bool operator==(const Span&) const = default;
};

enum class TokenKind {
    identifier,
    quoted_identifier,
    keyword,
    string,
    number,
    op,
    lparen,
    rparen,
    comma,
    dot,
    semicolon,
    star,
};

struct Token {
    TokenKind kind;
    std::string text;   // keywords are uppercased; quoted identifiers unquoted
    Span span;

    bool is_keyword(std::string_view kw) const { return kind == TokenKind::keyword && text == kw; }
    bool is_name() const {
        return kind == TokenKind::identifier || kind == TokenKind::quoted_identifier;
    }
};

struct TokenizeResult {
    std::vector<Token> tokens;
    std::string error;  // empty on success
    Span error_span;
};

// Comments are dropped. DATE/TIME/TIMESTAMP/INTERVAL are keywords only when
// they introduce a typed literal; otherwise they lex as identifiers.
TokenizeResult tokenize(std::string_view sql);

bool is_reserved_keyword(std::string_view upper);

// Unescapes a single-quoted SQL string token's source text ('it''s' -> it's).
std::string unquote_string(std::string_view source);

}  // namespace geoagent::sqlguard
