#include "sqlguard/tokenizer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "common/text.hpp"

namespace geoagent::sqlguard {
namespace {

constexpr std::array kReserved = {
    "ALL",      "ALTER",    "AND",       "ANY",      "AS",        "ASC",       "ATTACH",
    "BETWEEN",  "BY",       "CASE",      "COPY",     "CREATE",    "CROSS",     "CURRENT",
    "DELETE",   "DESC",     "DETACH",    "DISTINCT", "DROP",      "ELSE",      "END",
    "ESCAPE",   "EXCEPT",   "EXISTS",    "EXPLAIN",  "FALSE",     "FETCH",     "FILTER",
    "FIRST",    "FOLLOWING","FOR",       "FROM",     "FULL",      "GRANT",     "GROUP",
    "HAVING",   "ILIKE",    "IN",        "INNER",    "INSERT",    "INTERSECT", "INTO",
    "IS",       "JOIN",     "LAST",      "LATERAL",  "LEFT",      "LIKE",      "LIMIT",
    "MATERIALIZED", "MERGE", "NATURAL",  "NOT",      "NULL",      "NULLS",     "OFFSET",
    "ON",       "OR",       "ORDER",     "OUTER",    "OVER",      "PARTITION", "PRAGMA",
    "PRECEDING","RANGE",    "RECURSIVE", "REINDEX",  "REVOKE",    "RIGHT",     "ROWS",
    "SELECT",   "SET",      "SIMILAR",   "SOME",     "TABLE",     "THEN",      "TRUE",
    "TRUNCATE", "UNBOUNDED","UNION",     "UPDATE",   "USING",     "VACUUM",    "VALUES",
    "WHEN",     "WHERE",    "WINDOW",    "WITH",     "ROW",       "ONLY",      "ANALYZE",
};

constexpr std::array kTypedLiteralWords = {"DATE", "TIME", "TIMESTAMP", "INTERVAL"};

std::string upper(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

bool ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c == '$' || c >= 0x80; }

}  // namespace

bool is_reserved_keyword(std::string_view up) {
    return std::find(kReserved.begin(), kReserved.end(), up) != kReserved.end();
}

std::string unquote_string(std::string_view source) {
    if (source.size() < 2) return std::string(source);
    std::string out;
    for (std::size_t i = 1; i + 1 < source.size(); ++i) {
        out += source[i];
        if (source[i] == '\'' && source[i + 1] == '\'') ++i;
    }
    return out;
}

TokenizeResult tokenize(std::string_view sql) {
    TokenizeResult res;
    auto& toks = res.tokens;
    std::size_t i = 0;
    const std::size_t n = sql.size();
    auto fail = [&](std::string msg, std::size_t b, std::size_t e) {
        res.error = std::move(msg);
        res.error_span = {b, e};
    };
    while (i < n) {
        unsigned char c = sql[i];
        if (std::isspace(c)) {
            ++i;
            continue;
        }
        if (c == '-' && i + 1 < n && sql[i + 1] == '-') {
            while (i < n && sql[i] != '\n') ++i;
            continue;
        }
        if (c == '/' && i + 1 < n && sql[i + 1] == '*') {
            auto close = sql.find("*/", i + 2);
            if (close == std::string_view::npos) {
                fail("unterminated block comment", i, n);
                return res;
            }
            i = close + 2;
            continue;
        }
        std::size_t start = i;
        if (c == '\'') {
            ++i;
            bool closed = false;
            while (i < n) {
                if (sql[i] == '\'') {
                    if (i + 1 < n && sql[i + 1] == '\'') {
                        i += 2;
                        continue;
                    }
                    ++i;
                    closed = true;
                    break;
                }
                ++i;
            }
            if (!closed) {
                fail("unterminated string literal", start, n);
                return res;
            }
            toks.push_back({TokenKind::string, unquote_string(sql.substr(start, i - start)),
                            {start, i}});
            continue;
        }
        if (c == '"' || c == '`') {
            char q = static_cast<char>(c);
            auto close = sql.find(q, i + 1);
            if (close == std::string_view::npos) {
                fail("unterminated quoted identifier", start, n);
                return res;
            }
            toks.push_back({TokenKind::quoted_identifier,
                            std::string(sql.substr(i + 1, close - i - 1)),
                            {start, close + 1}});
            i = close + 1;
            continue;
        }
        if (std::isdigit(c) || (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(sql[i + 1])))) {
            while (i < n && (std::isdigit(static_cast<unsigned char>(sql[i])) || sql[i] == '.')) ++i;
            if (i < n && (sql[i] == 'e' || sql[i] == 'E')) {
                std::size_t j = i + 1;
                if (j < n && (sql[j] == '+' || sql[j] == '-')) ++j;
                if (j < n && std::isdigit(static_cast<unsigned char>(sql[j]))) {
                    i = j;
                    while (i < n && std::isdigit(static_cast<unsigned char>(sql[i]))) ++i;
                }
            }
            toks.push_back({TokenKind::number, std::string(sql.substr(start, i - start)), {start, i}});
            continue;
        }
        if (ident_start(c)) {
            while (i < n && ident_char(static_cast<unsigned char>(sql[i]))) ++i;
            std::string word(sql.substr(start, i - start));
            std::string up = upper(word);
            if (is_reserved_keyword(up)) {
                toks.push_back({TokenKind::keyword, up, {start, i}});
            } else {
                bool typed = false;
                if (std::find(kTypedLiteralWords.begin(), kTypedLiteralWords.end(), up) !=
                    kTypedLiteralWords.end()) {
                    std::size_t j = i;
                    while (j < n && std::isspace(static_cast<unsigned char>(sql[j]))) ++j;
                    typed = j < n && sql[j] == '\'';
                }
                if (typed)
                    toks.push_back({TokenKind::keyword, up, {start, i}});
                else
                    toks.push_back({TokenKind::identifier, word, {start, i}});
            }
            continue;
        }
        switch (c) {
            case '(': toks.push_back({TokenKind::lparen, "(", {i, i + 1}}); ++i; continue;
            case ')': toks.push_back({TokenKind::rparen, ")", {i, i + 1}}); ++i; continue;
            case ',': toks.push_back({TokenKind::comma, ",", {i, i + 1}}); ++i; continue;
            case '.': toks.push_back({TokenKind::dot, ".", {i, i + 1}}); ++i; continue;
            case ';': toks.push_back({TokenKind::semicolon, ";", {i, i + 1}}); ++i; continue;
            case '*': toks.push_back({TokenKind::star, "*", {i, i + 1}}); ++i; continue;
            default: break;
        }
        static constexpr std::array kMulti = {"->>", "<=", ">=", "<>", "!=", "||", "::", "@>",
                                              "<@", "->", "~~", "<<", ">>", "&&"};
        bool matched = false;
        for (std::string_view m : kMulti) {
            if (sql.substr(i, m.size()) == m) {
                toks.push_back({TokenKind::op, std::string(m), {i, i + m.size()}});
                i += m.size();
                matched = true;
                break;
            }
        }
        if (matched) continue;
        if (std::string_view("=<>+-/%~^&|!@#?:").find(static_cast<char>(c)) != std::string_view::npos) {
            toks.push_back({TokenKind::op, std::string(1, static_cast<char>(c)), {i, i + 1}});
            ++i;
            continue;
        }
        fail(std::string("unexpected character '") + static_cast<char>(c) + "'", i, i + 1);
        return res;
    }
    return res;
}

}  // namespace geoagent::sqlguard
