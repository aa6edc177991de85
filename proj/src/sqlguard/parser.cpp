#include <algorithm>
#include <array>

#include "common/text.hpp"
#include "sqlguard/sqlguard.hpp"

namespace geoagent::sqlguard {
namespace {

enum class Clause { none, select, from, where, group_by, having, order_by, limit, on, using_, other };
enum class FrameKind { top, subquery, function, expr, cte_columns, type_args };
enum class CteState { none, expect_name, after_name, after_as };

struct Frame {
    FrameKind kind = FrameKind::top;
    std::string function;
    Clause clause = Clause::none;
    bool from_expect = false;
    bool prev_value = false;
    bool alias_next = false;
    bool type_next = false;
    bool window_name_next = false;
    bool first_token = true;
    bool derived_in_from = false;
    bool cte_body = false;
    bool cte_wait_comma = false;
    CteState cte = CteState::none;
    int group = 0;
    int arm = -1;
    int from_clause = 0;
    int last_table_ref = -1;
};

constexpr std::array kWriteKeywords = {"INSERT", "UPDATE", "DELETE", "DROP",   "CREATE",
                                       "ALTER",  "TRUNCATE", "GRANT", "REVOKE", "ATTACH",
                                       "DETACH", "PRAGMA", "VACUUM", "REINDEX", "COPY",
                                       "MERGE",  "INTO",   "SET"};

bool is_write_keyword(const Token& t) {
    return t.kind == TokenKind::keyword &&
           std::find(kWriteKeywords.begin(), kWriteKeywords.end(), t.text) != kWriteKeywords.end();
}

SqlDiagnostic r1(std::string message, Span span) {
    return {Severity::error, "R1", std::move(message), span,
            std::string("submit a single read-only SELECT statement")};
}

class Parser {
public:
    Parser(std::string_view sql, std::vector<Token> toks) : sql_(sql), toks_(std::move(toks)) {}

    StatementSummary run() {
        if (!match_parens()) {
            out_.diagnostics.push_back(r1("unbalanced parentheses", unbalanced_span_));
            out_.kind = StatementKind::other;
            return out_;
        }
        out_.kind = classify();
        walk();
        scan_category_literals();
        return out_;
    }

private:
    bool match_parens() {
        match_.assign(toks_.size(), -1);
        std::vector<int> open;
        for (std::size_t i = 0; i < toks_.size(); ++i) {
            if (toks_[i].kind == TokenKind::lparen) {
                open.push_back(static_cast<int>(i));
            } else if (toks_[i].kind == TokenKind::rparen) {
                if (open.empty()) {
                    unbalanced_span_ = toks_[i].span;
                    return false;
                }
                match_[open.back()] = static_cast<int>(i);
                match_[i] = open.back();
                open.pop_back();
            }
        }
        if (!open.empty()) {
            unbalanced_span_ = toks_[open.back()].span;
            return false;
        }
        return true;
    }

    Span whole() const { return {0, sql_.size()}; }

    StatementKind classify() {
        if (toks_.empty()) {
            out_.diagnostics.push_back(r1("empty statement", whole()));
            return StatementKind::other;
        }
        int depth = 0;
        for (std::size_t i = 0; i < toks_.size(); ++i) {
            const auto& t = toks_[i];
            if (t.kind == TokenKind::lparen) ++depth;
            if (t.kind == TokenKind::rparen) --depth;
            if (is_write_keyword(t)) {
                out_.diagnostics.push_back(
                    r1("statement contains a data-modifying keyword '" + t.text + "'", t.span));
                return StatementKind::other;
            }
            if (t.kind == TokenKind::semicolon && depth == 0 && i + 1 < toks_.size()) {
                out_.diagnostics.push_back(r1("multiple statements are not allowed", toks_[i + 1].span));
                return StatementKind::other;
            }
        }
        std::size_t i = 0;
        while (i < toks_.size() && toks_[i].kind == TokenKind::lparen) ++i;
        if (i >= toks_.size()) return StatementKind::other;
        if (toks_[i].is_keyword("SELECT")) return StatementKind::select;
        if (!toks_[i].is_keyword("WITH")) {
            out_.diagnostics.push_back(
                r1("statement is not a SELECT (starts with '" + toks_[i].text + "')", toks_[i].span));
            return StatementKind::other;
        }
        ++i;
        if (i < toks_.size() && toks_[i].kind == TokenKind::identifier &&
            iequals(toks_[i].text, "recursive"))
            ++i;
        if (i < toks_.size() && toks_[i].is_keyword("RECURSIVE")) ++i;
        while (i < toks_.size()) {
            if (!toks_[i].is_name()) break;
            ++i;
            if (i < toks_.size() && toks_[i].kind == TokenKind::lparen) i = match_[i] + 1;
            if (i >= toks_.size() || !toks_[i].is_keyword("AS")) break;
            ++i;
            while (i < toks_.size() && (toks_[i].is_keyword("NOT") || toks_[i].is_keyword("MATERIALIZED"))) ++i;
            if (i >= toks_.size() || toks_[i].kind != TokenKind::lparen) break;
            i = match_[i] + 1;
            if (i < toks_.size() && toks_[i].kind == TokenKind::comma) {
                ++i;
                continue;
            }
            break;
        }
        while (i < toks_.size() && toks_[i].kind == TokenKind::lparen) ++i;
        if (i < toks_.size() && toks_[i].is_keyword("SELECT")) return StatementKind::select;
        out_.diagnostics.push_back(r1("WITH clause is not followed by a SELECT",
                                      i < toks_.size() ? toks_[i].span : whole()));
        return StatementKind::other;
    }

    void add_alias(Frame& f, const std::string& lname) {
        if (f.clause == Clause::from) {
            if (f.last_table_ref >= 0) {
                out_.table_refs[f.last_table_ref].alias = lname;
                out_.table_aliases[lname] = out_.table_refs[f.last_table_ref].name;
                f.last_table_ref = -1;
            } else {
                out_.derived_aliases.insert(lname);
            }
        } else {
            out_.output_aliases.insert(lname);
        }
        f.prev_value = true;
    }

    void touch_arm(Frame& f, std::size_t end) {
        if (f.arm >= 0) out_.arms[f.arm].span.end = end;
    }

    void walk() {
        std::vector<Frame> stack(1);
        int group_counter = 0;
        int from_counter = 0;
        std::string pending_function;
        bool pending_type_args = false;

        for (std::size_t i = 0; i < toks_.size(); ++i) {
            Frame& f = stack.back();
            const Token& t = toks_[i];
            const bool was_first = f.first_token;
            f.first_token = false;
            touch_arm(f, t.span.end);

            if (f.cte_wait_comma && t.kind != TokenKind::comma) f.cte_wait_comma = false;

            switch (t.kind) {
                case TokenKind::keyword: on_keyword(f, t, from_counter); break;
                case TokenKind::identifier:
                case TokenKind::quoted_identifier:
                    i = on_name(f, i, was_first, pending_function, pending_type_args);
                    break;
                case TokenKind::string:
                case TokenKind::number: f.prev_value = true; break;
                case TokenKind::lparen: {
                    f.window_name_next = false;
                    Frame child;
                    child.group = f.group;
                    const bool next_is_query =
                        i + 1 < toks_.size() &&
                        (toks_[i + 1].is_keyword("SELECT") || toks_[i + 1].is_keyword("WITH"));
                    if (!pending_function.empty()) {
                        child.kind = FrameKind::function;
                        child.function = pending_function;
                        pending_function.clear();
                        if (f.clause == Clause::from) f.from_expect = false;
                    } else if (pending_type_args) {
                        child.kind = FrameKind::type_args;
                        pending_type_args = false;
                    } else if (f.cte == CteState::after_name) {
                        child.kind = FrameKind::cte_columns;
                    } else if (next_is_query) {
                        child.kind = FrameKind::subquery;
                        child.group = ++group_counter;
                        if (f.cte == CteState::after_as) {
                            child.cte_body = true;
                        } else if (f.clause == Clause::from && f.from_expect) {
                            child.derived_in_from = true;
                            f.from_expect = false;
                        }
                    } else {
                        child.kind = FrameKind::expr;
                        if (f.clause == Clause::from && f.from_expect) {
                            child.clause = Clause::from;
                            child.from_expect = true;
                            child.from_clause = f.from_clause;
                        }
                    }
                    stack.push_back(std::move(child));
                    break;
                }
                case TokenKind::rparen: {
                    if (stack.size() == 1) break;
                    Frame popped = std::move(stack.back());
                    stack.pop_back();
                    Frame& parent = stack.back();
                    touch_arm(parent, t.span.end);
                    parent.prev_value = true;
                    if (popped.derived_in_from) parent.last_table_ref = -1;
                    if (popped.cte_body) {
                        parent.cte = CteState::none;
                        parent.cte_wait_comma = true;
                        parent.prev_value = false;
                    }
                    if (popped.kind == FrameKind::cte_columns) {
                        parent.cte = CteState::after_name;
                        parent.prev_value = false;
                    }
                    break;
                }
                case TokenKind::comma:
                    if (f.cte_wait_comma) {
                        f.cte_wait_comma = false;
                        f.cte = CteState::expect_name;
                    } else if (f.clause == Clause::from) {
                        f.from_expect = true;
                        f.last_table_ref = -1;
                    } else if (f.clause == Clause::select && f.arm >= 0) {
                        ++out_.arms[f.arm].items;
                    }
                    f.prev_value = false;
                    f.alias_next = false;
                    break;
                case TokenKind::star:
                    if (f.clause == Clause::select && !f.prev_value && f.arm >= 0) {
                        out_.arms[f.arm].star = true;
                        f.prev_value = true;
                    } else {
                        f.prev_value = false;
                    }
                    break;
                case TokenKind::op:
                    if (t.text == "::") f.type_next = true;
                    f.prev_value = false;
                    break;
                case TokenKind::dot:
                case TokenKind::semicolon: f.prev_value = false; break;
            }
        }
    }

    void on_keyword(Frame& f, const Token& t, int& from_counter) {
        const std::string& k = t.text;
        if (k == "SELECT") {
            f.clause = Clause::select;
            f.from_expect = false;
            SelectArm arm;
            arm.group = f.group;
            arm.items = 1;
            arm.span = t.span;
            out_.arms.push_back(arm);
            f.arm = static_cast<int>(out_.arms.size()) - 1;
            f.prev_value = false;
        } else if (k == "FROM") {
            if (f.kind != FrameKind::function) {
                f.clause = Clause::from;
                f.from_expect = true;
                f.from_clause = ++from_counter;
                f.last_table_ref = -1;
            }
            f.prev_value = false;
        } else if (k == "JOIN") {
            f.clause = Clause::from;
            f.from_expect = true;
            f.last_table_ref = -1;
            f.prev_value = false;
        } else if (k == "ON") {
            f.clause = Clause::on;
            f.prev_value = false;
        } else if (k == "USING") {
            f.clause = Clause::using_;
            f.prev_value = false;
        } else if (k == "WHERE") {
            f.clause = Clause::where;
            f.prev_value = false;
        } else if (k == "GROUP") {
            f.clause = Clause::group_by;
            f.prev_value = false;
        } else if (k == "HAVING") {
            f.clause = Clause::having;
            f.prev_value = false;
        } else if (k == "ORDER") {
            f.clause = Clause::order_by;
            f.prev_value = false;
        } else if (k == "LIMIT" || k == "OFFSET" || k == "FETCH") {
            f.clause = Clause::limit;
            f.prev_value = false;
        } else if (k == "WINDOW") {
            f.clause = Clause::other;
            f.prev_value = false;
        } else if (k == "UNION" || k == "INTERSECT" || k == "EXCEPT") {
            if (k == "UNION") out_.has_union = true;
            f.arm = -1;
            f.clause = Clause::none;
            f.prev_value = false;
        } else if (k == "WITH") {
            out_.has_cte = true;
            f.cte = CteState::expect_name;
            f.prev_value = false;
        } else if (k == "AS") {
            if (f.kind == FrameKind::function)
                f.type_next = true;
            else if (f.cte == CteState::after_name)
                f.cte = CteState::after_as;
            else
                f.alias_next = true;
        } else if (k == "END" || k == "NULL" || k == "TRUE" || k == "FALSE") {
            f.prev_value = true;
        } else if (k == "OVER") {
            f.window_name_next = true;
            f.prev_value = false;
        } else {
            f.prev_value = false;
        }
    }

    // Returns the index of the last token consumed.
    std::size_t on_name(Frame& f, std::size_t i, bool was_first, std::string& pending_function,
                        bool& pending_type_args) {
        std::vector<const Token*> parts{&toks_[i]};
        std::size_t j = i;
        while (j + 2 < toks_.size() + 0 && toks_[j + 1].kind == TokenKind::dot &&
               (toks_[j + 2].is_name() || toks_[j + 2].kind == TokenKind::star)) {
            parts.push_back(&toks_[j + 2]);
            j += 2;
            if (parts.back()->kind == TokenKind::star) break;
        }
        const Span span{toks_[i].span.begin, toks_[j].span.end};
        touch_arm(f, span.end);
        const Token* next = j + 1 < toks_.size() ? &toks_[j + 1] : nullptr;
        const std::string lname = to_lower(parts.back()->text);

        if (f.type_next) {
            f.type_next = false;
            f.prev_value = true;
            if (next && next->kind == TokenKind::lparen) pending_type_args = true;
            return j;
        }
        if (f.kind == FrameKind::type_args) return j;
        if (f.window_name_next) {
            f.window_name_next = false;
            f.prev_value = true;
            return j;
        }
        if (f.cte == CteState::expect_name) {
            out_.cte_names.insert(lname);
            f.cte = CteState::after_name;
            return j;
        }
        if (f.kind == FrameKind::cte_columns) {
            out_.output_aliases.insert(lname);
            return j;
        }
        if (next && next->kind == TokenKind::lparen && parts.back()->kind != TokenKind::star) {
            FunctionCall call;
            call.name = lname;
            call.name_span = span;
            call.call_span = {span.begin, toks_[match_[j + 1]].span.end};
            out_.calls.push_back(call);
            out_.called_functions.insert(lname);
            pending_function = lname;
            f.prev_value = false;
            return j;
        }
        if (f.kind == FrameKind::function && was_first && f.function == "extract") return j;
        if (parts.back()->kind == TokenKind::star) {
            if (f.clause == Clause::select && f.arm >= 0) out_.arms[f.arm].star = true;
            f.prev_value = true;
            return j;
        }
        if (f.alias_next) {
            f.alias_next = false;
            add_alias(f, lname);
            return j;
        }
        if (f.clause == Clause::from && f.from_expect) {
            TableRef ref;
            ref.name = lname;
            ref.span = span;
            ref.from_clause = f.from_clause;
            out_.table_refs.push_back(ref);
            out_.referenced_tables.insert(lname);
            f.last_table_ref = static_cast<int>(out_.table_refs.size()) - 1;
            f.from_expect = false;
            f.prev_value = true;
            return j;
        }
        if (f.prev_value && (f.clause == Clause::select || f.clause == Clause::from)) {
            add_alias(f, lname);
            return j;
        }
        ColumnRef col;
        col.name = lname;
        if (parts.size() >= 2) col.qualifier = to_lower(parts[parts.size() - 2]->text);
        col.span = span;
        out_.referenced_columns.insert({col.qualifier, col.name});
        out_.column_refs.push_back(std::move(col));
        f.prev_value = true;
        return j;
    }

    void scan_category_literals() {
        auto is_category = [&](std::size_t k) {
            return toks_[k].is_name() && iequals(toks_[k].text, "category_name");
        };
        for (std::size_t k = 0; k < toks_.size(); ++k) {
            if (!is_category(k)) continue;
            if (k + 2 < toks_.size() && toks_[k + 1].kind == TokenKind::op &&
                toks_[k + 1].text == "=" && toks_[k + 2].kind == TokenKind::string) {
                out_.category_literals.push_back({toks_[k + 2].text, toks_[k + 2].span});
            }
            if (k + 2 < toks_.size() && toks_[k + 1].is_keyword("IN") &&
                toks_[k + 2].kind == TokenKind::lparen) {
                for (std::size_t m = k + 3; m < toks_.size() && toks_[m].kind != TokenKind::rparen; ++m)
                    if (toks_[m].kind == TokenKind::string)
                        out_.category_literals.push_back({toks_[m].text, toks_[m].span});
            }
            if (k >= 2 && toks_[k - 1].kind == TokenKind::op && toks_[k - 1].text == "=" &&
                toks_[k - 2].kind == TokenKind::string) {
                out_.category_literals.push_back({toks_[k - 2].text, toks_[k - 2].span});
            }
        }
    }

    std::string_view sql_;
    std::vector<Token> toks_;
    std::vector<int> match_;
    Span unbalanced_span_;
    StatementSummary out_;
};

}  // namespace

StatementSummary parse_statement(std::string_view sql) {
    auto lexed = tokenize(sql);
    if (!lexed.error.empty()) {
        StatementSummary s;
        s.kind = StatementKind::other;
        s.diagnostics.push_back(r1("unparseable SQL: " + lexed.error, lexed.error_span));
        return s;
    }
    return Parser(sql, std::move(lexed.tokens)).run();
}

}  // namespace geoagent::sqlguard
