/*
 * Copyright (c) 2026, The mallterm Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
*/
#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "core.hpp"

namespace mallterm {

class ParseError : public Error {
  public:
    ParseError(const std::string& msg, SourceSpan span)
        : Error("ParseError at " + std::to_string(span.line) + ":" + std::to_string(span.column) + ": " + msg),
          span_(span), message_(msg) {}
    const SourceSpan& span() const { return span_; }
    const std::string& message() const { return message_; }

  private:
    SourceSpan span_;
    std::string message_;
};

enum class Syntax : std::uint8_t { Term, Prog };

namespace surface_detail {

enum class Tok : std::uint8_t { Ident, Number, Sym, End };

struct Token {
    Tok kind;
    std::string text;
    SourceSpan span;
};

inline std::vector<Token> lex(std::string_view src, std::size_t first_line = 1) {
    std::vector<Token> out;
    std::size_t i = 0, line = first_line, col = 1;
    auto span_at = [&](std::size_t start, std::size_t c, std::size_t len) { return SourceSpan{line, c, start, len}; };
    static const char* twos[] = {"==", "=>", "|-", "->"};
    while (i < src.size()) {
        char c = src[i];
        if (c == '\n') {
            ++line;
            col = 1;
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            ++col;
            continue;
        }
        if (c == '#') {
            while (i < src.size() && src[i] != '\n') ++i;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '\''))
                ++j;
            out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), span_at(i, col, j - i)});
            col += j - i;
            i = j;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            out.push_back({Tok::Number, std::string(src.substr(i, j - i)), span_at(i, col, j - i)});
            col += j - i;
            i = j;
            continue;
        }
        bool two = false;
        for (auto* t : twos)
            if (src.substr(i, 2) == t) {
                out.push_back({Tok::Sym, t, span_at(i, col, 2)});
                i += 2;
                col += 2;
                two = true;
                break;
            }
        if (two) continue;
        if (std::string_view("{}[]()<>,;:.|*%=").find(c) != std::string_view::npos) {
            out.push_back({Tok::Sym, std::string(1, c), span_at(i, col, 1)});
            ++i;
            ++col;
            continue;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", span_at(i, col, 1));
    }
    out.push_back({Tok::End, "", SourceSpan{line, col, src.size(), 0}});
    return out;
}

inline bool is_keyword(const std::string& s) {
    static const char* kws[] = {"input", "on", "of", "output", "in", "split", "as", "fork", "with",
                                "plug", "to", "stop", "close", "end", "cut", "top", "bot"};
    for (auto* k : kws)
        if (s == k) return true;
    return false;
}

struct RawFormula {
    Connective conn = Connective::Atom;
    std::string atom;
    std::vector<std::pair<std::string, RawFormula>> parts;  // label may be empty for implicit names
};

inline Formula finish(const RawFormula& r, const std::string& parent) {
    if (r.conn == Connective::Atom) return Formula::atom(r.atom);
    std::vector<Labeled> ps;
    bool mult = is_multiplicative(r.conn);
    for (std::size_t i = 0; i < r.parts.size(); ++i) {
        auto& [lab, sub] = r.parts[i];
        std::string name = mult ? (lab.empty() ? parent + "_" + std::to_string(i + 1) : lab) : lab;
        ps.push_back({name, finish(sub, mult ? name : parent + "_" + lab)});
    }
    return Formula::make(r.conn, std::move(ps));
}

class Parser {
  public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    bool at_sym(const char* s, std::size_t k = 0) const { return peek(k).kind == Tok::Sym && peek(k).text == s; }
    bool at_word(const char* s, std::size_t k = 0) const { return peek(k).kind == Tok::Ident && peek(k).text == s; }
    bool at_end() const { return peek().kind == Tok::End; }
    const Token& next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
    [[noreturn]] void fail(const std::string& msg) const {
        auto& t = peek();
        throw ParseError(msg + (t.kind == Tok::End ? " (found end of input)" : " (found '" + t.text + "')"), t.span);
    }
    void expect_sym(const char* s) {
        if (!at_sym(s)) fail(std::string("expected '") + s + "'");
        ++pos_;
    }
    void expect_word(const char* s) {
        if (!at_word(s)) fail(std::string("expected '") + s + "'");
        ++pos_;
    }
    bool accept_sym(const char* s) {
        if (!at_sym(s)) return false;
        ++pos_;
        return true;
    }
    std::string ident() {
        if (peek().kind != Tok::Ident) fail("expected identifier");
        return next().text;
    }
    void expect_end() {
        if (!at_end()) fail("unexpected trailing input");
    }

    // ------------------------------------------------------------ formulas

    RawFormula raw_formula() {
        RawFormula first = primary();
        if (!at_sym("*") && !at_sym("%")) return first;
        std::string op = peek().text;
        RawFormula r;
        r.conn = op == "*" ? Connective::Tensor : Connective::Par;
        r.parts.push_back({"", std::move(first)});
        while (at_sym("*") || at_sym("%")) {
            if (peek().text != op) fail("mixed '*' and '%' need parentheses");
            next();
            r.parts.push_back({"", primary()});
        }
        return r;
    }

    RawFormula primary() {
        RawFormula r;
        if (peek().kind == Tok::Number) {
            auto t = next();
            if (t.text == "0") r.conn = Connective::Sum;
            else if (t.text == "1") r.conn = Connective::Prod;
            else throw ParseError("unknown constant '" + t.text + "'", t.span);
            return r;
        }
        if (at_word("top") || at_word("bot")) {
            r.conn = next().text == "top" ? Connective::Tensor : Connective::Par;
            return r;
        }
        if (peek().kind == Tok::Ident) {
            r.atom = next().text;
            return r;
        }
        if (at_sym("{") || at_sym("[")) {
            bool sum = next().text == "{";
            const char* close = sum ? "}" : "]";
            r.conn = sum ? Connective::Sum : Connective::Prod;
            if (!at_sym(close)) {
                do {
                    auto span = peek().span;
                    std::string tag = ident();
                    expect_sym(":");
                    for (auto& p : r.parts)
                        if (p.first == tag) throw ParseError("DuplicateTag: '" + tag + "'", span);
                    r.parts.push_back({tag, raw_formula()});
                } while (accept_sym(","));
            }
            expect_sym(close);
            return r;
        }
        if ((at_sym("*") || at_sym("%")) && at_sym("(", 1)) {
            r.conn = next().text == "*" ? Connective::Tensor : Connective::Par;
            next();
            if (!at_sym(")")) {
                do {
                    std::string lab;
                    if (peek().kind == Tok::Ident && at_sym(":", 1)) {
                        lab = next().text;
                        next();
                    }
                    r.parts.push_back({lab, raw_formula()});
                } while (accept_sym(","));
            }
            expect_sym(")");
            return r;
        }
        if (accept_sym("(")) {
            r = raw_formula();
            expect_sym(")");
            return r;
        }
        fail("expected formula");
    }

    Formula formula(const std::string& parent) {
        auto span = peek().span;
        RawFormula r = raw_formula();
        try {
            return finish(r, parent);
        } catch (const StructureError& e) {
            throw ParseError(e.what(), span);
        }
    }

    std::vector<Binding> bindings() {
        std::vector<Binding> out;
        if (peek().kind != Tok::Ident || !at_sym(":", 1)) return out;
        do {
            std::string ch = ident();
            expect_sym(":");
            out.push_back({ch, formula(ch)});
        } while (accept_sym(","));
        return out;
    }

    Sequent sequent() {
        auto span = peek().span;
        auto d = bindings();
        expect_sym("|-");
        auto c = bindings();
        try {
            return Sequent::validated(std::move(d), std::move(c));
        } catch (const StructureError& e) {
            throw ParseError(e.what(), span);
        }
    }

    // ------------------------------------------------------------ shared

    std::vector<std::string> ident_list(const char* close) {
        std::vector<std::string> out;
        if (at_sym(close)) return out;
        do out.push_back(ident());
        while (accept_sym(","));
        return out;
    }

    Term axiom_call(const std::string& name, SourceSpan span) {
        expect_sym("(");
        std::vector<std::string> ins, outs;
        if (!at_sym(";") && !at_sym(")")) {
            do ins.push_back(ident());
            while (accept_sym(","));
        }
        expect_sym(";");
        if (!at_sym(")")) {
            do outs.push_back(ident());
            while (accept_sym(","));
        }
        expect_sym(")");
        return Term::axiom(name, std::move(ins), std::move(outs)).with_span(span);
    }

    std::optional<Sequent> annotation() {
        if (!accept_sym(":")) return std::nullopt;
        auto d = bindings();
        expect_sym("|-");
        auto c = bindings();
        return Sequent(std::move(d), std::move(c));
    }

    // ------------------------------------------------------------ term calculus

    Term term() {
        auto span = peek().span;
        if (accept_sym("(")) {
            Term t = term();
            expect_sym(")");
            return t;
        }
        if (at_word("cut") && peek(1).kind == Tok::Ident) {
            next();
            std::string c = ident();
            std::optional<Formula> ty;
            if (accept_sym(":")) ty = formula(c);
            expect_sym("(");
            Term l = term();
            expect_sym(",");
            Term r = term();
            expect_sym(")");
            return Term::cut(c, l, r, ty).with_span(span);
        }
        std::string a = ident();
        if (accept_sym("==") || accept_sym("=")) return Term::id(a, ident()).with_span(span);
        if (at_sym("(")) return axiom_call(a, span);
        if (accept_sym("{")) {
            std::vector<Branch> bs;
            std::optional<Sequent> ctx;
            if (at_sym(":")) {
                ctx = annotation();
            } else if (!at_sym("}")) {
                do {
                    std::string tag = ident();
                    expect_sym("=>");
                    bs.push_back({tag, term()});
                } while (accept_sym("|"));
            }
            expect_sym("}");
            check_tags(bs, span);
            return Term::case_of(a, std::move(bs), std::move(ctx)).with_span(span);
        }
        if (accept_sym("[")) {
            std::string tag = ident();
            expect_sym("]");
            expect_sym(".");
            return Term::select(a, tag, term()).with_span(span);
        }
        if (accept_sym("<")) {
            if (accept_sym(">")) return Term::fork(a, {}).with_span(span);
            if (accept_sym("(")) {
                auto parts = ident_list(")");
                expect_sym(")");
                expect_sym("=>");
                Term body = term();
                expect_sym(">");
                return Term::split(a, std::move(parts), body).with_span(span);
            }
            std::vector<Arm> arms;
            do {
                std::string part = ident();
                expect_sym("|");
                expect_sym("{");
                auto owns = ident_list("}");
                expect_sym("}");
                expect_sym("=>");
                arms.push_back({part, std::move(owns), term()});
            } while (accept_sym(";"));
            expect_sym(">");
            return Term::fork(a, std::move(arms)).with_span(span);
        }
        fail("expected term");
    }

    static void check_tags(const std::vector<Branch>& bs, SourceSpan span) {
        std::set<std::string> seen;
        for (auto& b : bs)
            if (!seen.insert(b.tag).second) throw ParseError("DuplicateTag: '" + b.tag + "'", span);
    }

    // ------------------------------------------------------------ process syntax

    bool starts_keyword(const char* kw) const {
        return at_word(kw) && !at_sym("==", 1) && !at_sym("=", 1) && !at_sym("(", 1);
    }

    Term prog() {
        auto span = peek().span;
        if (accept_sym("(")) {
            Term t = prog();
            expect_sym(")");
            return t;
        }
        if (starts_keyword("input")) {
            next();
            if (at_word("on") && at_word("of", 2)) next();
            std::string a = ident();
            expect_word("of");
            std::vector<Branch> bs;
            do {
                expect_sym("|");
                std::string tag = ident();
                expect_sym("=>");
                bs.push_back({tag, prog()});
            } while (at_sym("|"));
            check_tags(bs, span);
            return Term::case_of(a, std::move(bs)).with_span(span);
        }
        if (starts_keyword("output")) {
            next();
            std::string tag = ident();
            expect_word("on");
            std::string a = ident();
            expect_word("in");
            return Term::select(a, tag, prog()).with_span(span);
        }
        if (starts_keyword("split")) {
            next();
            std::string a = ident();
            expect_word("as");
            std::vector<std::string> parts;
            do parts.push_back(ident());
            while (accept_sym(","));
            expect_word("in");
            return Term::split(a, std::move(parts), prog()).with_span(span);
        }
        if (starts_keyword("close")) {
            next();
            std::string a = ident();
            expect_word("in");
            return Term::split(a, {}, prog()).with_span(span);
        }
        if (starts_keyword("fork")) {
            next();
            std::string a = ident();
            expect_word("as");
            std::vector<Arm> arms;
            do {
                expect_sym("|");
                std::string part = ident();
                expect_word("with");
                expect_sym("{");
                auto owns = ident_list("}");
                expect_sym("}");
                if (!accept_sym("=>")) expect_word("in");
                arms.push_back({part, std::move(owns), prog()});
            } while (at_sym("|"));
            return Term::fork(a, std::move(arms)).with_span(span);
        }
        if (starts_keyword("end")) {
            next();
            return Term::fork(ident(), {}).with_span(span);
        }
        if (starts_keyword("stop")) {
            next();
            std::string a = ident();
            auto ctx = annotation();
            return Term::case_of(a, {}, std::move(ctx)).with_span(span);
        }
        if (starts_keyword("on")) {
            next();
            std::string c = ident();
            std::optional<Formula> ty;
            if (accept_sym(":")) ty = formula(c);
            expect_word("plug");
            Term l = prog();
            expect_word("to");
            Term r = prog();
            return Term::cut(c, l, r, ty).with_span(span);
        }
        std::string a = ident();
        if (accept_sym("==") || accept_sym("=")) return Term::id(a, ident()).with_span(span);
        if (at_sym("(")) return axiom_call(a, span);
        fail("expected process");
    }

  private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

inline std::string join(const std::vector<std::string>& v, const char* sep = ", ") {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
    return s;
}

inline std::string annotation_str(const Sequent& s) {
    std::string out = s.str();
    return out;
}

inline void print_term(const Term& t, std::string& out, bool below_cut) {
    std::visit(
        [&](auto& n) {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, IdNode>) {
                out += n.left + " == " + n.right;
            } else if constexpr (std::is_same_v<N, AxiomNode>) {
                out += n.name + "(" + join(n.ins) + "; " + join(n.outs) + ")";
            } else if constexpr (std::is_same_v<N, CaseNode>) {
                if (n.branches.empty()) {
                    out += n.chan + "{";
                    const Sequent* ctx = n.ctx ? &*n.ctx : nullptr;
                    if (below_cut && ctx) out += " : " + annotation_str(*ctx) + " ";
                    out += "}";
                    return;
                }
                out += n.chan + "{ ";
                for (std::size_t i = 0; i < n.branches.size(); ++i) {
                    if (i) out += " | ";
                    out += n.branches[i].tag + " => ";
                    print_term(n.branches[i].body, out, below_cut);
                }
                out += " }";
            } else if constexpr (std::is_same_v<N, SelectNode>) {
                out += n.chan + "[" + n.tag + "]. ";
                print_term(n.body, out, below_cut);
            } else if constexpr (std::is_same_v<N, SplitNode>) {
                out += n.chan + "<(" + join(n.parts) + ") => ";
                print_term(n.body, out, below_cut);
                out += ">";
            } else if constexpr (std::is_same_v<N, ForkNode>) {
                if (n.arms.empty()) {
                    out += n.chan + "<>";
                    return;
                }
                out += n.chan + "< ";
                for (std::size_t i = 0; i < n.arms.size(); ++i) {
                    if (i) out += " ; ";
                    out += n.arms[i].part + " | {" + join(n.arms[i].owns) + "} => ";
                    print_term(n.arms[i].body, out, below_cut);
                }
                out += " >";
            } else {
                out += "cut " + n.chan;
                if (n.type) out += " : " + n.type->str();
                out += " (";
                print_term(n.left, out, true);
                out += ", ";
                print_term(n.right, out, true);
                out += ")";
            }
        },
        t.rep().node);
}

// Does the printed process end in a branch or arm list that would absorb a following `|`?
inline bool open_tail(const Term& t) {
    switch (t.kind()) {
    case TermKind::Case: return !t.as<CaseNode>().branches.empty();
    case TermKind::Fork: return !t.as<ForkNode>().arms.empty();
    case TermKind::Select: return open_tail(t.as<SelectNode>().body);
    case TermKind::Split: return open_tail(t.as<SplitNode>().body);
    case TermKind::Cut: return open_tail(t.as<CutNode>().right);
    default: return false;
    }
}

inline void print_prog(const Term& t, std::string& out, bool below_cut) {
    auto body = [&](const Term& b, bool last) {
        bool paren = !last && open_tail(b);
        if (paren) out += "(";
        print_prog(b, out, below_cut);
        if (paren) out += ")";
    };
    std::visit(
        [&](auto& n) {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, IdNode>) {
                out += n.left + " == " + n.right;
            } else if constexpr (std::is_same_v<N, AxiomNode>) {
                out += n.name + "(" + join(n.ins) + "; " + join(n.outs) + ")";
            } else if constexpr (std::is_same_v<N, CaseNode>) {
                if (n.branches.empty()) {
                    out += "stop " + n.chan;
                    if (below_cut && n.ctx) out += " : " + annotation_str(*n.ctx);
                    return;
                }
                out += "input on " + n.chan + " of";
                for (std::size_t i = 0; i < n.branches.size(); ++i) {
                    out += " | " + n.branches[i].tag + " => ";
                    body(n.branches[i].body, i + 1 == n.branches.size());
                }
            } else if constexpr (std::is_same_v<N, SelectNode>) {
                out += "output " + n.tag + " on " + n.chan + " in ";
                print_prog(n.body, out, below_cut);
            } else if constexpr (std::is_same_v<N, SplitNode>) {
                if (n.parts.empty())
                    out += "close " + n.chan + " in ";
                else
                    out += "split " + n.chan + " as " + join(n.parts) + " in ";
                print_prog(n.body, out, below_cut);
            } else if constexpr (std::is_same_v<N, ForkNode>) {
                if (n.arms.empty()) {
                    out += "end " + n.chan;
                    return;
                }
                out += "fork " + n.chan + " as";
                for (std::size_t i = 0; i < n.arms.size(); ++i) {
                    out += " | " + n.arms[i].part + " with {" + join(n.arms[i].owns) + "} => ";
                    body(n.arms[i].body, i + 1 == n.arms.size());
                }
            } else {
                out += "on " + n.chan;
                if (n.type) out += " : " + n.type->str();
                out += " plug ";
                bool lp = n.left.kind() == TermKind::Cut;
                if (lp) out += "(";
                print_prog(n.left, out, true);
                if (lp) out += ")";
                out += " to ";
                print_prog(n.right, out, true);
            }
        },
        t.rep().node);
}

}  // namespace surface_detail

inline Formula parse_formula(std::string_view src, const std::string& channel = "x") {
    surface_detail::Parser p(surface_detail::lex(src));
    Formula f = p.formula(channel);
    p.expect_end();
    return f;
}

inline Sequent parse_sequent(std::string_view src) {
    surface_detail::Parser p(surface_detail::lex(src));
    Sequent s = p.sequent();
    p.expect_end();
    return s;
}

inline Term parse_term(std::string_view src, std::size_t first_line = 1) {
    surface_detail::Parser p(surface_detail::lex(src, first_line));
    Term t = p.term();
    p.expect_end();
    return t;
}

inline Term parse_prog(std::string_view src, std::size_t first_line = 1) {
    surface_detail::Parser p(surface_detail::lex(src, first_line));
    Term t = p.prog();
    p.expect_end();
    return t;
}

// Guesses the syntax from the first token.
inline Syntax detect_syntax(std::string_view src) {
    auto toks = surface_detail::lex(src);
    static const char* kws[] = {"input", "output", "split", "fork", "on", "stop", "close", "end"};
    if (toks.size() > 1 && toks[0].kind == surface_detail::Tok::Ident) {
        bool ident_use = toks[1].kind == surface_detail::Tok::Sym &&
                         (toks[1].text == "==" || toks[1].text == "=" || toks[1].text == "(");
        for (auto* k : kws)
            if (toks[0].text == k && !ident_use) return Syntax::Prog;
    }
    if (toks.size() > 1 && toks[0].kind == surface_detail::Tok::Sym && toks[0].text == "(") {
        for (auto& t : toks)
            if (t.kind == surface_detail::Tok::Ident) {
                for (auto* k : kws)
                    if (t.text == k) return Syntax::Prog;
                break;
            }
    }
    return Syntax::Term;
}

inline Term parse(std::string_view src, Syntax syntax, std::size_t first_line = 1) {
    return syntax == Syntax::Prog ? parse_prog(src, first_line) : parse_term(src, first_line);
}

inline std::string print_term(const Term& t) {
    std::string out;
    surface_detail::print_term(t, out, false);
    return out;
}

inline std::string print_prog(const Term& t) {
    std::string out;
    surface_detail::print_prog(t, out, false);
    return out;
}

inline std::string print(const Term& t, Syntax syntax) {
    return syntax == Syntax::Prog ? print_prog(t) : print_term(t);
}

inline std::string print_formula(const Formula& f) { return f.str(); }
inline std::string print_sequent(const Sequent& s) { return s.str(); }

struct PairedFile {
    Sequent sequent;
    Term term;
    Syntax syntax;
};

// Sequent lines, a line holding only `---`, then the term. Without a separator the whole text is a term.
inline PairedFile parse_paired(std::string_view src, std::optional<Syntax> syntax = std::nullopt) {
    std::size_t pos = 0, line = 1, sep = std::string_view::npos, sep_line = 0;
    while (pos <= src.size()) {
        std::size_t nl = src.find('\n', pos);
        std::string_view l = src.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        std::size_t a = l.find_first_not_of(" \t\r"), b = l.find_last_not_of(" \t\r");
        if (a != std::string_view::npos && l.substr(a, b - a + 1) == "---") {
            sep = pos;
            sep_line = line;
            break;
        }
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
        ++line;
    }
    if (sep == std::string_view::npos) throw ParseError("missing '---' separator between sequent and term", {1, 1, 0, 0});
    std::string_view head = src.substr(0, sep);
    std::size_t body_start = src.find('\n', sep);
    std::string_view body = body_start == std::string_view::npos ? std::string_view() : src.substr(body_start + 1);
    surface_detail::Parser p(surface_detail::lex(head));
    Sequent s = p.sequent();
    p.expect_end();
    Syntax syn = syntax ? *syntax : detect_syntax(body);
    Term t = parse(body, syn, sep_line + 1);
    return {s, t, syn};
}

inline std::string print_paired(const Sequent& s, const Term& t, Syntax syntax) {
    return s.str() + "\n---\n" + print(t, syntax) + "\n";
}

// Lines `atom A` and `axiom f : A, B -> C, D`.
inline Signature parse_signature(std::string_view src) {
    Signature sig;
    std::size_t pos = 0, line = 1;
    while (pos <= src.size()) {
        std::size_t nl = src.find('\n', pos);
        std::string_view l = src.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        surface_detail::Parser p(surface_detail::lex(l, line));
        if (!p.at_end()) {
            if (p.at_word("atom")) {
                p.next();
                do sig.add_atom(p.ident());
                while (p.accept_sym(","));
                p.expect_end();
            } else if (p.at_word("axiom")) {
                p.next();
                auto span = p.peek().span;
                AxiomDecl d;
                d.name = p.ident();
                p.expect_sym(":");
                std::size_t k = 0;
                auto side = [&](std::vector<Formula>& out) {
                    if (p.at_sym("->") || p.at_end()) return;
                    do out.push_back(p.formula(d.name + "_" + std::to_string(++k)));
                    while (p.accept_sym(","));
                };
                side(d.ins);
                p.expect_sym("->");
                side(d.outs);
                p.expect_end();
                try {
                    sig.add_axiom(std::move(d));
                } catch (const StructureError& e) {
                    throw ParseError(e.what(), span);
                }
            } else {
                p.fail("expected 'atom' or 'axiom'");
            }
        }
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
        ++line;
    }
    return sig;
}

inline std::string print_signature(const Signature& sig) {
    std::string out;
    for (auto& a : sig.atoms()) out += "atom " + a + "\n";
    for (auto* d : sig.axioms()) {
        std::vector<std::string> ins, outs;
        for (auto& f : d->ins) ins.push_back(f.str());
        for (auto& f : d->outs) outs.push_back(f.str());
        out += "axiom " + d->name + " : " + surface_detail::join(ins) + (ins.empty() ? "" : " ") + "-> " +
               surface_detail::join(outs) + "\n";
    }
    return out;
}

}  // namespace mallterm
