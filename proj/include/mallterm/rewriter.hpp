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

#include <string>
#include <vector>

#include "checker.hpp"
#include "core.hpp"
#include "measure.hpp"

namespace mallterm {

enum class RuleVariant : std::uint8_t { Standard, NullaryCase, NullarySplit, NullaryFork };
enum class Orientation : std::uint8_t { Left, Right };

struct RuleId {
    int number = 0;
    RuleVariant variant = RuleVariant::Standard;
    Orientation orientation = Orientation::Left;

    std::string str() const {
        std::string s = "(" + std::to_string(number) + ")";
        if (orientation == Orientation::Right) s += "'";
        switch (variant) {
        case RuleVariant::Standard: break;
        case RuleVariant::NullaryCase: s += "/case0"; break;
        case RuleVariant::NullarySplit: s += "/split0"; break;
        case RuleVariant::NullaryFork: s += "/fork0"; break;
        }
        return s;
    }
    friend bool operator==(const RuleId& a, const RuleId& b) {
        return a.number == b.number && a.variant == b.variant && a.orientation == b.orientation;
    }
};

struct Redex {
    Path path;
    RuleId rule;
};

enum class RewriteErrorKind : std::uint8_t { NotARedex, StepBudgetExceeded, NotAConversion };

class RewriteError : public Error {
  public:
    RewriteError(RewriteErrorKind kind, const std::string& detail)
        : Error(std::string(kind == RewriteErrorKind::NotARedex            ? "NotARedex"
                            : kind == RewriteErrorKind::StepBudgetExceeded ? "StepBudgetExceeded"
                                                                           : "NotAConversion") +
                ": " + detail),
          kind_(kind) {}
    RewriteErrorKind kind() const { return kind_; }

  private:
    RewriteErrorKind kind_;
};

namespace rewriter_detail {

inline Orientation orient(const Term& t) {
    auto* d = t.decoration();
    return d && d->side == Side::Codomain ? Orientation::Right : Orientation::Left;
}

inline RuleVariant variant_of(const Term& t) {
    if (t.kind() == TermKind::Split)
        return t.as<SplitNode>().parts.empty() ? RuleVariant::NullarySplit : RuleVariant::Standard;
    if (t.child_count() > 0) return RuleVariant::Standard;
    switch (t.kind()) {
    case TermKind::Case: return RuleVariant::NullaryCase;
    case TermKind::Split: return RuleVariant::NullarySplit;
    case TermKind::Fork: return RuleVariant::NullaryFork;
    default: return RuleVariant::Standard;
    }
}

inline bool is_constructor(TermKind k) {
    return k == TermKind::Case || k == TermKind::Select || k == TermKind::Split || k == TermKind::Fork;
}

// The subterm of `t` holding `c`, looking through cuts.
inline const Term& owner_through_cuts(const Term& t, const std::string& c) {
    const Term* u = &t;
    while (auto* n = u->get<CutNode>()) u = n->left.has_free(c) ? &n->left : &n->right;
    return *u;
}

inline std::vector<RuleId> rules_at(const Term& x);

inline bool no_redex(const Term& t) {
    if (!rules_at(t).empty()) return false;
    for (std::size_t i = 0; i < t.child_count(); ++i)
        if (!no_redex(t.child(i))) return false;
    return true;
}

// A cut whose side is a stuck cut hides the term that holds the cut channel. When that term
// is not an axiom, the cut is re-bracketed towards it (0 = left side, 1 = right side, -1 = none).
inline int rebracket_side(const Term& x) {
    auto& c = x.as<CutNode>();
    for (int s = 0; s < 2; ++s) {
        const Term& side = s == 0 ? c.left : c.right;
        if (side.kind() == TermKind::Cut && owner_through_cuts(side, c.chan).kind() != TermKind::Axiom && no_redex(side))
            return s;
    }
    return -1;
}

// Rules that fire at a cut node, lowest number first. Rule 0 re-brackets a cut that no
// numbered rule reaches; it is offered only when nothing else fires there.
inline std::vector<RuleId> rules_at(const Term& x) {
    std::vector<RuleId> out;
    auto* c = x.get<CutNode>();
    if (!c) return out;
    const Term& l = c->left;
    const Term& r = c->right;
    const std::string& g = c->chan;
    if (auto* id = r.get<IdNode>(); id && id->left == g) out.push_back({1});
    if (auto* id = l.get<IdNode>(); id && id->right == g) out.push_back({2});
    auto commuting = [&](const Term& side, int base) {
        if (!is_constructor(side.kind()) || side.chan() == g) return;
        int off = side.kind() == TermKind::Case ? 0 : side.kind() == TermKind::Select ? 2 : side.kind() == TermKind::Split ? 4 : 6;
        out.push_back({base + off, variant_of(side), orient(side)});
    };
    commuting(l, 3);
    commuting(r, 4);
    if (is_constructor(l.kind()) && is_constructor(r.kind()) && l.chan() == g && r.chan() == g) {
        if (l.kind() == TermKind::Select && r.kind() == TermKind::Case) out.push_back({11});
        if (l.kind() == TermKind::Case && r.kind() == TermKind::Select) out.push_back({12});
        if (l.kind() == TermKind::Fork && r.kind() == TermKind::Split) out.push_back({13, variant_of(l)});
        if (l.kind() == TermKind::Split && r.kind() == TermKind::Fork) out.push_back({14, variant_of(r)});
    }
    std::stable_sort(out.begin(), out.end(), [](auto& a, auto& b) { return a.number < b.number; });
    if (out.empty() && rebracket_side(x) >= 0) out.push_back({0});
    return out;
}

inline std::vector<std::string> merged_owns(const std::vector<std::string>& owns, const std::vector<std::string>& extra,
                                            const std::string& drop) {
    std::set<std::string> s(owns.begin(), owns.end());
    s.insert(extra.begin(), extra.end());
    s.erase(drop);
    return {s.begin(), s.end()};
}

// The subterm that replaces cut node `x` under `rule`.
inline Term contract(const Term& x, const RuleId& rule) {
    auto& c = x.as<CutNode>();
    const Term& l = c.left;
    const Term& r = c.right;
    const std::string& g = c.chan;
    const Formula& z = *c.type;
    auto cut = [&](Term a, Term b) { return Term::cut(g, std::move(a), std::move(b), z); };
    switch (rule.number) {
    case 0: {
        int s = rebracket_side(x);
        if (s < 0) break;
        auto& inner = (s == 0 ? l : r).as<CutNode>();
        const Formula& w = *inner.type;
        const std::string& d = inner.chan;
        if (s == 0) {
            if (inner.right.has_free(g)) return Term::cut(d, inner.left, cut(inner.right, r), w);
            return Term::cut(d, cut(inner.left, r), inner.right, w);
        }
        if (inner.left.has_free(g)) return Term::cut(d, cut(l, inner.left), inner.right, w);
        return Term::cut(d, inner.left, cut(l, inner.right), w);
    }
    case 1: return substitute_free(l, g, r.as<IdNode>().right);
    case 2: return substitute_free(r, g, l.as<IdNode>().left);
    case 3:
    case 4: {
        const Term& side = rule.number == 3 ? l : r;
        auto& n = side.as<CaseNode>();
        if (n.branches.empty()) return Term::case_of(n.chan, {}, *x.sequent());
        std::vector<Branch> bs;
        for (auto& b : n.branches) bs.push_back({b.tag, rule.number == 3 ? cut(b.body, r) : cut(l, b.body)});
        return Term::case_of(n.chan, std::move(bs));
    }
    case 5: return Term::select(l.chan(), l.as<SelectNode>().tag, cut(l.as<SelectNode>().body, r));
    case 6: return Term::select(r.chan(), r.as<SelectNode>().tag, cut(l, r.as<SelectNode>().body));
    case 7: return Term::split(l.chan(), l.as<SplitNode>().parts, cut(l.as<SplitNode>().body, r));
    case 8: return Term::split(r.chan(), r.as<SplitNode>().parts, cut(l, r.as<SplitNode>().body));
    case 9:
    case 10: {
        const Term& side = rule.number == 9 ? l : r;
        const Term& other = rule.number == 9 ? r : l;
        auto arms = side.as<ForkNode>().arms;
        for (auto& a : arms)
            if (std::binary_search(a.owns.begin(), a.owns.end(), g)) {
                a.owns = merged_owns(a.owns, other.interface(), g);
                a.body = rule.number == 9 ? cut(a.body, r) : cut(l, a.body);
            }
        return Term::fork(side.chan(), std::move(arms));
    }
    case 11: {
        auto& s = l.as<SelectNode>();
        for (auto& b : r.as<CaseNode>().branches)
            if (b.tag == s.tag) return Term::cut(g, s.body, b.body, *z.component(s.tag));
        break;
    }
    case 12: {
        auto& s = r.as<SelectNode>();
        for (auto& b : l.as<CaseNode>().branches)
            if (b.tag == s.tag) return Term::cut(g, b.body, s.body, *z.component(s.tag));
        break;
    }
    case 13:
    case 14: {
        auto& fk = (rule.number == 13 ? l : r).as<ForkNode>();
        auto& sp = (rule.number == 13 ? r : l).as<SplitNode>();
        std::set<std::string> used = all_channels(x);
        std::vector<std::string> fresh;
        std::map<std::string, std::string> ren;
        for (std::size_t i = 0; i < sp.parts.size(); ++i) {
            fresh.push_back(fresh_name(sp.parts[i] + "_", used));
            ren[sp.parts[i]] = fresh.back();
        }
        Term acc = map_channels(sp.body, [&](const std::string& ch) {
            auto it = ren.find(ch);
            return it == ren.end() ? ch : it->second;
        });
        std::size_t n = fk.arms.size();
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t i = rule.number == 13 ? k : n - 1 - k;
            Term f = substitute_free(fk.arms[i].body, fk.arms[i].part, fresh[i]);
            const Formula& zi = z.parts()[i].formula;
            acc = rule.number == 13 ? Term::cut(fresh[i], f, acc, zi) : Term::cut(fresh[i], acc, f, zi);
        }
        return acc;
    }
    default: break;
    }
    throw RewriteError(RewriteErrorKind::NotARedex, "rule " + rule.str());
}

// Postorder position: descendants first, then left to right.
inline bool postorder_before(const Path& a, const Path& b) {
    std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i)
        if (a[i] != b[i]) return a[i] < b[i];
    return a.size() > b.size();
}

}  // namespace rewriter_detail

inline std::vector<Redex> find_redexes(const TypedTerm& t) {
    std::vector<Redex> out;
    Path p;
    auto walk = [&](auto& self, const Term& u) -> void {
        for (auto& r : rewriter_detail::rules_at(u)) out.push_back({p, r});
        for (std::size_t i = 0; i < u.child_count(); ++i) {
            p.push_back(i);
            self(self, u.child(i));
            p.pop_back();
        }
    };
    walk(walk, t.term);
    return out;
}

inline bool is_normal(const TypedTerm& t) {
    auto walk = [&](auto& self, const Term& u) -> bool {
        if (!rewriter_detail::rules_at(u).empty()) return false;
        for (std::size_t i = 0; i < u.child_count(); ++i)
            if (!self(self, u.child(i))) return false;
        return true;
    };
    return walk(walk, t.term);
}

// Re-decorates `t` with canonical binders so that rewrites cannot capture.
inline TypedTerm hygienic(const TypedTerm& t) {
    if (is_hygienic(t.term) && t.term.decoration()) return t;
    return check(canonicalize(t.term), t.sequent, t.sig);
}

inline TypedTerm apply(const TypedTerm& t, const Redex& r) {
    TypedTerm h = hygienic(t);
    const Term* x = nullptr;
    try {
        x = &subterm_at(h.term, r.path);
    } catch (const std::exception&) {
        throw RewriteError(RewriteErrorKind::NotARedex, "no subterm at " + path_str(r.path));
    }
    auto rules = rewriter_detail::rules_at(*x);
    bool ok = false;
    for (auto& q : rules) ok = ok || q.number == r.rule.number;
    if (!ok) throw RewriteError(RewriteErrorKind::NotARedex, r.rule.str() + " at " + path_str(r.path));
    Term repl = rewriter_detail::contract(*x, r.rule);
    Term next = canonicalize(replace_at(h.term, r.path, repl));
    return check(next, t.sequent, t.sig);
}

struct TraceStep {
    Redex redex;
    TypedTerm result;
    CutBag before, after;
};

struct Trace {
    std::vector<TraceStep> steps;
};

// Leftmost-innermost redex, lowest rule number on ties.
inline std::optional<Redex> choose_redex(const std::vector<Redex>& rs) {
    if (rs.empty()) return std::nullopt;
    const Redex* best = &rs[0];
    for (auto& r : rs)
        if (rewriter_detail::postorder_before(r.path, best->path) ||
            (r.path == best->path && r.rule.number < best->rule.number))
            best = &r;
    return *best;
}

inline std::pair<TypedTerm, Trace> normalize(const TypedTerm& t, std::size_t max_steps = 100000, bool record = true) {
    Trace trace;
    TypedTerm cur = t;
    CutBag bag = cut_bag(cur.term);
    for (std::size_t step = 0;; ++step) {
        auto r = choose_redex(find_redexes(cur));
        if (!r) return {cur, std::move(trace)};
        if (step == max_steps)
            throw RewriteError(RewriteErrorKind::StepBudgetExceeded, "no normal form within " + std::to_string(max_steps) + " steps");
        TypedTerm next = apply(cur, *r);
        CutBag nb = cut_bag(next.term);
        if (record) trace.steps.push_back({*r, next, bag, nb});
        cur = std::move(next);
        bag = std::move(nb);
    }
}

}  // namespace mallterm
