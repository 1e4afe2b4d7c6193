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

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "checker.hpp"
#include "core.hpp"
#include "enumerate.hpp"
#include "rewriter.hpp"
#include "surface.hpp"

namespace mallterm {

enum class Direction : std::uint8_t { Forward, Backward };

struct Conversion {
    Path path;
    RuleId rule;
    Direction direction = Direction::Forward;
    std::string empty;   // empty index sets: "", "I", "J" or "IJ"
    std::string target;  // channel brought above an empty case
    std::string tag;
    std::size_t arm = 0;
    std::size_t choice = 0;  // which invented side arms
    bool inventive = false;

    std::string shape() const { return "(" + std::to_string(rule.number) + ")" + empty; }

    std::string str() const {
        std::string s = shape() + (direction == Direction::Forward ? " fwd" : " bwd") + " at " + path_str(path);
        if (!target.empty()) s += " to " + target;
        if (!tag.empty()) s += " [" + tag + "]";
        if (arm) s += " arm " + std::to_string(arm);
        if (inventive) s += " choice " + std::to_string(choice);
        return s;
    }
    friend bool operator==(const Conversion& a, const Conversion& b) { return a.str() == b.str(); }
};

class EquivError : public Error {
  public:
    using Error::Error;
};

namespace equiv_detail {

enum class Role : std::uint8_t { None, Case, Select, Split, Fork };

inline Role role_of(const Sequent& s, const std::string& c) {
    auto e = s.lookup(c);
    if (!e) return Role::None;
    bool dom = e->side == Side::Domain;
    switch (e->formula->connective()) {
    case Connective::Atom: return Role::None;
    case Connective::Sum: return dom ? Role::Case : Role::Select;
    case Connective::Prod: return dom ? Role::Select : Role::Case;
    case Connective::Tensor: return dom ? Role::Split : Role::Fork;
    case Connective::Par: return dom ? Role::Fork : Role::Split;
    }
    return Role::None;
}

inline std::size_t owner(const ForkNode& f, const std::string& c) {
    for (std::size_t i = 0; i < f.arms.size(); ++i)
        if (std::find(f.arms[i].owns.begin(), f.arms[i].owns.end(), c) != f.arms[i].owns.end()) return i;
    return f.arms.size();
}

inline bool contains(const std::vector<std::string>& v, const std::string& c) {
    return std::find(v.begin(), v.end(), c) != v.end();
}

// Alpha-invariant structural key. Case branches are unordered; cut clusters are keyed as
// wiring trees, minimised over the choice of root.
class KeyBuilder {
  public:
    std::string key(const Term& t, int level) {
        return std::visit(
            [&](auto& n) -> std::string {
                using N = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<N, IdNode>) {
                    return name(n.left) + "==" + name(n.right);
                } else if constexpr (std::is_same_v<N, AxiomNode>) {
                    std::string s = n.name + "(";
                    for (auto& c : n.ins) s += name(c) + ",";
                    s += ";";
                    for (auto& c : n.outs) s += name(c) + ",";
                    return s + ")";
                } else if constexpr (std::is_same_v<N, CaseNode>) {
                    std::vector<const Branch*> bs;
                    for (auto& b : n.branches) bs.push_back(&b);
                    std::sort(bs.begin(), bs.end(), [](auto* a, auto* b) { return a->tag < b->tag; });
                    std::string s = name(n.chan) + "{";
                    if (bs.empty()) {
                        const Sequent* ctx = t.sequent() ? t.sequent() : n.ctx ? &*n.ctx : nullptr;
                        if (ctx) s += absorbed(*ctx, n.chan);
                    }
                    for (auto* b : bs) s += b->tag + ":" + key(b->body, level) + "|";
                    return s + "}";
                } else if constexpr (std::is_same_v<N, SelectNode>) {
                    return name(n.chan) + "[" + n.tag + "]." + key(n.body, level);
                } else if constexpr (std::is_same_v<N, SplitNode>) {
                    std::string s = name(n.chan) + "<(";
                    std::vector<std::pair<std::string, std::optional<std::string>>> saved;
                    int l = level;
                    for (auto& p : n.parts) {
                        saved.push_back(bind(p, "#" + std::to_string(l++)));
                        s += env_[p] + ",";
                    }
                    s += ")=>" + key(n.body, l) + ">";
                    for (auto it = saved.rbegin(); it != saved.rend(); ++it) unbind(*it);
                    return s;
                } else if constexpr (std::is_same_v<N, ForkNode>) {
                    std::string s = name(n.chan) + "<";
                    for (auto& a : n.arms) {
                        auto saved = bind(a.part, "#" + std::to_string(level));
                        s += "#" + std::to_string(level) + "=>" + key(a.body, level + 1) + ";";
                        unbind(saved);
                    }
                    return s + ">";
                } else {
                    return cluster(t, level);
                }
            },
            t.rep().node);
    }

    std::pair<std::string, std::optional<std::string>> bind(const std::string& c, std::string token) {
        std::optional<std::string> old;
        if (auto it = env_.find(c); it != env_.end()) old = it->second;
        env_[c] = std::move(token);
        return {c, old};
    }
    void unbind(const std::pair<std::string, std::optional<std::string>>& s) {
        if (s.second) env_[s.first] = *s.second;
        else env_.erase(s.first);
    }

  private:
    std::string name(const std::string& c) {
        auto it = env_.find(c);
        if (it == env_.end()) return c;
        if (it->second.empty()) {
            it->second = "#e" + std::to_string(cut_level_) + "_" + std::to_string(counter_++);
            assigned_.push_back(c);
        }
        return it->second;
    }

    // The context swallowed by an empty case; it fixes which side of a fork or cut owns what.
    std::string absorbed(const Sequent& ctx, const std::string& self) {
        std::vector<std::string> names;
        for (auto& b : ctx.domain())
            if (b.channel != self) names.push_back(b.channel);
        for (auto& b : ctx.codomain())
            if (b.channel != self) names.push_back(b.channel);
        std::sort(names.begin(), names.end());
        std::vector<std::string> keys;
        for (auto& c : names) keys.push_back(name(c));
        std::sort(keys.begin(), keys.end());
        std::string s = "@";
        for (auto& k : keys) s += k + ",";
        return s;
    }

    static void flatten(const Term& t, std::vector<const Term*>& leaves, std::vector<std::string>& cuts) {
        if (auto* c = t.get<CutNode>()) {
            cuts.push_back(c->chan);
            flatten(c->left, leaves, cuts);
            flatten(c->right, leaves, cuts);
        } else {
            leaves.push_back(&t);
        }
    }

    static bool uses(const Term& t, const std::string& c) {
        if (auto* s = t.sequent()) return s->contains(c);
        return t.has_free(c);
    }

    std::string cluster(const Term& t, int level) {
        std::vector<const Term*> leaves;
        std::vector<std::string> cuts;
        flatten(t, leaves, cuts);
        std::map<std::string, std::vector<std::size_t>> inc;
        for (auto& c : cuts)
            for (std::size_t i = 0; i < leaves.size(); ++i)
                if (uses(*leaves[i], c)) inc[c].push_back(i);
        auto outer_assigned = std::move(assigned_);
        auto outer_counter = counter_;
        auto outer_level = cut_level_;
        std::string best;
        bool have = false;
        for (std::size_t root = 0; root < leaves.size(); ++root) {
            std::vector<std::pair<std::string, std::optional<std::string>>> saved;
            for (auto& c : cuts) saved.push_back(bind(c, ""));
            assigned_.clear();
            counter_ = 0;
            cut_level_ = level;
            std::vector<bool> seen(leaves.size());
            std::string s;
            auto visit = [&](auto& self, std::size_t i) -> void {
                seen[i] = true;
                std::size_t before = assigned_.size();
                s += "(" + key(*leaves[i], level + 1) + ")";
                std::vector<std::string> fresh(assigned_.begin() + static_cast<std::ptrdiff_t>(before), assigned_.end());
                for (auto& c : fresh) {
                    auto it = inc.find(c);
                    if (it == inc.end()) continue;
                    for (auto j : it->second)
                        if (!seen[j]) {
                            s += "[" + env_[c] + "]";
                            self(self, j);
                        }
                }
            };
            visit(visit, root);
            for (std::size_t i = 0; i < leaves.size(); ++i)
                if (!seen[i]) visit(visit, i);
            if (!have || s < best) best = s, have = true;
            for (auto it = saved.rbegin(); it != saved.rend(); ++it) unbind(*it);
        }
        assigned_ = std::move(outer_assigned);
        counter_ = outer_counter;
        cut_level_ = outer_level;
        return "cut{" + best + "}";
    }

    std::map<std::string, std::string> env_;
    std::vector<std::string> assigned_;
    std::size_t counter_ = 0;
    int cut_level_ = 0;
};

struct Local {
    Conversion conv;
    Term result;
};

class Generator {
  public:
    Generator(std::set<std::string> used, ProofEnumerator* inventor) : used_(std::move(used)), inventor_(inventor) {}

    std::vector<Local> at(const Term& x) {
        out_.clear();
        x_ = &x;
        switch (x.kind()) {
        case TermKind::Case: from_case(x.as<CaseNode>()); break;
        case TermKind::Select: from_select(x.as<SelectNode>()); break;
        case TermKind::Split: from_split(x.as<SplitNode>()); break;
        case TermKind::Fork: from_fork(x.as<ForkNode>()); break;
        default: break;
        }
        return std::move(out_);
    }

  private:
    const Sequent& ctx() const { return *x_->sequent(); }

    Local& emit(int rule, Direction d, std::string empty, Term result) {
        RuleVariant v = RuleVariant::Standard;
        if (!empty.empty()) v = rule <= 18 ? RuleVariant::NullaryCase : RuleVariant::NullarySplit;
        Conversion c;
        c.rule = {rule, v, rewriter_detail::orient(*x_)};
        c.direction = d;
        c.empty = std::move(empty);
        out_.push_back({std::move(c), std::move(result)});
        return out_.back();
    }

    std::string fresh() { return fresh_name("r", used_); }

    Term empty_case(const std::string& a, Sequent s) { return Term::case_of(a, {}, std::move(s)); }

    void from_case(const CaseNode& n) {
        const std::string& a = n.chan;
        if (n.branches.empty()) return from_empty_case(a);
        const Term& first = n.branches[0].body;
        const std::string& b = first.chan();
        TermKind k = first.kind();
        if (b.empty() || b == a || !rewriter_detail::is_constructor(k)) return;
        for (auto& br : n.branches)
            if (br.body.kind() != k || br.body.chan() != b) return;
        switch (k) {
        case TermKind::Case: {
            auto& inner = first.as<CaseNode>();
            if (inner.branches.empty()) {
                emit(15, Direction::Forward, "J", empty_case(b, ctx()));
                return;
            }
            std::vector<Branch> outer;
            for (auto& ib : inner.branches) {
                std::vector<Branch> col;
                for (auto& br : n.branches) {
                    auto& bs = br.body.as<CaseNode>().branches;
                    auto it = std::find_if(bs.begin(), bs.end(), [&](auto& x) { return x.tag == ib.tag; });
                    if (it == bs.end()) return;
                    col.push_back({br.tag, it->body});
                }
                outer.push_back({ib.tag, Term::case_of(a, std::move(col))});
            }
            emit(15, Direction::Forward, "", Term::case_of(b, std::move(outer)));
            return;
        }
        case TermKind::Select: {
            const std::string& tag = first.as<SelectNode>().tag;
            std::vector<Branch> col;
            for (auto& br : n.branches) {
                auto& s = br.body.as<SelectNode>();
                if (s.tag != tag) return;
                col.push_back({br.tag, s.body});
            }
            emit(16, Direction::Forward, "", Term::select(b, tag, Term::case_of(a, std::move(col))));
            return;
        }
        case TermKind::Split: {
            std::size_t m = first.as<SplitNode>().parts.size();
            std::vector<std::string> r;
            for (std::size_t j = 0; j < m; ++j) r.push_back(fresh());
            std::vector<Branch> col;
            for (auto& br : n.branches) {
                auto& s = br.body.as<SplitNode>();
                std::map<std::string, std::string> ren;
                for (std::size_t j = 0; j < m; ++j) ren[s.parts[j]] = r[j];
                col.push_back({br.tag, rename_channels(s.body, ren)});
            }
            emit(17, Direction::Forward, m ? "" : "J", Term::split(b, r, Term::case_of(a, std::move(col))));
            return;
        }
        case TermKind::Fork: {
            auto& f0 = first.as<ForkNode>();
            std::size_t arms = f0.arms.size();
            std::size_t k = owner(f0, a);
            if (arms == 0 || k == arms) return;
            KeyBuilder kb;
            auto arm_key = [&](const Arm& arm) {
                auto saved = kb.bind(arm.part, "#arm");
                std::string s = kb.key(arm.body, 0);
                kb.unbind(saved);
                return s;
            };
            std::vector<std::string> keys;
            for (std::size_t j = 0; j < arms; ++j) keys.push_back(j == k ? "" : arm_key(f0.arms[j]));
            for (auto& br : n.branches) {
                auto& f = br.body.as<ForkNode>();
                if (f.arms.size() != arms || owner(f, a) != k) return;
                for (std::size_t j = 0; j < arms; ++j)
                    if (j != k && (f.arms[j].owns != f0.arms[j].owns || arm_key(f.arms[j]) != keys[j])) return;
            }
            std::string r = fresh();
            std::vector<Branch> col;
            for (auto& br : n.branches) {
                auto& arm = br.body.as<ForkNode>().arms[k];
                col.push_back({br.tag, rename_channels(arm.body, {{arm.part, r}})});
            }
            std::vector<Arm> out = f0.arms;
            out[k] = {r, f0.arms[k].owns, Term::case_of(a, std::move(col))};
            emit(18, Direction::Forward, "", Term::fork(b, std::move(out))).conv.arm = k;
            return;
        }
        default: return;
        }
    }

    void from_empty_case(const std::string& a) {
        const Sequent& s = ctx();
        for (auto& b : s.channels()) {
            if (b == a) continue;
            auto e = *s.lookup(b);
            const Formula& y = *e.formula;
            switch (role_of(s, b)) {
            case Role::None: break;
            case Role::Case: {
                if (y.arity() == 0) {
                    emit(15, Direction::Forward, "IJ", empty_case(b, s)).conv.target = b;
                    break;
                }
                std::vector<Branch> bs;
                for (auto& p : y.parts()) bs.push_back({p.label, empty_case(a, s.retyped(b, p.formula))});
                emit(15, Direction::Forward, "I", Term::case_of(b, std::move(bs))).conv.target = b;
                break;
            }
            case Role::Select:
                for (auto& p : y.parts()) {
                    auto& l = emit(16, Direction::Forward, "I", Term::select(b, p.label, empty_case(a, s.retyped(b, p.formula))));
                    l.conv.target = b;
                    l.conv.tag = p.label;
                }
                break;
            case Role::Split: {
                std::vector<std::string> r;
                Sequent inner = s.without(b);
                for (auto& p : y.parts()) {
                    r.push_back(fresh());
                    inner = inner.with(e.side, r.back(), p.formula);
                }
                emit(17, Direction::Forward, y.arity() ? "I" : "IJ", Term::split(b, r, empty_case(a, inner))).conv.target = b;
                break;
            }
            case Role::Fork:
                if (inventor_ && y.arity() > 0) invent_fork(a, b, e.side, y);
                break;
            }
        }
    }

    // Conversions that must invent the side arms of a fork out of nothing.
    void invent_fork(const std::string& a, const std::string& b, Side side, const Formula& y) {
        const Sequent& s = ctx();
        std::size_t m = y.arity();
        std::vector<std::string> r;
        for (std::size_t j = 0; j < m; ++j) r.push_back(fresh());
        std::vector<std::string> rest;
        for (auto& c : s.channels())
            if (c != a && c != b) rest.push_back(c);
        std::size_t choice = 0;
        for (std::size_t k = 0; k < m; ++k) {
            std::vector<std::size_t> assign(rest.size(), 0);
            for (;;) {
                std::vector<std::vector<std::string>> owns(m);
                for (std::size_t i = 0; i < rest.size(); ++i) owns[assign[i]].push_back(rest[i]);
                owns[k].push_back(a);
                std::vector<const std::vector<Term>*> subs(m, nullptr);
                bool ok = true;
                for (std::size_t j = 0; j < m && ok; ++j) {
                    if (j == k) continue;
                    subs[j] = &inventor_->proofs(s.restricted(owns[j]).with(side, r[j], y.parts()[j].formula));
                    ok = !subs[j]->empty();
                }
                if (ok) {
                    Term own = empty_case(a, s.restricted(owns[k]).with(side, r[k], y.parts()[k].formula));
                    std::vector<std::size_t> idx(m, 0);
                    for (;;) {
                        std::vector<Arm> arms;
                        for (std::size_t j = 0; j < m; ++j) {
                            std::vector<std::string> o = owns[j];
                            std::sort(o.begin(), o.end());
                            arms.push_back({r[j], o, j == k ? own : (*subs[j])[idx[j]]});
                        }
                        auto& l = emit(18, Direction::Forward, "I", Term::fork(b, std::move(arms)));
                        l.conv.target = b;
                        l.conv.arm = k;
                        l.conv.inventive = true;
                        l.conv.choice = choice++;
                        std::size_t j = 0;
                        while (j < m && (j == k || ++idx[j] == subs[j]->size())) {
                            if (j != k) idx[j] = 0;
                            ++j;
                        }
                        if (j == m) break;
                    }
                }
                std::size_t i = 0;
                while (i < assign.size() && ++assign[i] == m) assign[i++] = 0;
                if (i == assign.size()) break;
            }
        }
    }

    void from_select(const SelectNode& n) {
        const std::string& b = n.chan;
        const Term& body = n.body;
        const std::string& g = body.chan();
        if (g.empty() || g == b) return;
        switch (body.kind()) {
        case TermKind::Case: {
            auto& c = body.as<CaseNode>();
            if (c.branches.empty()) {
                emit(16, Direction::Backward, "I", empty_case(g, ctx()));
                return;
            }
            std::vector<Branch> bs;
            for (auto& br : c.branches) bs.push_back({br.tag, Term::select(b, n.tag, br.body)});
            emit(16, Direction::Backward, "", Term::case_of(g, std::move(bs)));
            return;
        }
        case TermKind::Select: {
            auto& s = body.as<SelectNode>();
            emit(19, Direction::Forward, "", Term::select(g, s.tag, Term::select(b, n.tag, s.body)));
            return;
        }
        case TermKind::Split: {
            auto& s = body.as<SplitNode>();
            emit(20, Direction::Forward, s.parts.empty() ? "J" : "", Term::split(g, s.parts, Term::select(b, n.tag, s.body)));
            return;
        }
        case TermKind::Fork: {
            auto& f = body.as<ForkNode>();
            std::size_t k = owner(f, b);
            if (k == f.arms.size()) return;
            std::vector<Arm> arms = f.arms;
            arms[k].body = Term::select(b, n.tag, arms[k].body);
            emit(21, Direction::Forward, "", Term::fork(g, std::move(arms))).conv.arm = k;
            return;
        }
        default: return;
        }
    }

    void from_split(const SplitNode& n) {
        const std::string& b = n.chan;
        const Term& body = n.body;
        const std::string& g = body.chan();
        if (g.empty() || g == b || contains(n.parts, g)) return;
        std::string pe = n.parts.empty() ? "J" : "";
        switch (body.kind()) {
        case TermKind::Case: {
            auto& c = body.as<CaseNode>();
            if (c.branches.empty()) {
                emit(17, Direction::Backward, "I" + pe, empty_case(g, ctx()));
                return;
            }
            std::vector<Branch> bs;
            for (auto& br : c.branches) bs.push_back({br.tag, Term::split(b, n.parts, br.body)});
            emit(17, Direction::Backward, pe, Term::case_of(g, std::move(bs)));
            return;
        }
        case TermKind::Select: {
            auto& s = body.as<SelectNode>();
            emit(20, Direction::Backward, pe, Term::select(g, s.tag, Term::split(b, n.parts, s.body)));
            return;
        }
        case TermKind::Split: {
            auto& s = body.as<SplitNode>();
            std::string e = (n.parts.empty() ? "I" : "") + std::string(s.parts.empty() ? "J" : "");
            emit(22, Direction::Forward, e, Term::split(g, s.parts, Term::split(b, n.parts, s.body)));
            return;
        }
        case TermKind::Fork: {
            auto& f = body.as<ForkNode>();
            for (std::size_t k = 0; k < f.arms.size(); ++k) {
                auto& o = f.arms[k].owns;
                bool all = true;
                for (auto& p : n.parts) all = all && contains(o, p);
                if (!all) continue;
                std::vector<std::string> owns{b};
                for (auto& c : o)
                    if (!contains(n.parts, c)) owns.push_back(c);
                std::sort(owns.begin(), owns.end());
                std::vector<Arm> arms = f.arms;
                arms[k] = {arms[k].part, owns, Term::split(b, n.parts, arms[k].body)};
                emit(23, Direction::Forward, n.parts.empty() ? "I" : "", Term::fork(g, std::move(arms))).conv.arm = k;
            }
            return;
        }
        default: return;
        }
    }

    void from_fork(const ForkNode& n) {
        const std::string& b = n.chan;
        for (std::size_t k = 0; k < n.arms.size(); ++k) {
            const Arm& arm = n.arms[k];
            const Term& body = arm.body;
            const std::string& g = body.chan();
            if (g.empty() || !contains(arm.owns, g)) continue;
            auto with_arm = [&](Arm na) {
                std::vector<Arm> arms = n.arms;
                arms[k] = std::move(na);
                return Term::fork(b, std::move(arms));
            };
            switch (body.kind()) {
            case TermKind::Case: {
                auto& c = body.as<CaseNode>();
                if (c.branches.empty()) {
                    emit(18, Direction::Backward, "I", empty_case(g, ctx())).conv.arm = k;
                    break;
                }
                std::vector<Branch> bs;
                for (auto& br : c.branches) bs.push_back({br.tag, with_arm({arm.part, arm.owns, br.body})});
                emit(18, Direction::Backward, "", Term::case_of(g, std::move(bs))).conv.arm = k;
                break;
            }
            case TermKind::Select: {
                auto& s = body.as<SelectNode>();
                emit(21, Direction::Backward, "", Term::select(g, s.tag, with_arm({arm.part, arm.owns, s.body}))).conv.arm = k;
                break;
            }
            case TermKind::Split: {
                auto& s = body.as<SplitNode>();
                std::vector<std::string> owns;
                for (auto& c : arm.owns)
                    if (c != g) owns.push_back(c);
                owns.insert(owns.end(), s.parts.begin(), s.parts.end());
                std::sort(owns.begin(), owns.end());
                emit(23, Direction::Backward, s.parts.empty() ? "I" : "", Term::split(g, s.parts, with_arm({arm.part, owns, s.body})))
                    .conv.arm = k;
                break;
            }
            case TermKind::Fork: {
                auto& inner = body.as<ForkNode>();
                std::size_t k2 = owner(inner, arm.part);
                if (k2 == inner.arms.size()) break;
                const Arm& barm = inner.arms[k2];
                std::set<std::string> hown(barm.owns.begin(), barm.owns.end());
                hown.erase(arm.part);
                std::set<std::string> outer_owns = hown;
                outer_owns.insert(b);
                for (std::size_t i = 0; i < n.arms.size(); ++i)
                    if (i != k) outer_owns.insert(n.arms[i].owns.begin(), n.arms[i].owns.end());
                hown.insert(barm.part);
                Term moved = with_arm({arm.part, {hown.begin(), hown.end()}, barm.body});
                std::vector<Arm> arms = inner.arms;
                arms[k2] = {barm.part, {outer_owns.begin(), outer_owns.end()}, moved};
                emit(24, Direction::Forward, "", Term::fork(g, std::move(arms))).conv.arm = k;
                break;
            }
            default: break;
            }
        }
    }

    std::set<std::string> used_;
    ProofEnumerator* inventor_;
    const Term* x_ = nullptr;
    std::vector<Local> out_;
};

inline std::vector<Local> locals_at(const Term& root, const Path& p, ProofEnumerator* inventor) {
    Generator g(all_channels(root), inventor);
    auto out = g.at(subterm_at(root, p));
    for (auto& l : out) l.conv.path = p;
    return out;
}

}  // namespace equiv_detail

inline std::string structural_key(const Term& t) {
    equiv_detail::KeyBuilder kb;
    return kb.key(t, 0);
}

// All permuting conversions applicable to `t`, preorder. Conversions that invent side arms
// of a fork out of an empty case are listed only when `inventive` is set.
inline std::vector<Conversion> find_conversions(const TypedTerm& t, bool inventive = false) {
    TypedTerm h = hygienic(t);
    std::optional<ProofEnumerator> inv;
    if (inventive) inv.emplace(h.signature());
    std::vector<Conversion> out;
    Path p;
    auto walk = [&](auto& self, const Term& u) -> void {
        for (auto& l : equiv_detail::locals_at(h.term, p, inv ? &*inv : nullptr)) out.push_back(std::move(l.conv));
        for (std::size_t i = 0; i < u.child_count(); ++i) {
            p.push_back(i);
            self(self, u.child(i));
            p.pop_back();
        }
    };
    walk(walk, h.term);
    return out;
}

namespace equiv_detail {

inline TypedTerm apply_with(const TypedTerm& t, const Conversion& c, ProofEnumerator* inv) {
    TypedTerm h = hygienic(t);
    try {
        subterm_at(h.term, c.path);
    } catch (const std::exception&) {
        throw RewriteError(RewriteErrorKind::NotAConversion, "no subterm at " + path_str(c.path));
    }
    for (auto& l : locals_at(h.term, c.path, c.inventive ? inv : nullptr))
        if (l.conv == c) return check(canonicalize(replace_at(h.term, c.path, l.result)), t.sequent, t.sig);
    throw RewriteError(RewriteErrorKind::NotAConversion, c.str());
}

}  // namespace equiv_detail

inline TypedTerm apply_conversion(const TypedTerm& t, const Conversion& c) {
    std::optional<ProofEnumerator> inv;
    if (c.inventive) inv.emplace(t.signature());
    return equiv_detail::apply_with(t, c, inv ? &*inv : nullptr);
}

enum class Verdict : std::uint8_t { Equivalent, Inequivalent, Inconclusive };

inline const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::Equivalent: return "equivalent";
    case Verdict::Inequivalent: return "inequivalent";
    case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

// One link of a certificate chain. Forward: `conversion` applied to the previous term,
// followed by normalization, gives `term`. Reversed: it takes `term` to the previous one.
struct CertStep {
    Conversion conversion;
    bool reversed = false;
    TypedTerm term;
};

struct EquivCertificate {
    Verdict verdict = Verdict::Inconclusive;
    TypedTerm nf1, nf2;
    std::vector<CertStep> chain;
    // Least printed members of each class; differ for a refutation.
    std::string rep1, rep2;
    std::size_t explored = 0;
};

struct ClassReport {
    std::vector<TypedTerm> members;
    bool complete = true;
};

class ConversionSearch {
  public:
    explicit ConversionSearch(const Signature& sig, std::size_t invent_limit = 200000) : inventor_(sig, invent_limit) {}

    // Conversion neighbours, renormalized where a conversion exposes a redex.
    std::vector<std::pair<Conversion, TypedTerm>> neighbours(const TypedTerm& t) {
        std::vector<std::pair<Conversion, TypedTerm>> out;
        TypedTerm h = hygienic(t);
        Path p;
        auto walk = [&](auto& self, const Term& u) -> void {
            for (auto& l : equiv_detail::locals_at(h.term, p, &inventor_)) {
                TypedTerm r = check(canonicalize(replace_at(h.term, p, l.result)), h.sequent, h.sig);
                if (!is_normal(r)) r = normalize(r, 100000, false).first;
                out.emplace_back(std::move(l.conv), std::move(r));
            }
            for (std::size_t i = 0; i < u.child_count(); ++i) {
                p.push_back(i);
                self(self, u.child(i));
                p.pop_back();
            }
        };
        walk(walk, h.term);
        return out;
    }

    ClassReport closure(const TypedTerm& t, std::size_t budget) {
        ClassReport rep;
        std::unordered_map<std::string, bool> seen;
        std::deque<TypedTerm> q;
        seen[structural_key(t.term)] = true;
        q.push_back(t);
        rep.members.push_back(t);
        while (!q.empty()) {
            TypedTerm cur = std::move(q.front());
            q.pop_front();
            for (auto& [c, n] : neighbours(cur)) {
                if (!seen.emplace(structural_key(n.term), true).second) continue;
                if (rep.members.size() >= budget) {
                    rep.complete = false;
                    return rep;
                }
                rep.members.push_back(n);
                q.push_back(std::move(n));
            }
        }
        return rep;
    }

    ProofEnumerator& inventor() { return inventor_; }

  private:
    ProofEnumerator inventor_;
};

// Breadth-first closure of a normal form under conversions.
inline ClassReport equivalence_class(const TypedTerm& t, std::size_t budget = 100000) {
    ConversionSearch s(t.signature());
    try {
        return s.closure(t, budget);
    } catch (const EnumerationLimit&) {
        return {{t}, false};
    }
}

namespace equiv_detail {

inline std::string least_print(const std::vector<const TypedTerm*>& ts) {
    std::string best;
    for (auto* t : ts) {
        std::string s = print_term(canonicalize(t->term));
        if (best.empty() || s < best) best = s;
    }
    return best;
}

}  // namespace equiv_detail

inline EquivCertificate decide(const TypedTerm& t1, const TypedTerm& t2, std::size_t budget = 100000) {
    if (t1.sequent != t2.sequent)
        throw EquivError("SequentMismatch: " + t1.sequent.str() + " vs " + t2.sequent.str());
    EquivCertificate cert{Verdict::Inconclusive, normalize(t1, 100000, false).first, normalize(t2, 100000, false).first, {}, "", "", 0};
    struct Node {
        TypedTerm term;
        std::string parent;
        Conversion conv;
    };
    std::unordered_map<std::string, Node> seen[2];
    std::deque<std::string> queue[2];
    std::string k1 = structural_key(cert.nf1.term), k2 = structural_key(cert.nf2.term);
    seen[0].emplace(k1, Node{cert.nf1, "", {}});
    seen[1].emplace(k2, Node{cert.nf2, "", {}});
    queue[0].push_back(k1);
    queue[1].push_back(k2);
    std::optional<std::string> meet;
    if (k1 == k2) meet = k1;
    ConversionSearch search(t1.signature());
    bool exhausted[2] = {false, false};
    try {
        while (!meet && !exhausted[0] && !exhausted[1]) {
            if (seen[0].size() + seen[1].size() > budget) break;
            int s = queue[0].size() <= queue[1].size() ? 0 : 1;
            std::string cur = queue[s].front();
            queue[s].pop_front();
            TypedTerm ct = seen[s].at(cur).term;
            for (auto& [c, n] : search.neighbours(ct)) {
                std::string k = structural_key(n.term);
                if (seen[s].count(k)) continue;
                seen[s].emplace(k, Node{std::move(n), cur, c});
                if (seen[1 - s].count(k)) {
                    meet = k;
                    break;
                }
                queue[s].push_back(k);
            }
            if (queue[s].empty() && !meet) exhausted[s] = true;
        }
        // One class is complete: finish the other, which either meets it or yields a refutation
        // naming the least member of each class.
        if (!meet && (exhausted[0] || exhausted[1])) {
            int o = exhausted[0] ? 1 : 0;
            while (!meet && !queue[o].empty() && seen[0].size() + seen[1].size() <= budget) {
                std::string cur = queue[o].front();
                queue[o].pop_front();
                TypedTerm ct = seen[o].at(cur).term;
                for (auto& [c, n] : search.neighbours(ct)) {
                    std::string k = structural_key(n.term);
                    if (seen[o].count(k)) continue;
                    seen[o].emplace(k, Node{std::move(n), cur, c});
                    if (seen[1 - o].count(k)) {
                        meet = k;
                        break;
                    }
                    queue[o].push_back(k);
                }
            }
            if (!meet && queue[o].empty()) exhausted[o] = true;
        }
    } catch (const EnumerationLimit&) {
        cert.verdict = Verdict::Inconclusive;
        cert.explored = seen[0].size() + seen[1].size();
        return cert;
    }
    cert.explored = seen[0].size() + seen[1].size();
    if (meet) {
        cert.verdict = Verdict::Equivalent;
        std::vector<CertStep> head;
        for (std::string k = *meet; !seen[0].at(k).parent.empty(); k = seen[0].at(k).parent)
            head.push_back({seen[0].at(k).conv, false, seen[0].at(k).term});
        std::reverse(head.begin(), head.end());
        cert.chain = std::move(head);
        for (std::string k = *meet; !seen[1].at(k).parent.empty(); k = seen[1].at(k).parent) {
            auto& node = seen[1].at(k);
            cert.chain.push_back({node.conv, true, seen[1].at(node.parent).term});
        }
        std::string r = equiv_detail::least_print({&seen[0].at(*meet).term});
        cert.rep1 = cert.rep2 = r;
        return cert;
    }
    std::vector<const TypedTerm*> c1, c2;
    for (auto& [k, n] : seen[0]) c1.push_back(&n.term);
    for (auto& [k, n] : seen[1]) c2.push_back(&n.term);
    cert.rep1 = equiv_detail::least_print(c1);
    cert.rep2 = equiv_detail::least_print(c2);
    cert.verdict = exhausted[0] || exhausted[1] ? Verdict::Inequivalent : Verdict::Inconclusive;
    return cert;
}

// Replays a chain: each step must hold, and the chain must join the two normal forms.
inline bool verify_certificate(const EquivCertificate& c) {
    if (c.verdict != Verdict::Equivalent) return c.verdict == Verdict::Inequivalent && c.rep1 != c.rep2;
    auto step = [&](const TypedTerm& from, const Conversion& conv) {
        TypedTerm r = apply_conversion(from, conv);
        if (!is_normal(r)) r = normalize(r, 100000, false).first;
        return structural_key(r.term);
    };
    try {
        TypedTerm cur = c.nf1;
        for (auto& s : c.chain) {
            if (s.reversed) {
                if (step(s.term, s.conversion) != structural_key(cur.term)) return false;
            } else if (step(cur, s.conversion) != structural_key(s.term.term)) {
                return false;
            }
            cur = s.term;
        }
        return structural_key(cur.term) == structural_key(c.nf2.term);
    } catch (const Error&) {
        return false;
    }
}

inline bool equivalent(const TypedTerm& a, const TypedTerm& b, std::size_t budget = 100000) {
    return decide(a, b, budget).verdict == Verdict::Equivalent;
}

}  // namespace mallterm
