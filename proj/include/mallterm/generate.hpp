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
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "checker.hpp"
#include "core.hpp"
#include "enumerate.hpp"

namespace mallterm {

// Every formula of size <= max_size over `atoms`, connective arity <= max_arity.
// Additive tags are a, b, c, ...; multiplicative labels derive from `root`.
inline std::vector<Formula> enumerate_formulas(const std::vector<std::string>& atoms, std::size_t max_size,
                                               std::size_t max_arity = 2, const std::string& root = "x") {
    std::vector<std::vector<Formula>> by_size(max_size + 1);
    if (max_size == 0) return {};
    for (auto& a : atoms) by_size[1].push_back(Formula::atom(a));
    for (auto c : {Connective::Sum, Connective::Prod, Connective::Tensor, Connective::Par})
        by_size[1].push_back(Formula::make(c, {}));
    for (std::size_t n = 2; n <= max_size; ++n)
        for (auto c : {Connective::Sum, Connective::Prod, Connective::Tensor, Connective::Par})
            for (std::size_t k = 1; k <= max_arity; ++k) {
                // Compositions of n - 1 into k positive sizes.
                std::vector<std::size_t> sizes(k, 1);
                auto fill = [&](auto& self, std::size_t i, std::size_t left, std::vector<Labeled>& acc) -> void {
                    if (i == k) {
                        if (left == 0) {
                            std::vector<Labeled> ps = acc;
                            for (std::size_t j = 0; j < ps.size(); ++j) ps[j].label = std::string(1, char('a' + j));
                            Formula f = is_multiplicative(c) ? Formula::make(c, {}) : Formula::make(c, ps);
                            if (is_multiplicative(c)) {
                                std::vector<Formula> fs;
                                for (auto& p : ps) fs.push_back(p.formula);
                                f = c == Connective::Tensor ? Formula::tensor_of(fs, root) : Formula::par_of(fs, root);
                            }
                            by_size[n].push_back(f);
                        }
                        return;
                    }
                    for (std::size_t s = 1; s <= left; ++s)
                        for (auto& g : by_size[s]) {
                            acc.push_back({"x", g});
                            self(self, i + 1, left - s, acc);
                            acc.pop_back();
                        }
                };
                std::vector<Labeled> acc;
                fill(fill, 0, n - 1, acc);
            }
    std::vector<Formula> out;
    for (auto& v : by_size) out.insert(out.end(), v.begin(), v.end());
    return out;
}

// Sequents built from `pool` with total subformula count <= max_count and at most
// max_width channels. Channels are named a, b, c, ... domain first; each multiset once.
inline std::vector<Sequent> enumerate_sequents(const std::vector<Formula>& pool, std::size_t max_count, std::size_t max_width,
                                               std::size_t min_width = 1) {
    std::vector<Sequent> out;
    std::vector<std::pair<Side, std::size_t>> pick;
    auto emit = [&]() {
        std::vector<Binding> d, c;
        for (std::size_t i = 0; i < pick.size(); ++i) {
            std::string name(1, char('a' + i));
            Formula f = pool[pick[i].second].relabeled(name);
            (pick[i].first == Side::Domain ? d : c).push_back({name, f});
        }
        out.push_back(Sequent(std::move(d), std::move(c)));
    };
    auto go = [&](auto& self, std::size_t used) -> void {
        if (pick.size() >= min_width) emit();
        if (pick.size() == max_width) return;
        for (Side s : {Side::Domain, Side::Codomain}) {
            if (!pick.empty() && s == Side::Domain && pick.back().first == Side::Codomain) continue;
            std::size_t from = !pick.empty() && pick.back().first == s ? pick.back().second : 0;
            for (std::size_t i = from; i < pool.size(); ++i) {
                if (used + pool[i].size() > max_count) continue;
                pick.push_back({s, i});
                self(self, used + pool[i].size());
                pick.pop_back();
            }
        }
    };
    go(go, 0);
    return out;
}

struct CorpusOptions {
    // Bound on the subformula counts of both premises together, the cut formula counted twice.
    std::size_t total = 8;
    std::size_t max_formula = 3;
    // Channels per premise, the cut channel included.
    std::size_t max_width = 3;
    std::size_t max_arity = 2;
    bool unary = true;
    std::vector<std::string> atoms{"A"};
};

inline bool has_unary(const Formula& f) {
    if (f.arity() == 1) return true;
    for (auto& p : f.parts())
        if (has_unary(p.formula)) return true;
    return false;
}

// Every single cut `p ;x q` of cut-free proofs whose premises fit the bounds. The two contexts
// use disjoint channel names: a, b, ... on the left, and letters from the max_width-th on the right.
template <class F> void for_each_cut(const CorpusOptions& o, std::shared_ptr<const Signature> sig, F&& visit) {
    if (!sig) sig = std::make_shared<const Signature>();
    auto pool = enumerate_formulas(o.atoms, o.max_formula, o.max_arity);
    if (!o.unary) std::erase_if(pool, [](const Formula& f) { return has_unary(f); });
    ProofEnumerator en(*sig, std::size_t(-1));
    for (auto& x : pool) {
        if (2 * x.size() > o.total) continue;
        std::size_t rest = o.total - 2 * x.size();
        auto ctx = enumerate_sequents(pool, rest, o.max_width - 1, 0);
        std::vector<std::vector<TypedTerm>> left(ctx.size()), right(ctx.size());
        for (std::size_t i = 0; i < ctx.size(); ++i) {
            Sequent l = ctx[i].with(Side::Codomain, "x", x.relabeled("x"));
            for (auto& t : en.proofs(l)) left[i].push_back(check(canonicalize(t), l, sig));
            std::map<std::string, std::string> shift;
            for (auto& c : ctx[i].channels()) shift[c] = std::string(1, char(c[0] + o.max_width));
            Sequent r = ctx[i].with(Side::Domain, "x", x.relabeled("x"));
            for (auto& t : en.proofs(r)) {
                std::vector<Binding> d, c;
                for (auto& b : r.domain()) d.push_back({b.channel == "x" ? "x" : shift[b.channel], b.formula});
                for (auto& b : r.codomain()) c.push_back({shift[b.channel], b.formula});
                // Bound names are c<n>, disjoint from the single letters.
                right[i].push_back(check(rename_channels(canonicalize(t), shift), Sequent(d, c), sig));
            }
        }
        for (std::size_t i = 0; i < ctx.size(); ++i)
            for (std::size_t j = 0; j < ctx.size(); ++j) {
                if (ctx[i].subformula_count() + ctx[j].subformula_count() > rest) continue;
                for (auto& p : left[i])
                    for (auto& q : right[j]) {
                        TypedTerm c = compose(p, q, "x");
                        visit(check(canonicalize(c.term), c.sequent, sig));
                    }
            }
    }
}

inline std::vector<TypedTerm> cut_corpus(const CorpusOptions& o, std::shared_ptr<const Signature> sig = nullptr) {
    std::vector<TypedTerm> out;
    for_each_cut(o, std::move(sig), [&](TypedTerm t) { out.push_back(std::move(t)); });
    return out;
}

struct GeneratorOptions {
    std::size_t max_depth = 6;
    std::size_t max_branch = 3;
    std::size_t max_formula = 4;
    std::vector<std::string> atoms{"A", "B"};
};

// Random well-typed terms. A term is grown from a seed (identity, axiom, unit) by wrapping
// constructors around its channels and composing it with other grown terms.
class RandomTerms {
  public:
    RandomTerms(std::uint64_t seed, std::shared_ptr<const Signature> sig = nullptr, GeneratorOptions opt = {})
        : rng_(seed), sig_(sig ? std::move(sig) : std::make_shared<const Signature>()), opt_(std::move(opt)) {
        for (auto& a : sig_->atoms())
            if (std::find(opt_.atoms.begin(), opt_.atoms.end(), a) == opt_.atoms.end()) opt_.atoms.push_back(a);
    }

    std::mt19937_64& rng() { return rng_; }
    const std::shared_ptr<const Signature>& signature() const { return sig_; }

    std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
    bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

    Formula formula(std::size_t max_size) {
        if (max_size <= 1 || chance(0.35)) {
            if (chance(0.12)) {
                static const Connective cs[] = {Connective::Sum, Connective::Prod, Connective::Tensor, Connective::Par};
                return Formula::make(cs[below(4)], {});
            }
            return Formula::atom(opt_.atoms[below(opt_.atoms.size())]);
        }
        static const Connective cs[] = {Connective::Sum, Connective::Prod, Connective::Tensor, Connective::Par};
        Connective c = cs[below(4)];
        std::size_t k = 1 + below(std::min<std::size_t>(opt_.max_branch, max_size - 1));
        std::size_t budget = max_size - 1;
        std::vector<Formula> parts;
        for (std::size_t i = 0; i < k; ++i) {
            std::size_t share = std::max<std::size_t>(1, budget / (k - i));
            parts.push_back(formula(share));
            budget -= std::min(budget, parts.back().size());
        }
        if (is_multiplicative(c)) return c == Connective::Tensor ? Formula::tensor_of(parts) : Formula::par_of(parts);
        std::vector<Labeled> ls;
        for (std::size_t i = 0; i < parts.size(); ++i) ls.push_back({std::string(1, char('a' + i)), parts[i]});
        return Formula::make(c, ls);
    }

    // A term whose conclusion has `x` on `side`, at channel `keep`.
    TypedTerm with_channel(const Formula& x, Side side, const std::string& keep, std::size_t depth) {
        std::string other = keep == "p" ? "q" : "p";
        TypedTerm t = side == Side::Domain ? identity_term(x.relabeled(keep), keep, other) : identity_term(x.relabeled(keep), other, keep);
        return grow(t, {keep}, depth);
    }

    TypedTerm term(std::size_t depth) { return grow(seed(), {}, depth); }
    TypedTerm term() { return term(opt_.max_depth); }

    // Wraps constructors and cuts around `t`, leaving the channels in `keep` alone.
    TypedTerm grow(TypedTerm t, const std::set<std::string>& keep, std::size_t depth) {
        std::size_t steps = below(depth + 1);
        for (std::size_t i = 0; i < steps; ++i) {
            if (depth_of(t.term) >= opt_.max_depth) break;
            if (auto n = step(t, keep, depth)) t = std::move(*n);
        }
        return t;
    }

  private:
    static std::size_t depth_of(const Term& t) {
        std::size_t d = 0;
        for (std::size_t i = 0; i < t.child_count(); ++i) d = std::max(d, depth_of(t.child(i)));
        return d + 1;
    }

    std::string fresh() { return "g" + std::to_string(++counter_); }

    TypedTerm seed() {
        std::size_t k = below(10);
        if (k < 2 && !sig_->axioms().empty()) {
            auto axs = sig_->axioms();
            auto* d = axs[below(axs.size())];
            std::vector<std::string> ins, outs;
            std::vector<Binding> dom, cod;
            for (auto& f : d->ins) {
                ins.push_back(fresh());
                dom.push_back({ins.back(), f.relabeled(ins.back())});
            }
            for (auto& f : d->outs) {
                outs.push_back(fresh());
                cod.push_back({outs.back(), f.relabeled(outs.back())});
            }
            return check(Term::axiom(d->name, ins, outs), Sequent(dom, cod), sig_);
        }
        if (k == 2) {
            std::string a = fresh();
            Side s = chance(0.5) ? Side::Domain : Side::Codomain;
            Formula f = s == Side::Domain ? Formula::bot() : Formula::top();
            std::vector<Binding> one{{a, f}};
            return check(Term::fork(a, {}), s == Side::Domain ? Sequent(one, {}) : Sequent({}, one), sig_);
        }
        if (k == 3) {
            std::string a = fresh();
            Side s = chance(0.5) ? Side::Domain : Side::Codomain;
            Sequent seq = s == Side::Domain ? Sequent({{a, Formula::zero()}}, {}) : Sequent({}, {{a, Formula::one()}});
            std::size_t extra = below(3);
            for (std::size_t i = 0; i < extra; ++i) {
                std::string b = fresh();
                seq = seq.with(chance(0.5) ? Side::Domain : Side::Codomain, b, formula(3).relabeled(b));
            }
            return check(Term::case_of(a, {}, seq), seq, sig_);
        }
        std::string a = fresh(), b = fresh();
        return identity_term(formula(opt_.max_formula).relabeled(a), a, b);
    }

    std::optional<TypedTerm> step(const TypedTerm& t, const std::set<std::string>& keep, std::size_t depth) {
        std::vector<std::pair<Side, std::string>> open;
        for (auto& b : t.sequent.domain())
            if (!keep.count(b.channel)) open.push_back({Side::Domain, b.channel});
        for (auto& b : t.sequent.codomain())
            if (!keep.count(b.channel)) open.push_back({Side::Codomain, b.channel});
        std::size_t kind = below(8);
        if (open.empty()) kind = 6;
        try {
            switch (kind) {
            case 0:
            case 1: return wrap_select(t, open[below(open.size())]);
            case 2: return wrap_case(t, open[below(open.size())], depth);
            case 3: return wrap_split(t, open);
            case 4: return wrap_fork(t, open[below(open.size())], depth);
            case 5: return wrap_cut(t, open[below(open.size())], depth);
            case 6: return wrap_unit(t);
            default: return wrap_cut(t, open[below(open.size())], depth);
            }
        } catch (const Error&) {
            return std::nullopt;
        }
    }

    TypedTerm retyped(const TypedTerm& t, Term term, Sequent s) { return check(canonicalize(term), s, t.sig ? t.sig : sig_); }

    // Select on a new additive channel whose chosen component is the old channel.
    TypedTerm wrap_select(const TypedTerm& t, std::pair<Side, std::string> c) {
        auto [side, ch] = c;
        Formula x = *t.sequent.lookup(ch)->formula;
        std::size_t k = 1 + below(opt_.max_branch);
        std::size_t pos = below(k);
        std::vector<Labeled> ls;
        for (std::size_t i = 0; i < k; ++i) ls.push_back({std::string(1, char('a' + i)), i == pos ? x : formula(2)});
        Connective conn = side == Side::Domain ? Connective::Prod : Connective::Sum;
        std::string a = fresh();
        Formula f = Formula::make(conn, ls).relabeled(a);
        Term body = substitute_free(t.term, ch, a);
        Sequent s = t.sequent.without(ch).with(side, a, f);
        return retyped(t, Term::select(a, ls[pos].label, body), s);
    }

    // Case on a new additive channel; every branch is `t`, or a second grown term in the last branch.
    TypedTerm wrap_case(const TypedTerm& t, std::pair<Side, std::string> c, std::size_t) {
        auto [side, ch] = c;
        Formula x = *t.sequent.lookup(ch)->formula;
        std::size_t k = 1 + below(opt_.max_branch);
        std::vector<Labeled> ls;
        std::string a = fresh();
        std::vector<Branch> bs;
        for (std::size_t i = 0; i < k; ++i) {
            std::string tag(1, char('a' + i));
            ls.push_back({tag, x});
            bs.push_back({tag, substitute_free(t.term, ch, a)});
        }
        Connective conn = side == Side::Domain ? Connective::Sum : Connective::Prod;
        Formula f = Formula::make(conn, ls).relabeled(a);
        Sequent s = t.sequent.without(ch).with(side, a, f);
        return retyped(t, Term::case_of(a, std::move(bs)), s);
    }

    // Split merging two channels on one side into a multiplicative.
    TypedTerm wrap_split(const TypedTerm& t, const std::vector<std::pair<Side, std::string>>& open) {
        Side side = open[below(open.size())].first;
        std::vector<std::string> same;
        for (auto& [s, ch] : open)
            if (s == side) same.push_back(ch);
        std::shuffle(same.begin(), same.end(), rng_);
        std::size_t k = std::min<std::size_t>(same.size(), 1 + below(opt_.max_branch));
        same.resize(k);
        std::string a = fresh();
        std::vector<Formula> fs;
        for (auto& ch : same) fs.push_back(*t.sequent.lookup(ch)->formula);
        Formula f = side == Side::Domain ? Formula::tensor_of(fs, a) : Formula::par_of(fs, a);
        Sequent s = t.sequent;
        for (auto& ch : same) s = s.without(ch);
        s = s.with(side, a, f);
        return retyped(t, Term::split(a, same, t.term), s);
    }

    // Fork joining `t` (at the chosen channel) with fresh arms.
    TypedTerm wrap_fork(const TypedTerm& t, std::pair<Side, std::string> c, std::size_t depth) {
        auto [side, ch] = c;
        std::size_t k = 1 + below(opt_.max_branch);
        std::size_t pos = below(k);
        std::string a = fresh();
        std::vector<Arm> arms;
        std::vector<Formula> fs;
        Sequent s;
        std::vector<std::vector<Binding>> extra(2);
        for (std::size_t i = 0; i < k; ++i) {
            if (i == pos) {
                std::vector<std::string> owns;
                for (auto& x : t.sequent.channels())
                    if (x != ch) owns.push_back(x);
                arms.push_back({ch, owns, t.term});
                fs.push_back(*t.sequent.lookup(ch)->formula);
                for (auto& b : t.sequent.domain())
                    if (b.channel != ch) extra[0].push_back(b);
                for (auto& b : t.sequent.codomain())
                    if (b.channel != ch) extra[1].push_back(b);
                continue;
            }
            std::string p = fresh();
            TypedTerm u = depth > 1 && chance(0.5) ? with_channel(formula(2), side, "p", depth / 2) : with_channel(formula(2), side, "p", 0);
            std::map<std::string, std::string> ren{{"p", p}};
            for (auto& x : u.sequent.channels())
                if (x != "p") ren[x] = fresh();
            Term body = rename_channels(canonicalize_avoiding(u.term, ren), ren);
            std::vector<std::string> owns;
            for (auto& x : u.sequent.channels())
                if (x != "p") owns.push_back(ren[x]);
            arms.push_back({p, owns, body});
            fs.push_back(*u.sequent.lookup("p")->formula);
            for (auto& b : u.sequent.domain())
                if (b.channel != "p") extra[0].push_back({ren[b.channel], b.formula.relabeled(ren[b.channel])});
            for (auto& b : u.sequent.codomain())
                if (b.channel != "p") extra[1].push_back({ren[b.channel], b.formula.relabeled(ren[b.channel])});
        }
        Formula f = side == Side::Domain ? Formula::par_of(fs, a) : Formula::tensor_of(fs, a);
        std::vector<Binding> dom = extra[0], cod = extra[1];
        (side == Side::Domain ? dom : cod).push_back({a, f});
        return retyped(t, Term::fork(a, std::move(arms)), Sequent(dom, cod));
    }

    // Composes on the chosen channel with a grown term that has the matching end.
    TypedTerm wrap_cut(const TypedTerm& t, std::pair<Side, std::string> c, std::size_t depth) {
        auto [side, ch] = c;
        Formula x = *t.sequent.lookup(ch)->formula;
        Side want = opposite(side);
        TypedTerm u = with_channel(x, want, "p", depth / 2);
        std::map<std::string, std::string> ren{{"p", ch}};
        for (auto& y : u.sequent.channels())
            if (y != "p") ren[y] = fresh();
        Term ut = rename_channels(canonicalize_avoiding(u.term, ren), ren);
        std::vector<Binding> dom, cod;
        for (auto& b : u.sequent.domain()) dom.push_back({ren[b.channel], b.formula.relabeled(ren[b.channel])});
        for (auto& b : u.sequent.codomain()) cod.push_back({ren[b.channel], b.formula.relabeled(ren[b.channel])});
        TypedTerm v = check(ut, Sequent(dom, cod), t.sig ? t.sig : sig_);
        TypedTerm r = side == Side::Codomain ? compose(t, v, ch) : compose(v, t, ch);
        return check(canonicalize(r.term), r.sequent, r.sig);
    }

    // Nullary split on a fresh unit channel.
    TypedTerm wrap_unit(const TypedTerm& t) {
        std::string a = fresh();
        Side side = chance(0.5) ? Side::Domain : Side::Codomain;
        Formula f = side == Side::Domain ? Formula::top() : Formula::bot();
        return retyped(t, Term::split(a, {}, t.term), t.sequent.with(side, a, f));
    }

    // Renames binders so that none collides with the image of `ren`.
    Term canonicalize_avoiding(const Term& t, const std::map<std::string, std::string>& ren) {
        std::set<std::string> avoid;
        for (auto& [k, v] : ren) avoid.insert(v);
        auto names = all_channels(t);
        std::map<std::string, std::string> bound;
        std::set<std::string> free(t.interface().begin(), t.interface().end());
        for (auto& n : names)
            if (!free.count(n) && (avoid.count(n) || ren.count(n))) bound[n] = fresh();
        return bound.empty() ? t : rename_channels(t, bound);
    }

    std::mt19937_64 rng_;
    std::shared_ptr<const Signature> sig_;
    GeneratorOptions opt_;
    std::size_t counter_ = 0;
};

}  // namespace mallterm
