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

#include <map>
#include <memory>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "core.hpp"
#include "surface.hpp"

namespace mallterm {

enum class TypeErrorKind : std::uint8_t {
    UnknownChannel,
    WrongConnective,
    TagNotInType,
    ArityMismatch,
    PartitionError,
    LeftoverChannels,
    SharedChannelInCut,
    AxiomSignatureMismatch,
    AmbiguousCut,
};

inline const char* to_string(TypeErrorKind k) {
    switch (k) {
    case TypeErrorKind::UnknownChannel: return "UnknownChannel";
    case TypeErrorKind::WrongConnective: return "WrongConnective";
    case TypeErrorKind::TagNotInType: return "TagNotInType";
    case TypeErrorKind::ArityMismatch: return "ArityMismatch";
    case TypeErrorKind::PartitionError: return "PartitionError";
    case TypeErrorKind::LeftoverChannels: return "LeftoverChannels";
    case TypeErrorKind::SharedChannelInCut: return "SharedChannelInCut";
    case TypeErrorKind::AxiomSignatureMismatch: return "AxiomSignatureMismatch";
    case TypeErrorKind::AmbiguousCut: return "AmbiguousCut";
    }
    return "?";
}

class TypeError : public Error {
  public:
    TypeError(TypeErrorKind kind, SourceSpan span, const std::string& detail)
        : Error(std::string(to_string(kind)) + " at " + std::to_string(span.line) + ":" + std::to_string(span.column) +
                ": " + detail),
          kind_(kind), span_(span), detail_(detail) {}
    TypeErrorKind kind() const { return kind_; }
    const SourceSpan& span() const { return span_; }
    const std::string& detail() const { return detail_; }

  private:
    TypeErrorKind kind_;
    SourceSpan span_;
    std::string detail_;
};

enum class CompositionErrorKind : std::uint8_t { NoSuchChannel, ChannelTypeMismatch };

class CompositionError : public Error {
  public:
    CompositionError(CompositionErrorKind kind, const std::string& detail)
        : Error(std::string(kind == CompositionErrorKind::NoSuchChannel ? "NoSuchChannel" : "ChannelTypeMismatch") +
                ": " + detail),
          kind_(kind) {}
    CompositionErrorKind kind() const { return kind_; }

  private:
    CompositionErrorKind kind_;
};

// A decorated term together with its conclusion and signature.
struct TypedTerm {
    Term term;
    Sequent sequent;
    std::shared_ptr<const Signature> sig;

    const Signature& signature() const {
        static const Signature empty;
        return sig ? *sig : empty;
    }
};

namespace checker_detail {

// Connective a term former demands of its principal channel, by side.
inline Connective demanded(TermKind k, Side s) {
    bool dom = s == Side::Domain;
    switch (k) {
    case TermKind::Case: return dom ? Connective::Sum : Connective::Prod;
    case TermKind::Select: return dom ? Connective::Prod : Connective::Sum;
    case TermKind::Split: return dom ? Connective::Tensor : Connective::Par;
    case TermKind::Fork: return dom ? Connective::Par : Connective::Tensor;
    default: return Connective::Atom;
    }
}

inline const char* conn_name(Connective c) {
    switch (c) {
    case Connective::Atom: return "atom";
    case Connective::Sum: return "sum";
    case Connective::Prod: return "product";
    case Connective::Tensor: return "tensor";
    case Connective::Par: return "par";
    }
    return "?";
}

struct CutSplit {
    std::vector<std::string> left, right;
};

// Distributes the context of a cut between its two sides.
inline CutSplit split_cut(const CutNode& c, const std::vector<std::string>& ctx, SourceSpan span) {
    std::set<std::string> in(ctx.begin(), ctx.end());
    if (in.count(c.chan))
        throw TypeError(TypeErrorKind::SharedChannelInCut, span, "cut channel '" + c.chan + "' is already in scope");
    auto& fl = c.left.interface();
    auto& fr = c.right.interface();
    for (auto& x : fl)
        if (x != c.chan && detail::contains_sorted(fr, x))
            throw TypeError(TypeErrorKind::SharedChannelInCut, span, "channel '" + x + "' used on both sides of cut");
    for (auto* side : {&fl, &fr})
        for (auto& x : *side)
            if (x != c.chan && !in.count(x))
                throw TypeError(TypeErrorKind::UnknownChannel, span, "channel '" + x + "' not in scope");
    if (!detail::contains_sorted(fl, c.chan) && !c.left.open())
        throw TypeError(TypeErrorKind::SharedChannelInCut, span, "cut channel '" + c.chan + "' unused on the left");
    if (!detail::contains_sorted(fr, c.chan) && !c.right.open())
        throw TypeError(TypeErrorKind::SharedChannelInCut, span, "cut channel '" + c.chan + "' unused on the right");
    CutSplit out;
    std::vector<std::string> rest;
    for (auto& x : ctx) {
        if (detail::contains_sorted(fl, x)) out.left.push_back(x);
        else if (detail::contains_sorted(fr, x)) out.right.push_back(x);
        else rest.push_back(x);
    }
    if (!rest.empty()) {
        if (c.left.open() && c.right.open())
            throw TypeError(TypeErrorKind::AmbiguousCut, span,
                            "cannot tell which side of cut '" + c.chan + "' owns '" + rest[0] + "'; annotate the empty case");
        if (c.left.open()) out.left.insert(out.left.end(), rest.begin(), rest.end());
        else if (c.right.open()) out.right.insert(out.right.end(), rest.begin(), rest.end());
        else throw TypeError(TypeErrorKind::LeftoverChannels, span, "channel '" + rest[0] + "' unused");
    }
    return out;
}

inline std::vector<std::string> names(const std::map<std::string, std::pair<Side, int>>& ctx) {
    std::vector<std::string> out;
    for (auto& [k, v] : ctx) out.push_back(k);
    return out;
}

// Unification over partially known formulas; used to infer cut formulas.
class Inference {
  public:
    enum class K : std::uint8_t { Unknown, Atom, Sum, Prod, Tensor, Par };

    explicit Inference(const Signature& sig) : sig_(sig) {}

    std::map<const Term::Rep*, int> cut_vars;

    int fresh() {
        vs_.push_back(V{});
        vs_.back().parent = static_cast<int>(vs_.size()) - 1;
        return vs_.back().parent;
    }

    int of_formula(const Formula& f) {
        int v = fresh();
        V n;
        n.parent = v;
        n.closed = true;
        switch (f.connective()) {
        case Connective::Atom: n.k = K::Atom; n.atom = f.atom_name(); break;
        case Connective::Sum: n.k = K::Sum; break;
        case Connective::Prod: n.k = K::Prod; break;
        case Connective::Tensor: n.k = K::Tensor; break;
        case Connective::Par: n.k = K::Par; break;
        }
        for (auto& p : f.parts()) {
            int c = of_formula(p.formula);
            if (is_additive(f.connective())) n.tags[p.label] = c;
            else n.parts.push_back(c);
        }
        vs_[v] = std::move(n);
        return v;
    }

    std::optional<Formula> resolve(int v, const std::string& root) {
        v = find(v);
        V n = vs_[v];
        switch (n.k) {
        case K::Unknown: return std::nullopt;
        case K::Atom:
            if (n.atom.empty()) return std::nullopt;
            return Formula::atom(n.atom);
        case K::Sum:
        case K::Prod: {
            if (!n.closed) return std::nullopt;
            std::vector<Labeled> ps;
            for (auto& [tag, c] : n.tags) {
                auto f = resolve(c, root + "_" + tag);
                if (!f) return std::nullopt;
                ps.push_back({tag, *f});
            }
            return Formula::make(n.k == K::Sum ? Connective::Sum : Connective::Prod, std::move(ps));
        }
        default: {
            std::vector<Formula> ps;
            for (auto c : n.parts) {
                auto f = resolve(c, root);
                if (!f) return std::nullopt;
                ps.push_back(*f);
            }
            return n.k == K::Tensor ? Formula::tensor_of(std::move(ps), root) : Formula::par_of(std::move(ps), root);
        }
        }
    }

    void run(const Term& t, const std::map<std::string, std::pair<Side, int>>& ctx) {
        auto err = [&](TypeErrorKind k, const std::string& d) { return TypeError(k, t.span(), d); };
        auto look = [&](const std::string& c) -> std::pair<Side, int> {
            auto it = ctx.find(c);
            if (it == ctx.end()) throw err(TypeErrorKind::UnknownChannel, "channel '" + c + "' not in scope");
            return it->second;
        };
        switch (t.kind()) {
        case TermKind::Id: {
            auto& n = t.as<IdNode>();
            auto l = look(n.left), r = look(n.right);
            if (l.first != Side::Domain || r.first != Side::Codomain)
                throw err(TypeErrorKind::WrongConnective, "identity links a domain channel to a codomain channel");
            int a = fresh();
            vs_[a].k = K::Atom;
            unify(l.second, a, t);
            unify(r.second, a, t);
            return;
        }
        case TermKind::Axiom: {
            auto& n = t.as<AxiomNode>();
            auto* d = sig_.axiom(n.name);
            if (!d || d->ins.size() != n.ins.size() || d->outs.size() != n.outs.size())
                throw err(TypeErrorKind::AxiomSignatureMismatch, "axiom '" + n.name + "' does not match the signature");
            for (std::size_t i = 0; i < n.ins.size(); ++i) unify(look(n.ins[i]).second, of_formula(d->ins[i]), t);
            for (std::size_t i = 0; i < n.outs.size(); ++i) unify(look(n.outs[i]).second, of_formula(d->outs[i]), t);
            return;
        }
        case TermKind::Case: {
            auto& n = t.as<CaseNode>();
            auto [side, v] = look(n.chan);
            int s = shape(demanded(TermKind::Case, side));
            vs_[s].closed = true;
            for (auto& b : n.branches) vs_[s].tags[b.tag] = fresh();
            unify(v, s, t);
            if (n.ctx) {
                for (auto* bs : {&n.ctx->domain(), &n.ctx->codomain()})
                    for (auto& b : *bs) {
                        auto it = ctx.find(b.channel);
                        if (it != ctx.end()) unify(it->second.second, of_formula(b.formula), t);
                    }
            }
            for (auto& b : n.branches) {
                auto c = ctx;
                c[n.chan] = {side, vs_[find(v)].tags.at(b.tag)};
                run(b.body, c);
            }
            return;
        }
        case TermKind::Select: {
            auto& n = t.as<SelectNode>();
            auto [side, v] = look(n.chan);
            int s = shape(demanded(TermKind::Select, side));
            vs_[s].tags[n.tag] = fresh();
            unify(v, s, t);
            auto c = ctx;
            c[n.chan] = {side, vs_[find(v)].tags.at(n.tag)};
            run(n.body, c);
            return;
        }
        case TermKind::Split: {
            auto& n = t.as<SplitNode>();
            auto [side, v] = look(n.chan);
            int s = shape(demanded(TermKind::Split, side));
            for (std::size_t i = 0; i < n.parts.size(); ++i) { int f = fresh(); vs_[s].parts.push_back(f); }
            unify(v, s, t);
            auto c = ctx;
            c.erase(n.chan);
            auto& ps = vs_[find(v)].parts;
            for (std::size_t i = 0; i < n.parts.size(); ++i) c[n.parts[i]] = {side, ps[i]};
            run(n.body, c);
            return;
        }
        case TermKind::Fork: {
            auto& n = t.as<ForkNode>();
            auto [side, v] = look(n.chan);
            int s = shape(demanded(TermKind::Fork, side));
            for (std::size_t i = 0; i < n.arms.size(); ++i) { int f = fresh(); vs_[s].parts.push_back(f); }
            unify(v, s, t);
            auto ps = vs_[find(v)].parts;
            for (std::size_t i = 0; i < n.arms.size(); ++i) {
                std::map<std::string, std::pair<Side, int>> c;
                for (auto& o : n.arms[i].owns) c[o] = look(o);
                c[n.arms[i].part] = {side, ps[i]};
                run(n.arms[i].body, c);
            }
            return;
        }
        case TermKind::Cut: {
            auto& n = t.as<CutNode>();
            int v = fresh();
            if (n.type) unify(v, of_formula(*n.type), t);
            cut_vars[&t.rep()] = v;
            auto sp = split_cut(n, names(ctx), t.span());
            std::map<std::string, std::pair<Side, int>> l, r;
            for (auto& x : sp.left) l[x] = ctx.at(x);
            for (auto& x : sp.right) r[x] = ctx.at(x);
            l[n.chan] = {Side::Codomain, v};
            r[n.chan] = {Side::Domain, v};
            run(n.left, l);
            run(n.right, r);
            return;
        }
        }
    }

  private:
    struct V {
        K k = K::Unknown;
        std::string atom;
        std::map<std::string, int> tags;
        bool closed = false;
        std::vector<int> parts;
        int parent = 0;
    };

    int find(int v) {
        while (vs_[v].parent != v) v = vs_[v].parent = vs_[vs_[v].parent].parent;
        return v;
    }

    int shape(Connective c) {
        int s = fresh();
        switch (c) {
        case Connective::Sum: vs_[s].k = K::Sum; break;
        case Connective::Prod: vs_[s].k = K::Prod; break;
        case Connective::Tensor: vs_[s].k = K::Tensor; vs_[s].closed = true; break;
        case Connective::Par: vs_[s].k = K::Par; vs_[s].closed = true; break;
        case Connective::Atom: vs_[s].k = K::Atom; break;
        }
        return s;
    }

    static const char* kname(K k) {
        switch (k) {
        case K::Unknown: return "unknown";
        case K::Atom: return "atom";
        case K::Sum: return "sum";
        case K::Prod: return "product";
        case K::Tensor: return "tensor";
        case K::Par: return "par";
        }
        return "?";
    }

    void unify(int a, int b, const Term& at) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (vs_[a].k == K::Unknown) {
            vs_[a].parent = b;
            return;
        }
        if (vs_[b].k == K::Unknown) {
            vs_[b].parent = a;
            return;
        }
        if (vs_[a].k != vs_[b].k)
            throw TypeError(TypeErrorKind::WrongConnective, at.span(),
                            std::string("expected ") + kname(vs_[a].k) + ", found " + kname(vs_[b].k));
        V na = vs_[a], nb = vs_[b];
        vs_[b].parent = a;
        switch (na.k) {
        case K::Atom:
            if (!na.atom.empty() && !nb.atom.empty() && na.atom != nb.atom)
                throw TypeError(TypeErrorKind::WrongConnective, at.span(), "atoms " + na.atom + " and " + nb.atom + " differ");
            if (na.atom.empty()) vs_[a].atom = nb.atom;
            return;
        case K::Sum:
        case K::Prod: {
            if (na.closed)
                for (auto& [tag, c] : nb.tags)
                    if (!na.tags.count(tag))
                        throw TypeError(TypeErrorKind::TagNotInType, at.span(), "tag '" + tag + "' not in type");
            if (nb.closed)
                for (auto& [tag, c] : na.tags)
                    if (!nb.tags.count(tag))
                        throw TypeError(TypeErrorKind::TagNotInType, at.span(), "tag '" + tag + "' not in type");
            vs_[a].closed = na.closed || nb.closed;
            for (auto& [tag, c] : nb.tags) {
                auto it = na.tags.find(tag);
                if (it == na.tags.end()) vs_[a].tags[tag] = c;
                else unify(it->second, c, at);
            }
            return;
        }
        default:
            if (na.parts.size() != nb.parts.size())
                throw TypeError(TypeErrorKind::ArityMismatch, at.span(),
                                "arity " + std::to_string(na.parts.size()) + " vs " + std::to_string(nb.parts.size()));
            for (std::size_t i = 0; i < na.parts.size(); ++i) unify(na.parts[i], nb.parts[i], at);
            return;
        }
    }

    const Signature& sig_;
    std::vector<V> vs_;
};

class Checker {
  public:
    Checker(const Signature& sig, const std::map<const Term::Rep*, Formula>& cut_types)
        : sig_(sig), cut_types_(cut_types) {}

    Term run(const Term& t, const Sequent& ctx) {
        auto err = [&](TypeErrorKind k, const std::string& d) { return TypeError(k, t.span(), d); };
        auto look = [&](const std::string& c) {
            auto e = ctx.lookup(c);
            if (!e) throw err(TypeErrorKind::UnknownChannel, "channel '" + c + "' not in scope");
            return *e;
        };
        auto exact = [&](std::vector<std::string> used) {
            std::sort(used.begin(), used.end());
            for (auto& c : ctx.channels())
                if (!std::binary_search(used.begin(), used.end(), c))
                    throw err(TypeErrorKind::LeftoverChannels, "channel '" + c + "' unused");
        };
        auto principal = [&](TermKind k, const std::string& c) {
            auto e = look(c);
            Connective want = demanded(k, e.side);
            if (e.formula->connective() != want)
                throw err(TypeErrorKind::WrongConnective, "'" + c + "' has type " + e.formula->str() + " but " +
                                                              to_string(k) + " on the " + to_string(e.side) +
                                                              " needs a " + conn_name(want));
            return e;
        };
        auto replaced = [&](const std::string& c, const Formula& f) {
            std::vector<Binding> d = ctx.domain(), co = ctx.codomain();
            for (auto* bs : {&d, &co})
                for (auto& b : *bs)
                    if (b.channel == c) b.formula = f;
            return Sequent(std::move(d), std::move(co));
        };
        auto seq = std::make_shared<const Sequent>(ctx);
        Decoration deco{seq, Side::Domain};
        Term out = t;

        switch (t.kind()) {
        case TermKind::Id: {
            auto& n = t.as<IdNode>();
            auto l = look(n.left), r = look(n.right);
            if (l.side != Side::Domain || r.side != Side::Codomain)
                throw err(TypeErrorKind::WrongConnective, "identity links a domain channel to a codomain channel");
            if (!l.formula->is_atom() || !(*l.formula == *r.formula))
                throw err(TypeErrorKind::WrongConnective,
                          "identity needs equal atoms, found " + l.formula->str() + " and " + r.formula->str());
            exact({n.left, n.right});
            out = Term::id(n.left, n.right);
            break;
        }
        case TermKind::Axiom: {
            auto& n = t.as<AxiomNode>();
            auto* d = sig_.axiom(n.name);
            if (!d) throw err(TypeErrorKind::AxiomSignatureMismatch, "unknown axiom '" + n.name + "'");
            if (d->ins.size() != n.ins.size() || d->outs.size() != n.outs.size())
                throw err(TypeErrorKind::AxiomSignatureMismatch, "axiom '" + n.name + "' has the wrong number of ports");
            for (std::size_t i = 0; i < n.ins.size(); ++i) {
                auto e = look(n.ins[i]);
                if (e.side != Side::Domain || !(*e.formula == d->ins[i]))
                    throw err(TypeErrorKind::AxiomSignatureMismatch, "port '" + n.ins[i] + "' of '" + n.name + "'");
            }
            for (std::size_t i = 0; i < n.outs.size(); ++i) {
                auto e = look(n.outs[i]);
                if (e.side != Side::Codomain || !(*e.formula == d->outs[i]))
                    throw err(TypeErrorKind::AxiomSignatureMismatch, "port '" + n.outs[i] + "' of '" + n.name + "'");
            }
            std::vector<std::string> used = n.ins;
            used.insert(used.end(), n.outs.begin(), n.outs.end());
            exact(used);
            out = Term::axiom(n.name, n.ins, n.outs);
            break;
        }
        case TermKind::Case: {
            auto& n = t.as<CaseNode>();
            auto e = principal(TermKind::Case, n.chan);
            deco.side = e.side;
            const Formula f = *e.formula;
            for (auto& b : n.branches)
                if (!f.component(b.tag)) throw err(TypeErrorKind::TagNotInType, "tag '" + b.tag + "' not in " + f.str());
            if (n.branches.size() != f.arity())
                throw err(TypeErrorKind::ArityMismatch, "case on '" + n.chan + "' must cover every tag of " + f.str());
            if (n.branches.empty()) {
                if (n.ctx && !(*n.ctx == ctx))
                    throw err(TypeErrorKind::LeftoverChannels, "annotation " + n.ctx->str() + " differs from " + ctx.str());
                out = Term::case_of(n.chan, {}, ctx);
                break;
            }
            std::vector<Branch> bs;
            for (auto& b : n.branches) bs.push_back({b.tag, run(b.body, replaced(n.chan, *f.component(b.tag)))});
            out = Term::case_of(n.chan, std::move(bs));
            break;
        }
        case TermKind::Select: {
            auto& n = t.as<SelectNode>();
            auto e = principal(TermKind::Select, n.chan);
            deco.side = e.side;
            auto* comp = e.formula->component(n.tag);
            if (!comp) throw err(TypeErrorKind::TagNotInType, "tag '" + n.tag + "' not in " + e.formula->str());
            Formula c = *comp;
            out = Term::select(n.chan, n.tag, run(n.body, replaced(n.chan, c)));
            break;
        }
        case TermKind::Split: {
            auto& n = t.as<SplitNode>();
            auto e = principal(TermKind::Split, n.chan);
            deco.side = e.side;
            Formula f = *e.formula;
            if (n.parts.size() != f.arity())
                throw err(TypeErrorKind::ArityMismatch, "split of '" + n.chan + "' needs " + std::to_string(f.arity()) + " parts");
            Sequent inner = ctx.without(n.chan);
            std::set<std::string> seen;
            for (std::size_t i = 0; i < n.parts.size(); ++i) {
                if (inner.contains(n.parts[i]) || !seen.insert(n.parts[i]).second)
                    throw err(TypeErrorKind::PartitionError, "part '" + n.parts[i] + "' clashes with a channel in scope");
                inner = inner.with(e.side, n.parts[i], f.parts()[i].formula);
            }
            out = Term::split(n.chan, n.parts, run(n.body, inner));
            break;
        }
        case TermKind::Fork: {
            auto& n = t.as<ForkNode>();
            auto e = principal(TermKind::Fork, n.chan);
            deco.side = e.side;
            Formula f = *e.formula;
            if (n.arms.size() != f.arity())
                throw err(TypeErrorKind::ArityMismatch, "fork of '" + n.chan + "' needs " + std::to_string(f.arity()) + " arms");
            if (n.arms.empty()) {
                exact({n.chan});
                out = Term::fork(n.chan, {});
                break;
            }
            std::set<std::string> owned;
            for (auto& a : n.arms)
                for (auto& o : a.owns) {
                    if (o == n.chan || !ctx.contains(o))
                        throw err(TypeErrorKind::PartitionError, "arm '" + a.part + "' claims '" + o + "' which is not available");
                    if (!owned.insert(o).second)
                        throw err(TypeErrorKind::PartitionError, "'" + o + "' is claimed by two arms");
                }
            for (auto& c : ctx.channels())
                if (c != n.chan && !owned.count(c))
                    throw err(TypeErrorKind::PartitionError, "'" + c + "' is claimed by no arm");
            std::vector<Arm> arms;
            for (std::size_t i = 0; i < n.arms.size(); ++i) {
                auto& a = n.arms[i];
                if (ctx.contains(a.part))
                    throw err(TypeErrorKind::PartitionError, "part '" + a.part + "' clashes with a channel in scope");
                Sequent inner = ctx.restricted(a.owns).with(e.side, a.part, f.parts()[i].formula);
                arms.push_back({a.part, a.owns, run(a.body, inner)});
            }
            out = Term::fork(n.chan, std::move(arms));
            break;
        }
        case TermKind::Cut: {
            auto& n = t.as<CutNode>();
            std::optional<Formula> z = n.type;
            if (!z) {
                auto it = cut_types_.find(&t.rep());
                if (it != cut_types_.end()) z = it->second;
            }
            if (!z) throw err(TypeErrorKind::AmbiguousCut, "cannot infer the formula of cut '" + n.chan + "'");
            auto sp = split_cut(n, ctx.channels(), t.span());
            Sequent l = ctx.restricted(sp.left).with(Side::Codomain, n.chan, *z);
            Sequent r = ctx.restricted(sp.right).with(Side::Domain, n.chan, *z);
            Term lt = run(n.left, l);
            Term rt = run(n.right, r);
            out = Term::cut(n.chan, lt, rt, z);
            break;
        }
        }
        return out.with_span(t.span()).decorated(deco);
    }

  private:
    const Signature& sig_;
    const std::map<const Term::Rep*, Formula>& cut_types_;
};

inline bool needs_inference(const Term& t) {
    if (auto* c = t.get<CutNode>())
        if (!c->type) return true;
    for (std::size_t i = 0; i < t.child_count(); ++i)
        if (needs_inference(t.child(i))) return true;
    return false;
}

}  // namespace checker_detail

inline TypedTerm check(const Term& t, const Sequent& s, std::shared_ptr<const Signature> sig = nullptr) {
    static const Signature empty;
    const Signature& sg = sig ? *sig : empty;
    std::map<const Term::Rep*, Formula> cut_types;
    if (checker_detail::needs_inference(t)) {
        checker_detail::Inference inf(sg);
        std::map<std::string, std::pair<Side, int>> ctx;
        for (auto& b : s.domain()) ctx[b.channel] = {Side::Domain, inf.of_formula(b.formula)};
        for (auto& b : s.codomain()) ctx[b.channel] = {Side::Codomain, inf.of_formula(b.formula)};
        inf.run(t, ctx);
        for (auto& [rep, v] : inf.cut_vars) {
            auto f = inf.resolve(v, "z");
            if (f) cut_types.emplace(rep, *f);
        }
    }
    checker_detail::Checker ck(sg, cut_types);
    return TypedTerm{ck.run(t, s), s, std::move(sig)};
}

inline TypedTerm check(const Term& t, const Sequent& s, const Signature& sig) {
    return check(t, s, std::make_shared<const Signature>(sig));
}

// a:X |- b:X by structural recursion on X.
inline Term identity_term(const Formula& x, const std::string& a, const std::string& b, std::set<std::string>& used) {
    used.insert(a);
    used.insert(b);
    switch (x.connective()) {
    case Connective::Atom: return Term::id(a, b);
    case Connective::Sum: {
        std::vector<Branch> bs;
        for (auto& p : x.parts()) bs.push_back({p.label, Term::select(b, p.label, identity_term(p.formula, a, b, used))});
        return Term::case_of(a, std::move(bs));
    }
    case Connective::Prod: {
        std::vector<Branch> bs;
        for (auto& p : x.parts()) bs.push_back({p.label, Term::select(a, p.label, identity_term(p.formula, a, b, used))});
        return Term::case_of(b, std::move(bs));
    }
    case Connective::Tensor:
    case Connective::Par: {
        bool tensor = x.connective() == Connective::Tensor;
        const std::string& outer = tensor ? a : b;
        const std::string& inner = tensor ? b : a;
        std::vector<std::string> splits, forks;
        for (std::size_t i = 0; i < x.arity(); ++i) splits.push_back(fresh_name(outer + "_" + std::to_string(i + 1), used));
        for (std::size_t i = 0; i < x.arity(); ++i) forks.push_back(fresh_name(inner + "_" + std::to_string(i + 1), used));
        std::vector<Arm> arms;
        for (std::size_t i = 0; i < x.arity(); ++i) {
            auto& f = x.parts()[i].formula;
            Term body = tensor ? identity_term(f, splits[i], forks[i], used) : identity_term(f, forks[i], splits[i], used);
            arms.push_back({forks[i], {splits[i]}, body});
        }
        return Term::split(outer, splits, Term::fork(inner, std::move(arms)));
    }
    }
    throw Error("identity_term: bad formula");
}

inline TypedTerm identity_term(const Formula& x, const std::string& a, const std::string& b) {
    if (a == b) throw StructureError(StructureErrorKind::DuplicateChannel, "identity needs two distinct channels");
    std::set<std::string> used;
    for (auto& l : x.labels()) used.insert(l);
    Term t = identity_term(x, a, b, used);
    return check(t, Sequent({{a, x}}, {{b, x}}));
}

// f ;γ g, renaming g's channels that clash with f's.
inline TypedTerm compose(const TypedTerm& f, const TypedTerm& g, const std::string& gamma) {
    auto ef = f.sequent.lookup(gamma);
    auto eg = g.sequent.lookup(gamma);
    if (!ef || ef->side != Side::Codomain)
        throw CompositionError(CompositionErrorKind::NoSuchChannel, "'" + gamma + "' is not in the codomain of the left term");
    if (!eg || eg->side != Side::Domain)
        throw CompositionError(CompositionErrorKind::NoSuchChannel, "'" + gamma + "' is not in the domain of the right term");
    if (!(*ef->formula == *eg->formula))
        throw CompositionError(CompositionErrorKind::ChannelTypeMismatch,
                               ef->formula->str() + " vs " + eg->formula->str());
    std::set<std::string> used = all_channels(f.term);
    for (auto& c : f.sequent.channels()) used.insert(c);
    std::set<std::string> gnames = all_channels(g.term);
    for (auto& c : g.sequent.channels()) gnames.insert(c);
    std::set<std::string> taken = used;
    taken.insert(gnames.begin(), gnames.end());
    std::map<std::string, std::string> ren;
    for (auto& c : gnames)
        if (c != gamma && used.count(c)) {
            std::string n = c;
            while (taken.count(n)) n += "'";
            taken.insert(n);
            ren[c] = n;
        }
    Term gt = ren.empty() ? g.term : rename_channels(g.term, ren);
    auto rn = [&](const std::string& c) {
        auto it = ren.find(c);
        return it == ren.end() ? c : it->second;
    };
    std::vector<Binding> d, c;
    for (auto& b : f.sequent.domain()) d.push_back(b);
    for (auto& b : g.sequent.domain())
        if (b.channel != gamma) d.push_back({rn(b.channel), b.formula});
    for (auto& b : f.sequent.codomain())
        if (b.channel != gamma) c.push_back(b);
    for (auto& b : g.sequent.codomain()) c.push_back({rn(b.channel), b.formula});
    auto sig = f.sig ? f.sig : g.sig;
    return check(Term::cut(gamma, f.term, gt, *ef->formula), Sequent(std::move(d), std::move(c)), sig);
}

}  // namespace mallterm
