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

#include <chrono>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "checker.hpp"
#include "core.hpp"
#include "enumerate.hpp"
#include "equiv.hpp"
#include "generate.hpp"
#include "measure.hpp"
#include "rewriter.hpp"

namespace mallterm {

// A reduction or a conversion, located in some term.
struct RewriteStep {
    bool conversion = false;
    Redex redex;
    Conversion conv;

    std::string str() const { return conversion ? conv.str() : redex.rule.str() + " at " + path_str(redex.path); }
};

inline TypedTerm perform(const TypedTerm& t, const RewriteStep& s) {
    return s.conversion ? apply_conversion(t, s.conv) : apply(t, s.redex);
}

struct Divergence {
    TypedTerm apex;
    RewriteStep left, right;
    TypedTerm left_result, right_result;
    bool mixed() const { return right.conversion; }
};

struct Arrow {
    RewriteStep step;
    CutBag measure;
};

struct DiagramReport {
    Divergence divergence;
    bool resolved = false;
    // Arrows from each end of the divergence down to the meeting term.
    std::vector<Arrow> left_path, right_path;
    std::vector<CutBag> divergence_measure, convergence_measure;
    bool decreasing = false;
    std::size_t depth_used = 0;
};

// Overlapping pairs at each cut: two reductions at the cut, a reduction at the cut and one at
// a child cut, and a reduction at the cut with a conversion at one of its children.
inline std::vector<Divergence> enumerate_divergences(const TypedTerm& t) {
    TypedTerm h = hygienic(t);
    std::vector<Divergence> out;
    auto redexes = find_redexes(h);
    auto convs = find_conversions(h, false);
    auto under = [](const Path& inner, const Path& outer) {
        return inner.size() == outer.size() + 1 && std::equal(outer.begin(), outer.end(), inner.begin());
    };
    for (std::size_t i = 0; i < redexes.size(); ++i) {
        RewriteStep l{false, redexes[i], {}};
        TypedTerm lr = apply(h, redexes[i]);
        for (std::size_t j = i + 1; j < redexes.size(); ++j) {
            auto& r = redexes[j];
            if (r.path != redexes[i].path && !under(r.path, redexes[i].path) && !under(redexes[i].path, r.path)) continue;
            RewriteStep rs{false, r, {}};
            out.push_back({h, l, rs, lr, apply(h, r)});
        }
        for (auto& c : convs) {
            if (!under(c.path, redexes[i].path)) continue;
            RewriteStep rs{true, {}, c};
            out.push_back({h, l, rs, lr, apply_conversion(h, c)});
        }
    }
    return out;
}

namespace lawcheck_detail {

struct Visit {
    TypedTerm term;
    std::string parent;
    RewriteStep step;
    CutBag measure;
    std::size_t depth = 0;
};

inline std::vector<std::pair<RewriteStep, TypedTerm>> moves(const TypedTerm& t, bool conversions) {
    std::vector<std::pair<RewriteStep, TypedTerm>> out;
    for (auto& r : find_redexes(t)) out.push_back({{false, r, {}}, apply(t, r)});
    if (conversions)
        for (auto& c : find_conversions(t, false)) out.push_back({{true, {}, c}, apply_conversion(t, c)});
    return out;
}

inline std::vector<Arrow> path_to(const std::unordered_map<std::string, Visit>& seen, std::string k) {
    std::vector<Arrow> out;
    while (!seen.at(k).parent.empty()) {
        auto& v = seen.at(k);
        out.push_back({v.step, v.measure});
        k = v.parent;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

}  // namespace lawcheck_detail

// Searches for a local convergence from both ends, at most `depth` arrows per side, using
// reductions and, if `conversions`, conversions either way. For a reduction/conversion pair
// the conversion side must start with a reduction.
inline DiagramReport resolve_with(const Divergence& d, bool conversions, std::size_t depth, std::size_t node_cap) {
    using lawcheck_detail::Visit;
    DiagramReport rep{d, false, {}, {}, {}, {}, false, 0};
    CutBag apex = cut_bag(d.apex.term);
    auto lam = [](const CutBag& a, const CutBag& b, bool conv) {
        return arrow_measure(a, b, conv ? ArrowKind::Conversion : ArrowKind::Reduction);
    };
    rep.divergence_measure = {lam(apex, cut_bag(d.left_result.term), d.left.conversion),
                              lam(apex, cut_bag(d.right_result.term), d.right.conversion)};
    std::unordered_map<std::string, Visit> seen[2];
    std::vector<std::string> frontier[2];
    auto seed = [&](int s, const TypedTerm& t) {
        std::string k = structural_key(t.term);
        seen[s].emplace(k, Visit{t, "", {}, {}, 0});
        frontier[s].push_back(k);
    };
    seed(0, d.left_result);
    if (d.mixed() && !find_redexes(d.right_result).empty()) {
        std::string root = "^";
        seen[1].emplace(root, Visit{d.right_result, "", {}, {}, 0});
        CutBag rb = cut_bag(d.right_result.term);
        for (auto& r : find_redexes(d.right_result)) {
            TypedTerm n = apply(d.right_result, r);
            std::string k = structural_key(n.term);
            if (seen[1].count(k)) continue;
            seen[1].emplace(k, Visit{n, root, {false, r, {}}, lam(rb, cut_bag(n.term), false), 1});
            frontier[1].push_back(k);
        }
    } else {
        seed(1, d.right_result);
    }
    auto best_meet = [&]() -> std::optional<std::string> {
        std::optional<std::string> best;
        std::vector<CutBag> best_m;
        for (auto& [k, v] : seen[0]) {
            if (!seen[1].count(k) || k == "^") continue;
            std::vector<CutBag> m;
            for (auto& a : lawcheck_detail::path_to(seen[0], k)) m.push_back(a.measure);
            for (auto& a : lawcheck_detail::path_to(seen[1], k)) m.push_back(a.measure);
            if (!best || bags_less(m, best_m)) best = k, best_m = std::move(m);
        }
        return best;
    };
    std::optional<std::string> meet = best_meet();
    for (std::size_t round = 0; !meet && round < 2 * depth; ++round) {
        int s = frontier[0].size() <= frontier[1].size() ? 0 : 1;
        if (frontier[s].empty()) s = 1 - s;
        if (frontier[s].empty()) break;
        std::vector<std::string> next;
        for (auto& k : frontier[s]) {
            Visit v = seen[s].at(k);
            if (v.depth >= depth) continue;
            CutBag vb = cut_bag(v.term.term);
            for (auto& [st, n] : lawcheck_detail::moves(v.term, conversions)) {
                std::string nk = structural_key(n.term);
                if (seen[s].count(nk)) continue;
                CutBag nb = cut_bag(n.term);
                seen[s].emplace(nk, Visit{n, k, st, lam(vb, nb, st.conversion), v.depth + 1});
                next.push_back(nk);
            }
            if (seen[0].size() + seen[1].size() > node_cap) break;
        }
        frontier[s] = std::move(next);
        meet = best_meet();
        if (seen[0].size() + seen[1].size() > node_cap) break;
    }
    if (!meet) return rep;
    rep.resolved = true;
    rep.left_path = lawcheck_detail::path_to(seen[0], *meet);
    rep.right_path = lawcheck_detail::path_to(seen[1], *meet);
    for (auto& a : rep.left_path) rep.convergence_measure.push_back(a.measure);
    for (auto& a : rep.right_path) rep.convergence_measure.push_back(a.measure);
    rep.decreasing = bags_less(rep.convergence_measure, rep.divergence_measure);
    rep.depth_used = std::max(rep.left_path.size(), rep.right_path.size());
    return rep;
}

inline DiagramReport resolve(const Divergence& d, std::size_t depth = 6, std::size_t node_cap = 20000) {
    return resolve_with(d, true, depth, node_cap);
}

// Normal form reached by always taking the redex `pick` chooses.
inline TypedTerm normalize_by(const TypedTerm& t, const std::function<std::size_t(const std::vector<Redex>&)>& pick,
                              std::size_t max_steps = 100000) {
    TypedTerm cur = t;
    for (std::size_t i = 0;; ++i) {
        auto rs = find_redexes(cur);
        if (rs.empty()) return cur;
        if (i == max_steps) throw RewriteError(RewriteErrorKind::StepBudgetExceeded, "normalize_by");
        cur = apply(cur, rs[pick(rs) % rs.size()]);
    }
}

// Normal forms of `t` under several strategies; all must be equivalent.
inline std::vector<TypedTerm> strategy_normal_forms(const TypedTerm& t, std::uint64_t seed, std::size_t random_runs = 2) {
    std::vector<TypedTerm> out;
    out.push_back(normalize(t, 100000, false).first);
    out.push_back(normalize_by(t, [](auto&) { return std::size_t{0}; }));
    out.push_back(normalize_by(t, [](auto& rs) { return rs.size() - 1; }));
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < random_runs; ++i)
        out.push_back(normalize_by(t, [&](auto& rs) { return std::uniform_int_distribution<std::size_t>(0, rs.size() - 1)(rng); }));
    return out;
}

struct LawResult {
    bool holds = false;
    Verdict verdict = Verdict::Inconclusive;
    std::string lhs, rhs;
    explicit operator bool() const { return holds; }
};

namespace lawcheck_detail {

inline LawResult compare(const TypedTerm& a, const TypedTerm& b, std::size_t budget) {
    auto c = decide(a, b, budget);
    return {c.verdict == Verdict::Equivalent, c.verdict, print_term(a.term), print_term(b.term)};
}

// Renames free channels; binders are canonicalized first so nothing is captured.
inline TypedTerm renamed(const TypedTerm& t, const std::map<std::string, std::string>& ren) {
    Term c = canonicalize(t.term);
    std::map<std::string, std::string> m;
    for (auto& [k, v] : ren)
        if (t.sequent.contains(k)) m[k] = v;
    auto names = all_channels(c);
    std::set<std::string> free(c.interface().begin(), c.interface().end());
    std::set<std::string> taken(names.begin(), names.end());
    for (auto& [k, v] : m) taken.insert(v);
    for (auto& n : names)
        if (!free.count(n) && std::any_of(m.begin(), m.end(), [&](auto& kv) { return kv.second == n; })) {
            std::string f = fresh_name("c", taken);
            m[n] = f;
        }
    std::vector<Binding> d, co;
    auto rn = [&](const std::string& x) {
        auto it = m.find(x);
        return it == m.end() ? x : it->second;
    };
    for (auto& b : t.sequent.domain()) d.push_back({rn(b.channel), b.formula});
    for (auto& b : t.sequent.codomain()) co.push_back({rn(b.channel), b.formula});
    return check(rename_channels(c, m), Sequent(d, co), t.sig);
}

}  // namespace lawcheck_detail

// f ;γ 1 ~ f when γ is in the codomain of f, 1 ;γ f ~ f when it is in the domain.
inline LawResult check_identity_law(const TypedTerm& f, const std::string& gamma, std::size_t budget = 100000) {
    auto e = f.sequent.lookup(gamma);
    if (!e) throw CompositionError(CompositionErrorKind::NoSuchChannel, "'" + gamma + "'");
    std::set<std::string> used = all_channels(f.term);
    for (auto& c : f.sequent.channels()) used.insert(c);
    std::string other = fresh_name(gamma + "_id", used);
    TypedTerm composed = e->side == Side::Codomain ? compose(f, identity_term(*e->formula, gamma, other), gamma)
                                                   : compose(identity_term(*e->formula, other, gamma), f, gamma);
    TypedTerm back = lawcheck_detail::renamed(composed, {{other, gamma}});
    back = check(back.term, f.sequent, f.sig);
    return lawcheck_detail::compare(back, f, budget);
}

// (f ;γ g) ;δ h ~ f ;γ (g ;δ h).
inline LawResult check_assoc(const TypedTerm& f, const TypedTerm& g, const TypedTerm& h, const std::string& gamma,
                             const std::string& delta, std::size_t budget = 100000) {
    TypedTerm l = compose(compose(f, g, gamma), h, delta);
    TypedTerm r = compose(f, compose(g, h, delta), gamma);
    return lawcheck_detail::compare(l, check(r.term, l.sequent, r.sig), budget);
}

// With γ, δ both in the codomain of f: (f ;γ g) ;δ h ~ (f ;δ h) ;γ g.
// With both in the domain of f: h ;δ (g ;γ f) ~ g ;γ (h ;δ f).
inline LawResult check_interchange(const TypedTerm& f, const TypedTerm& g, const TypedTerm& h, const std::string& gamma,
                                   const std::string& delta, std::size_t budget = 100000) {
    auto e = f.sequent.lookup(gamma);
    if (!e) throw CompositionError(CompositionErrorKind::NoSuchChannel, "'" + gamma + "'");
    TypedTerm l = e->side == Side::Codomain ? compose(compose(f, g, gamma), h, delta) : compose(h, compose(g, f, gamma), delta);
    TypedTerm r = e->side == Side::Codomain ? compose(compose(f, h, delta), g, gamma) : compose(g, compose(h, f, delta), gamma);
    return lawcheck_detail::compare(l, check(r.term, l.sequent, r.sig), budget);
}

// Additive bijection at channel `alpha` (a domain sum or a codomain product):
// psi({s_i}) = alpha{ i => s_i }, phi_k(t) = alpha[k].1 ;alpha t (dually t ;alpha alpha[k].1).
// Checks phi_k(psi(s)) ~ s_k for every k and psi(phi(t)) ~ t.
inline LawResult check_additive_bijection(const std::string& alpha, const std::vector<TypedTerm>& s, const TypedTerm& t,
                                          std::size_t budget = 100000) {
    auto e = t.sequent.lookup(alpha);
    if (!e) throw CompositionError(CompositionErrorKind::NoSuchChannel, "'" + alpha + "'");
    const Formula& x = *e->formula;
    bool dom = e->side == Side::Domain;
    if (x.connective() != (dom ? Connective::Sum : Connective::Prod) || s.size() != x.arity())
        throw EquivError("additive bijection needs a domain sum or codomain product with one term per component");
    std::set<std::string> used = all_channels(t.term);
    for (auto& c : t.sequent.channels()) used.insert(c);
    for (auto& si : s) {
        auto a = all_channels(si.term);
        used.insert(a.begin(), a.end());
    }
    std::string y = fresh_name(alpha + "_in", used);
    auto phi = [&](std::size_t k, const TypedTerm& u) {
        const Formula& xk = x.parts()[k].formula;
        const std::string& tag = x.parts()[k].label;
        TypedTerm inj = dom ? identity_term(xk, y, alpha) : identity_term(xk, alpha, y);
        Sequent is = dom ? Sequent({{y, xk}}, {{alpha, x}}) : Sequent({{alpha, x}}, {{y, xk}});
        TypedTerm ij = check(Term::select(alpha, tag, inj.term), is, u.sig);
        TypedTerm c = dom ? compose(ij, u, alpha) : compose(u, ij, alpha);
        return lawcheck_detail::renamed(c, {{y, alpha}});
    };
    std::vector<Branch> bs;
    for (std::size_t i = 0; i < s.size(); ++i) bs.push_back({x.parts()[i].label, canonicalize(s[i].term)});
    std::optional<Sequent> ctx;
    if (bs.empty()) ctx = t.sequent;
    TypedTerm psi = check(canonicalize(Term::case_of(alpha, bs, ctx)), t.sequent, t.sig);
    for (std::size_t k = 0; k < s.size(); ++k) {
        TypedTerm lhs = phi(k, psi);
        auto r = lawcheck_detail::compare(check(lhs.term, s[k].sequent, t.sig), s[k], budget);
        if (!r) return r;
    }
    std::vector<Branch> back;
    for (std::size_t i = 0; i < x.arity(); ++i) back.push_back({x.parts()[i].label, canonicalize(phi(i, t).term)});
    TypedTerm round = check(Term::case_of(alpha, back, ctx), t.sequent, t.sig);
    return lawcheck_detail::compare(round, t, budget);
}

// Multiplicative bijection at `alpha` (a domain tensor or a codomain par), for a bundle of
// channels `parts` in s: psi(s) = alpha<(parts) => s>, phi(t) = u ;alpha t with
// u = alpha< p_i | {parts_i} => parts_i == p_i > (dually t ;alpha u). Nullary: u = alpha<>.
inline LawResult check_representability(const std::string& alpha, const std::vector<std::string>& parts, const TypedTerm& s,
                                        const TypedTerm& t, std::size_t budget = 100000) {
    auto e = t.sequent.lookup(alpha);
    if (!e) throw CompositionError(CompositionErrorKind::NoSuchChannel, "'" + alpha + "'");
    const Formula& x = *e->formula;
    bool dom = e->side == Side::Domain;
    if (x.connective() != (dom ? Connective::Tensor : Connective::Par) || parts.size() != x.arity())
        throw EquivError("representability needs a domain tensor or codomain par matching the bundle");
    std::set<std::string> used = all_channels(t.term);
    auto sa = all_channels(s.term);
    used.insert(sa.begin(), sa.end());
    for (auto& c : t.sequent.channels()) used.insert(c);
    for (auto& c : s.sequent.channels()) used.insert(c);
    std::vector<Arm> arms;
    std::vector<Binding> bundle;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        std::string p = fresh_name(alpha + "_p", used);
        const Formula& xi = x.parts()[i].formula;
        Term body = dom ? identity_term(xi, parts[i], p).term : identity_term(xi, p, parts[i]).term;
        arms.push_back({p, {parts[i]}, body});
        bundle.push_back({parts[i], xi});
    }
    Sequent us = dom ? Sequent(bundle, {{alpha, x}}) : Sequent({{alpha, x}}, bundle);
    TypedTerm u = check(Term::fork(alpha, arms), us, t.sig);
    auto phi = [&](const TypedTerm& v) { return dom ? compose(u, v, alpha) : compose(v, u, alpha); };
    TypedTerm psi = check(canonicalize(Term::split(alpha, parts, s.term)), t.sequent, t.sig);
    TypedTerm lhs = phi(psi);
    auto r = lawcheck_detail::compare(check(lhs.term, s.sequent, t.sig), s, budget);
    if (!r) return r;
    TypedTerm ph = phi(t);
    TypedTerm round = check(Term::split(alpha, parts, canonicalize(ph.term)), t.sequent, t.sig);
    return lawcheck_detail::compare(round, t, budget);
}

// alpha[a]. f[x := alpha] ~ f ;x alpha[a].1, for x in the codomain of f (dually the domain).
inline LawResult check_injection(const TypedTerm& f, const std::string& x, const Formula& sum, const std::string& tag,
                                 std::size_t budget = 100000) {
    auto e = f.sequent.lookup(x);
    if (!e) throw CompositionError(CompositionErrorKind::NoSuchChannel, "'" + x + "'");
    bool cod = e->side == Side::Codomain;
    if (sum.connective() != (cod ? Connective::Sum : Connective::Prod) || !sum.component(tag) || !(*sum.component(tag) == *e->formula))
        throw EquivError("injection needs a matching component");
    std::set<std::string> used = all_channels(f.term);
    for (auto& c : f.sequent.channels()) used.insert(c);
    std::string a = fresh_name(x + "_s", used);
    TypedTerm id = cod ? identity_term(*e->formula, x, a) : identity_term(*e->formula, a, x);
    Sequent is = cod ? Sequent({{x, *e->formula}}, {{a, sum}}) : Sequent({{a, sum}}, {{x, *e->formula}});
    TypedTerm inj = check(Term::select(a, tag, id.term), is, f.sig);
    TypedTerm rhs = cod ? compose(f, inj, x) : compose(inj, f, x);
    Term sel = Term::select(a, tag, substitute_free(canonicalize(f.term), x, a));
    TypedTerm lhs = check(sel, rhs.sequent, f.sig);
    return lawcheck_detail::compare(lhs, rhs, budget);
}

// Random instances for the law sweeps.
class LawInstances {
  public:
    LawInstances(std::uint64_t seed, std::shared_ptr<const Signature> sig = nullptr, GeneratorOptions opt = small())
        : gen_(seed, std::move(sig), std::move(opt)) {}

    static GeneratorOptions small() {
        GeneratorOptions o;
        o.max_depth = 4;
        o.max_branch = 2;
        o.max_formula = 3;
        return o;
    }

    RandomTerms& gen() { return gen_; }

    struct Triple {
        TypedTerm f, g, h;
        std::string gamma, delta;
    };

    std::pair<TypedTerm, std::string> identity_instance() {
        TypedTerm f = gen_.term(3);
        auto chans = f.sequent.channels();
        return {f, chans[gen_.below(chans.size())]};
    }

    Triple assoc_instance() {
        for (;;) {
            Formula x = gen_.formula(3);
            TypedTerm f = fresh_names(gen_.with_channel(x, Side::Codomain, "p", 2), {{"p", "gam"}});
            TypedTerm g0 = gen_.grow(identity_term(x.relabeled("gam"), "gam", "q"), {"gam"}, 2);
            std::vector<std::string> outs;
            for (auto& b : g0.sequent.codomain()) outs.push_back(b.channel);
            if (outs.empty()) continue;
            std::string d = outs[gen_.below(outs.size())];
            TypedTerm g = fresh_names(g0, {{d, "del"}, {"gam", "gam"}});
            Formula y = *g.sequent.lookup("del")->formula;
            TypedTerm h = fresh_names(gen_.with_channel(y, Side::Domain, "p", 2), {{"p", "del"}});
            return {f, g, h, "gam", "del"};
        }
    }

    Triple interchange_instance(bool codomain) {
        Side side = codomain ? Side::Codomain : Side::Domain;
        for (;;) {
            Formula x = gen_.formula(3);
            TypedTerm f0 = gen_.with_channel(x, side, "p", 3);
            std::vector<std::string> cands;
            for (auto& b : f0.sequent.side(side))
                if (b.channel != "p") cands.push_back(b.channel);
            if (cands.empty()) continue;
            std::string d = cands[gen_.below(cands.size())];
            TypedTerm f = fresh_names(f0, {{d, "del"}, {"p", "gam"}});
            Formula y = *f.sequent.lookup("del")->formula;
            TypedTerm g = fresh_names(gen_.with_channel(x, opposite(side), "p", 2), {{"p", "gam"}});
            TypedTerm h = fresh_names(gen_.with_channel(y, opposite(side), "p", 2), {{"p", "del"}});
            return {f, g, h, "gam", "del"};
        }
    }

    // Γ, alpha:X ⊢ Δ with cut-free members drawn from the proofs of each sequent.
    struct AdditiveInstance {
        std::string alpha;
        std::vector<TypedTerm> s;
        TypedTerm t;
    };

    std::optional<AdditiveInstance> additive_instance(bool sum, std::size_t arity) {
        ProofEnumerator en(*gen_.signature(), 20000);
        for (int attempt = 0; attempt < 200; ++attempt) {
            Sequent ctx = context();
            Side side = sum ? Side::Domain : Side::Codomain;
            std::vector<Labeled> ls;
            for (std::size_t i = 0; i < arity; ++i) ls.push_back({std::string(1, char('a' + i)), gen_.formula(2)});
            Formula x = Formula::make(sum ? Connective::Sum : Connective::Prod, ls).relabeled("al");
            try {
                std::vector<TypedTerm> s;
                bool ok = true;
                for (std::size_t i = 0; i < arity && ok; ++i) {
                    Sequent si = ctx.with(side, "al", x.parts()[i].formula.relabeled("al"));
                    auto& ps = en.proofs(si);
                    if (ps.empty()) ok = false;
                    else s.push_back(check(canonicalize(ps[gen_.below(ps.size())]), si, gen_.signature()));
                }
                if (!ok) continue;
                Sequent ts = ctx.with(side, "al", x);
                auto& pt = en.proofs(ts);
                if (pt.empty()) continue;
                return AdditiveInstance{"al", s, check(canonicalize(pt[gen_.below(pt.size())]), ts, gen_.signature())};
            } catch (const EnumerationLimit&) {
                continue;
            }
        }
        return std::nullopt;
    }

    struct MultiplicativeInstance {
        std::string alpha;
        std::vector<std::string> parts;
        TypedTerm s, t;
    };

    std::optional<MultiplicativeInstance> multiplicative_instance(bool tensor, std::size_t arity) {
        ProofEnumerator en(*gen_.signature(), 20000);
        for (int attempt = 0; attempt < 200; ++attempt) {
            Sequent ctx = context();
            Side side = tensor ? Side::Domain : Side::Codomain;
            std::vector<Formula> fs;
            std::vector<std::string> parts;
            Sequent ss = ctx;
            for (std::size_t i = 0; i < arity; ++i) {
                fs.push_back(gen_.formula(2));
                parts.push_back("m" + std::to_string(i + 1));
                ss = ss.with(side, parts.back(), fs.back().relabeled(parts.back()));
            }
            Formula x = tensor ? Formula::tensor_of(fs, "al") : Formula::par_of(fs, "al");
            Sequent ts = ctx.with(side, "al", x);
            try {
                auto& ps = en.proofs(ss);
                auto& pt = en.proofs(ts);
                if (ps.empty() || pt.empty()) continue;
                return MultiplicativeInstance{"al", parts, check(canonicalize(ps[gen_.below(ps.size())]), ss, gen_.signature()),
                                              check(canonicalize(pt[gen_.below(pt.size())]), ts, gen_.signature())};
            } catch (const EnumerationLimit&) {
                continue;
            }
        }
        return std::nullopt;
    }

  private:
    Sequent context() {
        std::vector<Binding> d, c;
        std::size_t nd = gen_.below(3), nc = gen_.below(3);
        for (std::size_t i = 0; i < nd; ++i) {
            std::string n = "x" + std::to_string(i + 1);
            d.push_back({n, gen_.formula(2).relabeled(n)});
        }
        for (std::size_t i = 0; i < nc; ++i) {
            std::string n = "y" + std::to_string(i + 1);
            c.push_back({n, gen_.formula(2).relabeled(n)});
        }
        return Sequent(d, c);
    }

    // Applies `fixed` and renames every other free channel to a globally fresh name.
    TypedTerm fresh_names(const TypedTerm& t, const std::map<std::string, std::string>& fixed) {
        std::map<std::string, std::string> m;
        for (auto& c : t.sequent.channels()) {
            auto it = fixed.find(c);
            m[c] = it != fixed.end() ? it->second : "u" + std::to_string(++counter_);
        }
        return lawcheck_detail::renamed(t, m);
    }

    RandomTerms gen_;
    std::size_t counter_ = 0;
};

struct SweepReport {
    std::string law;
    std::size_t instances = 0, passed = 0, skipped = 0;
    std::vector<std::string> failures;
    double seconds = 0;
    bool ok() const { return passed == instances && failures.empty(); }
};

namespace lawcheck_detail {

// Draws until `count` instances were checked; draws that yield no instance are skipped, at most `count` of them.
template <class F> SweepReport sweep(const std::string& law, std::size_t count, F&& one) {
    SweepReport r;
    r.law = law;
    auto t0 = std::chrono::steady_clock::now();
    for (std::size_t i = 0; r.instances < count && r.skipped <= count; ++i) {
        try {
            std::optional<LawResult> res = one(i);
            if (!res) {
                ++r.skipped;
                continue;
            }
            ++r.instances;
            if (res->holds) ++r.passed;
            else r.failures.push_back("#" + std::to_string(i) + " " + to_string(res->verdict) + ": " + res->lhs + "  vs  " + res->rhs);
        } catch (const std::exception& e) {
            ++r.instances;
            r.failures.push_back("#" + std::to_string(i) + " error: " + e.what());
        }
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

}  // namespace lawcheck_detail

inline SweepReport sweep_identity(std::uint64_t seed, std::size_t count, std::shared_ptr<const Signature> sig = nullptr,
                                 GeneratorOptions opt = LawInstances::small()) {
    LawInstances li(seed, std::move(sig), std::move(opt));
    return lawcheck_detail::sweep("identity", count, [&](std::size_t) -> std::optional<LawResult> {
        auto [f, g] = li.identity_instance();
        return check_identity_law(f, g);
    });
}

inline SweepReport sweep_assoc(std::uint64_t seed, std::size_t count, std::shared_ptr<const Signature> sig = nullptr,
                                 GeneratorOptions opt = LawInstances::small()) {
    LawInstances li(seed, std::move(sig), std::move(opt));
    return lawcheck_detail::sweep("assoc", count, [&](std::size_t) -> std::optional<LawResult> {
        auto x = li.assoc_instance();
        return check_assoc(x.f, x.g, x.h, x.gamma, x.delta);
    });
}

inline SweepReport sweep_interchange(std::uint64_t seed, std::size_t count, std::shared_ptr<const Signature> sig = nullptr,
                                 GeneratorOptions opt = LawInstances::small()) {
    LawInstances li(seed, std::move(sig), std::move(opt));
    return lawcheck_detail::sweep("interchange", count, [&](std::size_t i) -> std::optional<LawResult> {
        auto x = li.interchange_instance(i % 2 == 0);
        return check_interchange(x.f, x.g, x.h, x.gamma, x.delta);
    });
}

// Cycles sums, products and arities 0..3, so both units are covered.
inline SweepReport sweep_additive(std::uint64_t seed, std::size_t count, std::shared_ptr<const Signature> sig = nullptr,
                                 GeneratorOptions opt = LawInstances::small()) {
    LawInstances li(seed, std::move(sig), std::move(opt));
    return lawcheck_detail::sweep("poly-sum", count, [&](std::size_t i) -> std::optional<LawResult> {
        auto x = li.additive_instance(i % 2 == 0, (i / 2) % 4);
        if (!x) return std::nullopt;
        return check_additive_bijection(x->alpha, x->s, x->t);
    });
}

inline SweepReport sweep_representability(std::uint64_t seed, std::size_t count, std::shared_ptr<const Signature> sig = nullptr,
                                 GeneratorOptions opt = LawInstances::small()) {
    LawInstances li(seed, std::move(sig), std::move(opt));
    return lawcheck_detail::sweep("representability", count, [&](std::size_t i) -> std::optional<LawResult> {
        auto x = li.multiplicative_instance(i % 2 == 0, (i / 2) % 4);
        if (!x) return std::nullopt;
        return check_representability(x->alpha, x->parts, x->s, x->t);
    });
}

}  // namespace mallterm
