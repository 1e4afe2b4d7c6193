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
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "core.hpp"
#include "surface.hpp"

namespace mallterm {

class EnumerationLimit : public Error {
  public:
    using Error::Error;
};

// All cut-free proofs of a sequent, by choice of the last rule. Terms are undecorated.
class ProofEnumerator {
  public:
    explicit ProofEnumerator(const Signature& sig, std::size_t limit = 200000) : sig_(sig), limit_(limit) {}

    const std::vector<Term>& proofs(const Sequent& s) {
        std::string k = key(s);
        auto it = memo_.find(k);
        if (it != memo_.end()) return it->second;
        std::vector<Term> out = build(s);
        return memo_.emplace(k, std::move(out)).first->second;
    }

    bool provable(const Sequent& s) {
        std::string k = key(s);
        auto it = prov_.find(k);
        if (it != prov_.end()) return it->second;
        bool r = decide_provable(s);
        prov_.emplace(k, r);
        return r;
    }

  private:
    static std::string key(const Sequent& s) {
        std::vector<std::string> d, c;
        for (auto& b : s.domain()) d.push_back(b.channel + ":" + b.formula.key());
        for (auto& b : s.codomain()) c.push_back(b.channel + ":" + b.formula.key());
        std::sort(d.begin(), d.end());
        std::sort(c.begin(), c.end());
        std::string out;
        for (auto& x : d) out += x + ";";
        out += "|-";
        for (auto& x : c) out += x + ";";
        return out;
    }

    void bump(std::size_t n) {
        produced_ += n;
        if (produced_ > limit_) throw EnumerationLimit("proof enumeration exceeded " + std::to_string(limit_) + " terms");
    }

    static std::vector<std::string> part_names(const Sequent& s, const std::string& c, std::size_t n) {
        std::set<std::string> used;
        for (auto& x : s.channels()) used.insert(x);
        std::vector<std::string> out;
        for (std::size_t i = 0; i < n; ++i) out.push_back(fresh_name(c + "_" + std::to_string(i + 1), used));
        return out;
    }

    // Every way to hand the channels in `rest` to `n` arms.
    static std::vector<std::vector<std::vector<std::string>>> partitions(const std::vector<std::string>& rest, std::size_t n) {
        std::vector<std::vector<std::vector<std::string>>> out;
        std::vector<std::size_t> assign(rest.size(), 0);
        for (;;) {
            std::vector<std::vector<std::string>> p(n);
            for (std::size_t i = 0; i < rest.size(); ++i) p[assign[i]].push_back(rest[i]);
            out.push_back(std::move(p));
            std::size_t i = 0;
            while (i < assign.size() && ++assign[i] == n) assign[i++] = 0;
            if (i == assign.size()) break;
        }
        return out;
    }

    template <class F> void axiom_instances(const Sequent& s, F&& emit) {
        for (auto* d : sig_.axioms()) {
            if (d->ins.size() != s.domain().size() || d->outs.size() != s.codomain().size()) continue;
            std::vector<std::string> ins, outs;
            std::vector<bool> usedd(s.domain().size()), usedc(s.codomain().size());
            auto go = [&](auto& self, std::size_t i) -> void {
                if (i == d->ins.size() + d->outs.size()) {
                    emit(Term::axiom(d->name, ins, outs));
                    return;
                }
                bool in = i < d->ins.size();
                auto& side = in ? s.domain() : s.codomain();
                auto& used = in ? usedd : usedc;
                const Formula& want = in ? d->ins[i] : d->outs[i - d->ins.size()];
                for (std::size_t j = 0; j < side.size(); ++j)
                    if (!used[j] && side[j].formula == want) {
                        used[j] = true;
                        (in ? ins : outs).push_back(side[j].channel);
                        self(self, i + 1);
                        (in ? ins : outs).pop_back();
                        used[j] = false;
                    }
            };
            go(go, 0);
        }
    }

    std::vector<Term> build(const Sequent& s) {
        std::vector<Term> out;
        auto emit = [&](Term t) {
            bump(1);
            out.push_back(std::move(t));
        };
        if (s.domain().size() == 1 && s.codomain().size() == 1) {
            auto& a = s.domain()[0];
            auto& b = s.codomain()[0];
            if (a.formula.is_atom() && a.formula == b.formula) emit(Term::id(a.channel, b.channel));
        }
        axiom_instances(s, emit);
        for (Side side : {Side::Domain, Side::Codomain})
            for (auto& bind : s.side(side)) {
                const std::string& c = bind.channel;
                const Formula& f = bind.formula;
                bool dom = side == Side::Domain;
                switch (f.connective()) {
                case Connective::Atom: break;
                case Connective::Sum:
                case Connective::Prod: {
                    bool is_case = (f.connective() == Connective::Sum) == dom;
                    if (is_case) {
                        if (f.arity() == 0) {
                            emit(Term::case_of(c, {}, s));
                            break;
                        }
                        std::vector<const std::vector<Term>*> subs;
                        bool empty = false;
                        for (auto& p : f.parts()) {
                            subs.push_back(&proofs(s.retyped(c, p.formula)));
                            empty = empty || subs.back()->empty();
                        }
                        if (empty) break;
                        std::vector<std::size_t> idx(subs.size(), 0);
                        for (;;) {
                            std::vector<Branch> bs;
                            for (std::size_t i = 0; i < subs.size(); ++i) bs.push_back({f.parts()[i].label, (*subs[i])[idx[i]]});
                            emit(Term::case_of(c, std::move(bs)));
                            std::size_t i = 0;
                            while (i < idx.size() && ++idx[i] == subs[i]->size()) idx[i++] = 0;
                            if (i == idx.size()) break;
                        }
                    } else {
                        for (auto& p : f.parts())
                            for (auto& t : proofs(s.retyped(c, p.formula))) emit(Term::select(c, p.label, t));
                    }
                    break;
                }
                case Connective::Tensor:
                case Connective::Par: {
                    bool is_split = (f.connective() == Connective::Tensor) == dom;
                    auto parts = part_names(s, c, f.arity());
                    if (is_split) {
                        Sequent inner = s.without(c);
                        for (std::size_t i = 0; i < parts.size(); ++i) inner = inner.with(side, parts[i], f.parts()[i].formula);
                        for (auto& t : proofs(inner)) emit(Term::split(c, parts, t));
                        break;
                    }
                    if (f.arity() == 0) {
                        if (s.width() == 1) emit(Term::fork(c, {}));
                        break;
                    }
                    std::vector<std::string> rest;
                    for (auto& x : s.channels())
                        if (x != c) rest.push_back(x);
                    for (auto& part : partitions(rest, f.arity())) {
                        std::vector<const std::vector<Term>*> subs;
                        bool empty = false;
                        for (std::size_t i = 0; i < f.arity() && !empty; ++i) {
                            Sequent arm = s.restricted(part[i]).with(side, parts[i], f.parts()[i].formula);
                            subs.push_back(&proofs(arm));
                            empty = subs.back()->empty();
                        }
                        if (empty) continue;
                        std::vector<std::size_t> idx(subs.size(), 0);
                        for (;;) {
                            std::vector<Arm> arms;
                            for (std::size_t i = 0; i < subs.size(); ++i) arms.push_back({parts[i], part[i], (*subs[i])[idx[i]]});
                            emit(Term::fork(c, std::move(arms)));
                            std::size_t i = 0;
                            while (i < idx.size() && ++idx[i] == subs[i]->size()) idx[i++] = 0;
                            if (i == idx.size()) break;
                        }
                    }
                    break;
                }
                }
            }
        return out;
    }

    bool decide_provable(const Sequent& s) {
        if (s.domain().size() == 1 && s.codomain().size() == 1 && s.domain()[0].formula.is_atom() &&
            s.domain()[0].formula == s.codomain()[0].formula)
            return true;
        bool found = false;
        axiom_instances(s, [&](const Term&) { found = true; });
        if (found) return true;
        for (Side side : {Side::Domain, Side::Codomain})
            for (auto& bind : s.side(side)) {
                const std::string& c = bind.channel;
                const Formula& f = bind.formula;
                bool dom = side == Side::Domain;
                switch (f.connective()) {
                case Connective::Atom: break;
                case Connective::Sum:
                case Connective::Prod: {
                    bool is_case = (f.connective() == Connective::Sum) == dom;
                    if (is_case) {
                        bool all = true;
                        for (auto& p : f.parts()) all = all && provable(s.retyped(c, p.formula));
                        if (all) return true;
                    } else {
                        for (auto& p : f.parts())
                            if (provable(s.retyped(c, p.formula))) return true;
                    }
                    break;
                }
                default: {
                    bool is_split = (f.connective() == Connective::Tensor) == dom;
                    auto parts = part_names(s, c, f.arity());
                    if (is_split) {
                        Sequent inner = s.without(c);
                        for (std::size_t i = 0; i < parts.size(); ++i) inner = inner.with(side, parts[i], f.parts()[i].formula);
                        if (provable(inner)) return true;
                        break;
                    }
                    if (f.arity() == 0) {
                        if (s.width() == 1) return true;
                        break;
                    }
                    std::vector<std::string> rest;
                    for (auto& x : s.channels())
                        if (x != c) rest.push_back(x);
                    for (auto& part : partitions(rest, f.arity())) {
                        bool all = true;
                        for (std::size_t i = 0; i < f.arity() && all; ++i)
                            all = provable(s.restricted(part[i]).with(side, parts[i], f.parts()[i].formula));
                        if (all) return true;
                    }
                }
                }
            }
        return false;
    }

    const Signature& sig_;
    std::size_t limit_;
    std::size_t produced_ = 0;
    std::unordered_map<std::string, std::vector<Term>> memo_;
    std::unordered_map<std::string, bool> prov_;
};

inline std::vector<Term> enumerate_proofs(const Sequent& s, const Signature& sig = Signature(), std::size_t limit = 200000) {
    ProofEnumerator e(sig, limit);
    std::vector<Term> out;
    for (auto& t : e.proofs(s)) out.push_back(canonicalize(t));
    return out;
}

}  // namespace mallterm
