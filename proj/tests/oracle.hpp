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

// Brute-force reference implementations used only by the tests.

#include <algorithm>
#include <deque>
#include <set>
#include <string>
#include <vector>

#include "mallterm/equiv.hpp"
#include "mallterm/rewriter.hpp"
#include "mallterm/surface.hpp"

namespace oracle {

using namespace mallterm;

inline Term sort_branches(const Term& t) {
    Term u = t;
    for (std::size_t i = 0; i < t.child_count(); ++i) u = u.with_child(i, sort_branches(t.child(i)));
    if (auto* c = u.get<CaseNode>(); c && c->branches.size() > 1) {
        auto bs = c->branches;
        std::sort(bs.begin(), bs.end(), [](const Branch& a, const Branch& b) { return a.tag < b.tag; });
        return Term::case_of(c->chan, std::move(bs), c->ctx);
    }
    return u;
}

// Printed form with branches in tag order and binders renamed afterwards.
inline std::string key(const Term& t) { return print_term(canonicalize(sort_branches(t))); }

inline std::string sequent_key(const Sequent& s) {
    std::vector<std::string> d, c;
    for (auto& b : s.domain()) d.push_back(b.channel + ":" + b.formula.key());
    for (auto& b : s.codomain()) c.push_back(b.channel + ":" + b.formula.key());
    std::sort(d.begin(), d.end());
    std::sort(c.begin(), c.end());
    std::string out;
    for (auto& x : d) out += x + ",";
    out += "|-";
    for (auto& x : c) out += x + ",";
    return out;
}

struct Closure {
    std::set<std::string> members;
    bool complete = true;
};

// Every term reachable from normal form `t` by conversions in either direction, inventive
// ones included, renormalizing where a conversion leaves a redex.
inline Closure closure(const TypedTerm& t, std::size_t budget = 20000) {
    Closure c;
    std::deque<TypedTerm> q{t};
    c.members.insert(key(t.term));
    while (!q.empty()) {
        TypedTerm cur = q.front();
        q.pop_front();
        for (auto& conv : find_conversions(cur, true)) {
            TypedTerm n = apply_conversion(cur, conv);
            if (!is_normal(n)) n = normalize(n, 100000, false).first;
            if (!c.members.insert(key(n.term)).second) continue;
            if (c.members.size() > budget) {
                c.complete = false;
                return c;
            }
            q.push_back(std::move(n));
        }
    }
    return c;
}

inline bool intersect(const std::set<std::string>& a, const std::set<std::string>& b) {
    for (auto& x : a)
        if (b.count(x)) return true;
    return false;
}

inline bool equivalent(const TypedTerm& a, const TypedTerm& b) {
    TypedTerm na = normalize(a, 100000, false).first, nb = normalize(b, 100000, false).first;
    return intersect(closure(na).members, closure(nb).members);
}

}  // namespace oracle
