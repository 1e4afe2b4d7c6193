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
#include <functional>
#include <string>
#include <vector>

#include "core.hpp"

namespace mallterm {

inline std::size_t height(const Term& t) {
    switch (t.kind()) {
    case TermKind::Id:
    case TermKind::Axiom: return 1;
    case TermKind::Case: {
        std::size_t m = 0;
        for (auto& b : t.as<CaseNode>().branches) m = std::max(m, height(b.body));
        return 1 + m;
    }
    case TermKind::Select: return 1 + height(t.as<SelectNode>().body);
    case TermKind::Split: return 1 + height(t.as<SplitNode>().body);
    case TermKind::Fork: {
        std::size_t s = 0;
        for (auto& a : t.as<ForkNode>().arms) s += height(a.body);
        return 1 + s;
    }
    case TermKind::Cut: return height(t.as<CutNode>().left) + height(t.as<CutNode>().right);
    }
    return 0;
}

// Multiset of cut heights, one per cut node, kept in descending order.
class CutBag {
  public:
    CutBag() = default;
    explicit CutBag(std::vector<std::size_t> hs) : hs_(std::move(hs)) {
        std::sort(hs_.begin(), hs_.end(), std::greater<>());
    }
    const std::vector<std::size_t>& heights() const { return hs_; }
    bool empty() const { return hs_.empty(); }
    std::size_t size() const { return hs_.size(); }
    std::string str() const {
        std::string s = "{";
        for (std::size_t i = 0; i < hs_.size(); ++i) s += (i ? "," : "") + std::to_string(hs_[i]);
        return s + "}";
    }
    friend bool operator==(const CutBag& a, const CutBag& b) { return a.hs_ == b.hs_; }
    friend bool operator!=(const CutBag& a, const CutBag& b) { return a.hs_ != b.hs_; }

  private:
    std::vector<std::size_t> hs_;
};

inline CutBag cut_bag(const Term& t) {
    std::vector<std::size_t> hs;
    auto walk = [&](auto& self, const Term& u) -> std::size_t {
        std::size_t h = 0;
        switch (u.kind()) {
        case TermKind::Id:
        case TermKind::Axiom: h = 1; break;
        case TermKind::Case: {
            std::size_t m = 0;
            for (std::size_t i = 0; i < u.child_count(); ++i) m = std::max(m, self(self, u.child(i)));
            h = 1 + m;
            break;
        }
        case TermKind::Select:
        case TermKind::Split: h = 1 + self(self, u.child(0)); break;
        case TermKind::Fork: {
            std::size_t s = 0;
            for (std::size_t i = 0; i < u.child_count(); ++i) s += self(self, u.child(i));
            h = 1 + s;
            break;
        }
        case TermKind::Cut:
            h = self(self, u.child(0)) + self(self, u.child(1));
            hs.push_back(h);
            break;
        }
        return h;
    };
    walk(walk, t);
    return CutBag(std::move(hs));
}

// Multiset extension of a total order: compare descending sequences lexicographically.
template <class T, class Less> bool multiset_less(std::vector<T> a, std::vector<T> b, Less less) {
    auto desc = [&](const T& x, const T& y) { return less(y, x); };
    std::sort(a.begin(), a.end(), desc);
    std::sort(b.begin(), b.end(), desc);
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), less);
}

// a < b in the multiset ordering on cut heights.
inline bool bag_less(const CutBag& a, const CutBag& b) {
    return std::lexicographical_compare(a.heights().begin(), a.heights().end(), b.heights().begin(), b.heights().end());
}

enum class ArrowKind : std::uint8_t { Reduction, Conversion };

// Reductions weigh the smaller end, conversions the larger.
inline CutBag arrow_measure(const CutBag& before, const CutBag& after, ArrowKind kind) {
    bool a_less = bag_less(after, before);
    if (kind == ArrowKind::Reduction) return a_less ? after : before;
    return a_less ? before : after;
}

inline bool bags_less(const std::vector<CutBag>& a, const std::vector<CutBag>& b) {
    return multiset_less(a, b, [](const CutBag& x, const CutBag& y) { return bag_less(x, y); });
}

}  // namespace mallterm
