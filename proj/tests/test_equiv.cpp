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
#include <gtest/gtest.h>

#include <map>

#include "mallterm/equiv.hpp"
#include "mallterm/generate.hpp"
#include "oracle.hpp"

using namespace mallterm;

namespace {

TypedTerm typed(const char* term, const char* sequent) { return check(parse_term(term), parse_sequent(sequent)); }

// Results of every conversion at `t` with the given rule number.
std::vector<TypedTerm> converted(const TypedTerm& t, int rule, bool inventive = false) {
    std::vector<TypedTerm> out;
    for (auto& c : find_conversions(t, inventive))
        if (c.rule.number == rule) out.push_back(apply_conversion(t, c));
    return out;
}

bool reaches(const std::vector<TypedTerm>& ts, const char* term) {
    Term want = canonicalize(parse_term(term));
    for (auto& t : ts)
        if (canonicalize(t.term) == want) return true;
    return false;
}

}  // namespace

TEST(Conversions, CaseCaseFlip) {
    TypedTerm t = typed("a{ x => b{ y => a == b } }", "a:{x:A} |- b:[y:A]");
    EXPECT_TRUE(reaches(converted(t, 15), "b{ y => a{ x => a == b } }"));
    TypedTerm u = converted(t, 15).at(0);
    EXPECT_TRUE(reaches(converted(u, 15), "a{ x => b{ y => a == b } }"));
}

TEST(Conversions, CaseCaseClassHasTwoMembers) {
    TypedTerm t = typed("a{ x => b{ y => a == b } | z => b{ y => a == b } }", "a:{x:A, z:A} |- b:[y:A]");
    auto cls = equivalence_class(t);
    EXPECT_TRUE(cls.complete);
    EXPECT_EQ(cls.members.size(), 2u);
    EXPECT_EQ(oracle::closure(t).members.size(), 2u);
    EXPECT_EQ(equivalence_class(typed("a == b", "a:A |- b:A")).members.size(), 1u);
}

TEST(Conversions, NullaryCaseMovesToOtherUnit) {
    TypedTerm t = typed("a{}", "a:0 |- b:[]");
    auto rs = converted(t, 15);
    ASSERT_FALSE(rs.empty());
    EXPECT_TRUE(reaches(rs, "b{}"));
}

TEST(Conversions, BlockingCaseHasNoInterchange) {
    TypedTerm t = typed("a<() => b<>>", "a:top |- b:top");
    EXPECT_TRUE(converted(t, 23, true).empty());
    EXPECT_EQ(equivalence_class(t).members.size(), 1u);
}

TEST(Conversions, CaseSelect) {
    TypedTerm t = typed("a{ x => b[y]. a == b }", "a:{x:A} |- b:{y:A}");
    EXPECT_TRUE(reaches(converted(t, 16), "b[y]. a{ x => a == b }"));
}

TEST(Conversions, SelectThroughNullarySplit) {
    TypedTerm t = typed("a[p]. b<() => a == c>", "a:[p:A], b:top |- c:A");
    EXPECT_TRUE(reaches(converted(t, 20), "b<() => a[p]. a == c>"));
}

TEST(Conversions, EachStepIsUndone) {
    RandomTerms gen(41);
    std::size_t checked = 0;
    for (int i = 0; i < 300; ++i) {
        TypedTerm t = normalize(gen.term(), 100000, false).first;
        Term start = canonicalize(t.term);
        for (auto& c : find_conversions(t)) {
            TypedTerm u = apply_conversion(t, c);
            ASSERT_EQ(u.sequent, t.sequent);
            bool back = false;
            for (auto& d : find_conversions(u, true))
                if (canonicalize(apply_conversion(u, d).term) == start) {
                    back = true;
                    break;
                }
            ASSERT_TRUE(back) << c.str() << " on " << print_term(t.term);
            ++checked;
        }
    }
    EXPECT_GT(checked, 100u);
}

// (18) copies the side arms of the fork into every branch, so cuts there are counted once per branch.
TEST(Conversions, NonNullaryKeepTheBag) {
    RandomTerms gen(42);
    std::size_t copied = 0;
    auto heights = [](const CutBag& b) { return std::set<std::size_t>(b.heights().begin(), b.heights().end()); };
    for (int i = 0; i < 300; ++i) {
        TypedTerm t = gen.term();
        CutBag b = cut_bag(t.term);
        for (auto& c : find_conversions(t)) {
            if (!c.empty.empty()) continue;
            CutBag after = cut_bag(apply_conversion(t, c).term);
            if (c.rule.number == 18) {
                ASSERT_EQ(heights(after), heights(b)) << c.str() << " on " << print_term(t.term);
                copied += after != b;
                continue;
            }
            ASSERT_EQ(after, b) << c.str() << " on " << print_term(t.term);
        }
    }
    EXPECT_GT(copied, 0u);
}

TEST(Conversions, CaseOutOfForkCopiesSideCuts) {
    TypedTerm t = typed("b< b1 | {a} => a{ x => a == b1 | y => a == b1 } ; b2 | {c} => cut g (c == g, g == b2) >",
                        "a:{x:A, y:A}, c:A |- b:A * A");
    auto rs = converted(t, 18);
    ASSERT_FALSE(rs.empty());
    EXPECT_EQ(cut_bag(t.term).str(), "{2}");
    EXPECT_EQ(cut_bag(rs.front().term).str(), "{2,2}");
    EXPECT_EQ(height(rs.front().term), height(t.term));
}

TEST(Decide, ReflexiveAndRefutesTags) {
    TypedTerm t = typed("b[x]. a == b", "a:A |- b:{x:A, y:A}");
    auto same = decide(t, t);
    EXPECT_EQ(same.verdict, Verdict::Equivalent);
    EXPECT_TRUE(same.chain.empty());
    auto diff = decide(t, typed("b[y]. a == b", "a:A |- b:{x:A, y:A}"));
    EXPECT_EQ(diff.verdict, Verdict::Inequivalent);
    EXPECT_NE(diff.rep1, diff.rep2);
    EXPECT_TRUE(verify_certificate(diff));
    EXPECT_THROW(decide(t, typed("a == b", "a:A |- b:A")), EquivError);
}

TEST(Decide, ProjectionUndoesCotuple) {
    TypedTerm lhs = typed("cut g (g[a]. x == g, g{ a => g == y | b => g == y })", "x:A |- y:A");
    EXPECT_EQ(decide(lhs, typed("x == y", "x:A |- y:A")).verdict, Verdict::Equivalent);
    TypedTerm lhs2 = typed("cut g (g[a]. x[q]. x == g, g{ a => g == y | b => g == y })", "x:[q:A] |- y:A");
    EXPECT_EQ(decide(lhs2, typed("x[q]. x == y", "x:[q:A] |- y:A")).verdict, Verdict::Equivalent);
}

TEST(Decide, CertificatesReplay) {
    RandomTerms gen(43);
    for (int i = 0; i < 200; ++i) {
        TypedTerm t = gen.term();
        TypedTerm nf = normalize(t, 100000, false).first;
        auto cls = equivalence_class(nf, 200);
        TypedTerm other = cls.members.back();
        auto c = decide(t, other);
        ASSERT_EQ(c.verdict, Verdict::Equivalent) << print_term(t.term);
        ASSERT_TRUE(verify_certificate(c));
    }
}

TEST(Decide, RewritingIsSound) {
    RandomTerms gen(44);
    for (int i = 0; i < 200; ++i) {
        TypedTerm t = gen.term();
        for (auto& r : find_redexes(t)) ASSERT_TRUE(equivalent(t, apply(t, r))) << print_term(t.term);
    }
}

TEST(Decide, AgreesWithClosureOracleUpToSix) {
    CorpusOptions o;
    o.total = 6;
    o.max_width = 2;
    o.unary = false;
    std::map<std::string, std::map<std::string, TypedTerm>> groups;
    for_each_cut(o, nullptr, [&](TypedTerm t) {
        TypedTerm nf = normalize(t, 100000, false).first;
        groups[oracle::sequent_key(nf.sequent)].emplace(oracle::key(nf.term), nf);
    });
    std::size_t pairs = 0;
    for (auto& [sk, g] : groups) {
        std::vector<const TypedTerm*> v;
        std::vector<std::set<std::string>> cl;
        for (auto& [k, t] : g) {
            v.push_back(&t);
            cl.push_back(oracle::closure(t).members);
        }
        for (std::size_t i = 0; i < v.size(); ++i)
            for (std::size_t j = i + 1; j < v.size(); ++j, ++pairs)
                ASSERT_EQ(decide(*v[i], *v[j]).verdict == Verdict::Equivalent, oracle::intersect(cl[i], cl[j]))
                    << print_term(v[i]->term) << " vs " << print_term(v[j]->term);
    }
    EXPECT_GT(pairs, 1000u);
}

TEST(Classes, NoLargerThanProofCount) {
    auto pool = enumerate_formulas({"A"}, 3);
    std::erase_if(pool, [](const Formula& f) { return has_unary(f); });
    auto seqs = enumerate_sequents(pool, 6, 2);
    ProofEnumerator en(Signature(), 1000000);
    std::size_t seen = 0;
    for (auto& s : seqs) {
        auto& ps = en.proofs(s);
        if (ps.empty()) continue;
        auto cls = equivalence_class(check(canonicalize(ps.front()), s));
        ASSERT_TRUE(cls.complete);
        ASSERT_LE(cls.members.size(), ps.size()) << s.str();
        ++seen;
    }
    EXPECT_GT(seen, 100u);
}
