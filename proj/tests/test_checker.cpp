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

#include <fstream>
#include <set>
#include <sstream>

#include "mallterm/checker.hpp"
#include "mallterm/generate.hpp"
#include "mallterm/surface.hpp"

using namespace mallterm;

namespace {

std::string slurp(const std::string& name) {
    std::ifstream in(std::string(MALLTERM_SAMPLES) + "/" + name);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

TypeErrorKind kind_of(const Term& t, const Sequent& s, std::shared_ptr<const Signature> sig = nullptr) {
    try {
        check(t, s, std::move(sig));
    } catch (const TypeError& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no type error for " << print_term(t);
    return TypeErrorKind::AmbiguousCut;
}

}  // namespace

TEST(Check, Distribution) {
    PairedFile p = parse_paired(slurp("distribution.ct"));
    TypedTerm t = check(p.term, parse_sequent("a:A * (B % C) |- b:B % (A * C)"));
    EXPECT_NE(t.term.sequent(), nullptr);
}

TEST(Check, Vending) {
    PairedFile p = parse_paired(slurp("vending.cp"));
    auto sig = std::make_shared<const Signature>(parse_signature(slurp("vending.sig")));
    EXPECT_NO_THROW(check(p.term, p.sequent, sig));
    EXPECT_ANY_THROW(check(p.term, p.sequent));
}

TEST(Check, NullaryForkNeedsQuietContext) {
    EXPECT_NO_THROW(check(parse_term("a<>"), parse_sequent("|- a:top")));
    EXPECT_NO_THROW(check(parse_term("a<>"), parse_sequent("a:bot |-")));
    EXPECT_ANY_THROW(check(parse_term("a<>"), parse_sequent("a:top, b:A |-")));
    EXPECT_ANY_THROW(check(parse_term("a<>"), parse_sequent("b:A |- a:top")));
}

TEST(Check, Errors) {
    EXPECT_EQ(kind_of(parse_term("a == c"), parse_sequent("a:A |- b:A")), TypeErrorKind::UnknownChannel);
    EXPECT_EQ(kind_of(parse_term("a[x]. a1 == b"), parse_sequent("a:A |- b:A")), TypeErrorKind::WrongConnective);
    EXPECT_EQ(kind_of(parse_term("b[z]. a == b"), parse_sequent("a:A |- b:{x:A}")), TypeErrorKind::TagNotInType);
    EXPECT_EQ(kind_of(parse_term("a == b"), parse_sequent("a:A, c:A |- b:A")), TypeErrorKind::LeftoverChannels);
    EXPECT_EQ(kind_of(parse_term("b<b1 | {} => a == b1 ; b2 | {} => b2<> >"), parse_sequent("a:A |- b:A * top")),
              TypeErrorKind::PartitionError);
}

TEST(Identity, Shapes) {
    EXPECT_EQ(identity_term(parse_formula("A"), "a", "b").term, Term::id("a", "b"));
    EXPECT_EQ(identity_term(parse_formula("{i:A}"), "a", "b").term,
              Term::case_of("a", {{"i", Term::select("b", "i", Term::id("a", "b"))}}));
    EXPECT_EQ(identity_term(parse_formula("top"), "a", "b").term, parse_term("a<() => b<>>"));
}

TEST(Identity, ChecksForAllSmallFormulas) {
    auto pool = enumerate_formulas({"A", "B"}, 5, 2);
    ASSERT_GT(pool.size(), 1000u);
    for (auto& x : pool) ASSERT_NO_THROW(identity_term(x, "a", "b")) << x.str();
}

TEST(Compose, CutRule) {
    auto sig = std::make_shared<const Signature>(parse_signature("atom A, B\naxiom f : -> A\naxiom k : A -> B\naxiom r : B -> A\n"));
    TypedTerm f = check(parse_term("f(; g)"), parse_sequent("|- g:A"), sig);
    TypedTerm id = identity_term(parse_formula("A"), "g", "d");
    TypedTerm c = compose(f, id, "g");
    EXPECT_EQ(c.sequent, parse_sequent("|- d:A"));

    TypedTerm k = check(parse_term("k(a; b)"), parse_sequent("a:A |- b:B"), sig);
    TypedTerm back = check(parse_term("r(b; a)"), parse_sequent("b:B |- a:A"), sig);
    TypedTerm c2 = compose(k, back, "b");
    std::set<std::string> free(c2.term.free().begin(), c2.term.free().end());
    EXPECT_EQ(free.size(), 2u);
    EXPECT_TRUE(c2.sequent.contains("a"));
    EXPECT_FALSE(free.count("b"));

    try {
        compose(k, k, "b");
        FAIL();
    } catch (const CompositionError& e) {
        EXPECT_EQ(e.kind(), CompositionErrorKind::NoSuchChannel);
    }
    TypedTerm kb = check(parse_term("b == c"), parse_sequent("b:A |- c:A"), sig);
    try {
        compose(k, kb, "b");
        FAIL();
    } catch (const CompositionError& e) {
        EXPECT_EQ(e.kind(), CompositionErrorKind::ChannelTypeMismatch);
    }
}

TEST(Check, RandomTermsRecheckAndRejectWeakening) {
    RandomTerms gen(21);
    for (int i = 0; i < 500; ++i) {
        TypedTerm t = gen.term();
        TypedTerm again = check(t.term, t.sequent, t.sig);
        ASSERT_EQ(print_term(again.term), print_term(t.term));
        Sequent wider = t.sequent.with(Side::Domain, "zz", Formula::atom("A"));
        try {
            check(t.term, wider, t.sig);
            FAIL() << print_term(t.term);
        } catch (const TypeError& e) {
            ASSERT_TRUE(e.kind() == TypeErrorKind::LeftoverChannels || e.kind() == TypeErrorKind::PartitionError) << e.what();
        }
    }
}
