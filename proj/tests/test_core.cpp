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

#include <set>

#include "mallterm/generate.hpp"
#include "mallterm/surface.hpp"

using namespace mallterm;

namespace {

const char* kDistributionTerm =
    "a<(a1, a2) => b<(b1, b2) =>\n"
    "  a2< a21 | {b1} => a21 == b1\n"
    "    ; a22 | {a1, b2} => b2< b21 | {a1} => a1 == b21 ; b22 | {a22} => a22 == b22 > > > >";

std::set<std::string> as_set(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST(Sequent, ChannelsAreTopLevelOnly) {
    Sequent s = parse_sequent("alpha:{a:W, b:X}, alpha2:A |- beta:%(Y, Z)");
    EXPECT_EQ(as_set(s.channels()), (std::set<std::string>{"alpha", "alpha2", "beta"}));
    EXPECT_TRUE(parse_sequent("|-").channels().empty());
    EXPECT_EQ(as_set(parse_sequent("g:top |- d:top").channels()), (std::set<std::string>{"d", "g"}));
}

TEST(Sequent, SubformulaCount) {
    EXPECT_EQ(subformula_count(parse_sequent("a:A |- b:A")), 2u);
    EXPECT_EQ(subformula_count(parse_sequent("a:{a:W, b:X} |-")), 3u);
    EXPECT_EQ(subformula_count(parse_sequent("|- b:top")), 1u);
}

TEST(Sequent, DuplicateChannelRejected) {
    try {
        parse_sequent("a:A, a:B |-");
        FAIL();
    } catch (const StructureError& e) {
        EXPECT_EQ(e.kind(), StructureErrorKind::DuplicateChannel);
    } catch (const ParseError&) {
    }
}

TEST(Formula, DuplicateTagRejected) {
    EXPECT_ANY_THROW(parse_formula("{a:W, a:X}"));
}

TEST(Term, FreeChannels) {
    EXPECT_EQ(as_set(free_channels(Term::id("a", "b"))), (std::set<std::string>{"a", "b"}));
    EXPECT_EQ(as_set(free_channels(parse_term(kDistributionTerm))), (std::set<std::string>{"a", "b"}));
    Term closed = Term::cut("g", Term::axiom("f", {}, {"g"}), Term::axiom("h", {"g"}, {}));
    EXPECT_TRUE(free_channels(closed).empty());
}

TEST(Term, DuplicateInterface) {
    Term t = Term::cut("g", Term::axiom("f", {"a"}, {"g"}), Term::axiom("h", {"g", "a"}, {}));
    try {
        (void)t.free();
        FAIL();
    } catch (const StructureError& e) {
        EXPECT_EQ(e.kind(), StructureErrorKind::DuplicateInterface);
    }
}

TEST(Term, Rename) {
    EXPECT_EQ(rename_channels(Term::id("a", "b"), {{"a", "x"}, {"b", "y"}}), Term::id("x", "y"));
    Term t = parse_term(kDistributionTerm);
    EXPECT_EQ(rename_channels(t, {}), t);
    Term r = rename_channels(t, {{"b21", "d"}});
    EXPECT_EQ(as_set(free_channels(r)), (std::set<std::string>{"a", "b"}));
    EXPECT_ANY_THROW(rename_channels(Term::id("a", "b"), {{"a", "z"}, {"b", "z"}}));
}

TEST(Term, CanonicalizeIgnoresBoundNames) {
    EXPECT_EQ(print_term(canonicalize(Term::id("a", "b"))), "a == b");
    Term t = parse_term(kDistributionTerm);
    Term r = rename_channels(t, {{"b21", "d"}});
    EXPECT_EQ(print_term(canonicalize(t)), print_term(canonicalize(r)));
}

TEST(Term, RandomTermProperties) {
    RandomTerms gen(7);
    for (int i = 0; i < 1000; ++i) {
        TypedTerm t = gen.term();
        Term c = canonicalize(t.term);
        ASSERT_EQ(print_term(canonicalize(c)), print_term(c));
        ASSERT_EQ(as_set(free_channels(c)), as_set(free_channels(t.term)));
        ASSERT_EQ(as_set(free_channels(t.term)), as_set(t.sequent.channels()));
    }
}

TEST(Term, RenameComposes) {
    RandomTerms gen(8);
    for (int i = 0; i < 200; ++i) {
        Term t = gen.term().term;
        std::map<std::string, std::string> m1, m2, both;
        for (auto& c : t.free()) {
            m1[c] = c + "_p";
            m2[c + "_p"] = c + "_q";
            both[c] = c + "_q";
        }
        ASSERT_EQ(rename_channels(rename_channels(t, m1), m2), rename_channels(t, both));
    }
}
