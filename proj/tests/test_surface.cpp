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

}  // namespace

TEST(Formula, TaggedNotation) {
    Formula f = parse_formula("{a:W, b:X} * %(Y, Z)", "alpha");
    ASSERT_EQ(f.connective(), Connective::Tensor);
    ASSERT_EQ(f.arity(), 2u);
    EXPECT_EQ(f.parts()[0].formula.connective(), Connective::Sum);
    EXPECT_EQ(f.parts()[1].formula.connective(), Connective::Par);
    Formula zero = parse_formula("0");
    EXPECT_EQ(zero.connective(), Connective::Sum);
    EXPECT_EQ(zero.arity(), 0u);
}

TEST(Parse, SimpleTerms) {
    EXPECT_EQ(parse_term("a == b"), Term::id("a", "b"));
    Term c = parse_term("cut g (f(;g), g(g;))");
    EXPECT_EQ(c, Term::cut("g", Term::axiom("f", {}, {"g"}), Term::axiom("g", {"g"}, {})));
    EXPECT_EQ(print_term(Term::id("a", "b")), "a == b");
}

TEST(Parse, SequentShapes) {
    Sequent s = parse_sequent("a:A |- b:A");
    EXPECT_EQ(s.domain().size(), 1u);
    EXPECT_EQ(s.codomain().size(), 1u);
    PairedFile v = parse_paired(slurp("vending.cp"));
    EXPECT_EQ(v.sequent.domain().size(), 1u);
    EXPECT_EQ(v.sequent.codomain().size(), 1u);
    EXPECT_EQ(v.syntax, Syntax::Prog);
}

TEST(Parse, ProgramAndCalculusAgree) {
    PairedFile p = parse_paired(slurp("distribution.cp"));
    PairedFile t = parse_paired(slurp("distribution.ct"));
    EXPECT_EQ(p.syntax, Syntax::Prog);
    EXPECT_EQ(t.syntax, Syntax::Term);
    EXPECT_EQ(p.sequent, t.sequent);
    EXPECT_EQ(p.term, t.term);
    TypedTerm a = check(p.term, p.sequent), b = check(t.term, t.sequent);
    EXPECT_EQ(print_term(a.term), print_term(b.term));
    EXPECT_EQ(parse_sequent("a:A * (B % C) |- b:B % (A * C)"), p.sequent);
}

TEST(Parse, ErrorsCarrySpans) {
    try {
        parse_term("a == ");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.span().line, 1u);
        EXPECT_GE(e.span().column, 5u);
    }
    try {
        parse_term("a<(b, c) =>\n  b =! c>");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.span().line, 2u);
    }
}

TEST(Print, VendingKeywords) {
    PairedFile v = parse_paired(slurp("vending.cp"));
    auto sig = std::make_shared<const Signature>(parse_signature(slurp("vending.sig")));
    TypedTerm t = check(v.term, v.sequent, sig);
    std::string out = print_prog(t.term);
    for (auto* kw : {"split", "input", "output", "fork", "close", "end", "plug"})
        EXPECT_NE(out.find(kw), std::string::npos) << kw;
    EXPECT_EQ(parse_prog(out), t.term);
}

TEST(Print, ProgWithoutDecoration) {
    Term t = parse_term("a<(b, c) => b == c>");
    EXPECT_EQ(parse_prog(print_prog(t)), t);
}

TEST(Print, RoundTrip) {
    auto sig = std::make_shared<const Signature>(parse_signature("atom A, B\naxiom f : A -> B\naxiom g : A, B -> A\n"));
    for (int pass = 0; pass < 2; ++pass) {
        RandomTerms gen(11 + pass, pass ? sig : nullptr);
        for (int i = 0; i < 500; ++i) {
            TypedTerm t = gen.term();
            Term c = canonicalize(t.term);
            Term from_term = parse_term(print_term(t.term));
            ASSERT_EQ(canonicalize(from_term), c) << print_term(t.term);
            Term from_prog = parse_prog(print_prog(t.term));
            ASSERT_EQ(canonicalize(from_prog), c) << print_prog(t.term);
            ASSERT_EQ(from_term, from_prog);
        }
    }
}

TEST(Signature, RoundTrip) {
    Signature s = parse_signature(slurp("vending.sig"));
    EXPECT_EQ(s.atoms().size(), 4u);
    EXPECT_EQ(s.axioms().size(), 3u);
    Signature again = parse_signature(print_signature(s));
    EXPECT_EQ(again.atoms(), s.atoms());
    EXPECT_EQ(again.axioms().size(), 3u);
    EXPECT_EQ(again.axiom("gumch")->outs.size(), 1u);
}
