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

#include "mallterm/lawcheck.hpp"

using namespace mallterm;

namespace {

TypedTerm typed(const char* term, const char* sequent, std::shared_ptr<const Signature> sig = nullptr) {
    return check(parse_term(term), parse_sequent(sequent), std::move(sig));
}

std::shared_ptr<const Signature> atomic_signature() {
    return std::make_shared<const Signature>(
        parse_signature("atom A, B\naxiom f : A -> B\naxiom g : A, B -> A\naxiom h : B -> A, A\n"));
}

const Divergence* find_pair(const std::vector<Divergence>& ds, int l, int r) {
    for (auto& d : ds)
        if (!d.left.conversion && !d.right.conversion && d.left.redex.rule.number == l && d.right.redex.rule.number == r)
            return &d;
    return nullptr;
}

}  // namespace

TEST(Divergences, IdentityAgainstIdentity) {
    TypedTerm t = typed("cut g (a == g, g == b)", "a:A |- b:A");
    auto ds = enumerate_divergences(t);
    const Divergence* d = find_pair(ds, 1, 2);
    ASSERT_NE(d, nullptr);
    auto r = resolve(*d);
    EXPECT_TRUE(r.resolved);
    EXPECT_EQ(r.depth_used, 0u);
    EXPECT_TRUE(r.decreasing);
    EXPECT_TRUE(enumerate_divergences(typed("a == b", "a:A |- b:A")).empty());
}

TEST(Divergences, ProjectionInjectionNeedsConversions) {
    TypedTerm t = typed("cut z (p[a]. p == z, y[b]. z == y)", "p:[a:A, c:A] |- y:{b:A, d:A}");
    auto ds = enumerate_divergences(t);
    const Divergence* d = find_pair(ds, 5, 6);
    ASSERT_NE(d, nullptr);
    EXPECT_FALSE(resolve_with(*d, false, 6, 20000).resolved);
    auto r = resolve(*d);
    EXPECT_TRUE(r.resolved);
    EXPECT_TRUE(r.decreasing);
    bool used_conversion = false;
    for (auto* path : {&r.left_path, &r.right_path})
        for (auto& a : *path) used_conversion |= a.step.conversion;
    EXPECT_TRUE(used_conversion);
}

TEST(Divergences, RandomApexesResolve) {
    RandomTerms gen(51);
    std::size_t n = 0;
    for (int i = 0; i < 150; ++i) {
        TypedTerm t = gen.term();
        for (auto& d : enumerate_divergences(t)) {
            auto r = resolve(d);
            if (!r.resolved) r = resolve(d, 12, 200000);
            ASSERT_TRUE(r.resolved) << d.left.str() << " / " << d.right.str() << " at " << print_term(t.term);
            ASSERT_TRUE(r.decreasing);
            ++n;
        }
    }
    EXPECT_GT(n, 100u);
}

TEST(Laws, Identity) {
    EXPECT_TRUE(check_identity_law(typed("a == b", "a:A |- b:A"), "b").holds);
    TypedTerm dist = typed("a<(a1, a2) => b<(b1, b2) => a2< a21 | {b1} => a21 == b1 ; a22 | {a1, b2} => "
                           "b2< b21 | {a1} => a1 == b21 ; b22 | {a22} => a22 == b22 > > > >",
                           "a:A * (B % C) |- b:B % (A * C)");
    EXPECT_TRUE(check_identity_law(dist, "b").holds);
    EXPECT_TRUE(check_identity_law(dist, "a").holds);
    EXPECT_TRUE(check_identity_law(typed("b[x]. a == b", "a:A |- b:{x:A, y:B}"), "b").holds);
}

TEST(Laws, AxiomOnlyAssociativity) {
    auto sig = atomic_signature();
    TypedTerm f = typed("f(a; gam)", "a:A |- gam:B", sig);
    TypedTerm g = typed("h(gam; del, e)", "gam:B |- del:A, e:A", sig);
    TypedTerm h = typed("g(del, k; o)", "del:A, k:B |- o:A", sig);
    EXPECT_TRUE(check_assoc(f, g, h, "gam", "del").holds);
    TypedTerm one = identity_term(parse_formula("B"), "gam", "del");
    TypedTerm h2 = typed("h(del; o, p)", "del:B |- o:A, p:A", sig);
    EXPECT_TRUE(check_assoc(f, one, h2, "gam", "del").holds);
}

TEST(Laws, AxiomOnlyInterchange) {
    auto sig = atomic_signature();
    TypedTerm f = typed("h(b; gam, del)", "b:B |- gam:A, del:A", sig);
    TypedTerm g = typed("gam == x", "gam:A |- x:A", sig);
    TypedTerm h = typed("g(del, k; o)", "del:A, k:B |- o:A", sig);
    EXPECT_TRUE(check_interchange(f, g, h, "gam", "del").holds);
}

TEST(Laws, AdditiveBijection) {
    TypedTerm s1 = typed("al == y", "al:A |- y:A");
    TypedTerm t = typed("al{ a => al == y | b => al == y }", "al:{a:A, b:A} |- y:A");
    EXPECT_TRUE(check_additive_bijection("al", {s1, s1}, t).holds);
    EXPECT_TRUE(check_additive_bijection("al", {}, typed("al{}", "al:0 |- y:A")).holds);
}

TEST(Laws, Representability) {
    TypedTerm s2 = typed("x< c1 | {m1} => m1 == c1 ; c2 | {m2} => m2 == c2 >", "m1:A, m2:B |- x:A * B");
    TypedTerm t2 = typed("al<(p, q) => x< c1 | {p} => p == c1 ; c2 | {q} => q == c2 > >", "al:A * B |- x:A * B");
    EXPECT_TRUE(check_representability("al", {"m1", "m2"}, s2, t2).holds);
    TypedTerm s0 = typed("x == y", "x:A |- y:A");
    TypedTerm t0 = typed("al<() => x == y>", "al:top, x:A |- y:A");
    EXPECT_TRUE(check_representability("al", {}, s0, t0).holds);
}

TEST(Laws, Injection) {
    TypedTerm f = typed("a == x", "a:A |- x:A");
    EXPECT_TRUE(check_injection(f, "x", parse_formula("{k:A, l:B}"), "k").holds);
}

TEST(Laws, SmallSweeps) {
    for (auto sig : {std::shared_ptr<const Signature>(), atomic_signature()}) {
        for (auto& r : {sweep_identity(1, 60, sig), sweep_assoc(2, 60, sig), sweep_interchange(3, 60, sig),
                        sweep_additive(4, 30, sig), sweep_representability(5, 30, sig)}) {
            EXPECT_TRUE(r.ok()) << r.law << ": " << (r.failures.empty() ? "" : r.failures.front());
            EXPECT_GT(r.instances, 0u) << r.law;
        }
    }
}
