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
// Acceptance suite: one PASS/FAIL line per criterion, with the thresholds fixed below.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "mallterm/lawcheck.hpp"
#include "oracle.hpp"

using namespace mallterm;

namespace {

constexpr double kPaperSeconds = 1.0;
constexpr std::size_t kTerminationTerms = 5000;
constexpr double kTerminationSeconds = 60.0;
constexpr std::size_t kExhaustiveBound = 8;
constexpr std::size_t kSampledBound = 10;
constexpr std::size_t kSampledTerms = 2000;
constexpr double kConfluenceSeconds = 600.0;
constexpr std::size_t kResolveDepth = 6, kResolveDepthRetry = 12;
constexpr std::size_t kRelationSamples = 1000;
constexpr std::size_t kLawCount = 1000, kBijectionCount = 200;
constexpr std::size_t kRoundTrips = 1000;
constexpr std::size_t kNullaryShapes = 13;

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string slurp(const std::string& name) {
    std::ifstream in(std::string(MALLTERM_SAMPLES) + "/" + name);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::shared_ptr<const Signature> atomic_signature() {
    return std::make_shared<const Signature>(
        parse_signature("atom A, B\naxiom f : A -> B\naxiom g : A, B -> A\naxiom h : B -> A, A\n"));
}

int failures = 0;

void report(int n, const std::string& name, bool ok, const std::string& detail) {
    std::printf("%s criterion %d (%s): %s\n", ok ? "PASS" : "FAIL", n, name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

void guarded(int n, const std::string& name, const std::function<void()>& body) {
    try {
        body();
    } catch (const std::exception& e) {
        report(n, name, false, std::string("exception: ") + e.what());
    }
}

bool at_axiom(const Term& t, const std::string& c) {
    if (auto* a = t.get<AxiomNode>())
        return std::find(a->ins.begin(), a->ins.end(), c) != a->ins.end() ||
               std::find(a->outs.begin(), a->outs.end(), c) != a->outs.end();
    if (t.kind() == TermKind::Cut) return at_axiom(t.child(0), c) || at_axiom(t.child(1), c);
    return false;
}

bool cuts_touch_axioms(const Term& t) {
    if (t.kind() == TermKind::Cut && !at_axiom(t.child(0), t.chan()) && !at_axiom(t.child(1), t.chan())) return false;
    for (std::size_t i = 0; i < t.child_count(); ++i)
        if (!cuts_touch_axioms(t.child(i))) return false;
    return true;
}

void paper_examples() {
    auto t0 = Clock::now();
    auto sig = std::make_shared<const Signature>(parse_signature(slurp("vending.sig")));
    PairedFile v = parse_paired(slurp("vending.cp"));
    check(v.term, v.sequent, sig);
    PairedFile p = parse_paired(slurp("distribution.cp")), t = parse_paired(slurp("distribution.ct"));
    Sequent want = parse_sequent("a:A * (B % C) |- b:B % (A * C)");
    TypedTerm tp = check(p.term, want), tt = check(t.term, want);
    bool same = p.term == t.term && print_term(tp.term) == print_term(tt.term) && p.sequent == want && t.sequent == want;
    double s = since(t0);
    report(1, "paper examples", same && s < kPaperSeconds,
           std::string("vending checks, both syntaxes give ") + (same ? "one AST" : "different ASTs") + ", " +
               std::to_string(s) + "s");
}

struct NormalizationRun {
    std::size_t terms = 0, steps = 0, nondecreasing = 0, height_up = 0, rebracket = 0;
    std::size_t residual_cuts = 0, untouched = 0;
};

NormalizationRun normalization_run(std::uint64_t seed, std::shared_ptr<const Signature> sig) {
    NormalizationRun r;
    RandomTerms gen(seed, std::move(sig));
    for (std::size_t i = 0; i < kTerminationTerms; ++i) {
        TypedTerm t = gen.term();
        auto [nf, trace] = normalize(t);
        ++r.terms;
        std::size_t h = height(t.term);
        for (auto& s : trace.steps) {
            std::size_t hn = height(s.result.term);
            if (hn > h) ++r.height_up;
            h = hn;
            if (s.redex.rule.number == 0) {
                ++r.rebracket;
                continue;
            }
            ++r.steps;
            if (!bag_less(s.after, s.before)) ++r.nondecreasing;
        }
        r.residual_cuts += cut_bag(nf.term).size();
        if (!cuts_touch_axioms(nf.term)) ++r.untouched;
    }
    return r;
}

void termination_and_cut_elimination() {
    auto t0 = Clock::now();
    NormalizationRun empty = normalization_run(100, nullptr);
    NormalizationRun atomic = normalization_run(101, atomic_signature());
    auto vending = std::make_shared<const Signature>(parse_signature(slurp("vending.sig")));
    NormalizationRun vend = normalization_run(102, vending);
    double s = since(t0);
    auto bag = [](std::vector<std::size_t> v) { return CutBag(std::move(v)); };
    bool examples = bag_less(bag({2, 2, 2, 1}), bag({3})) && bag_less(bag({7}), bag({7, 3})) && bag_less(bag({5, 1}), bag({5, 2}));
    bool ok2 = examples && empty.nondecreasing == 0 && atomic.nondecreasing == 0 && empty.height_up == 0 &&
               atomic.height_up == 0 && s < kTerminationSeconds;
    std::ostringstream d2;
    d2 << empty.terms + atomic.terms << " terms, " << empty.steps + atomic.steps << " steps, "
       << empty.nondecreasing + atomic.nondecreasing << " not decreasing, " << empty.height_up + atomic.height_up
       << " height increases, " << atomic.rebracket << " re-bracketing steps (not counted), bag examples "
       << (examples ? "hold" : "fail") << ", " << s << "s";
    report(2, "termination", ok2, d2.str());

    bool ok3 = empty.residual_cuts == 0 && atomic.untouched == 0 && vend.untouched == 0;
    std::ostringstream d3;
    d3 << "empty signature: " << empty.residual_cuts << " residual cuts; axiom signatures: " << atomic.untouched + vend.untouched
       << " normal forms with a cut off the axioms (" << atomic.residual_cuts + vend.residual_cuts << " residual cuts)";
    report(3, "cut elimination", ok3, d3.str());
}

CorpusOptions exhaustive_corpus() {
    CorpusOptions o;
    o.total = kExhaustiveBound;
    o.max_formula = 3;
    o.max_width = 2;
    o.unary = false;
    return o;
}

struct ConfluenceTally {
    std::size_t terms = 0, nf_pairs = 0, nf_bad = 0, divergences = 0, resolved = 0, decreasing = 0, depth = 0, retries = 0;
    std::vector<std::string> problems;

    void visit(const TypedTerm& t, std::uint64_t seed) {
        ++terms;
        auto nfs = strategy_normal_forms(t, seed, 1);
        for (std::size_t j = 1; j < nfs.size(); ++j) {
            ++nf_pairs;
            if (structural_key(nfs[0].term) != structural_key(nfs[j].term) && !equivalent(nfs[0], nfs[j])) {
                ++nf_bad;
                if (problems.size() < 5) problems.push_back("normal forms differ: " + print_term(t.term));
            }
        }
        for (auto& d : enumerate_divergences(t)) {
            ++divergences;
            DiagramReport r = resolve(d, kResolveDepth);
            if (!r.resolved) {
                ++retries;
                r = resolve(d, kResolveDepthRetry, 200000);
            }
            if (!r.resolved) {
                if (problems.size() < 5) problems.push_back("unresolved " + d.left.str() + " / " + d.right.str() + " at " + print_term(t.term));
                continue;
            }
            ++resolved;
            decreasing += r.decreasing;
            depth = std::max(depth, r.depth_used);
        }
    }
};

void confluence() {
    auto t0 = Clock::now();
    ConfluenceTally ex;
    std::size_t k = 0;
    for_each_cut(exhaustive_corpus(), nullptr, [&](const TypedTerm& t) { ex.visit(t, ++k); });
    double s_ex = since(t0);

    ConfluenceTally sm;
    GeneratorOptions opt;
    opt.max_formula = 3;
    RandomTerms gen(7, nullptr, opt);
    for (std::size_t drawn = 0; sm.terms < kSampledTerms && drawn < 100 * kSampledTerms; ++drawn) {
        TypedTerm t = gen.term();
        if (cut_bag(t.term).empty() || subformula_count(t.sequent) > kSampledBound) continue;
        sm.visit(t, drawn);
    }
    double s = since(t0);
    bool ok = true;
    for (auto* c : {&ex, &sm})
        ok = ok && c->nf_bad == 0 && c->resolved == c->divergences && c->decreasing == c->divergences && c->problems.empty();
    ok = ok && s < kConfluenceSeconds;
    std::ostringstream d;
    d << "exhaustive <=" << kExhaustiveBound << ": " << ex.terms << " terms, " << ex.divergences << " divergences, "
      << ex.resolved << " resolved, " << ex.decreasing << " decreasing, max depth " << ex.depth << ", " << ex.nf_bad
      << " inequivalent strategy normal forms (" << s_ex << "s); sampled <=" << kSampledBound << ": " << sm.terms << " terms, "
      << sm.divergences << " divergences, " << sm.resolved << " resolved, " << sm.decreasing << " decreasing, max depth "
      << sm.depth << " (" << sm.retries + ex.retries << " needed depth > " << kResolveDepth << "), " << sm.nf_bad
      << " inequivalent; " << s << "s";
    for (auto& p : ex.problems) d << "\n    " << p;
    for (auto& p : sm.problems) d << "\n    " << p;
    report(4, "confluence modulo conversions", ok, d.str());
}

void decision_procedure() {
    auto t0 = Clock::now();
    std::map<std::string, std::map<std::string, TypedTerm>> groups;
    for_each_cut(exhaustive_corpus(), nullptr, [&](const TypedTerm& t) {
        TypedTerm nf = normalize(t, 100000, false).first;
        groups[oracle::sequent_key(nf.sequent)].emplace(oracle::key(nf.term), nf);
    });
    std::size_t pairs = 0, disagree = 0, incomplete = 0;
    std::string first;
    std::vector<std::vector<TypedTerm>> multi;
    for (auto& [sk, g] : groups) {
        std::vector<const TypedTerm*> v;
        std::vector<oracle::Closure> cl;
        for (auto& [key, t] : g) {
            v.push_back(&t);
            cl.push_back(oracle::closure(t));
            incomplete += !cl.back().complete;
        }
        for (std::size_t i = 0; i < v.size(); ++i)
            for (std::size_t j = i + 1; j < v.size(); ++j) {
                ++pairs;
                bool o = oracle::intersect(cl[i].members, cl[j].members);
                if ((decide(*v[i], *v[j]).verdict == Verdict::Equivalent) != o) {
                    if (!disagree++) first = print_term(v[i]->term) + " vs " + print_term(v[j]->term);
                }
            }
        if (g.size() >= 3) {
            multi.emplace_back();
            for (auto& [key, t] : g) multi.back().push_back(t);
        }
    }
    double s_oracle = since(t0);

    std::mt19937_64 rng(17);
    auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
    std::size_t refl = 0, sym = 0, trans = 0, trans_premises = 0;
    for (std::size_t i = 0; i < kRelationSamples; ++i) {
        auto& g = multi[pick(multi.size())];
        const TypedTerm &a = g[pick(g.size())], &b = g[pick(g.size())], &c = g[pick(g.size())];
        refl += decide(a, a).verdict == Verdict::Equivalent;
        bool ab = decide(a, b).verdict == Verdict::Equivalent, ba = decide(b, a).verdict == Verdict::Equivalent;
        sym += ab == ba;
        bool bc = decide(b, c).verdict == Verdict::Equivalent;
        if (ab && bc) {
            ++trans_premises;
            trans += decide(a, c).verdict == Verdict::Equivalent;
        } else {
            ++trans;
        }
    }
    bool ok = disagree == 0 && incomplete == 0 && refl == kRelationSamples && sym == kRelationSamples && trans == kRelationSamples;
    std::ostringstream d;
    d << pairs << " same-sequent normal-form pairs, " << disagree << " disagreements with the closure oracle (" << s_oracle
      << "s); reflexive " << refl << "/" << kRelationSamples << ", symmetric " << sym << "/" << kRelationSamples
      << ", transitive " << trans << "/" << kRelationSamples << " (" << trans_premises << " with both premises)";
    if (!first.empty()) d << "\n    first disagreement: " << first;
    report(5, "decision procedure", ok, d.str());
}

void laws() {
    auto t0 = Clock::now();
    bool ok = true;
    std::ostringstream d;
    for (auto sig : {std::shared_ptr<const Signature>(), atomic_signature()}) {
        std::vector<SweepReport> rs{sweep_identity(1, kLawCount, sig), sweep_assoc(2, kLawCount, sig),
                                    sweep_interchange(3, kLawCount, sig), sweep_additive(4, kBijectionCount, sig),
                                    sweep_representability(5, kBijectionCount, sig)};
        d << (sig ? "atomic signature:" : "empty signature:");
        for (auto& r : rs) {
            std::size_t want = r.law == "poly-sum" || r.law == "representability" ? kBijectionCount : kLawCount;
            ok = ok && r.ok() && r.instances == want;
            d << " " << r.law << " " << r.passed << "/" << r.instances;
            if (r.skipped) d << " (" << r.skipped << " draws without instance)";
            if (!r.failures.empty()) d << " first failure " << r.failures.front();
            d << ";";
        }
        d << " ";
    }
    // Nullary bijection instances, forced.
    bool nullary = check_additive_bijection("al", {}, check(parse_term("al{}"), parse_sequent("al:0 |- y:A"))).holds &&
                   check_representability("al", {}, check(parse_term("x == y"), parse_sequent("x:A |- y:A")),
                                          check(parse_term("al<() => x == y>"), parse_sequent("al:top, x:A |- y:A")))
                       .holds;
    ok = ok && nullary;
    d << "nullary fixtures " << (nullary ? "hold" : "fail") << "; " << since(t0) << "s";
    report(6, "categorical laws", ok, d.str());
}

void round_trip() {
    std::size_t ok_term = 0, ok_prog = 0, ok_cross = 0, n = 0;
    auto sig = atomic_signature();
    for (int pass = 0; pass < 2; ++pass) {
        RandomTerms gen(60 + pass, pass ? sig : nullptr);
        for (std::size_t i = 0; i < kRoundTrips / 2; ++i, ++n) {
            TypedTerm t = gen.term();
            Term c = canonicalize(t.term);
            Term a = parse_term(print_term(t.term)), b = parse_prog(print_prog(t.term));
            ok_term += canonicalize(a) == c;
            ok_prog += canonicalize(b) == c;
            ok_cross += parse_term(print_term(b)) == a && parse_prog(print_prog(a)) == b;
        }
    }
    bool ok = ok_term == n && ok_prog == n && ok_cross == n;
    report(7, "round trip", ok,
           "term syntax " + std::to_string(ok_term) + "/" + std::to_string(n) + ", programming syntax " + std::to_string(ok_prog) +
               "/" + std::to_string(n) + ", cross-printing " + std::to_string(ok_cross) + "/" + std::to_string(n));
}

void nullary_cases() {
    auto t0 = Clock::now();
    TypedTerm blocking = check(parse_term("a<() => b<>>"), parse_sequent("a:top |- b:top"));
    bool blocked = true;
    for (auto& c : find_conversions(blocking, true)) blocked = blocked && c.rule.number != 23;

    auto pool = enumerate_formulas({}, 3);
    auto seqs = enumerate_sequents(pool, 6, 3);
    ProofEnumerator en(Signature(), 5000000);
    std::set<std::string> shapes;
    std::size_t proofs = 0;
    for (auto& s : seqs)
        for (auto& p : en.proofs(s)) {
            ++proofs;
            for (auto& c : find_conversions(check(canonicalize(p), s), true))
                if (!c.empty.empty()) shapes.insert(c.shape());
        }

    auto fires = [](const char* term, const char* seq, int rule, RuleVariant v, const char* result) {
        TypedTerm t = check(parse_term(term), parse_sequent(seq));
        for (auto& r : find_redexes(t))
            if (r.rule.number == rule && r.rule.variant == v) {
                TypedTerm u = apply(t, r);
                return result ? canonicalize(u.term) == canonicalize(parse_term(result)) : u.term.kind() == TermKind::Case;
            }
        return false;
    };
    bool f3 = fires("cut g : A (a{}, d[x]. g == d)", "a:0 |- d:{x:A}", 3, RuleVariant::NullaryCase, nullptr);
    bool f7 = fires("cut g : A (a<() => x == g>, g == d)", "a:top, x:A |- d:A", 7, RuleVariant::NullarySplit,
                    "a<() => cut g : A (x == g, g == d)>");
    bool f13 = fires("cut g (g<>, g<() => x == d>)", "x:A |- d:A", 13, RuleVariant::NullaryFork, "x == d");

    bool ok = blocked && shapes.size() == kNullaryShapes && f3 && f7 && f13;
    std::string list;
    for (auto& s : shapes) list += (list.empty() ? "" : " ") + s;
    report(8, "nullary cases", ok,
           std::string("blocking case ") + (blocked ? "has no (23)" : "offers (23)") + "; " + std::to_string(shapes.size()) +
               " nullary conversion shapes over " + std::to_string(proofs) + " unit-only proofs [" + list + "]; fixtures (3) " +
               (f3 ? "ok" : "fail") + " (7) " + (f7 ? "ok" : "fail") + " (13) " + (f13 ? "ok" : "fail") + "; " +
               std::to_string(since(t0)) + "s");
}

}  // namespace

int main() {
    guarded(1, "paper examples", paper_examples);
    guarded(2, "termination", termination_and_cut_elimination);
    guarded(4, "confluence modulo conversions", confluence);
    guarded(5, "decision procedure", decision_procedure);
    guarded(6, "categorical laws", laws);
    guarded(7, "round trip", round_trip);
    guarded(8, "nullary cases", nullary_cases);
    std::printf("%d criteria failed\n", failures);
    return failures ? 1 : 0;
}
