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
#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mallterm/lawcheck.hpp"

using namespace mallterm;
using json = nlohmann::json;

namespace {

enum Exit : int { kOk = 0, kFail = 1, kInconclusive = 2, kUsage = 64, kParse = 65, kMissing = 66 };

struct MissingFile : std::runtime_error {
    using std::runtime_error::runtime_error;
};

bool g_json = false;

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingFile("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::optional<Syntax> syntax_of(const std::string& s) {
    if (s == "prog") return Syntax::Prog;
    if (s == "term") return Syntax::Term;
    return std::nullopt;
}

const char* syntax_name(Syntax s) { return s == Syntax::Prog ? "prog" : "term"; }

std::shared_ptr<const Signature> load_signature(const std::string& path) {
    if (path.empty()) return nullptr;
    return std::make_shared<const Signature>(parse_signature(slurp(path)));
}

struct Loaded {
    PairedFile file;
    TypedTerm typed;
};

Loaded load(const std::string& path, const std::string& sig, std::optional<Syntax> syntax = std::nullopt) {
    PairedFile f = parse_paired(slurp(path), syntax);
    TypedTerm t = check(f.term, f.sequent, load_signature(sig));
    return {f, t};
}

int emit(const std::string& command, const std::string& verdict, const json& data, const std::string& text, int code) {
    if (g_json) std::cout << json{{"command", command}, {"verdict", verdict}, {"data", data}}.dump(2) << "\n";
    else if (!text.empty()) std::cout << text << (text.back() == '\n' ? "" : "\n");
    return code;
}

json conversion_json(const Conversion& c, bool reversed) {
    json p = json::array();
    for (auto i : c.path) p.push_back(i);
    bool forward = (c.direction == Direction::Forward) != reversed;
    return {{"path", p}, {"rule", c.shape()}, {"direction", forward ? "forward" : "backward"}};
}

int cmd_parse(const std::string& path, const std::string& from, const std::string& to) {
    std::string src = slurp(path);
    std::optional<Syntax> in = from.empty() ? std::nullopt : syntax_of(from);
    bool paired = false;
    for (std::istringstream ls(src); ls;) {
        std::string line;
        std::getline(ls, line);
        line.erase(0, line.find_first_not_of(" \t\r"));
        line.erase(line.find_last_not_of(" \t\r") + 1);
        if (line == "---") paired = true;
    }
    std::optional<Sequent> seq;
    Term t = paired ? [&] {
        PairedFile f = parse_paired(src, in);
        seq = f.sequent;
        if (!in) in = f.syntax;
        return f.term;
    }()
                    : parse(src, in ? *in : (in = detect_syntax(src), *in));
    Syntax out = to.empty() ? *in : *syntax_of(to);
    std::string text = seq ? print_paired(*seq, t, out) : print(t, out) + "\n";
    json data{{"syntax", syntax_name(*in)}, {"to", syntax_name(out)}, {"term", print(t, out)}};
    if (seq) data["sequent"] = seq->str();
    return emit("parse", "ok", data, text, kOk);
}

int cmd_check(const std::string& path, const std::string& sig) {
    PairedFile f = parse_paired(slurp(path));
    try {
        TypedTerm t = check(f.term, f.sequent, load_signature(sig));
        return emit("check", "ok", {{"sequent", t.sequent.str()}}, "ok: " + t.sequent.str(), kOk);
    } catch (const TypeError& e) {
        json data{{"error", to_string(e.kind())}, {"line", e.span().line}, {"column", e.span().column}, {"detail", e.detail()}};
        return emit("check", "ill-typed", data, e.what(), kFail);
    }
}

int cmd_normalize(const std::string& path, const std::string& sig, bool trace, std::size_t max_steps) {
    Loaded l = load(path, sig);
    auto [nf, tr] = normalize(l.typed, max_steps, trace);
    json steps = json::array();
    std::string text;
    if (trace)
        for (auto& s : tr.steps) {
            steps.push_back({{"rule", s.redex.rule.str()},
                             {"path", path_str(s.redex.path)},
                             {"before", s.before.str()},
                             {"after", s.after.str()}});
            text += "# " + s.redex.rule.str() + " at " + path_str(s.redex.path) + "  " + s.before.str() + " -> " +
                    s.after.str() + "\n";
        }
    text += print_paired(nf.sequent, nf.term, l.file.syntax);
    json data{{"sequent", nf.sequent.str()}, {"term", print(nf.term, l.file.syntax)}, {"bag", cut_bag(nf.term).str()}};
    if (trace) data["trace"] = steps;
    return emit("normalize", "ok", data, text, kOk);
}

int cmd_equiv(const std::string& p1, const std::string& p2, const std::string& sig, std::size_t budget) {
    Loaded a = load(p1, sig), b = load(p2, sig);
    if (a.typed.sequent != b.typed.sequent) {
        std::string msg = "different sequents: " + a.typed.sequent.str() + " vs " + b.typed.sequent.str();
        return emit("equiv", "mismatch", {{"error", "SequentMismatch"}, {"detail", msg}}, msg, kFail);
    }
    EquivCertificate c = decide(a.typed, b.typed, budget);
    json chain = json::array();
    std::string text = to_string(c.verdict) + std::string("\n");
    for (auto& s : c.chain) {
        chain.push_back(conversion_json(s.conversion, s.reversed));
        text += "  " + s.conversion.str() + (s.reversed ? " (reversed)" : "") + "\n";
    }
    if (c.verdict == Verdict::Inequivalent) text += "  class 1: " + c.rep1 + "\n  class 2: " + c.rep2 + "\n";
    json data{{"lhs", print_term(c.nf1.term)}, {"rhs", print_term(c.nf2.term)}, {"chain", chain}, {"explored", c.explored}};
    if (c.verdict == Verdict::Inequivalent) data["representatives"] = {c.rep1, c.rep2};
    int code = c.verdict == Verdict::Equivalent ? kOk : c.verdict == Verdict::Inequivalent ? kFail : kInconclusive;
    return emit("equiv", to_string(c.verdict), data, text, code);
}

int cmd_measure(const std::string& path) {
    std::string src = slurp(path);
    bool paired = src.find("\n---") != std::string::npos || src.rfind("---", 0) == 0;
    Term t = paired ? parse_paired(src).term : parse(src, detect_syntax(src));
    std::size_t h = height(t);
    CutBag b = cut_bag(t);
    std::string text = "height=" + std::to_string(h) + " bag=" + b.str();
    return emit("measure", "ok", {{"height", h}, {"bag", b.heights()}}, text, kOk);
}

int cmd_laws(std::uint64_t seed, std::size_t count, std::size_t max_size, const std::string& sig) {
    auto s = load_signature(sig);
    GeneratorOptions opt = LawInstances::small();
    opt.max_formula = max_size;
    std::vector<SweepReport> rs{sweep_identity(seed, count, s, opt), sweep_assoc(seed + 1, count, s, opt),
                                sweep_interchange(seed + 2, count, s, opt), sweep_additive(seed + 3, count, s, opt),
                                sweep_representability(seed + 4, count, s, opt)};
    bool ok = true;
    json data = json::array();
    std::ostringstream text;
    for (auto& r : rs) {
        ok = ok && r.ok();
        data.push_back({{"law", r.law},
                        {"instances", r.instances},
                        {"passed", r.passed},
                        {"skipped", r.skipped},
                        {"failures", r.failures},
                        {"seconds", r.seconds}});
        text << r.law << ": " << r.passed << "/" << r.instances << " passed, " << r.skipped << " skipped\n";
        for (auto& f : r.failures) text << "  " << f << "\n";
    }
    return emit("laws", ok ? "pass" : "fail", data, text.str(), ok ? kOk : kFail);
}

int cmd_pairs(std::size_t max_size) {
    CorpusOptions o;
    o.total = max_size;
    o.max_width = 2;
    o.unary = false;
    std::size_t terms = 0, divs = 0, resolved = 0, decreasing = 0, depth = 0;
    std::vector<std::string> open;
    for_each_cut(o, nullptr, [&](const TypedTerm& t) {
        ++terms;
        for (auto& d : enumerate_divergences(t)) {
            ++divs;
            DiagramReport r = resolve(d);
            if (!r.resolved) r = resolve(d, 12, 200000);
            if (!r.resolved) {
                open.push_back(d.left.str() + " / " + d.right.str() + " at " + print_term(t.term));
                continue;
            }
            ++resolved;
            decreasing += r.decreasing;
            depth = std::max(depth, r.depth_used);
        }
    });
    bool ok = resolved == divs && decreasing == divs;
    std::ostringstream text;
    text << "terms=" << terms << " divergences=" << divs << " resolved=" << resolved << " decreasing=" << decreasing
         << " max_depth=" << depth << "\n";
    for (auto& s : open) text << "  unresolved: " << s << "\n";
    json data{{"terms", terms}, {"divergences", divs}, {"resolved", resolved}, {"decreasing", decreasing},
              {"max_depth", depth}, {"unresolved", open}};
    return emit("pairs", ok ? "pass" : "fail", data, text.str(), ok ? kOk : kFail);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mallterm: terms, cut elimination and equivalence for MALL with units"};
    app.add_flag("--json", g_json, "Emit one JSON object {command, verdict, data}");
    app.require_subcommand(1);

    std::string file, file2, from, to, sig;
    bool trace = false;
    std::size_t max_steps = 100000, budget = 100000, count = 100, max_size = 3, pair_size = 6;
    std::uint64_t seed = 1;
    auto syntax_check = CLI::IsMember({"prog", "term"});

    auto* parse_cmd = app.add_subcommand("parse", "Parse a file and print it, optionally in the other syntax");
    parse_cmd->add_option("FILE", file)->required();
    parse_cmd->add_option("--syntax", from, "Input syntax")->check(syntax_check);
    parse_cmd->add_option("--to", to, "Output syntax")->check(syntax_check);

    auto* check_cmd = app.add_subcommand("check", "Typecheck a sequent/term file");
    check_cmd->add_option("FILE", file)->required();
    check_cmd->add_option("--sig", sig, "Signature file");

    auto* norm_cmd = app.add_subcommand("normalize", "Eliminate cuts and print the normal form");
    norm_cmd->add_option("FILE", file)->required();
    norm_cmd->add_option("--sig", sig, "Signature file");
    norm_cmd->add_flag("--trace", trace, "Print each rewrite step");
    norm_cmd->add_option("--max-steps", max_steps, "Step budget");

    auto* equiv_cmd = app.add_subcommand("equiv", "Decide equivalence of two terms (exit 0 yes, 1 no, 2 unknown)");
    equiv_cmd->add_option("FILE1", file)->required();
    equiv_cmd->add_option("FILE2", file2)->required();
    equiv_cmd->add_option("--sig", sig, "Signature file");
    equiv_cmd->add_option("--budget", budget, "Search budget in class members");

    auto* measure_cmd = app.add_subcommand("measure", "Print height and cut bag");
    measure_cmd->add_option("FILE", file)->required();

    auto* laws_cmd = app.add_subcommand("laws", "Run the randomized law sweeps");
    laws_cmd->add_option("--seed", seed, "Random seed");
    laws_cmd->add_option("--count", count, "Instances per law");
    laws_cmd->add_option("--max-size", max_size, "Largest generated formula");
    laws_cmd->add_option("--sig", sig, "Signature file");

    auto* pairs_cmd = app.add_subcommand("pairs", "Resolve every divergence over a bounded cut corpus");
    pairs_cmd->add_option("--max-size", pair_size, "Bound on the premises' subformula counts");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        if (name == "parse") return cmd_parse(file, from, to);
        if (name == "check") return cmd_check(file, sig);
        if (name == "normalize") return cmd_normalize(file, sig, trace, max_steps);
        if (name == "equiv") return cmd_equiv(file, file2, sig, budget);
        if (name == "measure") return cmd_measure(file);
        if (name == "laws") return cmd_laws(seed, count, max_size, sig);
        if (name == "pairs") return cmd_pairs(pair_size);
    } catch (const MissingFile& e) {
        std::cerr << "error: " << e.what() << "\n";
        return emit(name, "missing-file", {{"error", e.what()}}, "", kMissing);
    } catch (const ParseError& e) {
        std::cerr << e.what() << "\n";
        json data{{"error", "ParseError"}, {"line", e.span().line}, {"column", e.span().column}, {"detail", e.message()}};
        return emit(name, "parse-error", data, "", kParse);
    } catch (const StructureError& e) {
        std::cerr << e.what() << "\n";
        return emit(name, "parse-error", {{"error", to_string(e.kind())}, {"detail", e.detail()}}, "", kParse);
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return emit(name, "error", {{"error", e.what()}}, "", kFail);
    }
    return kUsage;
}
