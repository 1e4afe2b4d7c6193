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
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace mallterm {

enum class Side : std::uint8_t { Domain, Codomain };

inline Side opposite(Side s) {
    return s == Side::Domain ? Side::Codomain : Side::Domain;
}

inline const char* to_string(Side s) {
    return s == Side::Domain ? "domain" : "codomain";
}

struct SourceSpan {
    std::size_t line = 0;
    std::size_t column = 0;
    std::size_t offset = 0;
    std::size_t length = 0;
};

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class StructureErrorKind : std::uint8_t {
    DuplicateInterface,
    NonInjectiveRename,
    DuplicateTag,
    DuplicateChannel,
    InvalidIdentifier,
};

inline const char* to_string(StructureErrorKind k) {
    switch (k) {
    case StructureErrorKind::DuplicateInterface: return "DuplicateInterface";
    case StructureErrorKind::NonInjectiveRename: return "NonInjectiveRename";
    case StructureErrorKind::DuplicateTag: return "DuplicateTag";
    case StructureErrorKind::DuplicateChannel: return "DuplicateChannel";
    case StructureErrorKind::InvalidIdentifier: return "InvalidIdentifier";
    }
    return "?";
}

class StructureError : public Error {
  public:
    StructureError(StructureErrorKind kind, const std::string& detail)
        : Error(std::string(to_string(kind)) + ": " + detail), kind_(kind), detail_(detail) {}
    StructureErrorKind kind() const { return kind_; }
    const std::string& detail() const { return detail_; }

  private:
    StructureErrorKind kind_;
    std::string detail_;
};

inline bool is_identifier(std::string_view s) {
    if (s.empty()) return false;
    auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
    auto digit = [](char c) { return c >= '0' && c <= '9'; };
    if (!alpha(s[0])) return false;
    for (char c : s)
        if (!alpha(c) && !digit(c) && c != '\'') return false;
    return true;
}

inline void require_identifier(std::string_view s) {
    if (!is_identifier(s))
        throw StructureError(StructureErrorKind::InvalidIdentifier, "'" + std::string(s) + "'");
}

// ---------------------------------------------------------------- formulas

enum class Connective : std::uint8_t { Atom, Sum, Prod, Tensor, Par };

inline bool is_additive(Connective c) { return c == Connective::Sum || c == Connective::Prod; }
inline bool is_multiplicative(Connective c) { return c == Connective::Tensor || c == Connective::Par; }

struct Labeled;

class Formula {
  public:
    struct Node;

    static Formula atom(std::string name);
    static Formula sum(std::vector<Labeled> parts) { return additive(Connective::Sum, std::move(parts)); }
    static Formula prod(std::vector<Labeled> parts) { return additive(Connective::Prod, std::move(parts)); }
    static Formula tensor(std::vector<Labeled> parts) { return multiplicative(Connective::Tensor, std::move(parts)); }
    static Formula par(std::vector<Labeled> parts) { return multiplicative(Connective::Par, std::move(parts)); }
    static Formula make(Connective c, std::vector<Labeled> parts);
    // Multiplicative node whose internal channel labels are derived from `root`.
    static Formula tensor_of(std::vector<Formula> parts, const std::string& root = "x");
    static Formula par_of(std::vector<Formula> parts, const std::string& root = "x");
    static Formula zero() { return sum({}); }
    static Formula one() { return prod({}); }
    static Formula top() { return tensor({}); }
    static Formula bot() { return par({}); }

    Connective connective() const;
    const std::string& atom_name() const;
    const std::vector<Labeled>& parts() const;
    std::size_t arity() const;
    bool is_atom() const { return connective() == Connective::Atom; }
    bool is_unit() const { return !is_atom() && arity() == 0; }
    const Formula* component(std::string_view tag) const;
    std::size_t size() const;
    // Every internal channel label, in preorder.
    std::vector<std::string> labels() const;
    // Copy with internal labels renamed to `<root>_<i>` paths.
    Formula relabeled(const std::string& root) const;
    bool identical(const Formula& o) const;
    std::string str() const;
    // Canonical text: tags sorted, labels dropped. Equal iff formulas are equal.
    std::string key() const;

    friend bool operator==(const Formula& a, const Formula& b);
    friend bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }

  private:
    static Formula additive(Connective c, std::vector<Labeled> parts);
    static Formula multiplicative(Connective c, std::vector<Labeled> parts);
    static Formula raw(Connective c, std::string atom, std::vector<Labeled> parts);
    explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

struct Labeled {
    std::string label;
    Formula formula;
};

struct Formula::Node {
    Connective conn;
    std::string atom;
    std::vector<Labeled> parts;
    std::size_t size;
};

inline Formula Formula::raw(Connective c, std::string atom, std::vector<Labeled> parts) {
    std::size_t sz = 1;
    for (auto& p : parts) sz += p.formula.size();
    return Formula(std::make_shared<const Node>(Node{c, std::move(atom), std::move(parts), sz}));
}

inline Formula Formula::atom(std::string name) {
    require_identifier(name);
    return raw(Connective::Atom, std::move(name), {});
}

inline Formula Formula::additive(Connective c, std::vector<Labeled> parts) {
    std::set<std::string> seen;
    for (auto& p : parts) {
        require_identifier(p.label);
        if (!seen.insert(p.label).second)
            throw StructureError(StructureErrorKind::DuplicateTag, "tag '" + p.label + "'");
    }
    return raw(c, "", std::move(parts));
}

inline Formula Formula::multiplicative(Connective c, std::vector<Labeled> parts) {
    std::set<std::string> seen;
    for (auto& p : parts) {
        require_identifier(p.label);
        if (!seen.insert(p.label).second)
            throw StructureError(StructureErrorKind::DuplicateChannel, "channel '" + p.label + "'");
        for (auto& l : p.formula.labels())
            if (!seen.insert(l).second)
                throw StructureError(StructureErrorKind::DuplicateChannel, "channel '" + l + "'");
    }
    return raw(c, "", std::move(parts));
}

inline Formula Formula::make(Connective c, std::vector<Labeled> parts) {
    switch (c) {
    case Connective::Sum:
    case Connective::Prod: return additive(c, std::move(parts));
    case Connective::Tensor:
    case Connective::Par: return multiplicative(c, std::move(parts));
    case Connective::Atom: break;
    }
    throw Error("Formula::make: atom has no parts");
}

inline Formula Formula::tensor_of(std::vector<Formula> parts, const std::string& root) {
    std::vector<Labeled> ls;
    for (auto& f : parts) ls.push_back({"x", std::move(f)});
    return raw(Connective::Tensor, "", std::move(ls)).relabeled(root);
}

inline Formula Formula::par_of(std::vector<Formula> parts, const std::string& root) {
    std::vector<Labeled> ls;
    for (auto& f : parts) ls.push_back({"x", std::move(f)});
    return raw(Connective::Par, "", std::move(ls)).relabeled(root);
}

inline Connective Formula::connective() const { return node_->conn; }
inline const std::string& Formula::atom_name() const { return node_->atom; }
inline const std::vector<Labeled>& Formula::parts() const { return node_->parts; }
inline std::size_t Formula::arity() const { return node_->parts.size(); }
inline std::size_t Formula::size() const { return node_->size; }

inline const Formula* Formula::component(std::string_view tag) const {
    for (auto& p : node_->parts)
        if (p.label == tag) return &p.formula;
    return nullptr;
}

inline std::vector<std::string> Formula::labels() const {
    std::vector<std::string> out;
    auto walk = [&](auto& self, const Formula& f) -> void {
        bool mult = is_multiplicative(f.connective());
        for (auto& p : f.parts()) {
            if (mult) out.push_back(p.label);
            self(self, p.formula);
        }
    };
    walk(walk, *this);
    return out;
}

inline Formula Formula::relabeled(const std::string& root) const {
    if (is_atom()) return *this;
    std::vector<Labeled> ps;
    bool mult = is_multiplicative(connective());
    for (std::size_t i = 0; i < arity(); ++i) {
        std::string name = root + "_" + std::to_string(i + 1);
        auto& p = parts()[i];
        ps.push_back({mult ? name : p.label, p.formula.relabeled(name)});
    }
    return raw(connective(), "", std::move(ps));
}

inline bool operator==(const Formula& a, const Formula& b) {
    if (a.node_ == b.node_) return true;
    if (a.connective() != b.connective() || a.size() != b.size() || a.arity() != b.arity()) return false;
    switch (a.connective()) {
    case Connective::Atom: return a.atom_name() == b.atom_name();
    case Connective::Sum:
    case Connective::Prod:
        for (auto& p : a.parts()) {
            auto* q = b.component(p.label);
            if (!q || !(p.formula == *q)) return false;
        }
        return true;
    default:
        for (std::size_t i = 0; i < a.arity(); ++i)
            if (!(a.parts()[i].formula == b.parts()[i].formula)) return false;
        return true;
    }
}

inline bool Formula::identical(const Formula& o) const {
    if (connective() != o.connective() || atom_name() != o.atom_name() || arity() != o.arity()) return false;
    for (std::size_t i = 0; i < arity(); ++i)
        if (parts()[i].label != o.parts()[i].label || !parts()[i].formula.identical(o.parts()[i].formula))
            return false;
    return true;
}

inline std::string Formula::str() const {
    switch (connective()) {
    case Connective::Atom: return atom_name();
    case Connective::Sum:
    case Connective::Prod: {
        if (arity() == 0) return connective() == Connective::Sum ? "0" : "1";
        std::string s = connective() == Connective::Sum ? "{" : "[";
        for (std::size_t i = 0; i < arity(); ++i) {
            if (i) s += ", ";
            s += parts()[i].label + ":" + parts()[i].formula.str();
        }
        return s + (connective() == Connective::Sum ? "}" : "]");
    }
    default: {
        bool t = connective() == Connective::Tensor;
        if (arity() == 0) return t ? "top" : "bot";
        if (arity() == 1) return std::string(t ? "*(" : "%(") + parts()[0].formula.str() + ")";
        std::string s;
        for (std::size_t i = 0; i < arity(); ++i) {
            if (i) s += t ? " * " : " % ";
            auto& f = parts()[i].formula;
            bool paren = is_multiplicative(f.connective()) && f.arity() >= 2;
            s += paren ? "(" + f.str() + ")" : f.str();
        }
        return s;
    }
    }
}

inline std::string Formula::key() const {
    switch (connective()) {
    case Connective::Atom: return atom_name();
    case Connective::Sum:
    case Connective::Prod: {
        std::vector<std::string> items;
        for (auto& p : parts()) items.push_back(p.label + ":" + p.formula.key());
        std::sort(items.begin(), items.end());
        std::string s = connective() == Connective::Sum ? "{" : "[";
        for (auto& i : items) s += i + ",";
        return s + (connective() == Connective::Sum ? "}" : "]");
    }
    default: {
        std::string s = connective() == Connective::Tensor ? "*(" : "%(";
        for (auto& p : parts()) s += p.formula.key() + ",";
        return s + ")";
    }
    }
}

// ---------------------------------------------------------------- sequents

struct Binding {
    std::string channel;
    Formula formula;
};

class Sequent {
  public:
    Sequent() = default;
    Sequent(std::vector<Binding> domain, std::vector<Binding> codomain)
        : domain_(std::move(domain)), codomain_(std::move(codomain)) {
        std::set<std::string> seen;
        for (auto* side : {&domain_, &codomain_})
            for (auto& b : *side) {
                require_identifier(b.channel);
                if (!seen.insert(b.channel).second)
                    throw StructureError(StructureErrorKind::DuplicateChannel, "channel '" + b.channel + "'");
            }
    }

    // Also rejects top-level channels that reappear as internal labels.
    static Sequent validated(std::vector<Binding> domain, std::vector<Binding> codomain) {
        Sequent s(std::move(domain), std::move(codomain));
        std::set<std::string> seen;
        for (auto* side : {&s.domain_, &s.codomain_})
            for (auto& b : *side) seen.insert(b.channel);
        for (auto* side : {&s.domain_, &s.codomain_})
            for (auto& b : *side)
                for (auto& l : b.formula.labels())
                    if (!seen.insert(l).second)
                        throw StructureError(StructureErrorKind::DuplicateChannel, "channel '" + l + "'");
        return s;
    }

    const std::vector<Binding>& domain() const { return domain_; }
    const std::vector<Binding>& codomain() const { return codomain_; }
    const std::vector<Binding>& side(Side s) const { return s == Side::Domain ? domain_ : codomain_; }
    std::size_t width() const { return domain_.size() + codomain_.size(); }

    struct Entry {
        Side side;
        const Formula* formula;
    };
    std::optional<Entry> lookup(std::string_view ch) const {
        for (auto& b : domain_)
            if (b.channel == ch) return Entry{Side::Domain, &b.formula};
        for (auto& b : codomain_)
            if (b.channel == ch) return Entry{Side::Codomain, &b.formula};
        return std::nullopt;
    }
    bool contains(std::string_view ch) const { return lookup(ch).has_value(); }

    std::vector<std::string> channels() const {
        std::vector<std::string> out;
        for (auto& b : domain_) out.push_back(b.channel);
        for (auto& b : codomain_) out.push_back(b.channel);
        std::sort(out.begin(), out.end());
        return out;
    }

    Sequent without(std::string_view ch) const {
        Sequent s;
        for (auto& b : domain_)
            if (b.channel != ch) s.domain_.push_back(b);
        for (auto& b : codomain_)
            if (b.channel != ch) s.codomain_.push_back(b);
        return s;
    }

    // Appends without the duplicate check; callers guarantee freshness.
    Sequent with(Side side, std::string ch, Formula f) const {
        Sequent s = *this;
        (side == Side::Domain ? s.domain_ : s.codomain_).push_back({std::move(ch), std::move(f)});
        return s;
    }

    Sequent retyped(std::string_view ch, const Formula& f) const {
        Sequent s = *this;
        for (auto* side : {&s.domain_, &s.codomain_})
            for (auto& b : *side)
                if (b.channel == ch) b.formula = f;
        return s;
    }

    Sequent restricted(const std::vector<std::string>& keep) const {
        Sequent s;
        auto in = [&](const std::string& c) { return std::find(keep.begin(), keep.end(), c) != keep.end(); };
        for (auto& b : domain_)
            if (in(b.channel)) s.domain_.push_back(b);
        for (auto& b : codomain_)
            if (in(b.channel)) s.codomain_.push_back(b);
        return s;
    }

    std::size_t subformula_count() const {
        std::size_t n = 0;
        for (auto& b : domain_) n += b.formula.size();
        for (auto& b : codomain_) n += b.formula.size();
        return n;
    }

    std::string str() const {
        auto list = [](const std::vector<Binding>& bs) {
            std::string s;
            for (std::size_t i = 0; i < bs.size(); ++i) {
                if (i) s += ", ";
                s += bs[i].channel + ":" + bs[i].formula.str();
            }
            return s;
        };
        std::string d = list(domain_), c = list(codomain_);
        return d + (d.empty() ? "|-" : " |-") + (c.empty() ? "" : " " + c);
    }

    friend bool operator==(const Sequent& a, const Sequent& b) {
        if (a.domain_.size() != b.domain_.size() || a.codomain_.size() != b.codomain_.size()) return false;
        for (auto* side : {&a.domain_, &a.codomain_})
            for (auto& x : *side) {
                auto e = b.lookup(x.channel);
                Side want = side == &a.domain_ ? Side::Domain : Side::Codomain;
                if (!e || e->side != want || !(*e->formula == x.formula)) return false;
            }
        return true;
    }
    friend bool operator!=(const Sequent& a, const Sequent& b) { return !(a == b); }

  private:
    std::vector<Binding> domain_, codomain_;
};

inline std::size_t subformula_count(const Sequent& s) { return s.subformula_count(); }

// ---------------------------------------------------------------- signatures

struct AxiomDecl {
    std::string name;
    std::vector<Formula> ins, outs;
};

class Signature {
  public:
    void add_atom(const std::string& a) {
        require_identifier(a);
        atoms_.insert(a);
    }
    void add_axiom(AxiomDecl d) {
        require_identifier(d.name);
        auto name = d.name;
        if (axioms_.count(name))
            throw StructureError(StructureErrorKind::DuplicateChannel, "axiom '" + name + "' declared twice");
        order_.push_back(name);
        axioms_.emplace(name, std::move(d));
    }
    const AxiomDecl* axiom(std::string_view name) const {
        auto it = axioms_.find(std::string(name));
        return it == axioms_.end() ? nullptr : &it->second;
    }
    bool has_atom(const std::string& a) const { return atoms_.count(a) > 0; }
    const std::set<std::string>& atoms() const { return atoms_; }
    std::vector<const AxiomDecl*> axioms() const {
        std::vector<const AxiomDecl*> out;
        for (auto& n : order_) out.push_back(&axioms_.at(n));
        return out;
    }
    bool empty() const { return axioms_.empty(); }

  private:
    std::set<std::string> atoms_;
    std::map<std::string, AxiomDecl> axioms_;
    std::vector<std::string> order_;
};

// ---------------------------------------------------------------- terms

enum class TermKind : std::uint8_t { Id, Case, Select, Split, Fork, Cut, Axiom };

inline const char* to_string(TermKind k) {
    switch (k) {
    case TermKind::Id: return "Id";
    case TermKind::Case: return "Case";
    case TermKind::Select: return "Select";
    case TermKind::Split: return "Split";
    case TermKind::Fork: return "Fork";
    case TermKind::Cut: return "Cut";
    case TermKind::Axiom: return "Axiom";
    }
    return "?";
}

class Term;
struct Branch;
struct Arm;

struct IdNode {
    std::string left, right;
};
struct CaseNode {
    std::string chan;
    std::vector<Branch> branches;
    std::optional<Sequent> ctx;
};
struct SelectNode;
struct SplitNode;
struct ForkNode {
    std::string chan;
    std::vector<Arm> arms;
};
struct CutNode;
struct AxiomNode {
    std::string name;
    std::vector<std::string> ins, outs;
};

using TermNode = std::variant<IdNode, CaseNode, SelectNode, SplitNode, ForkNode, CutNode, AxiomNode>;

struct Decoration {
    std::shared_ptr<const Sequent> sequent;
    Side side = Side::Domain;  // side of the principal channel, where there is one
};

class Term {
  public:
    struct Rep;

    static Term id(std::string left, std::string right);
    static Term case_of(std::string chan, std::vector<Branch> branches, std::optional<Sequent> ctx = std::nullopt);
    static Term select(std::string chan, std::string tag, Term body);
    static Term split(std::string chan, std::vector<std::string> parts, Term body);
    static Term fork(std::string chan, std::vector<Arm> arms);
    static Term cut(std::string chan, Term left, Term right, std::optional<Formula> type = std::nullopt);
    static Term axiom(std::string name, std::vector<std::string> ins, std::vector<std::string> outs);

    TermKind kind() const;
    template <class N> const N* get() const;
    template <class N> const N& as() const { return *get<N>(); }
    // Principal channel of a constructor, the cut channel of a cut, empty otherwise.
    const std::string& chan() const;

    bool is_linear() const;
    // Known interface; incomplete when open().
    const std::vector<std::string>& interface() const;
    // Throws DuplicateInterface when linearity fails structurally.
    const std::vector<std::string>& free() const;
    bool has_free(std::string_view c) const;
    // Contains a nullary case without a context annotation.
    bool open() const;
    std::size_t size() const;

    const Decoration* decoration() const;
    const Sequent* sequent() const;
    Term decorated(Decoration d) const;
    const SourceSpan& span() const;
    Term with_span(SourceSpan s) const;

    // Number of immediate subterms, and access by index (cut: 0 left, 1 right).
    std::size_t child_count() const;
    const Term& child(std::size_t i) const;
    Term with_child(std::size_t i, Term t) const;

    bool same(const Term& o) const { return rep_ == o.rep_; }
    const Rep& rep() const { return *rep_; }

  private:
    explicit Term(std::shared_ptr<const Rep> r) : rep_(std::move(r)) {}
    static Term build(TermNode node, SourceSpan span = {});
    std::shared_ptr<const Rep> rep_;
};

struct Branch {
    std::string tag;
    Term body;
};
struct Arm {
    std::string part;
    std::vector<std::string> owns;
    Term body;
};
struct SelectNode {
    std::string chan, tag;
    Term body;
};
struct SplitNode {
    std::string chan;
    std::vector<std::string> parts;
    Term body;
};
struct CutNode {
    std::string chan;
    std::optional<Formula> type;
    Term left, right;
};


struct Term::Rep {
    TermNode node;
    std::vector<std::string> free;
    bool linear = true;
    bool open = false;
    std::size_t size = 1;
    std::optional<Decoration> deco;
    SourceSpan span;
};

namespace detail {

inline void insert_sorted(std::vector<std::string>& v, const std::string& s) {
    auto it = std::lower_bound(v.begin(), v.end(), s);
    if (it == v.end() || *it != s) v.insert(it, s);
}

inline bool contains_sorted(const std::vector<std::string>& v, std::string_view s) {
    return std::binary_search(v.begin(), v.end(), s, std::less<>());
}

}  // namespace detail

inline Term Term::build(TermNode node, SourceSpan span) {
    Rep r;
    r.node = std::move(node);
    r.span = span;
    using detail::insert_sorted;
    std::vector<std::string> fr;
    bool lin = true, open = false;
    std::size_t size = 1;
    auto add_unique = [&](const std::string& c) {
        auto it = std::lower_bound(fr.begin(), fr.end(), c);
        if (it != fr.end() && *it == c)
            lin = false;
        else
            fr.insert(it, c);
    };
    std::visit(
        [&](auto& n) {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, IdNode>) {
                add_unique(n.left);
                add_unique(n.right);
            } else if constexpr (std::is_same_v<N, AxiomNode>) {
                for (auto& c : n.ins) add_unique(c);
                for (auto& c : n.outs) add_unique(c);
            } else if constexpr (std::is_same_v<N, CaseNode>) {
                insert_sorted(fr, n.chan);
                if (n.branches.empty()) {
                    if (n.ctx) {
                        for (auto& c : n.ctx->channels()) insert_sorted(fr, c);
                    } else {
                        open = true;
                    }
                }
                for (auto& b : n.branches) {
                    size += b.body.size();
                    lin = lin && b.body.is_linear();
                    open = open || b.body.open();
                    for (auto& c : b.body.interface()) insert_sorted(fr, c);
                }
            } else if constexpr (std::is_same_v<N, SelectNode>) {
                size += n.body.size();
                lin = n.body.is_linear();
                open = n.body.open();
                fr = n.body.interface();
                insert_sorted(fr, n.chan);
            } else if constexpr (std::is_same_v<N, SplitNode>) {
                size += n.body.size();
                lin = n.body.is_linear();
                open = n.body.open();
                std::set<std::string> ps(n.parts.begin(), n.parts.end());
                if (ps.size() != n.parts.size() || ps.count(n.chan)) lin = false;
                for (auto& c : n.body.interface())
                    if (!ps.count(c)) {
                        if (c == n.chan) lin = false;
                        fr.push_back(c);
                    }
                insert_sorted(fr, n.chan);
            } else if constexpr (std::is_same_v<N, ForkNode>) {
                fr.push_back(n.chan);
                for (auto& a : n.arms) {
                    size += a.body.size();
                    lin = lin && a.body.is_linear();
                    if (a.part == n.chan) lin = false;
                    for (auto& c : a.owns) {
                        if (c == a.part) lin = false;
                        add_unique(c);
                    }
                }
            } else if constexpr (std::is_same_v<N, CutNode>) {
                size += n.left.size() + n.right.size();
                lin = n.left.is_linear() && n.right.is_linear();
                open = n.left.open() || n.right.open();
                for (auto* side : {&n.left, &n.right})
                    for (auto& c : side->interface())
                        if (c != n.chan) add_unique(c);
            }
        },
        r.node);
    r.free = std::move(fr);
    r.linear = lin;
    r.open = open;
    r.size = size;
    return Term(std::make_shared<const Rep>(std::move(r)));
}

inline Term Term::id(std::string left, std::string right) {
    return build(IdNode{std::move(left), std::move(right)});
}
inline Term Term::case_of(std::string chan, std::vector<Branch> branches, std::optional<Sequent> ctx) {
    if (!branches.empty()) ctx.reset();
    return build(CaseNode{std::move(chan), std::move(branches), std::move(ctx)});
}
inline Term Term::select(std::string chan, std::string tag, Term body) {
    return build(SelectNode{std::move(chan), std::move(tag), std::move(body)});
}
inline Term Term::split(std::string chan, std::vector<std::string> parts, Term body) {
    return build(SplitNode{std::move(chan), std::move(parts), std::move(body)});
}
inline Term Term::fork(std::string chan, std::vector<Arm> arms) {
    for (auto& a : arms) std::sort(a.owns.begin(), a.owns.end());
    return build(ForkNode{std::move(chan), std::move(arms)});
}
inline Term Term::cut(std::string chan, Term left, Term right, std::optional<Formula> type) {
    return build(CutNode{std::move(chan), std::move(type), std::move(left), std::move(right)});
}
inline Term Term::axiom(std::string name, std::vector<std::string> ins, std::vector<std::string> outs) {
    return build(AxiomNode{std::move(name), std::move(ins), std::move(outs)});
}

inline TermKind Term::kind() const { return static_cast<TermKind>(rep_->node.index()); }
template <class N> const N* Term::get() const { return std::get_if<N>(&rep_->node); }

inline const std::string& Term::chan() const {
    static const std::string none;
    switch (kind()) {
    case TermKind::Case: return as<CaseNode>().chan;
    case TermKind::Select: return as<SelectNode>().chan;
    case TermKind::Split: return as<SplitNode>().chan;
    case TermKind::Fork: return as<ForkNode>().chan;
    case TermKind::Cut: return as<CutNode>().chan;
    default: return none;
    }
}

inline bool Term::is_linear() const { return rep_->linear; }
inline const std::vector<std::string>& Term::interface() const { return rep_->free; }
inline const std::vector<std::string>& Term::free() const {
    if (!rep_->linear) throw StructureError(StructureErrorKind::DuplicateInterface, "a channel occurs twice in an interface");
    return rep_->free;
}
inline bool Term::has_free(std::string_view c) const { return detail::contains_sorted(rep_->free, c); }
inline bool Term::open() const { return rep_->open; }
inline std::size_t Term::size() const { return rep_->size; }
inline const Decoration* Term::decoration() const { return rep_->deco ? &*rep_->deco : nullptr; }
inline const Sequent* Term::sequent() const { return rep_->deco ? rep_->deco->sequent.get() : nullptr; }
inline const SourceSpan& Term::span() const { return rep_->span; }

inline Term Term::decorated(Decoration d) const {
    Rep r = *rep_;
    r.deco = std::move(d);
    return Term(std::make_shared<const Rep>(std::move(r)));
}
inline Term Term::with_span(SourceSpan s) const {
    Rep r = *rep_;
    r.span = s;
    return Term(std::make_shared<const Rep>(std::move(r)));
}

inline std::size_t Term::child_count() const {
    switch (kind()) {
    case TermKind::Case: return as<CaseNode>().branches.size();
    case TermKind::Select:
    case TermKind::Split: return 1;
    case TermKind::Fork: return as<ForkNode>().arms.size();
    case TermKind::Cut: return 2;
    default: return 0;
    }
}

inline const Term& Term::child(std::size_t i) const {
    switch (kind()) {
    case TermKind::Case: return as<CaseNode>().branches.at(i).body;
    case TermKind::Select: return as<SelectNode>().body;
    case TermKind::Split: return as<SplitNode>().body;
    case TermKind::Fork: return as<ForkNode>().arms.at(i).body;
    case TermKind::Cut: return i == 0 ? as<CutNode>().left : as<CutNode>().right;
    default: throw Error("term has no children");
    }
}

inline Term Term::with_child(std::size_t i, Term t) const {
    TermNode node = rep_->node;
    std::visit(
        [&](auto& n) {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, CaseNode>) n.branches.at(i).body = std::move(t);
            else if constexpr (std::is_same_v<N, SelectNode> || std::is_same_v<N, SplitNode>) n.body = std::move(t);
            else if constexpr (std::is_same_v<N, ForkNode>) n.arms.at(i).body = std::move(t);
            else if constexpr (std::is_same_v<N, CutNode>) (i == 0 ? n.left : n.right) = std::move(t);
            else throw Error("term has no children");
        },
        node);
    return build(std::move(node), rep_->span);
}

using Path = std::vector<std::size_t>;

inline const Term& subterm_at(const Term& t, const Path& p, std::size_t from = 0) {
    return from == p.size() ? t : subterm_at(t.child(p[from]), p, from + 1);
}

inline Term replace_at(const Term& t, const Path& p, Term repl, std::size_t from = 0) {
    if (from == p.size()) return repl;
    return t.with_child(p[from], replace_at(t.child(p[from]), p, std::move(repl), from + 1));
}

inline std::string path_str(const Path& p) {
    std::string s;
    for (std::size_t i = 0; i < p.size(); ++i) s += (i ? "." : "") + std::to_string(p[i]);
    return s.empty() ? "root" : s;
}

inline const std::vector<std::string>& free_channels(const Term& t) { return t.free(); }

// Every channel name in the term, free or bound.
inline std::set<std::string> all_channels(const Term& t) {
    std::set<std::string> out;
    auto walk = [&](auto& self, const Term& u) -> void {
        std::visit(
            [&](auto& n) {
                using N = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<N, IdNode>) {
                    out.insert(n.left);
                    out.insert(n.right);
                } else if constexpr (std::is_same_v<N, AxiomNode>) {
                    out.insert(n.ins.begin(), n.ins.end());
                    out.insert(n.outs.begin(), n.outs.end());
                } else if constexpr (std::is_same_v<N, CaseNode>) {
                    out.insert(n.chan);
                    if (n.ctx)
                        for (auto& c : n.ctx->channels()) out.insert(c);
                } else if constexpr (std::is_same_v<N, SplitNode>) {
                    out.insert(n.chan);
                    out.insert(n.parts.begin(), n.parts.end());
                } else if constexpr (std::is_same_v<N, ForkNode>) {
                    out.insert(n.chan);
                    for (auto& a : n.arms) {
                        out.insert(a.part);
                        out.insert(a.owns.begin(), a.owns.end());
                    }
                } else {
                    out.insert(n.chan);
                }
            },
            u.rep().node);
        for (std::size_t i = 0; i < u.child_count(); ++i) self(self, u.child(i));
    };
    walk(walk, t);
    return out;
}

// Applies `f` to every channel occurrence, binders included. Decorations are dropped.
template <class F> Term map_channels(const Term& t, const F& f) {
    auto mapv = [&](const std::vector<std::string>& v) {
        std::vector<std::string> o;
        for (auto& c : v) o.push_back(f(c));
        return o;
    };
    auto mapseq = [&](const Sequent& s) {
        std::vector<Binding> d, c;
        for (auto& b : s.domain()) d.push_back({f(b.channel), b.formula});
        for (auto& b : s.codomain()) c.push_back({f(b.channel), b.formula});
        return Sequent(std::move(d), std::move(c));
    };
    Term out = std::visit(
        [&](auto& n) -> Term {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, IdNode>) {
                return Term::id(f(n.left), f(n.right));
            } else if constexpr (std::is_same_v<N, AxiomNode>) {
                return Term::axiom(n.name, mapv(n.ins), mapv(n.outs));
            } else if constexpr (std::is_same_v<N, CaseNode>) {
                std::vector<Branch> bs;
                for (auto& b : n.branches) bs.push_back({b.tag, map_channels(b.body, f)});
                std::optional<Sequent> ctx;
                if (n.ctx) ctx = mapseq(*n.ctx);
                return Term::case_of(f(n.chan), std::move(bs), std::move(ctx));
            } else if constexpr (std::is_same_v<N, SelectNode>) {
                return Term::select(f(n.chan), n.tag, map_channels(n.body, f));
            } else if constexpr (std::is_same_v<N, SplitNode>) {
                return Term::split(f(n.chan), mapv(n.parts), map_channels(n.body, f));
            } else if constexpr (std::is_same_v<N, ForkNode>) {
                std::vector<Arm> as;
                for (auto& a : n.arms) as.push_back({f(a.part), mapv(a.owns), map_channels(a.body, f)});
                return Term::fork(f(n.chan), std::move(as));
            } else {
                return Term::cut(f(n.chan), map_channels(n.left, f), map_channels(n.right, f), n.type);
            }
        },
        t.rep().node);
    return out.with_span(t.span());
}

inline Term rename_channels(const Term& t, const std::map<std::string, std::string>& m) {
    auto names = all_channels(t);
    std::set<std::string> image;
    for (auto& n : names) {
        auto it = m.find(n);
        const std::string& img = it == m.end() ? n : it->second;
        require_identifier(img);
        if (!image.insert(img).second)
            throw StructureError(StructureErrorKind::NonInjectiveRename, "two channels map to '" + img + "'");
    }
    return map_channels(t, [&](const std::string& c) {
        auto it = m.find(c);
        return it == m.end() ? c : it->second;
    });
}

// Renames free occurrences of `from`; stops where `from` is rebound.
inline Term substitute_free(const Term& t, const std::string& from, const std::string& to) {
    if (!t.has_free(from) && !t.open()) return t;
    auto sub = [&](const std::string& c) { return c == from ? to : c; };
    auto subv = [&](const std::vector<std::string>& v) {
        std::vector<std::string> o;
        for (auto& c : v) o.push_back(sub(c));
        return o;
    };
    Term out = std::visit(
        [&](auto& n) -> Term {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, IdNode>) {
                return Term::id(sub(n.left), sub(n.right));
            } else if constexpr (std::is_same_v<N, AxiomNode>) {
                return Term::axiom(n.name, subv(n.ins), subv(n.outs));
            } else if constexpr (std::is_same_v<N, CaseNode>) {
                std::vector<Branch> bs;
                for (auto& b : n.branches) bs.push_back({b.tag, substitute_free(b.body, from, to)});
                std::optional<Sequent> ctx;
                if (n.ctx) {
                    std::vector<Binding> d, c;
                    for (auto& b : n.ctx->domain()) d.push_back({sub(b.channel), b.formula});
                    for (auto& b : n.ctx->codomain()) c.push_back({sub(b.channel), b.formula});
                    ctx = Sequent(std::move(d), std::move(c));
                }
                return Term::case_of(sub(n.chan), std::move(bs), std::move(ctx));
            } else if constexpr (std::is_same_v<N, SelectNode>) {
                return Term::select(sub(n.chan), n.tag, substitute_free(n.body, from, to));
            } else if constexpr (std::is_same_v<N, SplitNode>) {
                bool bound = std::find(n.parts.begin(), n.parts.end(), from) != n.parts.end();
                return Term::split(sub(n.chan), n.parts, bound ? n.body : substitute_free(n.body, from, to));
            } else if constexpr (std::is_same_v<N, ForkNode>) {
                std::vector<Arm> as;
                for (auto& a : n.arms)
                    as.push_back({a.part, subv(a.owns), a.part == from ? a.body : substitute_free(a.body, from, to)});
                return Term::fork(sub(n.chan), std::move(as));
            } else {
                if (n.chan == from) return Term::cut(n.chan, n.left, n.right, n.type);
                return Term::cut(n.chan, substitute_free(n.left, from, to), substitute_free(n.right, from, to), n.type);
            }
        },
        t.rep().node);
    return out.with_span(t.span());
}

// Binders renamed c1, c2, ... in preorder, skipping free names. Yields globally unique binders.
inline Term canonicalize(const Term& t) {
    std::set<std::string> avoid(t.interface().begin(), t.interface().end());
    std::size_t counter = 0;
    auto fresh = [&]() {
        for (;;) {
            std::string n = "c" + std::to_string(++counter);
            if (!avoid.count(n)) return n;
        }
    };
    using Env = std::map<std::string, std::string>;
    auto go = [&](auto& self, const Term& u, const Env& env) -> Term {
        auto m = [&](const std::string& c) {
            auto it = env.find(c);
            return it == env.end() ? c : it->second;
        };
        auto mv = [&](const std::vector<std::string>& v) {
            std::vector<std::string> o;
            for (auto& c : v) o.push_back(m(c));
            return o;
        };
        Term out = std::visit(
            [&](auto& n) -> Term {
                using N = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<N, IdNode>) {
                    return Term::id(m(n.left), m(n.right));
                } else if constexpr (std::is_same_v<N, AxiomNode>) {
                    return Term::axiom(n.name, mv(n.ins), mv(n.outs));
                } else if constexpr (std::is_same_v<N, CaseNode>) {
                    std::vector<Branch> bs;
                    for (auto& b : n.branches) bs.push_back({b.tag, self(self, b.body, env)});
                    std::optional<Sequent> ctx;
                    if (n.ctx) {
                        std::vector<Binding> d, c;
                        for (auto& b : n.ctx->domain()) d.push_back({m(b.channel), b.formula});
                        for (auto& b : n.ctx->codomain()) c.push_back({m(b.channel), b.formula});
                        ctx = Sequent(std::move(d), std::move(c));
                    }
                    return Term::case_of(m(n.chan), std::move(bs), std::move(ctx));
                } else if constexpr (std::is_same_v<N, SelectNode>) {
                    return Term::select(m(n.chan), n.tag, self(self, n.body, env));
                } else if constexpr (std::is_same_v<N, SplitNode>) {
                    Env e = env;
                    std::vector<std::string> ps;
                    for (auto& p : n.parts) {
                        ps.push_back(fresh());
                        e[p] = ps.back();
                    }
                    return Term::split(m(n.chan), std::move(ps), self(self, n.body, e));
                } else if constexpr (std::is_same_v<N, ForkNode>) {
                    std::vector<Arm> as;
                    for (auto& a : n.arms) {
                        Env e = env;
                        std::string p = fresh();
                        e[a.part] = p;
                        as.push_back({p, mv(a.owns), self(self, a.body, e)});
                    }
                    return Term::fork(m(n.chan), std::move(as));
                } else {
                    Env e = env;
                    std::string c = fresh();
                    e[n.chan] = c;
                    Term l = self(self, n.left, e);
                    Term r = self(self, n.right, e);
                    return Term::cut(c, std::move(l), std::move(r), n.type);
                }
            },
            u.rep().node);
        return out.with_span(u.span());
    };
    return go(go, t, Env{});
}

// Binders pairwise distinct and disjoint from the free names.
inline bool is_hygienic(const Term& t) {
    std::set<std::string> seen(t.interface().begin(), t.interface().end());
    bool ok = true;
    auto walk = [&](auto& self, const Term& u) -> void {
        if (!ok) return;
        auto bind = [&](const std::string& c) {
            if (!seen.insert(c).second) ok = false;
        };
        if (auto* s = u.get<SplitNode>())
            for (auto& p : s->parts) bind(p);
        if (auto* f = u.get<ForkNode>())
            for (auto& a : f->arms) bind(a.part);
        if (auto* c = u.get<CutNode>()) bind(c->chan);
        for (std::size_t i = 0; i < u.child_count(); ++i) self(self, u.child(i));
    };
    walk(walk, t);
    return ok;
}

// Structural equality: exact names, case branches as a tag-keyed set, decorations ignored.
inline bool operator==(const Term& a, const Term& b) {
    if (a.same(b)) return true;
    if (a.kind() != b.kind() || a.size() != b.size()) return false;
    switch (a.kind()) {
    case TermKind::Id: return a.as<IdNode>().left == b.as<IdNode>().left && a.as<IdNode>().right == b.as<IdNode>().right;
    case TermKind::Axiom: {
        auto &x = a.as<AxiomNode>(), &y = b.as<AxiomNode>();
        return x.name == y.name && x.ins == y.ins && x.outs == y.outs;
    }
    case TermKind::Case: {
        auto &x = a.as<CaseNode>(), &y = b.as<CaseNode>();
        if (x.chan != y.chan || x.branches.size() != y.branches.size()) return false;
        for (auto& bx : x.branches) {
            auto it = std::find_if(y.branches.begin(), y.branches.end(), [&](auto& by) { return by.tag == bx.tag; });
            if (it == y.branches.end() || !(bx.body == it->body)) return false;
        }
        return true;
    }
    case TermKind::Select: {
        auto &x = a.as<SelectNode>(), &y = b.as<SelectNode>();
        return x.chan == y.chan && x.tag == y.tag && x.body == y.body;
    }
    case TermKind::Split: {
        auto &x = a.as<SplitNode>(), &y = b.as<SplitNode>();
        return x.chan == y.chan && x.parts == y.parts && x.body == y.body;
    }
    case TermKind::Fork: {
        auto &x = a.as<ForkNode>(), &y = b.as<ForkNode>();
        if (x.chan != y.chan || x.arms.size() != y.arms.size()) return false;
        for (std::size_t i = 0; i < x.arms.size(); ++i)
            if (x.arms[i].part != y.arms[i].part || x.arms[i].owns != y.arms[i].owns || !(x.arms[i].body == y.arms[i].body))
                return false;
        return true;
    }
    case TermKind::Cut: {
        auto &x = a.as<CutNode>(), &y = b.as<CutNode>();
        return x.chan == y.chan && x.left == y.left && x.right == y.right;
    }
    }
    return false;
}
inline bool operator!=(const Term& a, const Term& b) { return !(a == b); }

inline std::size_t subformula_count(const Formula& f) { return f.size(); }

// A name based on `base` that is not in `used`; records it.
inline std::string fresh_name(const std::string& base, std::set<std::string>& used) {
    if (!used.count(base) && is_identifier(base)) {
        used.insert(base);
        return base;
    }
    for (std::size_t i = 1;; ++i) {
        std::string n = base + "_" + std::to_string(i);
        if (!used.count(n)) {
            used.insert(n);
            return n;
        }
    }
}

}  // namespace mallterm
