#ifndef OPENMAP_FORMULA_HPP
#define OPENMAP_FORMULA_HPP

#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "openmap/errors.hpp"
#include "openmap/polynomial.hpp"

namespace openmap {

enum class Rel { GT, GE, EQ };

// Polynomial sign condition p rel 0.
struct Atom {
    Polynomial poly;
    Rel rel = Rel::GT;

    bool holds(const QVec& x) const {
        int s = sign_at(poly, x);
        switch (rel) {
            case Rel::GT: return s > 0;
            case Rel::GE: return s >= 0;
            case Rel::EQ: return s == 0;
        }
        return false;
    }
};

enum class Quant { Exists, ForAll };

// Boolean combination of atoms with an optional quantifier prefix. Variable
// indices are global: quantified variables are named by the prefix entries,
// every other index below `arity` is free.
class SAFormula {
public:
    enum class Kind { True, False, Leaf, And, Or, Not };

    SAFormula() : kind_(Kind::True), arity_(0) {}

    static SAFormula constant(std::size_t arity, bool value) {
        SAFormula f;
        f.kind_ = value ? Kind::True : Kind::False;
        f.arity_ = arity;
        return f;
    }
    static SAFormula atom(Atom a) {
        SAFormula f;
        f.kind_ = Kind::Leaf;
        f.arity_ = a.poly.arity();
        f.atom_ = std::move(a);
        return f;
    }
    static SAFormula make_and(std::vector<SAFormula> parts) {
        return combine(Kind::And, std::move(parts));
    }
    static SAFormula make_or(std::vector<SAFormula> parts) {
        return combine(Kind::Or, std::move(parts));
    }
    static SAFormula make_not(SAFormula part) {
        SAFormula f;
        f.kind_ = Kind::Not;
        f.arity_ = part.arity_;
        f.children_.push_back(std::move(part));
        return f;
    }

    Kind kind() const { return kind_; }
    std::size_t arity() const { return arity_; }
    const Atom& leaf() const { return atom_; }
    const std::vector<SAFormula>& children() const { return children_; }

    const std::vector<std::pair<Quant, std::size_t>>& prefix() const { return prefix_; }
    void set_prefix(std::vector<std::pair<Quant, std::size_t>> p) { prefix_ = std::move(p); }
    bool quantifier_free() const { return prefix_.empty(); }

    // Exact truth value of the quantifier-free matrix at a rational point.
    bool holds_at(const QVec& x) const {
        switch (kind_) {
            case Kind::True: return true;
            case Kind::False: return false;
            case Kind::Leaf: return atom_.holds(x);
            case Kind::And:
                for (const auto& c : children_)
                    if (!c.holds_at(x)) return false;
                return true;
            case Kind::Or:
                for (const auto& c : children_)
                    if (c.holds_at(x)) return true;
                return false;
            case Kind::Not: return !children_[0].holds_at(x);
        }
        return false;
    }

    // Three-valued truth over a box: certified true/false or unknown.
    std::optional<bool> holds_over(const IntervalBox& box) const {
        switch (kind_) {
            case Kind::True: return true;
            case Kind::False: return false;
            case Kind::Leaf: {
                Interval v = atom_.poly.eval_box(box);
                switch (atom_.rel) {
                    case Rel::GT:
                        if (v.lo().sign() > 0) return true;
                        if (v.hi().sign() <= 0) return false;
                        return std::nullopt;
                    case Rel::GE:
                        if (v.lo().sign() >= 0) return true;
                        if (v.hi().sign() < 0) return false;
                        return std::nullopt;
                    case Rel::EQ:
                        if (v.lo().is_zero() && v.hi().is_zero()) return true;
                        if (!v.contains_zero()) return false;
                        return std::nullopt;
                }
                return std::nullopt;
            }
            case Kind::And: {
                bool unknown = false;
                for (const auto& c : children_) {
                    auto r = c.holds_over(box);
                    if (r && !*r) return false;
                    if (!r) unknown = true;
                }
                if (unknown) return std::nullopt;
                return true;
            }
            case Kind::Or: {
                bool unknown = false;
                for (const auto& c : children_) {
                    auto r = c.holds_over(box);
                    if (r && *r) return true;
                    if (!r) unknown = true;
                }
                if (unknown) return std::nullopt;
                return false;
            }
            case Kind::Not: {
                auto r = children_[0].holds_over(box);
                if (!r) return std::nullopt;
                return !*r;
            }
        }
        return std::nullopt;
    }

    // Substitutes rationals for a subset of variables and renumbers the rest.
    SAFormula substitute(const std::vector<std::optional<Rat>>& fixed, std::size_t new_arity,
                         const std::vector<std::size_t>& remap) const {
        SAFormula f;
        f.kind_ = kind_;
        f.arity_ = new_arity;
        if (kind_ == Kind::Leaf) {
            Polynomial p = atom_.poly;
            for (std::size_t i = 0; i < fixed.size(); ++i)
                if (fixed[i]) p = p.substitute(i, *fixed[i]);
            f.atom_ = Atom{p.remap_vars(new_arity, remap), atom_.rel};
        }
        for (const auto& c : children_) f.children_.push_back(c.substitute(fixed, new_arity, remap));
        std::vector<std::pair<Quant, std::size_t>> new_prefix;
        for (const auto& [q, v] : prefix_) {
            if (v < fixed.size() && fixed[v]) continue;
            new_prefix.emplace_back(q, remap[v]);
        }
        f.prefix_ = std::move(new_prefix);
        return f;
    }

    void collect_atoms(std::vector<Atom>& out) const {
        if (kind_ == Kind::Leaf) out.push_back(atom_);
        for (const auto& c : children_) c.collect_atoms(out);
    }

    std::string str(const std::vector<std::string>& names = {}) const {
        std::ostringstream os;
        for (const auto& [q, v] : prefix_) {
            os << (q == Quant::Exists ? "exists " : "forall ");
            if (v < names.size()) os << names[v];
            else os << "x" << (v + 1);
            os << ". ";
        }
        print(os, names);
        return os.str();
    }

private:
    static SAFormula combine(Kind k, std::vector<SAFormula> parts) {
        if (parts.empty()) return constant(0, k == Kind::And);
        SAFormula f;
        f.kind_ = k;
        f.arity_ = parts[0].arity_;
        for (auto& p : parts) {
            if (p.arity_ > f.arity_) f.arity_ = p.arity_;
        }
        f.children_ = std::move(parts);
        return f;
    }

    void print(std::ostringstream& os, const std::vector<std::string>& names) const {
        switch (kind_) {
            case Kind::True: os << "0 = 0"; break;
            case Kind::False: os << "1 = 0"; break;
            case Kind::Leaf:
                os << atom_.poly.str(names)
                   << (atom_.rel == Rel::GT ? " > 0" : atom_.rel == Rel::GE ? " >= 0" : " = 0");
                break;
            case Kind::And:
            case Kind::Or: {
                os << "(";
                for (std::size_t i = 0; i < children_.size(); ++i) {
                    if (i) os << (kind_ == Kind::And ? " and " : " or ");
                    children_[i].print(os, names);
                }
                os << ")";
                break;
            }
            case Kind::Not:
                os << "not (";
                children_[0].print(os, names);
                os << ")";
                break;
        }
    }

    Kind kind_ = Kind::True;
    std::size_t arity_ = 0;
    Atom atom_;
    std::vector<SAFormula> children_;
    std::vector<std::pair<Quant, std::size_t>> prefix_;
};

// A semi-algebraic set: dimension plus a quantifier-free defining formula.
struct SASet {
    std::size_t dim = 0;
    SAFormula formula;
};

inline bool holds_at(const SAFormula& psi, const QVec& x) {
    if (!psi.quantifier_free()) throw Error("holds_at needs a quantifier-free formula");
    return psi.holds_at(x);
}

// Graph(f) of a rational-function system as a quantifier-free formula in
// n + m variables: for every component, q_i(x) != 0 and p_i(x) = y_i q_i(x).
inline SAFormula graph_formula(const std::vector<Polynomial>& numerators,
                               const std::vector<Polynomial>& denominators) {
    if (numerators.size() != denominators.size() || numerators.empty())
        throw ArityMismatch("graph_formula: component lists");
    std::size_t n = numerators[0].arity();
    std::size_t m = numerators.size();
    std::size_t total = n + m;
    std::vector<std::size_t> embed(n);
    for (std::size_t i = 0; i < n; ++i) embed[i] = i;
    std::vector<SAFormula> parts;
    for (std::size_t j = 0; j < m; ++j) {
        if (numerators[j].arity() != n || denominators[j].arity() != n)
            throw ArityMismatch("graph_formula: mixed arities");
        Polynomial p = numerators[j].remap_vars(total, embed);
        Polynomial q = denominators[j].remap_vars(total, embed);
        Polynomial yj = Polynomial::variable(total, n + j);
        parts.push_back(SAFormula::make_not(SAFormula::atom(Atom{q, Rel::EQ})));
        parts.push_back(SAFormula::atom(Atom{p - yj * q, Rel::EQ}));
    }
    return SAFormula::make_and(std::move(parts));
}

} // namespace openmap

#endif
