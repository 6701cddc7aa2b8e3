#ifndef OPENMAP_EXPR_HPP
#define OPENMAP_EXPR_HPP

#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "openmap/errors.hpp"
#include "openmap/interval.hpp"
#include "openmap/rational.hpp"
#include "openmap/vec.hpp"

namespace openmap {

// Expression AST over +, -, *, /, integer powers with rational constants.
// Nodes are immutable and shared; light simplification happens at build time.
class Expr {
public:
    enum class Kind { Const, Var, Add, Sub, Mul, Div, Pow };

    struct Node {
        Kind kind;
        Rat value;                 // Const
        std::size_t var = 0;       // Var
        std::shared_ptr<const Node> a, b;
        long exp = 0;              // Pow
    };

    Expr() : n_(make_const_node(Rat(0))) {}

    static Expr constant(Rat v) { return Expr(make_const_node(std::move(v))); }
    static Expr var(std::size_t i) {
        auto n = std::make_shared<Node>();
        n->kind = Kind::Var;
        n->var = i;
        return Expr(std::move(n));
    }

    bool is_const() const { return n_->kind == Kind::Const; }
    const Rat& const_value() const { return n_->value; }
    const Node& node() const { return *n_; }

    friend Expr operator+(const Expr& x, const Expr& y) {
        if (x.is_const() && y.is_const()) return constant(x.const_value() + y.const_value());
        if (x.is_const() && x.const_value().is_zero()) return y;
        if (y.is_const() && y.const_value().is_zero()) return x;
        return binary(Kind::Add, x, y);
    }
    friend Expr operator-(const Expr& x, const Expr& y) {
        if (x.is_const() && y.is_const()) return constant(x.const_value() - y.const_value());
        if (y.is_const() && y.const_value().is_zero()) return x;
        return binary(Kind::Sub, x, y);
    }
    friend Expr operator*(const Expr& x, const Expr& y) {
        if (x.is_const() && y.is_const()) return constant(x.const_value() * y.const_value());
        if (x.is_const()) {
            if (x.const_value().is_zero()) return constant(Rat(0));
            if (x.const_value() == Rat(1)) return y;
        }
        if (y.is_const()) {
            if (y.const_value().is_zero()) return constant(Rat(0));
            if (y.const_value() == Rat(1)) return x;
        }
        return binary(Kind::Mul, x, y);
    }
    friend Expr operator/(const Expr& x, const Expr& y) {
        if (y.is_const()) {
            if (y.const_value().is_zero()) throw DivisionByZero("constant zero denominator");
            if (x.is_const()) return constant(x.const_value() / y.const_value());
            if (y.const_value() == Rat(1)) return x;
        }
        return binary(Kind::Div, x, y);
    }
    friend Expr operator-(const Expr& x) { return constant(Rat(0)) - x; }

    // Integer power, e >= 0. x^0 == 1 by convention (also at x = 0).
    static Expr pow(const Expr& x, long e) {
        if (e < 0) throw Error("expression powers must be >= 0");
        if (e == 0) return constant(Rat(1));
        if (e == 1) return x;
        if (x.is_const()) return constant(x.const_value().pow_int(e));
        auto n = std::make_shared<Node>();
        n->kind = Kind::Pow;
        n->a = x.n_;
        n->exp = e;
        return Expr(std::move(n));
    }

    // Smallest arity that makes all variable references valid.
    std::size_t min_arity() const {
        std::size_t m = 0;
        walk_arity(*n_, m);
        return m;
    }

    Rat eval(const QVec& x) const { return eval_node(*n_, x); }

    Interval eval(const std::vector<Interval>& box, std::optional<int> round_bits) const {
        return eval_node_iv(*n_, box, round_bits);
    }

    // d/dx_i, symbolic.
    Expr derivative(std::size_t i) const { return diff_node(*n_, i); }

    // Replaces variables with constants (where fixed[j] is set) and renumbers
    // the remaining ones by `remap` (remap[j] = new index).
    Expr substitute(const std::vector<std::optional<Rat>>& fixed,
                    const std::vector<std::size_t>& remap) const {
        return subst_node(*n_, fixed, remap);
    }

    std::string str() const {
        std::ostringstream os;
        print(*n_, os, 0);
        return os.str();
    }

private:
    explicit Expr(std::shared_ptr<const Node> n) : n_(std::move(n)) {}

    static std::shared_ptr<const Node> make_const_node(Rat v) {
        auto n = std::make_shared<Node>();
        n->kind = Kind::Const;
        n->value = std::move(v);
        return n;
    }
    static Expr binary(Kind k, const Expr& x, const Expr& y) {
        auto n = std::make_shared<Node>();
        n->kind = k;
        n->a = x.n_;
        n->b = y.n_;
        return Expr(std::move(n));
    }

    static void walk_arity(const Node& n, std::size_t& m) {
        switch (n.kind) {
            case Kind::Var: if (n.var + 1 > m) m = n.var + 1; break;
            case Kind::Const: break;
            case Kind::Pow: walk_arity(*n.a, m); break;
            default: walk_arity(*n.a, m); walk_arity(*n.b, m);
        }
    }

    static Rat eval_node(const Node& n, const QVec& x) {
        switch (n.kind) {
            case Kind::Const: return n.value;
            case Kind::Var:
                if (n.var >= x.dim()) throw ArityMismatch("variable index out of range");
                return x[n.var];
            case Kind::Add: return eval_node(*n.a, x) + eval_node(*n.b, x);
            case Kind::Sub: return eval_node(*n.a, x) - eval_node(*n.b, x);
            case Kind::Mul: return eval_node(*n.a, x) * eval_node(*n.b, x);
            case Kind::Div: {
                Rat d = eval_node(*n.b, x);
                if (d.is_zero()) throw DivisionByZero();
                return eval_node(*n.a, x) / d;
            }
            case Kind::Pow: return eval_node(*n.a, x).pow_int(n.exp);
        }
        throw Error("unreachable");
    }

    static Interval rounded(Interval iv, std::optional<int> bits) {
        return bits ? iv.round_outward(*bits) : iv;
    }

    static Interval eval_node_iv(const Node& n, const std::vector<Interval>& box,
                                 std::optional<int> bits) {
        switch (n.kind) {
            case Kind::Const: return Interval(n.value);
            case Kind::Var:
                if (n.var >= box.size()) throw ArityMismatch("variable index out of range");
                return box[n.var];
            case Kind::Add:
                return rounded(eval_node_iv(*n.a, box, bits) + eval_node_iv(*n.b, box, bits), bits);
            case Kind::Sub:
                return rounded(eval_node_iv(*n.a, box, bits) - eval_node_iv(*n.b, box, bits), bits);
            case Kind::Mul:
                return rounded(eval_node_iv(*n.a, box, bits) * eval_node_iv(*n.b, box, bits), bits);
            case Kind::Div:
                return rounded(eval_node_iv(*n.a, box, bits) / eval_node_iv(*n.b, box, bits), bits);
            case Kind::Pow:
                return rounded(eval_node_iv(*n.a, box, bits).pow_int(n.exp), bits);
        }
        throw Error("unreachable");
    }

    static Expr diff_node(const Node& n, std::size_t i) {
        switch (n.kind) {
            case Kind::Const: return constant(Rat(0));
            case Kind::Var: return constant(Rat(n.var == i ? 1 : 0));
            case Kind::Add: return diff_node(*n.a, i) + diff_node(*n.b, i);
            case Kind::Sub: return diff_node(*n.a, i) - diff_node(*n.b, i);
            case Kind::Mul:
                return diff_node(*n.a, i) * Expr(n.b) + Expr(n.a) * diff_node(*n.b, i);
            case Kind::Div:
                return (diff_node(*n.a, i) * Expr(n.b) - Expr(n.a) * diff_node(*n.b, i)) /
                       (Expr(n.b) * Expr(n.b));
            case Kind::Pow:
                return constant(Rat(n.exp)) * pow(Expr(n.a), n.exp - 1) * diff_node(*n.a, i);
        }
        throw Error("unreachable");
    }

    static Expr subst_node(const Node& n, const std::vector<std::optional<Rat>>& fixed,
                           const std::vector<std::size_t>& remap) {
        switch (n.kind) {
            case Kind::Const: return constant(n.value);
            case Kind::Var:
                if (n.var < fixed.size() && fixed[n.var]) return constant(*fixed[n.var]);
                if (n.var >= remap.size()) throw ArityMismatch("substitute: unmapped variable");
                return var(remap[n.var]);
            case Kind::Add: return subst_node(*n.a, fixed, remap) + subst_node(*n.b, fixed, remap);
            case Kind::Sub: return subst_node(*n.a, fixed, remap) - subst_node(*n.b, fixed, remap);
            case Kind::Mul: return subst_node(*n.a, fixed, remap) * subst_node(*n.b, fixed, remap);
            case Kind::Div: return subst_node(*n.a, fixed, remap) / subst_node(*n.b, fixed, remap);
            case Kind::Pow: return pow(subst_node(*n.a, fixed, remap), n.exp);
        }
        throw Error("unreachable");
    }

    static void print(const Node& n, std::ostringstream& os, int parent_prec) {
        auto paren = [&](int prec, auto&& body) {
            if (prec < parent_prec) { os << "("; body(); os << ")"; }
            else body();
        };
        switch (n.kind) {
            case Kind::Const:
                if (n.value.sign() < 0 || !n.value.is_integer()) { os << "(" << n.value << ")"; }
                else os << n.value;
                break;
            case Kind::Var: os << "x" << (n.var + 1); break;
            case Kind::Add:
                paren(1, [&] { print(*n.a, os, 1); os << " + "; print(*n.b, os, 1); });
                break;
            case Kind::Sub:
                paren(1, [&] { print(*n.a, os, 1); os << " - "; print(*n.b, os, 2); });
                break;
            case Kind::Mul:
                paren(2, [&] { print(*n.a, os, 2); os << "*"; print(*n.b, os, 2); });
                break;
            case Kind::Div:
                paren(2, [&] { print(*n.a, os, 2); os << "/"; print(*n.b, os, 3); });
                break;
            case Kind::Pow:
                paren(3, [&] { print(*n.a, os, 4); os << "^" << n.exp; });
                break;
        }
    }

    std::shared_ptr<const Node> n_;
};

// A function R^n -> R^m as a list of m component expressions.
class FuncSystem {
public:
    FuncSystem() : n_(0) {}
    FuncSystem(std::size_t n, std::vector<Expr> components)
        : n_(n), comps_(std::move(components)) {
        for (const auto& c : comps_)
            if (c.min_arity() > n_) throw ArityMismatch("component reads past declared arity");
    }

    std::size_t input_dim() const { return n_; }
    std::size_t output_dim() const { return comps_.size(); }
    const Expr& component(std::size_t j) const { return comps_[j]; }
    const std::vector<Expr>& components() const { return comps_; }

    friend std::ostream& operator<<(std::ostream& os, const FuncSystem& f) {
        os << "(";
        for (std::size_t j = 0; j < f.comps_.size(); ++j) {
            if (j) os << ", ";
            os << f.comps_[j].str();
        }
        return os << ")";
    }

private:
    std::size_t n_;
    std::vector<Expr> comps_;
};

inline QVec eval_point(const FuncSystem& f, const QVec& x) {
    if (x.dim() != f.input_dim()) throw DimensionMismatch("eval_point");
    QVec y(f.output_dim());
    for (std::size_t j = 0; j < f.output_dim(); ++j) y[j] = f.component(j).eval(x);
    return y;
}

inline IntervalBox eval_interval(const FuncSystem& f, const IntervalBox& box,
                                 std::optional<int> round_bits = std::nullopt) {
    if (box.dim() != f.input_dim()) throw DimensionMismatch("eval_interval");
    std::vector<Interval> in;
    in.reserve(box.dim());
    for (std::size_t i = 0; i < box.dim(); ++i) in.push_back(box[i]);
    std::vector<Interval> out;
    out.reserve(f.output_dim());
    for (std::size_t j = 0; j < f.output_dim(); ++j)
        out.push_back(f.component(j).eval(in, round_bits));
    return IntervalBox(std::move(out));
}

// Row-major Jacobian: component (j, i) is d f_j / d x_i.
inline FuncSystem differentiate(const FuncSystem& f) {
    std::vector<Expr> parts;
    parts.reserve(f.output_dim() * f.input_dim());
    for (std::size_t j = 0; j < f.output_dim(); ++j)
        for (std::size_t i = 0; i < f.input_dim(); ++i)
            parts.push_back(f.component(j).derivative(i));
    return FuncSystem(f.input_dim(), std::move(parts));
}

inline IntervalMatrix jacobian_enclosure(const FuncSystem& jac, std::size_t m, std::size_t n,
                                         const IntervalBox& box,
                                         std::optional<int> round_bits = std::nullopt) {
    IntervalBox vals = eval_interval(jac, box, round_bits);
    IntervalMatrix a(m, n);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t i = 0; i < n; ++i) a.at(j, i) = vals[j * n + i];
    return a;
}

// Freezes the coordinates not listed in `keep` at the corresponding entries of
// `anchor`; the result is a system on |keep| variables (order of `keep`).
inline FuncSystem restrict_inputs(const FuncSystem& f, const std::vector<std::size_t>& keep,
                                  const QVec& anchor) {
    if (anchor.dim() != f.input_dim()) throw DimensionMismatch("restrict_inputs");
    std::vector<std::optional<Rat>> fixed(f.input_dim());
    std::vector<std::size_t> remap(f.input_dim(), 0);
    std::vector<bool> kept(f.input_dim(), false);
    for (std::size_t k = 0; k < keep.size(); ++k) {
        kept[keep[k]] = true;
        remap[keep[k]] = k;
    }
    for (std::size_t i = 0; i < f.input_dim(); ++i)
        if (!kept[i]) fixed[i] = anchor[i];
    std::vector<Expr> comps;
    comps.reserve(f.output_dim());
    for (std::size_t j = 0; j < f.output_dim(); ++j)
        comps.push_back(f.component(j).substitute(fixed, remap));
    return FuncSystem(keep.size(), std::move(comps));
}

} // namespace openmap

#endif
