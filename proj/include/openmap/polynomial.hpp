#ifndef OPENMAP_POLYNOMIAL_HPP
#define OPENMAP_POLYNOMIAL_HPP

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "openmap/errors.hpp"
#include "openmap/expr.hpp"
#include "openmap/interval.hpp"
#include "openmap/rational.hpp"
#include "openmap/vec.hpp"

namespace openmap {

// Sparse multivariate polynomial over Q. Terms are kept in lexicographic
// order of exponent vectors; no zero coefficients are stored.
class Polynomial {
public:
    using Expo = std::vector<unsigned>;

    Polynomial() : arity_(0) {}
    explicit Polynomial(std::size_t arity) : arity_(arity) {}

    static Polynomial constant(std::size_t arity, const Rat& c) {
        Polynomial p(arity);
        if (!c.is_zero()) p.terms_[Expo(arity, 0)] = c;
        return p;
    }
    static Polynomial variable(std::size_t arity, std::size_t i) {
        if (i >= arity) throw ArityMismatch("variable index past arity");
        Polynomial p(arity);
        Expo e(arity, 0);
        e[i] = 1;
        p.terms_[e] = Rat(1);
        return p;
    }

    std::size_t arity() const { return arity_; }
    bool is_zero() const { return terms_.empty(); }
    const std::map<Expo, Rat>& terms() const { return terms_; }

    bool is_constant() const {
        return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == Expo(arity_, 0));
    }
    Rat constant_value() const {
        if (terms_.empty()) return Rat(0);
        auto it = terms_.find(Expo(arity_, 0));
        return it == terms_.end() ? Rat(0) : it->second;
    }

    unsigned degree(std::size_t var) const {
        unsigned d = 0;
        for (const auto& [e, c] : terms_) {
            (void)c;
            if (e[var] > d) d = e[var];
        }
        return d;
    }
    unsigned total_degree() const {
        unsigned d = 0;
        for (const auto& [e, c] : terms_) {
            (void)c;
            unsigned s = 0;
            for (unsigned x : e) s += x;
            if (s > d) d = s;
        }
        return d;
    }
    bool uses(std::size_t var) const { return degree(var) > 0; }

    void add_term(const Expo& e, const Rat& c) {
        if (c.is_zero()) return;
        auto it = terms_.find(e);
        if (it == terms_.end()) {
            terms_[e] = c;
        } else {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
        a.check(b);
        Polynomial r = a;
        for (const auto& [e, c] : b.terms_) r.add_term(e, c);
        return r;
    }
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
        a.check(b);
        Polynomial r = a;
        for (const auto& [e, c] : b.terms_) r.add_term(e, -c);
        return r;
    }
    friend Polynomial operator-(const Polynomial& a) {
        Polynomial r(a.arity_);
        for (const auto& [e, c] : a.terms_) r.terms_[e] = -c;
        return r;
    }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        a.check(b);
        Polynomial r(a.arity_);
        for (const auto& [ea, ca] : a.terms_)
            for (const auto& [eb, cb] : b.terms_) {
                Expo e = ea;
                for (std::size_t i = 0; i < a.arity_; ++i) e[i] += eb[i];
                r.add_term(e, ca * cb);
            }
        return r;
    }
    Polynomial scaled(const Rat& s) const {
        Polynomial r(arity_);
        if (s.is_zero()) return r;
        for (const auto& [e, c] : terms_) r.terms_[e] = c * s;
        return r;
    }
    Polynomial pow(unsigned k) const {
        Polynomial r = constant(arity_, Rat(1));
        Polynomial base = *this;
        while (k) {
            if (k & 1) r = r * base;
            base = base * base;
            k >>= 1;
        }
        return r;
    }

    friend bool operator==(const Polynomial& a, const Polynomial& b) {
        return a.arity_ == b.arity_ && a.terms_ == b.terms_;
    }
    friend bool operator<(const Polynomial& a, const Polynomial& b) {
        if (a.arity_ != b.arity_) return a.arity_ < b.arity_;
        auto cmp = [](const std::pair<Expo, Rat>& x, const std::pair<Expo, Rat>& y) {
            if (x.first != y.first) return x.first < y.first;
            return x.second < y.second;
        };
        return std::lexicographical_compare(a.terms_.begin(), a.terms_.end(), b.terms_.begin(),
                                            b.terms_.end(), cmp);
    }

    Rat eval(const QVec& x) const {
        if (x.dim() != arity_) throw ArityMismatch("polynomial eval");
        Rat acc(0);
        for (const auto& [e, c] : terms_) {
            Rat t = c;
            for (std::size_t i = 0; i < arity_; ++i)
                if (e[i]) t *= x[i].pow_int(e[i]);
            acc += t;
        }
        return acc;
    }

    Interval eval_box(const IntervalBox& box) const {
        if (box.dim() != arity_) throw ArityMismatch("polynomial eval_box");
        Interval acc{Rat(0), Rat(0)};
        for (const auto& [e, c] : terms_) {
            Interval t{c, c};
            for (std::size_t i = 0; i < arity_; ++i)
                if (e[i]) t = t * box[i].pow_int(e[i]);
            acc = acc + t;
        }
        return acc;
    }

    Polynomial derivative(std::size_t var) const {
        Polynomial r(arity_);
        for (const auto& [e, c] : terms_) {
            if (e[var] == 0) continue;
            Expo d = e;
            d[var] -= 1;
            r.add_term(d, c * Rat(static_cast<long>(e[var])));
        }
        return r;
    }

    // Substitutes a rational for one variable (arity is preserved).
    Polynomial substitute(std::size_t var, const Rat& value) const {
        Polynomial r(arity_);
        for (const auto& [e, c] : terms_) {
            Expo d = e;
            unsigned k = d[var];
            d[var] = 0;
            r.add_term(d, c * value.pow_int(k));
        }
        return r;
    }

    // Renumbers variables: new index = remap[old index]; drops to new arity.
    Polynomial remap_vars(std::size_t new_arity, const std::vector<std::size_t>& remap) const {
        Polynomial r(new_arity);
        for (const auto& [e, c] : terms_) {
            Expo d(new_arity, 0);
            for (std::size_t i = 0; i < arity_; ++i) {
                if (e[i] == 0) continue;
                if (remap[i] >= new_arity) throw ArityMismatch("remap out of range");
                d[remap[i]] += e[i];
            }
            r.add_term(d, c);
        }
        return r;
    }

    // View in a distinguished variable: coefficient polynomials by degree.
    std::vector<Polynomial> univar_coeffs(std::size_t var) const {
        std::vector<Polynomial> out(degree(var) + 1, Polynomial(arity_));
        for (const auto& [e, c] : terms_) {
            Expo d = e;
            unsigned k = d[var];
            d[var] = 0;
            out[k].add_term(d, c);
        }
        return out;
    }
    static Polynomial from_univar(const std::vector<Polynomial>& coeffs, std::size_t var) {
        if (coeffs.empty()) return Polynomial(0);
        Polynomial r(coeffs[0].arity());
        for (std::size_t k = 0; k < coeffs.size(); ++k) {
            for (const auto& [e, c] : coeffs[k].terms_) {
                Expo d = e;
                d[var] += static_cast<unsigned>(k);
                r.add_term(d, c);
            }
        }
        return r;
    }

    // Leading coefficient in the canonical term order.
    Rat leading_coeff() const {
        if (terms_.empty()) return Rat(0);
        return terms_.rbegin()->second;
    }

    // Exact division; nullopt when b does not divide a.
    static std::optional<Polynomial> divide_exact(const Polynomial& a, const Polynomial& b) {
        a.check(b);
        if (b.is_zero()) throw DivisionByZero("polynomial division by zero");
        Polynomial r = a, q(a.arity_);
        auto lt_b = *b.terms_.rbegin();
        while (!r.is_zero()) {
            auto lt_r = *r.terms_.rbegin();
            Expo e(a.arity_);
            for (std::size_t i = 0; i < a.arity_; ++i) {
                if (lt_r.first[i] < lt_b.first[i]) return std::nullopt;
                e[i] = lt_r.first[i] - lt_b.first[i];
            }
            Rat c = lt_r.second / lt_b.second;
            Polynomial term(a.arity_);
            term.terms_[e] = c;
            q.add_term(e, c);
            r = r - term * b;
        }
        return q;
    }

    std::string str(const std::vector<std::string>& names = {}) const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            const auto& [e, c] = *it;
            Rat coeff = c;
            if (!first) {
                os << (coeff.sign() < 0 ? " - " : " + ");
                if (coeff.sign() < 0) coeff = -coeff;
            } else if (coeff.sign() < 0 && !(coeff == Rat(-1) && e != Expo(arity_, 0))) {
                // keep the sign on the coefficient below
            }
            first = false;
            bool any_var = false;
            for (std::size_t i = 0; i < arity_; ++i) any_var = any_var || e[i] > 0;
            if (!any_var || !(coeff == Rat(1) || coeff == Rat(-1))) {
                if (coeff.is_integer() || !any_var) os << coeff;
                else os << "(" << coeff << ")";
                if (any_var) os << "*";
            } else if (coeff == Rat(-1)) {
                os << "-";
            }
            bool started = false;
            for (std::size_t i = 0; i < arity_; ++i) {
                if (e[i] == 0) continue;
                if (started) os << "*";
                started = true;
                if (i < names.size()) os << names[i];
                else os << "x" << (i + 1);
                if (e[i] > 1) os << "^" << e[i];
            }
        }
        return os.str();
    }

private:
    void check(const Polynomial& o) const {
        if (arity_ != o.arity_) throw ArityMismatch("polynomial arity mismatch");
    }
    std::size_t arity_;
    std::map<Expo, Rat> terms_;
};

inline int sign_at(const Polynomial& p, const QVec& x) { return p.eval(x).sign(); }

namespace polydetail {

// Pseudo-remainder of a by b in variable `var`: lc(b)^(da-db+1) * a = q*b + r.
inline Polynomial prem(const Polynomial& a, const Polynomial& b, std::size_t var) {
    unsigned db = b.degree(var);
    if (db == 0) throw Error("prem: divisor free of the variable");
    std::vector<Polynomial> bc = b.univar_coeffs(var);
    Polynomial lc_b = bc[db];
    Polynomial r = a;
    while (!r.is_zero() && r.degree(var) >= db) {
        unsigned dr = r.degree(var);
        std::vector<Polynomial> rc = r.univar_coeffs(var);
        Polynomial lc_r = rc[dr];
        // r := lc_b * r - lc_r * y^(dr-db) * b
        Polynomial shift = Polynomial::variable(a.arity(), var).pow(dr - db);
        r = lc_b * r - lc_r * shift * b;
    }
    return r;
}

} // namespace polydetail

// Content of p with respect to `var`: gcd of its coefficient polynomials.
Polynomial poly_gcd(const Polynomial& a, const Polynomial& b);

inline Polynomial poly_content(const Polynomial& p, std::size_t var) {
    std::vector<Polynomial> cs = p.univar_coeffs(var);
    Polynomial g(p.arity());
    for (const auto& c : cs) {
        if (c.is_zero()) continue;
        g = g.is_zero() ? c : poly_gcd(g, c);
    }
    return g;
}

// Monic-normalized exact gcd over Q[x1..xn] (primitive PRS).
inline Polynomial poly_gcd(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() && b.is_zero()) return a;
    auto normalize = [](const Polynomial& p) {
        Rat lc = p.leading_coeff();
        if (lc.is_zero() || lc == Rat(1)) return p;
        return p.scaled(Rat(1) / lc);
    };
    if (a.is_zero()) return normalize(b);
    if (b.is_zero()) return normalize(a);
    if (a.is_constant() || b.is_constant()) return Polynomial::constant(a.arity(), Rat(1));
    // main variable: the highest one in use
    std::size_t var = 0;
    for (std::size_t i = 0; i < a.arity(); ++i)
        if (a.uses(i) || b.uses(i)) var = i;
    if (!a.uses(var)) return normalize(poly_gcd(poly_content(b, var), a));
    if (!b.uses(var)) return normalize(poly_gcd(poly_content(a, var), b));

    Polynomial ca = poly_content(a, var), cb = poly_content(b, var);
    auto div_or_throw = [](const Polynomial& p, const Polynomial& d) {
        auto q = Polynomial::divide_exact(p, d);
        if (!q) throw Error("poly_gcd: inexact content division");
        return *q;
    };
    Polynomial pa = div_or_throw(a, ca), pb = div_or_throw(b, cb);
    if (pa.degree(var) < pb.degree(var)) std::swap(pa, pb);
    while (!pb.is_zero() && pb.degree(var) > 0) {
        Polynomial r = polydetail::prem(pa, pb, var);
        pa = pb;
        if (r.is_zero()) {
            pb = r;
            break;
        }
        Polynomial cr = poly_content(r, var);
        pb = div_or_throw(r, cr);
    }
    Polynomial gcd_pp = pb.is_zero() ? pa : Polynomial::constant(a.arity(), Rat(1));
    Polynomial out = poly_gcd(ca, cb) * gcd_pp;
    return normalize(out);
}

// Squarefree part with respect to the whole polynomial (via gcd with the
// derivative in its top variable).
inline Polynomial squarefree_part(const Polynomial& p) {
    if (p.is_constant()) return p;
    std::size_t var = 0;
    for (std::size_t i = 0; i < p.arity(); ++i)
        if (p.uses(i)) var = i;
    Polynomial g = poly_gcd(p, p.derivative(var));
    if (g.is_constant()) return p;
    auto q = Polynomial::divide_exact(p, g);
    if (!q) throw Error("squarefree_part: inexact division");
    return *q;
}

// Fraction-free determinant (Bareiss) of a square matrix of polynomials.
inline Polynomial poly_det(std::vector<std::vector<Polynomial>> m) {
    std::size_t n = m.size();
    if (n == 0) throw Error("poly_det: empty");
    std::size_t arity = m[0][0].arity();
    Polynomial prev = Polynomial::constant(arity, Rat(1));
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m[k][k].is_zero()) {
            std::size_t swap_row = k + 1;
            while (swap_row < n && m[swap_row][k].is_zero()) ++swap_row;
            if (swap_row == n) return Polynomial(arity); // singular
            std::swap(m[k], m[swap_row]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) {
                Polynomial num = m[k][k] * m[i][j] - m[i][k] * m[k][j];
                auto q = Polynomial::divide_exact(num, prev);
                if (!q) throw Error("poly_det: Bareiss division failed");
                m[i][j] = *q;
            }
        prev = m[k][k];
    }
    Polynomial d = m[n - 1][n - 1];
    return sign < 0 ? -d : d;
}

// j-th principal subresultant coefficient of f and g with respect to `var`:
// the determinant of the truncated Sylvester block of rows y^i f (i < dg - j)
// and y^i g (i < df - j) over the columns y^(df+dg-j-1) .. y^j.
inline Polynomial psc(const Polynomial& f, const Polynomial& g, std::size_t var, unsigned j) {
    unsigned df = f.degree(var), dg = g.degree(var);
    if (df == 0 || dg == 0) throw Error("psc needs positive degrees");
    if (j >= std::min(df, dg)) throw Error("psc index too large");
    std::size_t rows = (df - j) + (dg - j);
    std::vector<Polynomial> fc = f.univar_coeffs(var), gc = g.univar_coeffs(var);
    auto coeff = [&](const std::vector<Polynomial>& cs, long k) {
        if (k < 0 || k >= static_cast<long>(cs.size())) return Polynomial(f.arity());
        return cs[static_cast<std::size_t>(k)];
    };
    std::vector<std::vector<Polynomial>> m(rows, std::vector<Polynomial>(rows, Polynomial(f.arity())));
    long top = static_cast<long>(df + dg - j - 1);
    for (unsigned i = 0; i < dg - j; ++i) { // rows of y^(dg-j-1-i) * f
        long shift = static_cast<long>(dg - j - 1 - i);
        for (std::size_t c = 0; c < rows; ++c) {
            long deg_of_col = top - static_cast<long>(c);
            m[i][c] = coeff(fc, deg_of_col - shift);
        }
    }
    for (unsigned i = 0; i < df - j; ++i) {
        long shift = static_cast<long>(df - j - 1 - i);
        for (std::size_t c = 0; c < rows; ++c) {
            long deg_of_col = top - static_cast<long>(c);
            m[dg - j + i][c] = coeff(gc, deg_of_col - shift);
        }
    }
    return poly_det(std::move(m));
}

// Resultant = psc_0.
inline Polynomial poly_resultant(const Polynomial& f, const Polynomial& g, std::size_t var) {
    return psc(f, g, var, 0);
}

// Conversion of an expression into an exact rational function num/den with
// the common gcd removed.
struct RatFunc {
    Polynomial num, den;
};

inline RatFunc expr_to_ratfunc(const Expr& e, std::size_t arity) {
    std::function<RatFunc(const Expr::Node&)> walk = [&](const Expr::Node& n) -> RatFunc {
        switch (n.kind) {
            case Expr::Kind::Const:
                return {Polynomial::constant(arity, n.value),
                        Polynomial::constant(arity, Rat(1))};
            case Expr::Kind::Var:
                return {Polynomial::variable(arity, n.var),
                        Polynomial::constant(arity, Rat(1))};
            case Expr::Kind::Add: {
                RatFunc a = walk(*n.a), b = walk(*n.b);
                return {a.num * b.den + b.num * a.den, a.den * b.den};
            }
            case Expr::Kind::Sub: {
                RatFunc a = walk(*n.a), b = walk(*n.b);
                return {a.num * b.den - b.num * a.den, a.den * b.den};
            }
            case Expr::Kind::Mul: {
                RatFunc a = walk(*n.a), b = walk(*n.b);
                return {a.num * b.num, a.den * b.den};
            }
            case Expr::Kind::Div: {
                RatFunc a = walk(*n.a), b = walk(*n.b);
                if (b.num.is_zero()) throw DivisionByZero("rational function with zero divisor");
                return {a.num * b.den, a.den * b.num};
            }
            case Expr::Kind::Pow: {
                RatFunc a = walk(*n.a);
                return {a.num.pow(static_cast<unsigned>(n.exp)),
                        a.den.pow(static_cast<unsigned>(n.exp))};
            }
        }
        throw Error("unreachable");
    };
    RatFunc r = walk(e.node());
    Polynomial g = poly_gcd(r.num, r.den);
    if (!g.is_constant()) {
        auto qn = Polynomial::divide_exact(r.num, g);
        auto qd = Polynomial::divide_exact(r.den, g);
        if (qn && qd) {
            r.num = *qn;
            r.den = *qd;
        }
    }
    // normalize the denominator's leading coefficient to 1
    Rat lc = r.den.leading_coeff();
    if (!lc.is_zero() && lc != Rat(1)) {
        r.num = r.num.scaled(Rat(1) / lc);
        r.den = r.den.scaled(Rat(1) / lc);
    }
    return r;
}

} // namespace openmap

#endif
