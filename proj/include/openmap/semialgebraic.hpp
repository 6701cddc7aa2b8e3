#ifndef OPENMAP_SEMIALGEBRAIC_HPP
#define OPENMAP_SEMIALGEBRAIC_HPP

#include <optional>
#include <utility>
#include <vector>

#include "openmap/cad.hpp"
#include "openmap/enumeration.hpp"
#include "openmap/expr.hpp"
#include "openmap/formula.hpp"
#include "openmap/polynomial.hpp"

namespace openmap {

namespace sadetail {

// Certified "closed ball inside the solution set" by exclusion subdivision:
// every box meeting the ball must be certified true by interval signs.
inline bool ball_in_set_subdiv(const SAFormula& psi, const ClosedBall& b, int depth) {
    std::function<bool(const IntervalBox&, int)> rec = [&](const IntervalBox& box, int d) {
        if (closed_box_disjoint_closed_ball(box, b)) return true;
        auto v = psi.holds_over(box);
        if (v && *v) return true;
        if (v && !*v && closed_box_meets_closed_ball(box, b)) return false;
        if (d == 0) return false;
        std::uint64_t children = std::uint64_t{1} << box.dim();
        for (std::uint64_t c = 0; c < children; ++c)
            if (!rec(detail::dyadic_cell(box, 1, c), d - 1)) return false;
        return true;
    };
    return rec(b.bounding_box(), depth);
}

// The Tarski-route certificate: forall y, |y - c|^2 < r^2 implies Psi(y).
inline bool ball_in_set_qe(const SAFormula& psi, const ClosedBall& b, const QeLimits& limits) {
    std::size_t n = psi.arity();
    Polynomial dist = Polynomial::constant(n, b.radius * b.radius);
    for (std::size_t i = 0; i < n; ++i) {
        Polynomial d = Polynomial::variable(n, i) - Polynomial::constant(n, b.center[i]);
        dist = dist - d * d;
    }
    SAFormula inside = SAFormula::atom(Atom{dist, Rel::GE}); // covers the closed ball
    SAFormula matrix = SAFormula::make_or({SAFormula::make_not(inside), psi});
    std::vector<std::pair<Quant, std::size_t>> prefix;
    for (std::size_t i = 0; i < n; ++i) prefix.emplace_back(Quant::ForAll, i);
    matrix.set_prefix(std::move(prefix));
    return decide_sentence(matrix, limits);
}

} // namespace sadetail

// r.e. enumeration of an open semi-algebraic set: dyadic candidate balls in
// the bound box, each certified inside the set. Certification defaults to
// exclusion subdivision; the quantifier-elimination route is available when
// the variable count fits the limits.
inline OpenSetEnum sa_open_enum(const SASet& x, const IntervalBox& bound, const Budget& budget,
                                bool use_qe = false, const QeLimits& limits = QeLimits()) {
    if (x.formula.arity() != x.dim) throw ArityMismatch("sa_open_enum");
    if (bound.dim() != x.dim) throw DimensionMismatch("sa_open_enum bound");
    std::size_t n = x.dim;
    SAFormula psi = x.formula;
    int cert_depth = budget.max_depth;
    QeLimits lim = limits;
    return OpenSetEnum(
        n,
        [psi, bound, n, cert_depth, use_qe, lim](std::uint64_t idx) -> std::optional<OpenBall> {
            auto dc = detail::unrank_depth_cell(idx, n);
            if (!dc) return std::nullopt;
            IntervalBox cell = detail::dyadic_cell(bound, dc->first, dc->second);
            Rat side(0);
            for (std::size_t i = 0; i < n; ++i) side = max(side, cell[i].width());
            if (side.is_zero()) return std::nullopt;
            OpenBall ball(cell.mid(), side * Rat(3, 2));
            ClosedBall cb(ball.center, ball.radius);
            bool ok = use_qe ? sadetail::ball_in_set_qe(psi, cb, lim)
                             : sadetail::ball_in_set_subdiv(psi, cb, cert_depth);
            if (!ok) return std::nullopt;
            return ball;
        },
        bound);
}

// The openness inclusion of the Tarski route, decided for one rational radius
// s at a rational center x: forall y (|y - f(x)|^2 <= s^2 implies exists u in
// the section through x with f(u) = y and |x - u| < 2^-k). The section fixes
// trailing input coordinates at x when the variable budget requires it, which
// keeps the certificate sound (it can only shrink the certified radius).
inline bool sa_moo_feasible(const std::vector<RatFunc>& comps, const QVec& x, int k, const Rat& s,
                            const QeLimits& limits = QeLimits()) {
    std::size_t n = x.dim();
    std::size_t m = comps.size();
    if (m + 1 > limits.max_vars)
        throw LimitsExceeded("sa_moo: output dimension exceeds the variable budget");
    std::size_t n_free = std::min(n, limits.max_vars - m);
    // v := f(x) computed exactly; denominators must not vanish at x
    QVec v(m);
    for (std::size_t j = 0; j < m; ++j) {
        Rat den = comps[j].den.eval(x);
        if (den.is_zero()) throw DivisionByZero("sa_moo at a pole");
        v[j] = comps[j].num.eval(x) / den;
    }
    std::size_t total = m + n_free;
    // u variable i: for i < n_free the variable m+i, else frozen at x[i]
    auto lift_poly = [&](const Polynomial& p) {
        Polynomial q = p;
        for (std::size_t i = n_free; i < n; ++i) q = q.substitute(i, x[i]);
        std::vector<std::size_t> remap(n, 0);
        for (std::size_t i = 0; i < n_free; ++i) remap[i] = m + i;
        return q.remap_vars(total, remap);
    };
    // antecedent: |y - v|^2 <= s^2
    Polynomial ante = Polynomial::constant(total, s * s);
    for (std::size_t j = 0; j < m; ++j) {
        Polynomial d = Polynomial::variable(total, j) - Polynomial::constant(total, v[j]);
        ante = ante - d * d;
    }
    // graph and closeness conditions
    std::vector<SAFormula> conj;
    for (std::size_t j = 0; j < m; ++j) {
        Polynomial p = lift_poly(comps[j].num), q = lift_poly(comps[j].den);
        Polynomial yj = Polynomial::variable(total, j);
        conj.push_back(SAFormula::make_not(SAFormula::atom(Atom{q, Rel::EQ})));
        conj.push_back(SAFormula::atom(Atom{p - yj * q, Rel::EQ}));
    }
    Polynomial close = Polynomial::constant(total, Rat::pow2(-2 * k));
    for (std::size_t i = 0; i < n_free; ++i) {
        Polynomial d = Polynomial::variable(total, m + i) - Polynomial::constant(total, x[i]);
        close = close - d * d;
    }
    conj.push_back(SAFormula::atom(Atom{close, Rel::GT}));
    SAFormula matrix = SAFormula::make_or(
        {SAFormula::make_not(SAFormula::atom(Atom{ante, Rel::GE})),
         SAFormula::make_and(std::move(conj))});
    std::vector<std::pair<Quant, std::size_t>> prefix;
    for (std::size_t j = 0; j < m; ++j) prefix.emplace_back(Quant::ForAll, j);
    for (std::size_t i = 0; i < n_free; ++i) prefix.emplace_back(Quant::Exists, m + i);
    matrix.set_prefix(std::move(prefix));
    return decide_sentence(matrix, limits);
}

// Certified lower approximations of Moo_f(x, k) at a rational center via
// quantifier elimination, emitted as a nondecreasing ladder.
inline std::vector<Rat> sa_moo_lower(const FuncSystem& f, const QVec& x, int k,
                                     const Budget& budget, const QeLimits& limits = QeLimits()) {
    if (x.dim() != f.input_dim()) throw DimensionMismatch("sa_moo_lower");
    std::vector<RatFunc> comps;
    for (std::size_t j = 0; j < f.output_dim(); ++j)
        comps.push_back(expr_to_ratfunc(f.component(j), f.input_dim()));
    std::vector<Rat> out;
    Rat best(0);
    for (int r = 1; r <= budget.max_depth + 2; ++r) {
        Rat step = Rat::pow2(-r - k + 1);
        while (true) {
            Rat candidate = best + step;
            if (!sa_moo_feasible(comps, x, k, candidate, limits)) break;
            best = candidate;
            out.push_back(best);
        }
    }
    return out;
}

} // namespace openmap

#endif
