#ifndef OPENMAP_OPENNESS_HPP
#define OPENMAP_OPENNESS_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

#include "openmap/continuity.hpp"
#include "openmap/coverage.hpp"
#include "openmap/enumeration.hpp"
#include "openmap/expr.hpp"
#include "openmap/linalg.hpp"

namespace openmap {

namespace detail {

// --- small exact 2-D convex hull (monotone chain) ---

inline Rat cross(const QVec& o, const QVec& a, const QVec& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

inline std::vector<QVec> convex_hull_2d(std::vector<QVec> pts) {
    std::sort(pts.begin(), pts.end(), [](const QVec& p, const QVec& q) {
        if (p[0] != q[0]) return p[0] < q[0];
        return p[1] < q[1];
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    std::size_t n = pts.size();
    if (n < 3) return pts;
    std::vector<QVec> h(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) { // lower
        while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]).sign() <= 0) --k;
        h[k++] = pts[i];
    }
    for (std::size_t i = n - 1, t = k + 1; i-- > 0;) { // upper
        while (k >= t && cross(h[k - 2], h[k - 1], pts[i]).sign() <= 0) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1); // counterclockwise, no repeated first point
    return h;
}

// Squared distance from an interior point to the hull boundary, as an exact
// rational lower bound; nullopt when p is not strictly inside.
inline std::optional<Rat> hull_inradius_sq(const std::vector<QVec>& hull, const QVec& p) {
    if (hull.size() < 3) return std::nullopt;
    std::optional<Rat> best;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const QVec& a = hull[i];
        const QVec& b = hull[(i + 1) % hull.size()];
        Rat c = cross(a, b, p);
        if (c.sign() <= 0) return std::nullopt; // on or outside this edge
        Rat len_sq = dist_sq(a, b);
        Rat d_sq = (c * c) / len_sq;
        if (!best || d_sq < *best) best = d_sq;
    }
    return best;
}

// Attained values of f on a grid of the closed ball B̄(c, r), exact.
inline std::vector<QVec> attained_values(const FuncSystem& f, const QVec& c, const Rat& r,
                                         int level) {
    std::vector<QVec> vals;
    IntervalBox cube = IntervalBox::cube(c, r);
    std::uint64_t per_axis = (std::uint64_t{1} << level) + 1;
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < c.dim(); ++i) total *= per_axis;
    for (std::uint64_t flat = 0; flat < total; ++flat) {
        std::uint64_t rest = flat;
        QVec p(c.dim());
        for (std::size_t i = 0; i < c.dim(); ++i) {
            std::uint64_t j = rest % per_axis;
            rest /= per_axis;
            p[i] = cube[i].lo() + (cube[i].width() * Rat(static_cast<long>(j))) /
                                      Rat(static_cast<long>(per_axis - 1));
        }
        if (dist_sq(p, c) > r * r) continue;
        try {
            vals.push_back(eval_point(f, p));
        } catch (const DivisionByZero&) {
        }
    }
    return vals;
}

inline QVec select_coords(const QVec& x, const std::vector<std::size_t>& cols) {
    QVec out(cols.size());
    for (std::size_t i = 0; i < cols.size(); ++i) out[i] = x[cols[i]];
    return out;
}

inline QVec embed_coords(const QVec& anchor, const std::vector<std::size_t>& cols,
                         const QVec& sub) {
    QVec out = anchor;
    for (std::size_t i = 0; i < cols.size(); ++i) out[cols[i]] = sub[i];
    return out;
}

} // namespace detail

// Image operator for maps sending balls to convex sets (always valid for
// m = 1 by the intermediate value theorem on segments): emitted balls sit in
// the interior of the convex hull of exactly-attained values, a certified
// subset of f[U] under the trusted convexity precondition.
inline OpenSetEnum image_convex(const FuncSystem& f, const OpenSetEnum& u, const Budget& budget) {
    if (u.dim() != f.input_dim()) throw DimensionMismatch("image_convex");
    std::size_t m = f.output_dim();
    if (m > 2) throw UnsupportedMethod("image_convex: hull machinery implemented for m <= 2");
    OpenSetEnum uu = u;
    FuncSystem ff = f;
    // One emission per (input ball, refinement t): refining t shrinks the
    // sampled closed ball toward the open one and sharpens the hull, while
    // refinement of the input enumeration does the geometric work.
    const std::uint64_t t_window = 4;
    auto emit = [uu, ff, m](std::uint64_t i, int t) -> std::optional<OpenBall> {
        auto ball = uu.ball_at(i);
        if (!ball) return std::nullopt;
        Rat r = ball->radius * (Rat(1) - Rat::pow2(-t - 2));
        int level = std::min(t + 2, m == 1 ? 7 : 4);
        std::vector<QVec> vals = detail::attained_values(ff, ball->center, r, level);
        if (vals.empty()) return std::nullopt;
        if (m == 1) {
            Rat lo = vals[0][0], hi = vals[0][0];
            for (const auto& v : vals) {
                lo = min(lo, v[0]);
                hi = max(hi, v[0]);
            }
            if (!(lo < hi)) return std::nullopt;
            return OpenBall(QVec{(lo + hi) / Rat(2)}, (hi - lo) / Rat(2));
        }
        std::vector<QVec> hull = detail::convex_hull_2d(vals);
        if (hull.size() < 3) return std::nullopt;
        QVec centroid(2);
        for (const auto& h : hull) centroid += h;
        centroid *= Rat(1, static_cast<long>(hull.size()));
        auto d_sq = detail::hull_inradius_sq(hull, centroid);
        if (!d_sq) return std::nullopt;
        Rat rad = sqrt_lower(*d_sq, 40) * Rat(63, 64);
        if (rad.sign() <= 0) return std::nullopt;
        return OpenBall(centroid, rad);
    };
    std::optional<IntervalBox> out_bound;
    if (u.bound()) {
        try {
            out_bound = eval_interval(f, *u.bound());
        } catch (const DomainBreach&) {
        }
    }
    (void)budget;
    // Three of every four indices sweep t = 0,1,2 linearly over the input
    // enumeration; the fourth dovetails arbitrarily deep refinements so a
    // non-refining input (e.g. a single ball) still exhausts its image.
    return OpenSetEnum(
        m,
        [emit, t_window](std::uint64_t idx) {
            std::uint64_t q = idx / t_window, r = idx % t_window;
            if (r < t_window - 1) return emit(q, static_cast<int>(r));
            auto [i, deep] = cantor_unpair(q);
            return emit(i, static_cast<int>(t_window - 1 + deep));
        },
        out_bound);
}

// Modulus of openness via the distance of f(x) to the image of the sphere
// ∂B(x, 2^-k-1): interval arithmetic over an exact cover of the sphere gives
// a lower bound r_lo on that distance, and any 2^-ell < r_lo - e qualifies.
// Requires n = m and injectivity of f near x (trusted).
inline std::optional<int> moo_degree(const FuncSystem& f, const RealStream& x, int k,
                                     const Budget& budget) {
    if (f.input_dim() != f.output_dim())
        throw UnsupportedMethod("moo_degree needs n = m");
    if (x.dim() != f.input_dim()) throw DimensionMismatch("moo_degree");
    Rat rho = Rat::pow2(-k - 1);
    Rat rho_sq = rho * rho;
    for (int aa = k + 6; aa <= k + 30; aa += 12) {
    QVec xhat = x.approximant(aa);
    QVec fhat;
    Rat err_up;
    try {
        fhat = eval_point(f, xhat);
        IntervalBox z = eval_interval(f, IntervalBox::cube(xhat, Rat::pow2(-aa)));
        Rat s(0);
        for (std::size_t j = 0; j < z.dim(); ++j) {
            Rat d = max((fhat[j] - z[j].lo()).abs(), (z[j].hi() - fhat[j]).abs());
            s += d * d;
        }
        err_up = sqrt_upper(s, 40);
    } catch (const Error&) {
        return std::nullopt;
    }
    for (int depth = 1; depth <= budget.max_depth; ++depth) {
        // exact cover of the sphere |z - xhat| = rho by depth-d cells
        std::optional<Rat> min_sq;
        bool breach = false;
        std::function<void(const IntervalBox&, int)> scan = [&](const IntervalBox& box, int d) {
            if (breach) return;
            Rat lo = box_point_min_dist_sq(box, xhat);
            Rat hi = box_point_max_dist_sq(box, xhat);
            if (lo > rho_sq || hi < rho_sq) return; // misses the sphere
            if (d == 0) {
                try {
                    IntervalBox y = eval_interval(f, box);
                    Rat d_sq = box_point_min_dist_sq(y, fhat);
                    if (!min_sq || d_sq < *min_sq) min_sq = d_sq;
                } catch (const DomainBreach&) {
                    breach = true;
                }
                return;
            }
            std::uint64_t children = std::uint64_t{1} << box.dim();
            for (std::uint64_t c = 0; c < children; ++c)
                scan(detail::dyadic_cell(box, 1, c), d - 1);
        };
        scan(IntervalBox::cube(xhat, rho), depth);
        if (breach || !min_sq || min_sq->sign() <= 0) continue;
        Rat r_lo = sqrt_lower(*min_sq, 40);
        if (r_lo <= err_up) continue; // deepen, or refine the anchor read
        Rat target = r_lo - err_up;
        for (int ell = 0; ell <= 2 * budget.max_precision + 8; ++ell)
            if (Rat::pow2(-ell) < target) return ell;
    }
    }
    return std::nullopt;
}

// Lemma-style unique zero computation: exclusion subdivision, discarding
// boxes whose image enclosure omits zero; certified once the surviving
// region's diameter drops below 2^-p.
inline QVec unique_zero(const FuncSystem& f, const ClosedBall& b, int p) {
    if (f.input_dim() != f.output_dim()) throw UnsupportedMethod("unique_zero needs n = m");
    if (b.dim() != f.input_dim()) throw DimensionMismatch("unique_zero");
    int round_bits = p + 24;
    std::vector<IntervalBox> active{b.bounding_box()};
    Rat target_sq = Rat::pow2(-2 * p);
    const std::size_t box_cap = 8192;
    int max_levels = p + 64;
    for (int level = 0; level < max_levels; ++level) {
        // certified result?
        if (!active.empty()) {
            IntervalBox hull = active[0];
            for (const auto& box : active) {
                std::vector<Interval> ivs;
                for (std::size_t i = 0; i < hull.dim(); ++i)
                    ivs.push_back(hull[i].hull(box[i]));
                hull = IntervalBox(std::move(ivs));
            }
            if (hull.half_diag_sq() < target_sq) return hull.mid();
        }
        if (active.empty()) throw NotCertified("unique_zero: no zero in the ball");
        std::vector<IntervalBox> next;
        for (const auto& box : active) {
            std::uint64_t children = std::uint64_t{1} << box.dim();
            for (std::uint64_t c = 0; c < children; ++c) {
                IntervalBox child = detail::dyadic_cell(box, 1, c);
                if (closed_box_disjoint_closed_ball(child, b)) continue;
                bool excluded = false;
                try {
                    IntervalBox y = eval_interval(f, child, round_bits);
                    for (std::size_t j = 0; j < y.dim(); ++j)
                        if (!y[j].contains_zero()) { excluded = true; break; }
                } catch (const DomainBreach&) {
                }
                if (!excluded) {
                    next.push_back(std::move(child));
                    if (next.size() > box_cap)
                        throw NotCertified("unique_zero: surviving region will not shrink");
                }
            }
        }
        active = std::move(next);
    }
    throw NotCertified("unique_zero: precision not reached within level budget");
}

// Certified data behind the effectivized inverse function theorem at a
// rational anchor near x0: columns select the regular m x m submatrix, c_lo
// bounds its smallest singular value from below, the remainder derivative is
// bounded by c_lo/2 on the 2^-k2 ball, and B(f(x0), 2^-ell) is covered by
// f[B(x0, 2^-k0) ∩ U].
struct InverseCertificate {
    std::vector<std::size_t> columns;
    Rat c_lo;
    int k0 = 0, k1 = 0, k2 = 0;
    Rat remainder_bound;
    int ell = 0;
    // realization details used by local_inverse
    int deim_ell = 0;
    QVec anchor;
};

inline std::optional<InverseCertificate> inverse_radius(const FuncSystem& f, const OpenSetEnum& u,
                                                        const RealStream& x0,
                                                        const Budget& budget) {
    std::size_t n = f.input_dim(), m = f.output_dim();
    if (n < m || m == 0) throw UnsupportedMethod("inverse_radius needs n >= m >= 1");
    if (u.dim() != n || x0.dim() != n) throw DimensionMismatch("inverse_radius");

    auto inner = find_inner_radius(u, x0, budget);
    if (!inner) return std::nullopt;
    int k0 = inner->k;

    FuncSystem jac = differentiate(f);

    // regular m x m submatrix by dovetailed determinant-sign search
    std::vector<std::vector<std::size_t>> subsets;
    detail::k_subsets(n, m, subsets);
    std::optional<std::vector<std::size_t>> columns;
    int k1 = 0;
    for (int t = k0; t <= k0 + budget.max_depth && !columns; ++t) {
        QVec xt = x0.approximant(t + 2);
        IntervalBox ball_box = IntervalBox::cube(xt, Rat::pow2(-t) + Rat::pow2(-t - 2));
        IntervalMatrix full;
        try {
            full = jacobian_enclosure(jac, m, n, ball_box);
        } catch (const DomainBreach&) {
            continue;
        }
        for (const auto& s : subsets) {
            IntervalMatrix sub(m, m);
            for (std::size_t r = 0; r < m; ++r)
                for (std::size_t c = 0; c < m; ++c) sub.at(r, c) = full.at(r, s[c]);
            if (!det_interval(sub).contains_zero()) {
                columns = s;
                k1 = t;
                break;
            }
        }
    }
    if (!columns) throw NotCertified("inverse_radius: no regular submatrix certified");

    for (int k2 = std::max(k1, k0 + 2); k2 <= std::max(k1, k0 + 2) + budget.max_depth; ++k2) {
        // anchor far below the k2 scale so its error cannot eat the radius
        int a = k2 + 8;
        QVec anchor = x0.approximant(a);
        FuncSystem sub = restrict_inputs(f, *columns, anchor);
        FuncSystem sub_jac = differentiate(sub);
        QVec anchor_sel = detail::select_coords(anchor, *columns);

        // exact point Jacobian at the anchor
        IntervalMatrix a_pt(m, m);
        bool defined = true;
        try {
            QVec flat = eval_point(sub_jac, anchor_sel);
            for (std::size_t r = 0; r < m; ++r)
                for (std::size_t c = 0; c < m; ++c) a_pt.at(r, c) = Interval(flat[r * m + c]);
        } catch (const DivisionByZero&) {
            defined = false;
        }
        if (!defined) continue;

        Rat c_lo;
        try {
            Rat scale = matrix_norm_sq_sum(a_pt) + Rat(1);
            c_lo = sigma_min_lower(a_pt, max(Rat::pow2(-20), scale * Rat::pow2(-12)));
        } catch (const NotCertified&) {
            continue;
        }

        // remainder derivative bound over the k2 ball
        IntervalMatrix jac_ball;
        try {
            jac_ball = jacobian_enclosure(sub_jac, m, m,
                                          IntervalBox::cube(anchor_sel, Rat::pow2(-k2)));
        } catch (const DomainBreach&) {
            continue;
        }
        Rat rb = matrix_norm_sq_sum(jac_ball - a_pt);
        if (!(rb * Rat(2) <= c_lo)) continue;

        auto deim = moo_degree(sub, RealStream::exact(anchor_sel), k2, budget);
        if (!deim) continue;

        // |f(x0) - f(anchor)| upper bound; refine the anchor read if needed
        QVec fhat = eval_point(sub, anchor_sel);
        Rat room;
        bool have_room = false;
        for (int aa = a; aa <= a + 32 && !have_room; aa += 12) {
            IntervalBox z;
            try {
                z = eval_interval(f, IntervalBox::cube(x0.approximant(aa), Rat::pow2(-aa)));
            } catch (const DomainBreach&) {
                break;
            }
            Rat s(0);
            for (std::size_t j = 0; j < m; ++j) {
                Rat d = max((fhat[j] - z[j].lo()).abs(), (z[j].hi() - fhat[j]).abs());
                s += d * d;
            }
            Rat e_up = sqrt_upper(s, 40);
            room = Rat::pow2(-*deim) - e_up;
            have_room = room.sign() > 0;
        }
        if (!have_room) continue;
        int ell = *deim + 1;
        while (ell < 4 * budget.max_precision + 16 && !(Rat::pow2(-ell + 1) <= room)) ++ell;
        if (!(Rat::pow2(-ell + 1) <= room)) continue;

        InverseCertificate cert;
        cert.columns = *columns;
        cert.c_lo = c_lo;
        cert.k0 = k0;
        cert.k1 = k1;
        cert.k2 = k2;
        cert.remainder_bound = rb;
        cert.ell = ell;
        cert.deim_ell = *deim;
        cert.anchor = anchor;
        return cert;
    }
    return std::nullopt;
}

// Local right inverse at the certificate's anchor: the unique zero of
// z -> f(z) - ŷ on the certified injectivity ball, to precision 2^-p.
inline std::optional<QVec> local_inverse(const FuncSystem& f, const InverseCertificate& cert,
                                         const QVec& x0, const RealStream& y, int p) {
    std::size_t m = f.output_dim();
    if (y.dim() != m) throw DimensionMismatch("local_inverse");
    FuncSystem sub = restrict_inputs(f, cert.columns, x0);
    QVec anchor_sel = detail::select_coords(x0, cert.columns);
    QVec fhat = eval_point(sub, anchor_sel);

    int q = cert.ell;
    while (q < 4 * p + 64 && !(Rat::pow2(-q) < cert.c_lo * Rat::pow2(-p - 2))) ++q;
    QVec yhat = y.approximant(q);
    if (!(dist_sq(yhat, fhat) < Rat::pow2(-2 * cert.deim_ell))) return std::nullopt;

    std::vector<Expr> comps;
    for (std::size_t j = 0; j < m; ++j)
        comps.push_back(sub.component(j) - Expr::constant(yhat[j]));
    FuncSystem g(sub.input_dim(), std::move(comps));
    QVec z;
    try {
        z = unique_zero(g, ClosedBall(anchor_sel, Rat::pow2(-cert.k2 - 1)), p + 1);
    } catch (const NotCertified&) {
        return std::nullopt;
    }
    return detail::embed_coords(x0, cert.columns, z);
}

// Interval enclosure of the derivative of the local inverse at y, via exact
// cofactor inversion of the Jacobian enclosure around the inverse point.
inline IntervalMatrix local_inverse_derivative(const FuncSystem& f,
                                               const InverseCertificate& cert, const QVec& x0,
                                               const QVec& inverse_point, int p) {
    FuncSystem sub = restrict_inputs(f, cert.columns, x0);
    FuncSystem sub_jac = differentiate(sub);
    std::size_t m = f.output_dim();
    QVec z = detail::select_coords(inverse_point, cert.columns);
    IntervalMatrix enc =
        jacobian_enclosure(sub_jac, m, m, IntervalBox::cube(z, Rat::pow2(-p)));
    return interval_inverse(enc);
}

enum class MooMethod { convex, degree, inverse };

// Dispatcher for the three modulus-of-openness realizers; the returned ell
// always satisfies B(f(x), 2^-ell) ⊆ f[B(x, 2^-k) ∩ X].
inline std::optional<int> moo(const FuncSystem& f, const RealStream& x, int k, MooMethod method,
                              const Budget& budget) {
    std::size_t n = f.input_dim(), m = f.output_dim();
    if (x.dim() != n) throw DimensionMismatch("moo");
    switch (method) {
        case MooMethod::convex: {
            if (m != 1)
                throw UnsupportedMethod("moo convex realizer is one-dimensional");
            QVec xhat = x.approximant(k + 3);
            QVec fhat;
            IntervalBox z;
            try {
                fhat = eval_point(f, xhat);
                z = eval_interval(f, IntervalBox::cube(xhat, Rat::pow2(-k - 3)));
            } catch (const Error&) {
                return std::nullopt;
            }
            Rat r = Rat(3) * Rat::pow2(-k - 2); // sample ball stays inside B(x, 2^-k)
            for (int t = 2; t <= std::max(4, budget.max_depth); ++t) {
                auto vals = detail::attained_values(f, xhat, r, std::min(t, 7));
                if (vals.empty()) continue;
                Rat lo = vals[0][0], hi = vals[0][0];
                for (const auto& v : vals) {
                    lo = min(lo, v[0]);
                    hi = max(hi, v[0]);
                }
                Rat room = min(z[0].lo() - lo, hi - z[0].hi());
                if (room.sign() <= 0) continue;
                for (int ell = 0; ell <= 2 * budget.max_precision + 8; ++ell)
                    if (Rat::pow2(-ell) < room) return ell;
            }
            return std::nullopt;
        }
        case MooMethod::degree:
            if (n != m) throw UnsupportedMethod("moo degree realizer needs n = m");
            return moo_degree(f, x, k, budget);
        case MooMethod::inverse: {
            if (n < m) throw UnsupportedMethod("moo inverse realizer needs n >= m");
            QVec xhat = x.approximant(k + 2);
            OpenSetEnum u = OpenSetEnum::single_ball(OpenBall(xhat, Rat(3) * Rat::pow2(-k - 2)));
            try {
                auto cert = inverse_radius(f, u, x, budget);
                if (!cert) return std::nullopt;
                return cert->ell;
            } catch (const NotCertified&) {
                return std::nullopt;
            }
        }
    }
    throw Error("unreachable");
}

inline ModulusOracle make_moo_oracle(const FuncSystem& f, MooMethod method,
                                     const Budget& budget) {
    ModulusOracle o;
    o.kind = ModulusOracle::Kind::openness;
    o.realizer = [f, method, budget](const RealStream& x, int k) {
        return moo(f, x, k, method, budget);
    };
    o.lookahead = [budget](int k) { return k + budget.max_depth + 3; };
    return o;
}

// Certified lower approximations of Moo_f(x, k) (the supremum of feasible
// radii): rationals s with B̄(f(x), s) ⊆ f[B(x, 2^-k)], found by testing
// closed balls against the image oracle's enumeration.
inline std::vector<Rat> moo_lower(const std::function<OpenSetEnum(const OpenSetEnum&)>& image_oracle,
                                  const FuncSystem& f, const RealStream& x, int k,
                                  const Budget& budget) {
    if (x.dim() != f.input_dim()) throw DimensionMismatch("moo_lower");
    RealStream xx = x;
    Rat rk = Rat::pow2(-k);
    OpenSetEnum u(
        f.input_dim(),
        [xx, rk, k](std::uint64_t i) -> std::optional<OpenBall> {
            int t = k + 1 + static_cast<int>(i);
            Rat r = rk - Rat::pow2(-t);
            if (r.sign() <= 0) return std::nullopt;
            return OpenBall(xx.approximant(t), r);
        },
        IntervalBox::cube(x.approximant(k + 2), rk + rk));
    OpenSetEnum v = image_oracle(u);

    QVec xhat = x.approximant(budget.max_precision);
    QVec fhat;
    Rat e_up;
    try {
        fhat = eval_point(f, xhat);
        IntervalBox z = eval_interval(f, IntervalBox::cube(xhat, Rat::pow2(-budget.max_precision)));
        Rat s(0);
        for (std::size_t j = 0; j < z.dim(); ++j) {
            Rat d = max((fhat[j] - z[j].lo()).abs(), (z[j].hi() - fhat[j]).abs());
            s += d * d;
        }
        e_up = sqrt_upper(s, 40);
    } catch (const Error&) {
        return {};
    }

    std::vector<Rat> out;
    Rat best(0);
    for (int r = 1; r <= budget.max_depth + 4; ++r) {
        Rat step = Rat::pow2(-r);
        while (true) {
            Rat candidate = best + step;
            auto verdict = covers_closed_ball(v, ClosedBall(fhat, candidate + e_up), budget);
            if (!verdict.is_yes()) break;
            best = candidate;
            out.push_back(best);
        }
    }
    return out;
}

// Eq.-style union image: balls B(f(x_j), 2^-ell_j) over dense x_j in U with
// ell_j from the modulus oracle at the inner-radius exponent of x_j.
inline OpenSetEnum image_from_moo(const FuncSystem& f, const ModulusOracle& moo_oracle,
                                  const DenseSeq& dense, const OpenSetEnum& u,
                                  const Budget& budget) {
    if (u.dim() != f.input_dim()) throw DimensionMismatch("image_from_moo");
    std::size_t m = f.output_dim();
    OpenSetEnum uu = u;
    FuncSystem ff = f;
    DenseSeq dd = dense;
    ModulusOracle oracle = moo_oracle;
    std::optional<IntervalBox> out_bound;
    if (u.bound()) {
        try {
            out_bound = eval_interval(f, *u.bound());
        } catch (const DomainBreach&) {
        }
    }
    return OpenSetEnum(
        m,
        [uu, ff, dd, oracle, budget](std::uint64_t j) -> std::optional<OpenBall> {
            QVec z;
            try {
                z = dd.points(j);
            } catch (const BudgetExceeded&) {
                return std::nullopt;
            }
            if (member(uu, z, budget) != Verdict::Yes) return std::nullopt;
            auto inner = find_inner_radius(uu, RealStream::exact(z), budget);
            if (!inner) return std::nullopt;
            std::optional<int> ell;
            try {
                ell = oracle.realizer(RealStream::exact(z), inner->k);
            } catch (const Error&) {
                return std::nullopt;
            }
            if (!ell) return std::nullopt;
            QVec yhat = dd.values(j).approximant(*ell + 2);
            Rat rad = Rat(3) * Rat::pow2(-*ell - 2);
            return OpenBall(yhat, rad);
        },
        out_bound);
}

// Rational-center variant (the dense-Moo route): emits B(f(x'), s/2) for the
// best certified lower bound s at each dyadic rational x' in U.
inline OpenSetEnum image_from_moo_rational(
    const FuncSystem& f, const std::function<std::vector<Rat>(const QVec&, int)>& moo_lower_fn,
    const OpenSetEnum& u, const Budget& budget) {
    if (u.dim() != f.input_dim()) throw DimensionMismatch("image_from_moo_rational");
    std::size_t m = f.output_dim();
    OpenSetEnum uu = u;
    FuncSystem ff = f;
    DenseSeq dense = make_dense_dyadic(u, f, budget);
    std::optional<IntervalBox> out_bound;
    if (u.bound()) {
        try {
            out_bound = eval_interval(f, *u.bound());
        } catch (const DomainBreach&) {
        }
    }
    return OpenSetEnum(
        m,
        [uu, ff, dense, moo_lower_fn, budget](std::uint64_t j) -> std::optional<OpenBall> {
            QVec z;
            try {
                z = dense.points(j);
            } catch (const BudgetExceeded&) {
                return std::nullopt;
            }
            auto inner = find_inner_radius(uu, RealStream::exact(z), budget);
            if (!inner) return std::nullopt;
            std::vector<Rat> ladder = moo_lower_fn(z, inner->k);
            if (ladder.empty()) return std::nullopt;
            Rat s = ladder.back();
            if (s.sign() <= 0) return std::nullopt;
            QVec fz;
            try {
                fz = eval_point(ff, z);
            } catch (const DivisionByZero&) {
                return std::nullopt;
            }
            return OpenBall(fz, s / Rat(2));
        },
        out_bound);
}

// Evaluation of a 1-D continuous, effectively open f from monotone rational
// approximations of x, by bracketing f(x) between image points of the flank
// intervals (Lemma-style monotonicity does the convergence).
inline std::optional<Rat> evaluate_from_image(
    const std::function<OpenSetEnum(const OpenSetEnum&)>& image_oracle, const OpenSetEnum& x_dom,
    const std::function<Rat(int)>& u_seq, const std::function<Rat(int)>& v_seq, int k,
    const Budget& budget) {
    if (x_dom.dim() != 1) throw DimensionMismatch("evaluate_from_image is one-dimensional");
    auto pick_image_point = [&](const Rat& a, const Rat& b) -> std::optional<Rat> {
        if (!(a < b)) return std::nullopt;
        OpenSetEnum seg = OpenSetEnum::single_ball(OpenBall(QVec{(a + b) / Rat(2)},
                                                            (b - a) / Rat(2)));
        OpenSetEnum img = image_oracle(seg);
        for (int i = 0; i < budget.max_prefix; ++i) {
            auto ball = img.ball_at(static_cast<std::uint64_t>(i));
            if (ball) return ball->center[0];
        }
        return std::nullopt;
    };

    std::optional<int> start;
    for (int j = 0; j + 1 < budget.max_prefix; ++j) {
        Rat uj = u_seq(j), vj = v_seq(j);
        if (!(uj <= vj)) return std::nullopt;
        ClosedBall span(QVec{(uj + vj) / Rat(2)}, (vj - uj) / Rat(2));
        if (covers_closed_ball(x_dom, span, budget).is_yes()) {
            start = j;
            break;
        }
    }
    if (!start) return std::nullopt;

    Rat tol = Rat::pow2(-k + 1);
    for (int j = *start; j + 1 < budget.max_prefix; ++j) {
        auto aj = pick_image_point(u_seq(j), u_seq(j + 1));
        auto bj = pick_image_point(v_seq(j + 1), v_seq(j));
        if (!aj || !bj) continue;
        // f(x) is bracketed between the flank image points on both sides
        Rat lo = min(*aj, *bj), hi = max(*aj, *bj);
        if (hi - lo < tol) return (lo + hi) / Rat(2);
    }
    return std::nullopt;
}

} // namespace openmap

#endif
