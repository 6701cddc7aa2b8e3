#ifndef OPENMAP_CONTINUITY_HPP
#define OPENMAP_CONTINUITY_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

#include "openmap/coverage.hpp"
#include "openmap/enumeration.hpp"
#include "openmap/expr.hpp"
#include "openmap/stream.hpp"

namespace openmap {

// Box strictly inside an open ball (exact).
inline bool box_in_open_ball(const IntervalBox& box, const OpenBall& ball) {
    if (box.dim() != ball.dim()) throw DimensionMismatch("box_in_open_ball");
    return box_point_max_dist_sq(box, ball.center) < ball.radius * ball.radius;
}

// f^-1[V] ∩ X as an enumeration: each emitted ball b carries the exact
// certificates eval_interval(F, bbox(b)) ⊆ (some prefix ball of V) and b ⊆
// (some ball of X).
inline OpenSetEnum preimage(const FuncSystem& f, const OpenSetEnum& v, const OpenSetEnum& x,
                            const Budget& budget) {
    if (v.dim() != f.output_dim()) throw DimensionMismatch("preimage: V vs output");
    if (x.dim() != f.input_dim()) throw DimensionMismatch("preimage: X vs input");
    std::size_t n = f.input_dim();
    auto vballs = std::make_shared<std::vector<std::pair<std::uint64_t, OpenBall>>>(
        v.prefix(budget.max_prefix));
    OpenSetEnum xx = x;
    FuncSystem ff = f;
    auto emit = [ff, xx, vballs, n](std::uint64_t ix,
                                    std::uint64_t inner) -> std::optional<OpenBall> {
        auto bx = xx.ball_at(ix);
        if (!bx) return std::nullopt;
        auto dc = detail::unrank_depth_cell(inner, n);
        if (!dc) return std::nullopt;
        IntervalBox cell = detail::dyadic_cell(bx->bounding_box(), dc->first, dc->second);
        QVec center = cell.mid();
        auto mb = detail::margin_ball(center, {*bx});
        if (!mb) return std::nullopt;
        Rat side(0);
        for (std::size_t i = 0; i < n; ++i) side = max(side, cell[i].width());
        Rat rad = min(mb->radius, side * Rat(2));
        if (rad.sign() <= 0) return std::nullopt;
        OpenBall b(center, rad);
        IntervalBox ybox;
        try {
            ybox = eval_interval(ff, b.bounding_box());
        } catch (const DomainBreach&) {
            return std::nullopt;
        }
        for (const auto& [iv, bv] : *vballs) {
            (void)iv;
            if (box_in_open_ball(ybox, bv)) return b;
        }
        return std::nullopt;
    };
    if (x.finite_size()) {
        std::uint64_t sx = *x.finite_size();
        if (sx == 0) return OpenSetEnum::empty(n);
        return OpenSetEnum(
            n,
            [emit, sx](std::uint64_t idx) { return emit(idx % sx, idx / sx); },
            x.bound());
    }
    return OpenSetEnum(
        n,
        [emit](std::uint64_t idx) {
            auto [ix, inner] = cantor_unpair(idx);
            return emit(ix, inner);
        },
        x.bound());
}

// Exact certificate behind a returned modulus-of-continuity value: with
// x̂ = approximant(ell+2), Y encloses f over B̄(x̂, 2^-ell + 2^-ell-2) ⊇
// B(x, 2^-ell) and Z encloses f(x); the check forces sup |Y - Z| < 2^-k.
inline bool moc_check(const FuncSystem& f, const QVec& xhat, int ell, int k) {
    IntervalBox big = IntervalBox::cube(xhat, Rat::pow2(-ell) + Rat::pow2(-ell - 2));
    IntervalBox small = IntervalBox::cube(xhat, Rat::pow2(-ell - 2));
    IntervalBox y, z;
    try {
        y = eval_interval(f, big);
        z = eval_interval(f, small);
    } catch (const DomainBreach&) {
        return false;
    }
    Rat s(0);
    for (std::size_t j = 0; j < y.dim(); ++j) {
        Rat d = max(y[j].hi() - z[j].lo(), z[j].hi() - y[j].lo());
        s += d * d;
    }
    return s < Rat::pow2(-2 * k);
}

// Multi-valued modulus realizer with a declared input lookahead, so that the
// compact-boundedness of Lemma-style bounds is literally testable.
struct ModulusOracle {
    enum class Kind { continuity, openness };
    Kind kind = Kind::continuity;
    std::function<std::optional<int>(const RealStream&, int)> realizer;
    std::function<int(int)> lookahead; // max approximant index read for query k
};

// Modulus of continuity: search ell = k, k+1, ... and certify each candidate
// with one pair of interval evaluations (Eq.-(2) postcondition).
inline std::optional<int> moc(const FuncSystem& f, const RealStream& x, int k,
                              const Budget& budget) {
    if (x.dim() != f.input_dim()) throw DimensionMismatch("moc");
    for (int ell = k; ell <= k + budget.max_depth; ++ell) {
        QVec xhat = x.approximant(ell + 2);
        if (moc_check(f, xhat, ell, k)) return ell;
    }
    return std::nullopt;
}

inline ModulusOracle make_moc_oracle(const FuncSystem& f, const Budget& budget) {
    ModulusOracle o;
    o.kind = ModulusOracle::Kind::continuity;
    o.realizer = [f, budget](const RealStream& x, int k) { return moc(f, x, k, budget); };
    o.lookahead = [budget](int k) { return k + budget.max_depth + 2; };
    return o;
}

// Dense-sequence name of (X, f|dense): points dense in X, values naming the
// images. `locate`, when present, short-circuits the dovetailed search by
// producing some dense point of X within the given radius of a center (it
// must return points the plain enumeration would also produce).
struct DenseSeq {
    std::function<QVec(std::uint64_t)> points;
    std::function<RealStream(std::uint64_t)> values;
    std::function<std::optional<std::pair<QVec, RealStream>>(const QVec&, const Rat&)> locate;
};

namespace detail {

// Dyadic grid points of `box`, level by level, each point listed once (a
// level contributes only multi-indices with some odd coordinate).
inline std::optional<QVec> dyadic_grid_point(const IntervalBox& box, std::uint64_t idx) {
    std::size_t n = box.dim();
    for (int t = 0; t < 40; ++t) {
        std::uint64_t per_axis = (std::uint64_t{1} << t) + 1;
        std::uint64_t level_total = 1, prev_total = 1;
        bool overflow = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (level_total > (std::uint64_t{1} << 60) / per_axis) { overflow = true; break; }
            level_total *= per_axis;
            prev_total *= (t == 0) ? 1 : (per_axis / 2 + 1);
        }
        if (overflow) return std::nullopt;
        std::uint64_t fresh = (t == 0) ? level_total : level_total - prev_total;
        if (idx < fresh) {
            QVec p(n);
            if (n == 1) { // closed form: fresh points are the odd indices
                std::uint64_t j = (t == 0) ? idx : 2 * idx + 1;
                p[0] = box[0].lo() + (box[0].width() * Rat(static_cast<long>(j))) /
                                         Rat(static_cast<long>(per_axis - 1));
                return p;
            }
            // idx-th multi-index at level t that has some odd coordinate
            std::uint64_t seen = 0;
            for (std::uint64_t flat = 0; flat < level_total; ++flat) {
                std::uint64_t rest = flat;
                bool fresh_pt = (t == 0);
                for (std::size_t i = 0; i < n; ++i) {
                    if ((rest % per_axis) % 2 == 1) fresh_pt = true;
                    rest /= per_axis;
                }
                if (!fresh_pt) continue;
                if (seen++ == idx) {
                    rest = flat;
                    for (std::size_t i = 0; i < n; ++i) {
                        std::uint64_t j = rest % per_axis;
                        rest /= per_axis;
                        p[i] = box[i].lo() + (box[i].width() * Rat(static_cast<long>(j))) /
                                                 Rat(static_cast<long>(per_axis - 1));
                    }
                    return p;
                }
            }
        }
        idx -= fresh;
    }
    return std::nullopt;
}

} // namespace detail

// Default dense sequence: dyadic grid points of X's bound box (or a fallback
// cube), filtered by member(X, ., probe). Values are exact since f is an
// expression system.
inline DenseSeq make_dense_dyadic(const OpenSetEnum& x, const FuncSystem& f, const Budget& probe,
                                  std::uint64_t scan_cap = (std::uint64_t{1} << 22)) {
    if (x.dim() != f.input_dim()) throw DimensionMismatch("make_dense_dyadic");
    std::size_t n = x.dim();
    IntervalBox box = x.bound() ? *x.bound() : IntervalBox::cube(QVec(n), Rat(16));
    struct Scan {
        std::mutex mu;
        std::vector<QVec> accepted;
        std::uint64_t next_raw = 0;
    };
    auto scan = std::make_shared<Scan>();
    OpenSetEnum xx = x;
    auto point_at = [scan, xx, box, probe, scan_cap](std::uint64_t j) -> QVec {
        std::lock_guard<std::mutex> lock(scan->mu);
        while (scan->accepted.size() <= j) {
            if (scan->next_raw >= scan_cap)
                throw BudgetExceeded("dense sequence scan cap reached");
            auto p = detail::dyadic_grid_point(box, scan->next_raw++);
            if (!p) throw BudgetExceeded("dense sequence grid exhausted");
            if (member(xx, *p, probe) == Verdict::Yes) scan->accepted.push_back(*p);
        }
        return scan->accepted[j];
    };
    FuncSystem ff = f;
    DenseSeq d;
    d.points = point_at;
    d.values = [point_at, ff](std::uint64_t j) {
        return RealStream::exact(eval_point(ff, point_at(j)));
    };
    d.locate = [xx, box, probe, ff, n](const QVec& center,
                                       const Rat& radius)
        -> std::optional<std::pair<QVec, RealStream>> {
        Rat wmax(0);
        for (std::size_t i = 0; i < n; ++i) wmax = max(wmax, box[i].width());
        Rat diag_factor = sqrt_upper(Rat(static_cast<long>(n)), 20);
        int t = 0;
        while (t < 60 && !(wmax * diag_factor < Rat::pow2(t + 1) * radius)) ++t;
        for (int extra = 0; extra < 3; ++extra, ++t) {
            std::uint64_t parts = std::uint64_t{1} << t;
            QVec z(n);
            bool ok = true;
            for (std::size_t i = 0; i < n; ++i) {
                if (box[i].width().is_zero()) { z[i] = box[i].lo(); continue; }
                Rat pos = (center[i] - box[i].lo()) * Rat(static_cast<long>(parts)) /
                          box[i].width();
                mpz_class j = (pos + Rat(1, 2)).floor();
                if (j < 0) j = 0;
                if (j > parts) j = parts;
                z[i] = box[i].lo() + box[i].width() * Rat(j) / Rat(static_cast<long>(parts));
            }
            if (!(dist_sq(z, center) < radius * radius)) ok = false;
            if (ok && member(xx, z, probe) == Verdict::Yes)
                return std::make_pair(z, RealStream::exact(eval_point(ff, z)));
        }
        return std::nullopt;
    };
    return d;
}

// Effective evaluation from dense data and a modulus of continuity
// (dovetailed search for a dense point in the certified ball).
inline std::optional<QVec> eval_from_dense(const DenseSeq& dense, const ModulusOracle& moc_oracle,
                                           const RealStream& x, int k, const Budget& budget) {
    if (moc_oracle.kind != ModulusOracle::Kind::continuity)
        throw UnsupportedMethod("eval_from_dense needs a continuity modulus");
    std::optional<int> ell = moc_oracle.realizer(x, k + 1);
    if (!ell) return std::nullopt;
    QVec xhat = x.approximant(*ell + 1);
    Rat r = Rat::pow2(-*ell - 1);
    if (dense.locate) {
        auto hit = dense.locate(xhat, r);
        if (hit) return hit->second.approximant(k + 1);
    }
    for (std::uint64_t j = 0; j < static_cast<std::uint64_t>(budget.max_prefix); ++j) {
        QVec z;
        try {
            z = dense.points(j);
        } catch (const BudgetExceeded&) {
            return std::nullopt;
        }
        if (dist_sq(z, xhat) < r * r) return dense.values(j).approximant(k + 1);
    }
    return std::nullopt;
}

// Upper bound on the realizer's outputs over a box, by adaptive replay on
// canonical truncation streams: a cell is settled once the recorded read
// watermark shows every point of the cell shares the rep's read prefix.
inline int bound_modulus_over_box(const ModulusOracle& oracle, const IntervalBox& box, int k) {
    int cap = oracle.lookahead(k);
    std::size_t n = box.dim();
    int best = 0;
    std::function<void(const QVec&, int)> visit = [&](const QVec& corner, int level) {
        // cell = [corner, corner + 2^-(level+2)) per axis
        auto hw = std::make_shared<int>(-1);
        RealStream rep = RealStream::dyadic_truncation(corner).with_watermark(hw);
        std::optional<int> res = oracle.realizer(rep, k);
        if (!res) throw BudgetExceeded("bound_modulus_over_box: realizer returned NotYet");
        if (*hw <= level || level >= cap) {
            if (*res > best) best = *res;
            return;
        }
        Rat half = Rat::pow2(-(level + 1) - 2);
        std::uint64_t children = std::uint64_t{1} << n;
        for (std::uint64_t c = 0; c < children; ++c) {
            QVec child = corner;
            for (std::size_t i = 0; i < n; ++i)
                if (c & (std::uint64_t{1} << i)) child[i] += half;
            visit(child, level + 1);
        }
    };
    // Level-0 cells have pitch 2^-2; align corners to the dyadic grid.
    Rat pitch = Rat::pow2(-2);
    std::vector<mpz_class> lo_idx(n), hi_idx(n);
    for (std::size_t i = 0; i < n; ++i) {
        lo_idx[i] = (box[i].lo() / pitch).floor();
        hi_idx[i] = (box[i].hi() / pitch).floor();
    }
    std::function<void(std::size_t, QVec&)> sweep = [&](std::size_t axis, QVec& corner) {
        if (axis == n) {
            visit(corner, 0);
            return;
        }
        for (mpz_class m = lo_idx[axis]; m <= hi_idx[axis]; ++m) {
            corner[axis] = Rat(m) * pitch;
            sweep(axis + 1, corner);
        }
    };
    QVec corner(n);
    sweep(0, corner);
    return best;
}

} // namespace openmap

#endif
