#ifndef OPENMAP_LINALG_HPP
#define OPENMAP_LINALG_HPP

#include <cstdint>
#include <vector>

#include "openmap/errors.hpp"
#include "openmap/interval.hpp"
#include "openmap/rational.hpp"
#include "openmap/upoly.hpp"

namespace openmap {

// Cofactor determinant; fine for the m <= 4 sizes this artifact uses.
inline Interval det_interval(const IntervalMatrix& a) {
    if (a.rows() != a.cols()) throw DimensionMismatch("det of non-square");
    std::size_t n = a.rows();
    if (n == 0) return Interval(Rat(1));
    if (n == 1) return a.at(0, 0);
    if (n == 2) return a.at(0, 0) * a.at(1, 1) - a.at(0, 1) * a.at(1, 0);
    Interval acc(Rat(0));
    for (std::size_t j = 0; j < n; ++j) {
        IntervalMatrix minor(n - 1, n - 1);
        for (std::size_t r = 1; r < n; ++r) {
            std::size_t cc = 0;
            for (std::size_t c = 0; c < n; ++c) {
                if (c == j) continue;
                minor.at(r - 1, cc++) = a.at(r, c);
            }
        }
        Interval term = a.at(0, j) * det_interval(minor);
        acc = (j % 2 == 0) ? acc + term : acc - term;
    }
    return acc;
}

inline IntervalMatrix transpose(const IntervalMatrix& a) {
    IntervalMatrix t(a.cols(), a.rows());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) t.at(c, r) = a.at(r, c);
    return t;
}

inline IntervalMatrix mat_mul(const IntervalMatrix& a, const IntervalMatrix& b) {
    if (a.cols() != b.rows()) throw DimensionMismatch("matrix product");
    IntervalMatrix r(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            Interval s(Rat(0));
            for (std::size_t k = 0; k < a.cols(); ++k) s = s + a.at(i, k) * b.at(k, j);
            r.at(i, j) = s;
        }
    return r;
}

// Coefficients of det(lambda*I - B), ascending, monic (Faddeev-LeVerrier).
inline std::vector<Interval> charpoly(const IntervalMatrix& b) {
    if (b.rows() != b.cols()) throw DimensionMismatch("charpoly");
    std::size_t n = b.rows();
    std::vector<Interval> c(n + 1, Interval(Rat(0)));
    c[n] = Interval(Rat(1));
    IntervalMatrix m(n, n); // M_0 = 0
    for (std::size_t k = 1; k <= n; ++k) {
        // M_k = B*M_{k-1} + c_{n-k+1} * I
        IntervalMatrix bm = mat_mul(b, m);
        for (std::size_t i = 0; i < n; ++i) bm.at(i, i) = bm.at(i, i) + c[n - k + 1];
        m = bm;
        IntervalMatrix prod = mat_mul(b, m);
        Interval tr(Rat(0));
        for (std::size_t i = 0; i < n; ++i) tr = tr + prod.at(i, i);
        c[n - k] = -(tr) * Interval(Rat(1, static_cast<long>(k)));
    }
    return c;
}

// Rational upper bound on the square sum (Frobenius) norm over all point
// matrices in A; exact when the squared sum is a perfect rational square.
inline Rat matrix_norm_sq_sum(const IntervalMatrix& a) {
    Rat s(0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            Rat m = a.at(i, j).mag();
            s += m * m;
        }
    return sqrt_upper(s, 40); // exact for perfect squares
}

// Lower bound 0 < c_lo <= min over point matrices in A of sigma_min(A).
// Point matrices get an exact Sturm bisection on det(A^T A - lambda I); interval
// matrices a sound interval-positivity search. Throws NotCertified when zero
// cannot be excluded.
inline Rat sigma_min_lower(const IntervalMatrix& a, const Rat& tol) {
    if (a.rows() != a.cols()) throw DimensionMismatch("sigma_min_lower needs square A");
    std::size_t m = a.rows();
    if (m == 0) throw Error("sigma_min_lower: empty matrix");
    IntervalMatrix b = mat_mul(transpose(a), a);
    std::vector<Interval> cp = charpoly(b); // det(lambda I - B)

    if (a.is_point()) {
        std::vector<Rat> cs(cp.size());
        for (std::size_t i = 0; i < cp.size(); ++i) cs[i] = cp[i].lo();
        UPoly<Rat> p{std::vector<Rat>(cs)};
        UPoly<Rat> sf = squarefree_part(p);
        if (sf.eval(Rat(0)).is_zero()) throw NotCertified("sigma_min_lower: singular matrix");
        auto chain = sturm_chain(sf);
        Rat trace(0);
        for (std::size_t i = 0; i < m; ++i) trace += b.at(i, i).lo();
        Rat lo(0), hi = trace + Rat(1);
        // Invariant: no eigenvalue in (0, lo], at least one in (lo, hi].
        if (count_roots_halfopen(chain, Rat(0), hi) == 0)
            throw NotCertified("sigma_min_lower: no positive eigenvalue found");
        while (lo.is_zero() || sqrt_upper(hi, 40) - sqrt_lower(lo, 40) >= tol) {
            Rat mid = (lo + hi) / Rat(2);
            if (count_roots_halfopen(chain, Rat(0), mid) == 0) lo = mid;
            else hi = mid;
        }
        return sqrt_lower(lo, 40);
    }

    // Interval entries: find t with det(B - lambda I) certified positive on
    // [0, t]; then sigma_min^2 > t for every point matrix.
    std::vector<Interval> q(cp.size()); // det(B - lambda I) = (-1)^m det(lambda I - B)
    bool flip = (m % 2 != 0);
    for (std::size_t i = 0; i < cp.size(); ++i) q[i] = flip ? -cp[i] : cp[i];
    auto positive_on = [&](const Rat& t) {
        Interval lam(Rat(0), t);
        Interval acc(Rat(0));
        for (std::size_t i = q.size(); i-- > 0;) acc = acc * lam + q[i];
        return acc.lo().sign() > 0;
    };
    Rat t(1);
    int shrink = 0;
    while (!positive_on(t)) {
        t /= Rat(2);
        if (++shrink > 256) throw NotCertified("sigma_min_lower: interval too wide");
    }
    Rat lo = t, hi = t * Rat(2);
    for (int i = 0; i < 20 && shrink == 0; ++i) { // grow while we can
        if (!positive_on(hi)) break;
        lo = hi;
        hi = hi * Rat(2);
    }
    for (int i = 0; i < 30; ++i) {
        Rat mid = (lo + hi) / Rat(2);
        if (positive_on(mid)) lo = mid;
        else hi = mid;
    }
    return sqrt_lower(lo, 40);
}

namespace detail {
inline void k_subsets(std::size_t n, std::size_t k, std::vector<std::vector<std::size_t>>& out) {
    std::vector<std::size_t> cur;
    // colexicographic order
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    if (k == 0 || k > n) return;
    while (true) {
        out.push_back(idx);
        std::size_t i = 0;
        while (i < k) {
            std::size_t limit = (i + 1 < k) ? idx[i + 1] : n;
            if (idx[i] + 1 < limit) break;
            ++i;
        }
        if (i == k) break;
        ++idx[i];
        for (std::size_t j = 0; j < i; ++j) idx[j] = j;
    }
}
} // namespace detail

// Largest k such that some k x k minor's interval determinant excludes 0.
// Never exceeds the true rank of any point matrix in A.
inline int rank_certified_lower(const IntervalMatrix& a) {
    std::size_t kmax = std::min(a.rows(), a.cols());
    for (std::size_t k = kmax; k >= 1; --k) {
        std::vector<std::vector<std::size_t>> rsel, csel;
        detail::k_subsets(a.rows(), k, rsel);
        detail::k_subsets(a.cols(), k, csel);
        for (const auto& rs : rsel)
            for (const auto& cs : csel) {
                IntervalMatrix sub(k, k);
                for (std::size_t i = 0; i < k; ++i)
                    for (std::size_t j = 0; j < k; ++j) sub.at(i, j) = a.at(rs[i], cs[j]);
                if (!det_interval(sub).contains_zero()) return static_cast<int>(k);
            }
    }
    return 0;
}

// Cramer inverse with interval entries. Throws NotCertified when the
// determinant interval contains zero.
inline IntervalMatrix interval_inverse(const IntervalMatrix& a) {
    if (a.rows() != a.cols()) throw DimensionMismatch("inverse of non-square");
    std::size_t n = a.rows();
    Interval det = det_interval(a);
    if (det.contains_zero()) throw NotCertified("interval_inverse: determinant contains 0");
    IntervalMatrix inv(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            IntervalMatrix minor(n - 1, n - 1);
            std::size_t rr = 0;
            for (std::size_t r = 0; r < n; ++r) {
                if (r == j) continue; // adjugate: transpose of cofactors
                std::size_t cc = 0;
                for (std::size_t c = 0; c < n; ++c) {
                    if (c == i) continue;
                    minor.at(rr, cc++) = a.at(r, c);
                }
                ++rr;
            }
            Interval cof = det_interval(minor);
            if ((i + j) % 2 != 0) cof = -cof;
            inv.at(i, j) = cof / det;
        }
    return inv;
}

} // namespace openmap

#endif
