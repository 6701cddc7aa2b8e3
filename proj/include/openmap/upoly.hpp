#ifndef OPENMAP_UPOLY_HPP
#define OPENMAP_UPOLY_HPP

#include <algorithm>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

#include "openmap/errors.hpp"
#include "openmap/interval.hpp"
#include "openmap/rational.hpp"

namespace openmap {

// Field operations used by the univariate polynomial routines. The base
// instantiation is Rat; algnum.hpp specializes this for algebraic extensions.
template <class K>
struct FieldOps;

template <>
struct FieldOps<Rat> {
    static bool is_zero(const Rat& x) { return x.is_zero(); }
    static int sign(const Rat& x) { return x.sign(); }
    static Rat invert(const Rat& x) {
        if (x.is_zero()) throw DivisionByZero("field inverse of 0");
        return Rat(1) / x;
    }
    static Rat from_rat(const Rat& r) { return r; }
    // Rational enclosure of the value; exact for Rat.
    static Interval enclosure(const Rat& x) { return Interval(x); }
    // Shrinks enclosures of all values tied to this element's context.
    static void refine(const Rat&) {}
};

// Dense univariate polynomial over a field K, coefficients ascending.
template <class K>
class UPoly {
public:
    using Ops = FieldOps<K>;

    UPoly() = default;
    explicit UPoly(std::vector<K> cs) : c_(std::move(cs)) { trim(); }
    static UPoly zero() { return UPoly(); }
    static UPoly constant(K v) { return UPoly(std::vector<K>{std::move(v)}); }
    static UPoly x(const K& one) {
        std::vector<K> cs{one, one};
        cs[0] = sub(one, one); // zero in K
        return UPoly(std::move(cs));
    }

    bool is_zero() const { return c_.empty(); }
    // Degree of the zero polynomial is -1 here.
    long degree() const { return static_cast<long>(c_.size()) - 1; }
    const K& operator[](std::size_t i) const { return c_[i]; }
    const std::vector<K>& coeffs() const { return c_; }
    const K& leading() const { return c_.back(); }

    void trim() {
        while (!c_.empty() && Ops::is_zero(c_.back())) c_.pop_back();
    }

    friend UPoly operator+(const UPoly& a, const UPoly& b) {
        std::vector<K> r(std::max(a.c_.size(), b.c_.size()));
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i < a.c_.size() && i < b.c_.size()) r[i] = add(a.c_[i], b.c_[i]);
            else if (i < a.c_.size()) r[i] = a.c_[i];
            else r[i] = b.c_[i];
        }
        return UPoly(std::move(r));
    }
    friend UPoly operator-(const UPoly& a, const UPoly& b) {
        std::vector<K> r(std::max(a.c_.size(), b.c_.size()));
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i < a.c_.size() && i < b.c_.size()) r[i] = sub(a.c_[i], b.c_[i]);
            else if (i < a.c_.size()) r[i] = a.c_[i];
            else r[i] = neg(b.c_[i]);
        }
        return UPoly(std::move(r));
    }
    friend UPoly operator*(const UPoly& a, const UPoly& b) {
        if (a.is_zero() || b.is_zero()) return UPoly();
        std::vector<K> r(a.c_.size() + b.c_.size() - 1, zero_of(a.c_[0]));
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j)
                r[i + j] = add(r[i + j], mul(a.c_[i], b.c_[j]));
        return UPoly(std::move(r));
    }

    UPoly scaled(const K& s) const {
        std::vector<K> r(c_.size());
        for (std::size_t i = 0; i < c_.size(); ++i) r[i] = mul(c_[i], s);
        return UPoly(std::move(r));
    }

    UPoly derivative() const {
        if (c_.size() <= 1) return UPoly();
        std::vector<K> r(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i)
            r[i - 1] = mul(c_[i], Ops::from_rat(Rat(static_cast<long>(i))));
        return UPoly(std::move(r));
    }

    // Field division with remainder.
    static std::pair<UPoly, UPoly> divmod(const UPoly& a, const UPoly& b) {
        if (b.is_zero()) throw DivisionByZero("UPoly divmod by zero");
        UPoly rem = a;
        if (rem.degree() < b.degree()) return {UPoly(), rem};
        K lcinv = Ops::invert(b.leading());
        std::vector<K> q(static_cast<std::size_t>(rem.degree() - b.degree()) + 1,
                         zero_of(b.leading()));
        while (!rem.is_zero() && rem.degree() >= b.degree()) {
            std::size_t shift = static_cast<std::size_t>(rem.degree() - b.degree());
            K coef = mul(rem.leading(), lcinv);
            q[shift] = coef;
            std::vector<K> sub_cs(rem.c_.size(), zero_of(coef));
            for (std::size_t i = 0; i < b.c_.size(); ++i)
                sub_cs[i + shift] = mul(b.c_[i], coef);
            rem = rem - UPoly(std::move(sub_cs));
        }
        return {UPoly(std::move(q)), rem};
    }

    UPoly monic() const {
        if (is_zero()) return *this;
        return scaled(Ops::invert(leading()));
    }

    K eval(const Rat& t) const {
        K acc = c_.empty() ? Ops::from_rat(Rat(0)) : zero_of(c_[0]);
        for (std::size_t i = c_.size(); i-- > 0;) {
            acc = add(mul(acc, Ops::from_rat(t)), c_[i]);
        }
        return acc;
    }
    K eval_k(const K& t) const {
        K acc = c_.empty() ? Ops::from_rat(Rat(0)) : zero_of(c_[0]);
        for (std::size_t i = c_.size(); i-- > 0;) acc = add(mul(acc, t), c_[i]);
        return acc;
    }

    // Interval enclosure of the value over [lo, hi] via coefficient enclosures.
    Interval eval_enclosure(const Interval& t) const {
        Interval acc{Rat(0), Rat(0)};
        for (std::size_t i = c_.size(); i-- > 0;) {
            acc = acc * t + Ops::enclosure(c_[i]);
        }
        return acc;
    }

    friend std::ostream& operator<<(std::ostream& os, const UPoly& p) {
        if (p.is_zero()) return os << "0";
        for (std::size_t i = p.c_.size(); i-- > 0;) {
            os << "(c" << i << ")";
            if (i + 1 < p.c_.size()) os << " ";
        }
        return os;
    }

private:
    static K add(const K& a, const K& b) { return a + b; }
    static K sub(const K& a, const K& b) { return a - b; }
    static K mul(const K& a, const K& b) { return a * b; }
    static K neg(const K& a) { return FieldOps<K>::from_rat(Rat(0)) - a; }
    static K zero_of(const K& like) { return sub(like, like); }

    std::vector<K> c_;
};

// Rescales by a positive power of two so coefficient magnitudes stay near 1;
// evaluation signs are unchanged. Tames the bit growth of remainder chains.
template <class K>
void rescale_pow2(UPoly<K>& p) {
    long emax = 0;
    bool any = false;
    for (const auto& c : p.coeffs()) {
        Interval e = FieldOps<K>::enclosure(c);
        Rat m = e.mag();
        if (m.is_zero()) continue;
        long lg = m.approx_log2();
        if (!any || lg > emax) emax = lg;
        any = true;
    }
    if (!any || (emax > -16 && emax < 16)) return;
    p = p.scaled(FieldOps<K>::from_rat(Rat::pow2(-emax)));
}

template <class K>
UPoly<K> upoly_gcd_monic(UPoly<K> a, UPoly<K> b) {
    a.trim();
    b.trim();
    rescale_pow2(a);
    rescale_pow2(b);
    while (!b.is_zero()) {
        auto [q, r] = UPoly<K>::divmod(a, b);
        (void)q;
        rescale_pow2(r);
        a = std::move(b);
        b = std::move(r);
    }
    if (a.is_zero()) return a;
    return a.monic();
}

template <class K>
UPoly<K> squarefree_part(const UPoly<K>& p) {
    if (p.degree() <= 1) return p;
    UPoly<K> g = upoly_gcd_monic(p, p.derivative());
    if (g.degree() <= 0) return p;
    auto [q, r] = UPoly<K>::divmod(p, g);
    if (!r.is_zero()) throw Error("squarefree_part: inexact division");
    return q;
}

// Sturm chain of p (p should be squarefree for root counting).
template <class K>
std::vector<UPoly<K>> sturm_chain(const UPoly<K>& p) {
    std::vector<UPoly<K>> chain;
    if (p.is_zero()) return chain;
    chain.push_back(p);
    UPoly<K> d = p.derivative();
    if (d.is_zero()) return chain;
    chain.push_back(d);
    while (true) {
        const UPoly<K>& a = chain[chain.size() - 2];
        const UPoly<K>& b = chain[chain.size() - 1];
        auto [q, r] = UPoly<K>::divmod(a, b);
        (void)q;
        if (r.is_zero()) break;
        UPoly<K> next = UPoly<K>() - r;
        rescale_pow2(next); // positive scaling keeps the sign structure
        chain.push_back(std::move(next));
    }
    return chain;
}

template <class K>
int sturm_variations(const std::vector<UPoly<K>>& chain, const Rat& t) {
    int count = 0, prev = 0;
    for (const auto& p : chain) {
        int s = FieldOps<K>::sign(p.eval(t));
        if (s == 0) continue;
        if (prev != 0 && s != prev) ++count;
        prev = s;
    }
    return count;
}

// Number of roots of squarefree p in (a, b], exact.
template <class K>
int count_roots_halfopen(const std::vector<UPoly<K>>& chain, const Rat& a, const Rat& b) {
    return sturm_variations(chain, a) - sturm_variations(chain, b);
}

// Upper bound on |roots|: 1 + max |c_i| / |lead| via enclosures, refined until
// the leading coefficient's enclosure excludes zero.
template <class K>
Rat root_bound(const UPoly<K>& p) {
    if (p.degree() <= 0) return Rat(1);
    Interval lead = FieldOps<K>::enclosure(p.leading());
    while (lead.contains_zero()) {
        FieldOps<K>::refine(p.leading());
        lead = FieldOps<K>::enclosure(p.leading());
    }
    Rat lead_low = lead.mig();
    Rat m(0);
    for (long i = 0; i < p.degree(); ++i)
        m = max(m, FieldOps<K>::enclosure(p[static_cast<std::size_t>(i)]).mag());
    return Rat(1) + m / lead_low;
}

// A real root location: either an exact rational or an isolating open interval
// (lo, hi) containing exactly one root of the (squarefree) polynomial, with
// sign(p(lo)) != 0 != sign(p(hi)).
template <class K>
struct RootLoc {
    std::optional<Rat> exact;
    Rat lo, hi;
    UPoly<K> poly; // squarefree defining polynomial
};

namespace detail {

template <class K>
void isolate_rec(const std::vector<UPoly<K>>& chain, const UPoly<K>& p, const Rat& a,
                 const Rat& b, int count, std::vector<RootLoc<K>>& out) {
    if (count == 0) return;
    if (count == 1) {
        out.push_back(RootLoc<K>{std::nullopt, a, b, p});
        return;
    }
    Rat mid = (a + b) / Rat(2);
    if (FieldOps<K>::is_zero(p.eval(mid))) {
        out.push_back(RootLoc<K>{mid, mid, mid, p});
        // Deflate so the remaining isolation sees one root fewer on each side.
        std::vector<K> lin{FieldOps<K>::from_rat(-mid), FieldOps<K>::from_rat(Rat(1))};
        auto [q, r] = UPoly<K>::divmod(p, UPoly<K>(std::vector<K>(lin)));
        if (!r.is_zero()) throw Error("isolate: inexact deflation");
        auto sub_chain = sturm_chain(q);
        int left = count_roots_halfopen(sub_chain, a, mid);
        int right = count_roots_halfopen(sub_chain, mid, b);
        isolate_rec(sub_chain, q, a, mid, left, out);
        isolate_rec(sub_chain, q, mid, b, right, out);
        return;
    }
    int left = count_roots_halfopen(chain, a, mid);
    isolate_rec(chain, p, a, mid, left, out);
    isolate_rec(chain, p, mid, b, count - left, out);
}

} // namespace detail

// Isolates all real roots of squarefree p; results sorted ascending.
template <class K>
std::vector<RootLoc<K>> isolate_roots(const UPoly<K>& p_in) {
    std::vector<RootLoc<K>> out;
    UPoly<K> p = p_in;
    p.trim();
    if (p.degree() <= 0) return out;
    Rat bound = root_bound(p);
    Rat a = -bound, b = bound;
    // Sturm counts (a, b]; a itself cannot be a root since |roots| < bound.
    auto chain = sturm_chain(p);
    int count = count_roots_halfopen(chain, a, b);
    detail::isolate_rec(chain, p, a, b, count, out);
    std::sort(out.begin(), out.end(), [](const RootLoc<K>& x, const RootLoc<K>& y) {
        Rat xl = x.exact ? *x.exact : x.lo, yl = y.exact ? *y.exact : y.lo;
        return xl < yl;
    });
    return out;
}

} // namespace openmap

#endif
