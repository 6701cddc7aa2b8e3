#ifndef OPENMAP_ALGNUM_HPP
#define OPENMAP_ALGNUM_HPP

#include <memory>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

#include "openmap/errors.hpp"
#include "openmap/interval.hpp"
#include "openmap/rational.hpp"
#include "openmap/upoly.hpp"

namespace openmap {

// A real algebraic extension of the field K: one root alpha of a monic
// squarefree polynomial, isolated by a rational interval with a sign change.
// The defining polynomial may shrink over time (dynamic evaluation): when a
// zero-divisor test splits it, the factor containing alpha survives.
template <class K>
struct ExtCtx {
    UPoly<K> defining;
    Rat lo, hi;
    std::optional<Rat> exact;
    int sign_at_lo = 0;
    std::mutex mu;

    ExtCtx(UPoly<K> def, Rat lo_, Rat hi_) : defining(std::move(def)), lo(std::move(lo_)), hi(std::move(hi_)) {
        sign_at_lo = FieldOps<K>::sign(defining.eval(lo));
        if (sign_at_lo == 0) throw Error("ExtCtx: endpoint is a root");
    }

    Interval current_interval() {
        std::lock_guard<std::mutex> lock(mu);
        if (exact) return Interval(*exact);
        return Interval(lo, hi);
    }

    void refine_once() {
        std::lock_guard<std::mutex> lock(mu);
        if (exact) return;
        Rat mid = (lo + hi) / Rat(2);
        int s = FieldOps<K>::sign(defining.eval(mid));
        if (s == 0) {
            exact = mid;
            return;
        }
        if (s == sign_at_lo) lo = mid;
        else hi = mid;
    }
};

// Element of K(alpha), represented by a residue polynomial mod the defining
// polynomial. A null context marks constants from K itself.
template <class K>
class AlgElem {
public:
    AlgElem() = default;
    AlgElem(std::shared_ptr<ExtCtx<K>> ctx, UPoly<K> rep) : ctx_(std::move(ctx)), rep_(std::move(rep)) {
        reduce();
    }

    static AlgElem constant(K v) {
        AlgElem e;
        e.rep_ = UPoly<K>::constant(std::move(v));
        return e;
    }
    // The root itself as an element of its extension.
    static AlgElem generator(std::shared_ptr<ExtCtx<K>> ctx) {
        K one = FieldOps<K>::from_rat(Rat(1));
        K zero = FieldOps<K>::from_rat(Rat(0));
        return AlgElem(std::move(ctx), UPoly<K>(std::vector<K>{zero, one}));
    }

    const std::shared_ptr<ExtCtx<K>>& ctx() const { return ctx_; }
    const UPoly<K>& rep() const { return rep_; }

    friend AlgElem operator+(const AlgElem& a, const AlgElem& b) {
        auto c = merged_ctx(a, b);
        return AlgElem(c, a.rep_ + b.rep_);
    }
    friend AlgElem operator-(const AlgElem& a, const AlgElem& b) {
        auto c = merged_ctx(a, b);
        return AlgElem(c, a.rep_ - b.rep_);
    }
    friend AlgElem operator*(const AlgElem& a, const AlgElem& b) {
        auto c = merged_ctx(a, b);
        return AlgElem(c, a.rep_ * b.rep_);
    }

    bool is_zero_elem() const {
        reduce();
        if (!ctx_) return rep_.is_zero();
        {
            std::lock_guard<std::mutex> lock(ctx_->mu);
            if (ctx_->exact) {
                Rat t = *ctx_->exact;
                return FieldOps<K>::is_zero(rep_.eval(t));
            }
        }
        if (rep_.is_zero()) return true;
        if (rep_.degree() == 0) return false; // trimmed: nonzero constant
        UPoly<K> g = upoly_gcd_monic(rep_, current_defining());
        if (g.degree() <= 0) return false;
        // alpha is a root of exactly one of g and defining/g
        UPoly<K> other = exact_quotient(current_defining(), g);
        for (int guard = 0; guard < 20000; ++guard) {
            {
                std::lock_guard<std::mutex> lock(ctx_->mu);
                if (ctx_->exact) break; // re-dispatch below
            }
            Interval iv = ctx_->current_interval();
            if (!g.eval_enclosure(iv).contains_zero()) {
                replace_defining(other);
                reduce();
                return false; // gcd(rep, defining/g) = 1
            }
            if (!other.eval_enclosure(iv).contains_zero()) {
                replace_defining(g);
                return true; // g | rep, so rep(alpha) = 0
            }
            ctx_->refine_once();
            refine_coeffs(g);
            refine_coeffs(other);
        }
        // the interval collapsed to an exact rational along the way
        {
            std::lock_guard<std::mutex> lock(ctx_->mu);
            if (ctx_->exact) return FieldOps<K>::is_zero(rep_.eval(*ctx_->exact));
        }
        throw Error("AlgElem::is_zero: refinement did not separate");
    }

    int sign_elem() const {
        if (is_zero_elem()) return 0;
        if (!ctx_) return FieldOps<K>::sign(rep_.coeffs()[0]);
        {
            std::lock_guard<std::mutex> lock(ctx_->mu);
            if (ctx_->exact) return FieldOps<K>::sign(rep_.eval(*ctx_->exact));
        }
        for (int guard = 0; guard < 20000; ++guard) {
            Interval e = rep_.eval_enclosure(ctx_->current_interval());
            if (!e.contains_zero()) return e.lo().sign() > 0 ? 1 : -1;
            ctx_->refine_once();
            refine_coeffs(rep_);
            std::lock_guard<std::mutex> lock(ctx_->mu);
            if (ctx_->exact) return FieldOps<K>::sign(rep_.eval(*ctx_->exact));
        }
        throw Error("AlgElem::sign: refinement did not separate");
    }

    AlgElem invert_elem() const {
        if (is_zero_elem()) throw DivisionByZero("algebraic inverse of 0");
        if (!ctx_) return constant(FieldOps<K>::invert(rep_.coeffs()[0]));
        {
            std::lock_guard<std::mutex> lock(ctx_->mu);
            if (ctx_->exact)
                return constant(FieldOps<K>::invert(rep_.eval(*ctx_->exact)));
        }
        reduce();
        // extended Euclid: t * rep == gcd (mod defining), gcd constant
        UPoly<K> r0 = current_defining(), r1 = rep_;
        UPoly<K> t0, t1 = UPoly<K>::constant(FieldOps<K>::from_rat(Rat(1)));
        while (!r1.is_zero() && r1.degree() > 0) {
            auto [q, r2] = UPoly<K>::divmod(r0, r1);
            UPoly<K> t2 = t0 - q * t1;
            // joint rescale keeps t*rep == r (mod defining) while containing
            // the coefficient growth of the remainder chain
            long emax = 0;
            bool any = false;
            for (const auto& c : r2.coeffs()) {
                Rat m = FieldOps<K>::enclosure(c).mag();
                if (m.is_zero()) continue;
                long lg = m.approx_log2();
                if (!any || lg > emax) emax = lg;
                any = true;
            }
            if (any && (emax <= -16 || emax >= 16)) {
                K s = FieldOps<K>::from_rat(Rat::pow2(-emax));
                r2 = r2.scaled(s);
                t2 = t2.scaled(s);
            }
            r0 = std::move(r1);
            t0 = std::move(t1);
            r1 = std::move(r2);
            t1 = std::move(t2);
        }
        if (r1.is_zero()) throw Error("AlgElem::invert: gcd not constant");
        K u = FieldOps<K>::invert(r1.coeffs()[0]);
        return AlgElem(ctx_, t1.scaled(u));
    }

    Interval enclosure_elem() const {
        reduce();
        if (!ctx_) {
            if (rep_.is_zero()) return Interval(Rat(0));
            return FieldOps<K>::enclosure(rep_.coeffs()[0]);
        }
        return rep_.eval_enclosure(ctx_->current_interval());
    }

    void refine_elem() const {
        if (ctx_) ctx_->refine_once();
        refine_coeffs(rep_);
    }

private:
    static std::shared_ptr<ExtCtx<K>> merged_ctx(const AlgElem& a, const AlgElem& b) {
        if (a.ctx_ && b.ctx_ && a.ctx_ != b.ctx_)
            throw Error("AlgElem: mixed extensions");
        return a.ctx_ ? a.ctx_ : b.ctx_;
    }

    UPoly<K> current_defining() const {
        std::lock_guard<std::mutex> lock(ctx_->mu);
        return ctx_->defining;
    }

    void replace_defining(const UPoly<K>& next) const {
        std::lock_guard<std::mutex> lock(ctx_->mu);
        ctx_->defining = next;
        if (!ctx_->exact) {
            ctx_->sign_at_lo = FieldOps<K>::sign(ctx_->defining.eval(ctx_->lo));
            if (ctx_->sign_at_lo == 0) throw Error("AlgElem: split endpoint became a root");
        }
    }

    static UPoly<K> exact_quotient(const UPoly<K>& a, const UPoly<K>& b) {
        auto [q, r] = UPoly<K>::divmod(a, b);
        if (!r.is_zero()) throw Error("AlgElem: inexact defining split");
        return q;
    }

    static void refine_coeffs(const UPoly<K>& p) {
        for (const auto& c : p.coeffs()) FieldOps<K>::refine(c);
    }

    void reduce() const {
        if (!ctx_) {
            rep_.trim();
            return;
        }
        UPoly<K> def = current_defining();
        if (rep_.degree() >= def.degree()) {
            auto [q, r] = UPoly<K>::divmod(rep_, def);
            (void)q;
            rep_ = std::move(r);
        }
        rep_.trim();
    }

    std::shared_ptr<ExtCtx<K>> ctx_;
    mutable UPoly<K> rep_;
};

template <class K>
struct FieldOps<AlgElem<K>> {
    static bool is_zero(const AlgElem<K>& x) { return x.is_zero_elem(); }
    static int sign(const AlgElem<K>& x) { return x.sign_elem(); }
    static AlgElem<K> invert(const AlgElem<K>& x) { return x.invert_elem(); }
    static AlgElem<K> from_rat(const Rat& r) {
        return AlgElem<K>::constant(FieldOps<K>::from_rat(r));
    }
    static Interval enclosure(const AlgElem<K>& x) { return x.enclosure_elem(); }
    static void refine(const AlgElem<K>& x) { x.refine_elem(); }
};

// Integer power in an arbitrary field-with-ops.
template <class K>
K field_pow(const K& base, unsigned e) {
    K acc = FieldOps<K>::from_rat(Rat(1));
    K b = base;
    while (e) {
        if (e & 1) acc = acc * b;
        b = b * b;
        e >>= 1;
    }
    return acc;
}

} // namespace openmap

#endif
