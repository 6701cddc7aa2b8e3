#ifndef OPENMAP_RATIONAL_HPP
#define OPENMAP_RATIONAL_HPP

#include <gmpxx.h>

#include <cstdint>
#include <ostream>
#include <string>
#include <utility>

#include "openmap/errors.hpp"

namespace openmap {

// Exact rational scalar. Canonical reduced form with positive denominator is
// maintained by GMP; all arithmetic is exact.
class Rat {
public:
    Rat() : q_(0) {}
    Rat(int v) : q_(v) {}
    Rat(long v) : q_(static_cast<long>(v)) {}
    Rat(long num, long den) {
        if (den == 0) throw DivisionByZero("Rat(num, 0)");
        q_ = mpq_class(num, den);
        q_.canonicalize();
    }
    explicit Rat(const mpz_class& z) : q_(z) {}
    Rat(const mpz_class& num, const mpz_class& den) {
        if (den == 0) throw DivisionByZero("Rat(num, 0)");
        q_ = mpq_class(num, den);
        q_.canonicalize();
    }
    explicit Rat(mpq_class q) : q_(std::move(q)) { q_.canonicalize(); }

    // Parses "123", "-4/17". Whitespace is not accepted.
    static Rat parse(const std::string& s) {
        auto slash = s.find('/');
        try {
            if (slash == std::string::npos) return Rat(mpz_class(s));
            mpz_class num(s.substr(0, slash));
            mpz_class den(s.substr(slash + 1));
            if (den == 0) throw DivisionByZero("parse: zero denominator");
            return Rat(num, den);
        } catch (const std::invalid_argument&) {
            throw ParseError("bad rational literal: '" + s + "'");
        }
    }

    // 2^e for any integer e.
    static Rat pow2(long e) {
        mpz_class p;
        mpz_ui_pow_ui(p.get_mpz_t(), 2, static_cast<unsigned long>(e < 0 ? -e : e));
        return e >= 0 ? Rat(p) : Rat(mpz_class(1), p);
    }

    const mpq_class& raw() const { return q_; }
    mpz_class num() const { return q_.get_num(); }
    mpz_class den() const { return q_.get_den(); }

    int sign() const { return sgn(q_); }
    bool is_zero() const { return sign() == 0; }
    bool is_integer() const { return q_.get_den() == 1; }

    Rat abs() const { return Rat(mpq_class(::abs(q_))); }

    Rat operator-() const { return Rat(mpq_class(-q_)); }
    Rat& operator+=(const Rat& o) { q_ += o.q_; return *this; }
    Rat& operator-=(const Rat& o) { q_ -= o.q_; return *this; }
    Rat& operator*=(const Rat& o) { q_ *= o.q_; return *this; }
    Rat& operator/=(const Rat& o) {
        if (o.is_zero()) throw DivisionByZero();
        q_ /= o.q_;
        return *this;
    }

    friend Rat operator+(Rat a, const Rat& b) { a += b; return a; }
    friend Rat operator-(Rat a, const Rat& b) { a -= b; return a; }
    friend Rat operator*(Rat a, const Rat& b) { a *= b; return a; }
    friend Rat operator/(Rat a, const Rat& b) { a /= b; return a; }

    friend bool operator==(const Rat& a, const Rat& b) { return a.q_ == b.q_; }
    friend bool operator!=(const Rat& a, const Rat& b) { return a.q_ != b.q_; }
    friend bool operator<(const Rat& a, const Rat& b) { return a.q_ < b.q_; }
    friend bool operator<=(const Rat& a, const Rat& b) { return a.q_ <= b.q_; }
    friend bool operator>(const Rat& a, const Rat& b) { return a.q_ > b.q_; }
    friend bool operator>=(const Rat& a, const Rat& b) { return a.q_ >= b.q_; }

    Rat pow_int(long e) const {
        if (e < 0) {
            if (is_zero()) throw DivisionByZero("0^negative");
            return Rat(1) / pow_int(-e);
        }
        mpz_class n, d;
        mpz_pow_ui(n.get_mpz_t(), q_.get_num().get_mpz_t(), static_cast<unsigned long>(e));
        mpz_pow_ui(d.get_mpz_t(), q_.get_den().get_mpz_t(), static_cast<unsigned long>(e));
        return Rat(n, d);
    }

    mpz_class floor() const {
        mpz_class r;
        mpz_fdiv_q(r.get_mpz_t(), q_.get_num().get_mpz_t(), q_.get_den().get_mpz_t());
        return r;
    }
    mpz_class ceil() const {
        mpz_class r;
        mpz_cdiv_q(r.get_mpz_t(), q_.get_num().get_mpz_t(), q_.get_den().get_mpz_t());
        return r;
    }

    // Largest dyadic m/2^bits <= x.
    Rat floor_dyadic(int bits) const {
        mpz_class scaled_num = q_.get_num() << bits;
        mpz_class m;
        mpz_fdiv_q(m.get_mpz_t(), scaled_num.get_mpz_t(), q_.get_den().get_mpz_t());
        mpz_class d = mpz_class(1) << bits;
        return Rat(m, d);
    }
    // Smallest dyadic m/2^bits >= x.
    Rat ceil_dyadic(int bits) const {
        mpz_class scaled_num = q_.get_num() << bits;
        mpz_class m;
        mpz_cdiv_q(m.get_mpz_t(), scaled_num.get_mpz_t(), q_.get_den().get_mpz_t());
        mpz_class d = mpz_class(1) << bits;
        return Rat(m, d);
    }

    double to_double() const { return q_.get_d(); }

    // floor(log2 |x|) up to +-1, for scaling heuristics; 0 for x = 0.
    long approx_log2() const {
        if (is_zero()) return 0;
        long nb = static_cast<long>(mpz_sizeinbase(q_.get_num().get_mpz_t(), 2));
        long db = static_cast<long>(mpz_sizeinbase(q_.get_den().get_mpz_t(), 2));
        return nb - db;
    }

    std::string str() const {
        if (is_integer()) return q_.get_num().get_str();
        return q_.get_num().get_str() + "/" + q_.get_den().get_str();
    }

    friend std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.str(); }

private:
    mpq_class q_;
};

inline Rat min(const Rat& a, const Rat& b) { return a <= b ? a : b; }
inline Rat max(const Rat& a, const Rat& b) { return a >= b ? a : b; }

namespace detail {
// Exact square root when x is a perfect rational square.
inline bool exact_sqrt(const Rat& x, Rat& out) {
    if (!mpz_perfect_square_p(x.num().get_mpz_t()) ||
        !mpz_perfect_square_p(x.den().get_mpz_t()))
        return false;
    mpz_class n, d;
    mpz_sqrt(n.get_mpz_t(), x.num().get_mpz_t());
    mpz_sqrt(d.get_mpz_t(), x.den().get_mpz_t());
    out = Rat(n, d);
    return true;
}
} // namespace detail

// Rational r with r <= sqrt(x) and sqrt(x) - r <= sqrt(x)/2^bits + 2^-bits.
inline Rat sqrt_lower(const Rat& x, int bits = 40) {
    if (x.sign() < 0) throw Error("sqrt of negative");
    if (x.is_zero()) return Rat(0);
    Rat exact;
    if (detail::exact_sqrt(x, exact)) return exact;
    // sqrt(n/d) = sqrt(n*d)/d; floor-sqrt of n*d*4^bits gives the bound.
    mpz_class nd = x.num() * x.den();
    nd <<= 2 * bits;
    mpz_class s;
    mpz_sqrt(s.get_mpz_t(), nd.get_mpz_t());
    return Rat(s, x.den() << bits);
}

// Rational r with r >= sqrt(x), tight to the same resolution.
inline Rat sqrt_upper(const Rat& x, int bits = 40) {
    if (x.sign() < 0) throw Error("sqrt of negative");
    if (x.is_zero()) return Rat(0);
    Rat exact;
    if (detail::exact_sqrt(x, exact)) return exact;
    mpz_class nd = x.num() * x.den();
    nd <<= 2 * bits;
    mpz_class s;
    mpz_sqrt(s.get_mpz_t(), nd.get_mpz_t());
    return Rat(s + 1, x.den() << bits);
}

} // namespace openmap

#endif
