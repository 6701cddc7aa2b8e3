#ifndef OPENMAP_INTERVAL_HPP
#define OPENMAP_INTERVAL_HPP

#include <optional>
#include <ostream>
#include <vector>

#include "openmap/errors.hpp"
#include "openmap/rational.hpp"
#include "openmap/vec.hpp"

namespace openmap {

// Closed rational interval [lo, hi].
class Interval {
public:
    Interval() : lo_(0), hi_(0) {}
    Interval(Rat lo, Rat hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
        if (lo_ > hi_) throw Error("interval: lo > hi");
    }
    explicit Interval(const Rat& point) : lo_(point), hi_(point) {}

    const Rat& lo() const { return lo_; }
    const Rat& hi() const { return hi_; }
    Rat width() const { return hi_ - lo_; }
    Rat mid() const { return (lo_ + hi_) / Rat(2); }
    bool is_point() const { return lo_ == hi_; }

    bool contains_zero() const { return lo_.sign() <= 0 && hi_.sign() >= 0; }
    bool contains(const Rat& x) const { return lo_ <= x && x <= hi_; }
    bool contains_strictly(const Rat& x) const { return lo_ < x && x < hi_; }
    bool contains(const Interval& o) const { return lo_ <= o.lo_ && o.hi_ <= hi_; }

    Rat mag() const { return max(lo_.abs(), hi_.abs()); } // sup |x|
    // inf |x| over the interval.
    Rat mig() const {
        if (contains_zero()) return Rat(0);
        return min(lo_.abs(), hi_.abs());
    }

    friend Interval operator+(const Interval& a, const Interval& b) {
        return Interval(a.lo_ + b.lo_, a.hi_ + b.hi_);
    }
    friend Interval operator-(const Interval& a, const Interval& b) {
        return Interval(a.lo_ - b.hi_, a.hi_ - b.lo_);
    }
    friend Interval operator-(const Interval& a) { return Interval(-a.hi_, -a.lo_); }
    friend Interval operator*(const Interval& a, const Interval& b) {
        Rat p1 = a.lo_ * b.lo_, p2 = a.lo_ * b.hi_, p3 = a.hi_ * b.lo_, p4 = a.hi_ * b.hi_;
        return Interval(min(min(p1, p2), min(p3, p4)), max(max(p1, p2), max(p3, p4)));
    }
    friend Interval operator/(const Interval& a, const Interval& b) {
        if (b.contains_zero()) throw DomainBreach();
        Interval inv(Rat(1) / b.hi_, Rat(1) / b.lo_);
        return a * inv;
    }

    Interval pow_int(long e) const {
        if (e == 0) return Interval(Rat(1));
        if (e == 1) return *this;
        if (e % 2 != 0 || lo_.sign() >= 0) return Interval(lo_.pow_int(e), hi_.pow_int(e));
        if (hi_.sign() <= 0) return Interval(hi_.pow_int(e), lo_.pow_int(e));
        return Interval(Rat(0), mag().pow_int(e));
    }

    // Sound outward rounding to dyadics with `bits` fractional bits.
    Interval round_outward(int bits) const {
        return Interval(lo_.floor_dyadic(bits), hi_.ceil_dyadic(bits));
    }

    Interval hull(const Interval& o) const {
        return Interval(min(lo_, o.lo_), max(hi_, o.hi_));
    }

    std::optional<Interval> intersect(const Interval& o) const {
        Rat l = max(lo_, o.lo_), h = min(hi_, o.hi_);
        if (l > h) return std::nullopt;
        return Interval(l, h);
    }

    friend bool operator==(const Interval& a, const Interval& b) {
        return a.lo_ == b.lo_ && a.hi_ == b.hi_;
    }

    friend std::ostream& operator<<(std::ostream& os, const Interval& iv) {
        return os << "[" << iv.lo_ << ", " << iv.hi_ << "]";
    }

private:
    Rat lo_, hi_;
};

// Axis-aligned box: product of intervals.
class IntervalBox {
public:
    IntervalBox() = default;
    explicit IntervalBox(std::vector<Interval> ivs) : ivs_(std::move(ivs)) {}
    static IntervalBox degenerate(const QVec& x) {
        std::vector<Interval> ivs;
        ivs.reserve(x.dim());
        for (std::size_t i = 0; i < x.dim(); ++i) ivs.emplace_back(x[i]);
        return IntervalBox(std::move(ivs));
    }
    // Cube [c_i - r, c_i + r].
    static IntervalBox cube(const QVec& c, const Rat& r) {
        std::vector<Interval> ivs;
        ivs.reserve(c.dim());
        for (std::size_t i = 0; i < c.dim(); ++i) ivs.emplace_back(c[i] - r, c[i] + r);
        return IntervalBox(std::move(ivs));
    }

    std::size_t dim() const { return ivs_.size(); }
    const Interval& operator[](std::size_t i) const { return ivs_[i]; }
    Interval& operator[](std::size_t i) { return ivs_[i]; }

    QVec mid() const {
        QVec m(dim());
        for (std::size_t i = 0; i < dim(); ++i) m[i] = ivs_[i].mid();
        return m;
    }
    Rat max_width() const {
        Rat w(0);
        for (const auto& iv : ivs_) w = max(w, iv.width());
        return w;
    }
    // Squared half-diagonal.
    Rat half_diag_sq() const {
        Rat s(0);
        for (const auto& iv : ivs_) {
            Rat h = iv.width() / Rat(2);
            s += h * h;
        }
        return s;
    }
    bool contains(const QVec& x) const {
        for (std::size_t i = 0; i < dim(); ++i)
            if (!ivs_[i].contains(x[i])) return false;
        return true;
    }
    bool contains(const IntervalBox& o) const {
        for (std::size_t i = 0; i < dim(); ++i)
            if (!ivs_[i].contains(o[i])) return false;
        return true;
    }
    std::optional<IntervalBox> intersect(const IntervalBox& o) const {
        std::vector<Interval> out;
        out.reserve(dim());
        for (std::size_t i = 0; i < dim(); ++i) {
            auto iv = ivs_[i].intersect(o[i]);
            if (!iv) return std::nullopt;
            out.push_back(*iv);
        }
        return IntervalBox(std::move(out));
    }

    friend bool operator==(const IntervalBox& a, const IntervalBox& b) { return a.ivs_ == b.ivs_; }

    friend std::ostream& operator<<(std::ostream& os, const IntervalBox& b) {
        for (std::size_t i = 0; i < b.dim(); ++i) {
            if (i) os << "x";
            os << b[i];
        }
        return os;
    }

private:
    std::vector<Interval> ivs_;
};

// dist(p, box)^2, 0 when p is inside.
inline Rat box_point_min_dist_sq(const IntervalBox& box, const QVec& p) {
    Rat s(0);
    for (std::size_t i = 0; i < box.dim(); ++i) {
        if (p[i] < box[i].lo()) { Rat d = box[i].lo() - p[i]; s += d * d; }
        else if (p[i] > box[i].hi()) { Rat d = p[i] - box[i].hi(); s += d * d; }
    }
    return s;
}

// max over box of |x - p|^2 (attained at a corner).
inline Rat box_point_max_dist_sq(const IntervalBox& box, const QVec& p) {
    Rat s(0);
    for (std::size_t i = 0; i < box.dim(); ++i) {
        Rat d = max((p[i] - box[i].lo()).abs(), (box[i].hi() - p[i]).abs());
        s += d * d;
    }
    return s;
}

// Matrix of intervals, row-major. Houses Jacobian enclosures.
class IntervalMatrix {
public:
    IntervalMatrix() : rows_(0), cols_(0) {}
    IntervalMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), es_(rows * cols) {}

    static IntervalMatrix identity(std::size_t n) {
        IntervalMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = Interval(Rat(1));
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    Interval& at(std::size_t r, std::size_t c) { return es_[r * cols_ + c]; }
    const Interval& at(std::size_t r, std::size_t c) const { return es_[r * cols_ + c]; }

    bool is_point() const {
        for (const auto& e : es_)
            if (!e.is_point()) return false;
        return true;
    }

    friend IntervalMatrix operator-(const IntervalMatrix& a, const IntervalMatrix& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw DimensionMismatch("matrix sub");
        IntervalMatrix r(a.rows_, a.cols_);
        for (std::size_t i = 0; i < a.es_.size(); ++i) r.es_[i] = a.es_[i] - b.es_[i];
        return r;
    }

private:
    std::size_t rows_, cols_;
    std::vector<Interval> es_;
};

} // namespace openmap

#endif
