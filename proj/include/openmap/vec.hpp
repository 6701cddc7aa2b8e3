#ifndef OPENMAP_VEC_HPP
#define OPENMAP_VEC_HPP

#include <initializer_list>
#include <ostream>
#include <vector>

#include "openmap/errors.hpp"
#include "openmap/rational.hpp"

namespace openmap {

// A point of Q^n.
class QVec {
public:
    QVec() = default;
    explicit QVec(std::size_t dim) : coords_(dim, Rat(0)) {}
    QVec(std::initializer_list<Rat> cs) : coords_(cs) {}
    explicit QVec(std::vector<Rat> cs) : coords_(std::move(cs)) {}

    std::size_t dim() const { return coords_.size(); }
    const Rat& operator[](std::size_t i) const { return coords_[i]; }
    Rat& operator[](std::size_t i) { return coords_[i]; }
    const std::vector<Rat>& coords() const { return coords_; }

    QVec& operator+=(const QVec& o) {
        check_dim(o);
        for (std::size_t i = 0; i < dim(); ++i) coords_[i] += o[i];
        return *this;
    }
    QVec& operator-=(const QVec& o) {
        check_dim(o);
        for (std::size_t i = 0; i < dim(); ++i) coords_[i] -= o[i];
        return *this;
    }
    QVec& operator*=(const Rat& s) {
        for (auto& c : coords_) c *= s;
        return *this;
    }
    friend QVec operator+(QVec a, const QVec& b) { a += b; return a; }
    friend QVec operator-(QVec a, const QVec& b) { a -= b; return a; }
    friend QVec operator*(QVec a, const Rat& s) { a *= s; return a; }

    friend bool operator==(const QVec& a, const QVec& b) { return a.coords_ == b.coords_; }
    friend bool operator!=(const QVec& a, const QVec& b) { return !(a == b); }

    Rat norm_sq() const {
        Rat s(0);
        for (const auto& c : coords_) s += c * c;
        return s;
    }

    friend std::ostream& operator<<(std::ostream& os, const QVec& v) {
        os << "(";
        for (std::size_t i = 0; i < v.dim(); ++i) {
            if (i) os << ", ";
            os << v[i];
        }
        return os << ")";
    }

private:
    void check_dim(const QVec& o) const {
        if (dim() != o.dim()) throw DimensionMismatch();
    }
    std::vector<Rat> coords_;
};

inline Rat dist_sq(const QVec& a, const QVec& b) { return (a - b).norm_sq(); }

} // namespace openmap

#endif
