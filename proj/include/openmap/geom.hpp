#ifndef OPENMAP_GEOM_HPP
#define OPENMAP_GEOM_HPP

#include <ostream>
#include <utility>

#include "openmap/errors.hpp"
#include "openmap/interval.hpp"
#include "openmap/rational.hpp"
#include "openmap/vec.hpp"

namespace openmap {

// B(c, r) = { u : |u - c| < r }, r > 0.
struct OpenBall {
    QVec center;
    Rat radius;

    OpenBall(QVec c, Rat r) : center(std::move(c)), radius(std::move(r)) {
        if (radius.sign() <= 0) throw Error("open ball needs radius > 0");
    }
    std::size_t dim() const { return center.dim(); }

    bool contains(const QVec& p) const {
        return dist_sq(p, center) < radius * radius;
    }
    IntervalBox bounding_box() const { return IntervalBox::cube(center, radius); }

    friend bool operator==(const OpenBall& a, const OpenBall& b) {
        return a.center == b.center && a.radius == b.radius;
    }
    friend std::ostream& operator<<(std::ostream& os, const OpenBall& b) {
        return os << "B(" << b.center << ", " << b.radius << ")";
    }
};

// B̄(c, r) = { u : |u - c| <= r }, r >= 0.
struct ClosedBall {
    QVec center;
    Rat radius;

    ClosedBall(QVec c, Rat r) : center(std::move(c)), radius(std::move(r)) {
        if (radius.sign() < 0) throw Error("closed ball needs radius >= 0");
    }
    std::size_t dim() const { return center.dim(); }

    bool contains(const QVec& p) const {
        return dist_sq(p, center) <= radius * radius;
    }
    IntervalBox bounding_box() const { return IntervalBox::cube(center, radius); }

    friend std::ostream& operator<<(std::ostream& os, const ClosedBall& b) {
        return os << "Bcl(" << b.center << ", " << b.radius << ")";
    }
};

// Exact predicates. All strict containments certify interiority.

inline bool closed_box_in_open_ball(const IntervalBox& box, const OpenBall& ball) {
    return box_point_max_dist_sq(box, ball.center) < ball.radius * ball.radius;
}

inline bool closed_box_disjoint_closed_ball(const IntervalBox& box, const ClosedBall& ball) {
    return box_point_min_dist_sq(box, ball.center) > ball.radius * ball.radius;
}

inline bool closed_box_meets_closed_ball(const IntervalBox& box, const ClosedBall& ball) {
    return box_point_min_dist_sq(box, ball.center) <= ball.radius * ball.radius;
}

inline bool closed_box_meets_open_ball(const IntervalBox& box, const OpenBall& ball) {
    return box_point_min_dist_sq(box, ball.center) < ball.radius * ball.radius;
}

// B̄(inner) ⊆ B(outer), certified: |c1-c2| + r1 < r2.
inline bool closed_ball_in_open_ball(const ClosedBall& inner, const OpenBall& outer) {
    Rat dr = outer.radius - inner.radius;
    if (dr.sign() <= 0) return false;
    return dist_sq(inner.center, outer.center) < dr * dr;
}

// B̄(inner) ⊆ B̄(outer): |c1-c2| + r1 <= r2.
inline bool closed_ball_in_closed_ball(const ClosedBall& inner, const ClosedBall& outer) {
    Rat dr = outer.radius - inner.radius;
    if (dr.sign() < 0) return false;
    return dist_sq(inner.center, outer.center) <= dr * dr;
}

} // namespace openmap

#endif
