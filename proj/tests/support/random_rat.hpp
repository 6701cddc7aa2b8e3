#ifndef OPENMAP_TESTS_RANDOM_RAT_HPP
#define OPENMAP_TESTS_RANDOM_RAT_HPP

#include <random>

#include "openmap/interval.hpp"
#include "openmap/rational.hpp"
#include "openmap/vec.hpp"

namespace openmap::testing {

// Deterministic generators; every test seeds its own engine.
inline Rat random_rat(std::mt19937_64& rng, long num_range = 64, long den_max = 64) {
    std::uniform_int_distribution<long> num(-num_range, num_range);
    std::uniform_int_distribution<long> den(1, den_max);
    return Rat(num(rng), den(rng));
}

inline Rat random_rat_in(std::mt19937_64& rng, const Rat& lo, const Rat& hi, long grid = 4096) {
    std::uniform_int_distribution<long> pick(0, grid);
    return lo + (hi - lo) * Rat(pick(rng), grid);
}

inline QVec random_vec(std::mt19937_64& rng, std::size_t dim, long num_range = 64,
                       long den_max = 64) {
    QVec v(dim);
    for (std::size_t i = 0; i < dim; ++i) v[i] = random_rat(rng, num_range, den_max);
    return v;
}

inline QVec random_vec_in_box(std::mt19937_64& rng, const IntervalBox& box, long grid = 4096) {
    QVec v(box.dim());
    for (std::size_t i = 0; i < box.dim(); ++i)
        v[i] = random_rat_in(rng, box[i].lo(), box[i].hi(), grid);
    return v;
}

// Random point inside an open ball (rejection from the bounding box).
inline QVec random_vec_in_ball(std::mt19937_64& rng, const QVec& center, const Rat& radius,
                               long grid = 4096) {
    IntervalBox box = IntervalBox::cube(center, radius);
    while (true) {
        QVec p = random_vec_in_box(rng, box, grid);
        if (dist_sq(p, center) < radius * radius) return p;
    }
}

inline IntervalBox random_box(std::mt19937_64& rng, std::size_t dim, long num_range = 16,
                              long den_max = 16) {
    std::vector<Interval> ivs;
    ivs.reserve(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        Rat a = random_rat(rng, num_range, den_max);
        Rat b = random_rat(rng, num_range, den_max);
        ivs.push_back(a <= b ? Interval(a, b) : Interval(b, a));
    }
    return IntervalBox(std::move(ivs));
}

} // namespace openmap::testing

#endif
