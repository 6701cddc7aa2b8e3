#ifndef OPENMAP_ENUMERATION_HPP
#define OPENMAP_ENUMERATION_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

#include "openmap/errors.hpp"
#include "openmap/geom.hpp"
#include "openmap/interval.hpp"
#include "openmap/rational.hpp"
#include "openmap/vec.hpp"

namespace openmap {

// Cantor pairing, used to dovetail searches deterministically.
inline std::uint64_t cantor_pair(std::uint64_t a, std::uint64_t b) {
    return (a + b) * (a + b + 1) / 2 + b;
}
inline std::pair<std::uint64_t, std::uint64_t> cantor_unpair(std::uint64_t z) {
    std::uint64_t lo = 0, hi = 1;
    while (hi * (hi + 1) / 2 <= z) hi *= 2;
    while (lo < hi) {
        std::uint64_t mid = (lo + hi + 1) / 2;
        if (mid * (mid + 1) / 2 <= z) lo = mid;
        else hi = mid - 1;
    }
    std::uint64_t t = lo * (lo + 1) / 2;
    std::uint64_t b = z - t;
    return {lo - b, b};
}

// Finite truncation knobs for Type-2 computations.
struct Budget {
    int max_prefix = 512;   // generator indices scanned
    int max_depth = 8;      // subdivision depth
    int max_precision = 30; // bits

    Budget() = default;
    Budget(int prefix, int depth, int precision)
        : max_prefix(prefix), max_depth(depth), max_precision(precision) {
        if (prefix < 0 || depth < 0 || precision < 0) throw Error("budget fields must be >= 0");
    }
};

// A theta_<-name: a deterministic lazy enumeration of open rational balls
// whose union is the represented open set. Generators are pure index -> value
// maps; the memo only caches what the generator would return anyway.
// finite_size, when set, promises Skip at every index >= finite_size, which
// lets consumers round-robin instead of dovetailing.
class OpenSetEnum {
public:
    using Generator = std::function<std::optional<OpenBall>(std::uint64_t)>;

    OpenSetEnum() : dim_(1), gen_([](std::uint64_t) { return std::nullopt; }) {}
    OpenSetEnum(std::size_t dim, Generator gen, std::optional<IntervalBox> bound = std::nullopt,
                std::optional<std::uint64_t> finite_size = std::nullopt)
        : dim_(dim), gen_(std::move(gen)), bound_(std::move(bound)), finite_size_(finite_size),
          cache_(std::make_shared<Cache>()) {}

    static OpenSetEnum empty(std::size_t dim) {
        return OpenSetEnum(dim, [](std::uint64_t) { return std::nullopt; }, std::nullopt,
                           std::uint64_t{0});
    }

    static OpenSetEnum from_balls(std::size_t dim, std::vector<OpenBall> balls,
                                  std::optional<IntervalBox> bound = std::nullopt) {
        for (const auto& b : balls)
            if (b.dim() != dim) throw DimensionMismatch("from_balls");
        auto data = std::make_shared<std::vector<OpenBall>>(std::move(balls));
        std::uint64_t size = data->size();
        if (!bound && !data->empty()) {
            IntervalBox hull = (*data)[0].bounding_box();
            for (const auto& b : *data) {
                IntervalBox bb = b.bounding_box();
                std::vector<Interval> ivs;
                for (std::size_t i = 0; i < dim; ++i) ivs.push_back(hull[i].hull(bb[i]));
                hull = IntervalBox(std::move(ivs));
            }
            bound = hull;
        }
        return OpenSetEnum(
            dim,
            [data](std::uint64_t i) -> std::optional<OpenBall> {
                if (i < data->size()) return (*data)[i];
                return std::nullopt;
            },
            std::move(bound), size);
    }

    static OpenSetEnum single_ball(const OpenBall& b) {
        return from_balls(b.dim(), {b}, b.bounding_box());
    }

    // All of R^n as growing balls around the origin.
    static OpenSetEnum whole_space(std::size_t dim) {
        return OpenSetEnum(dim, [dim](std::uint64_t i) -> std::optional<OpenBall> {
            return OpenBall(QVec(dim), Rat::pow2(static_cast<long>(i) + 1));
        });
    }

    // Interior of a rational box, exhausted by balls at dyadic grid centers.
    static OpenSetEnum open_box(const IntervalBox& box);

    std::size_t dim() const { return dim_; }
    const std::optional<IntervalBox>& bound() const { return bound_; }
    const std::optional<std::uint64_t>& finite_size() const { return finite_size_; }

    std::optional<OpenBall> ball_at(std::uint64_t i) const {
        if (finite_size_ && i >= *finite_size_) return std::nullopt;
        {
            std::lock_guard<std::mutex> lock(cache_->mu);
            if (i < cache_->items.size()) return cache_->items[i];
        }
        // Fill sequentially outside contention on the already-known part.
        std::lock_guard<std::mutex> lock(cache_->mu);
        while (cache_->items.size() <= i) cache_->items.push_back(gen_(cache_->items.size()));
        return cache_->items[i];
    }

    // Non-skip balls among the first `count` generator indices, with indices.
    std::vector<std::pair<std::uint64_t, OpenBall>> prefix(int count) const {
        std::vector<std::pair<std::uint64_t, OpenBall>> out;
        std::uint64_t limit = static_cast<std::uint64_t>(count);
        if (finite_size_ && *finite_size_ < limit) limit = *finite_size_;
        for (std::uint64_t i = 0; i < limit; ++i)
            if (auto b = ball_at(i)) out.emplace_back(i, *b);
        return out;
    }

private:
    struct Cache {
        std::mutex mu;
        std::vector<std::optional<OpenBall>> items;
    };

    std::size_t dim_;
    Generator gen_;
    std::optional<IntervalBox> bound_;
    std::optional<std::uint64_t> finite_size_;
    std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

// Yes iff some scanned prefix ball strictly contains x (exact check).
enum class Verdict { Yes, NotYet };

inline Verdict member(const OpenSetEnum& u, const QVec& x, const Budget& budget) {
    if (x.dim() != u.dim()) throw DimensionMismatch("member");
    std::uint64_t limit = static_cast<std::uint64_t>(budget.max_prefix);
    if (u.finite_size() && *u.finite_size() < limit) limit = *u.finite_size();
    for (std::uint64_t i = 0; i < limit; ++i) {
        auto b = u.ball_at(i);
        if (b && b->contains(x)) return Verdict::Yes;
    }
    return Verdict::NotYet;
}

namespace detail {

// Dyadic cell `cell` (0 <= cell < 2^(depth*dim)) of `box` split 2^depth per axis.
inline IntervalBox dyadic_cell(const IntervalBox& box, int depth, std::uint64_t cell) {
    std::size_t n = box.dim();
    std::vector<Interval> ivs;
    ivs.reserve(n);
    std::uint64_t parts = std::uint64_t{1} << depth;
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t j = cell % parts;
        cell /= parts;
        Rat w = box[i].width() / Rat(static_cast<long>(parts));
        Rat lo = box[i].lo() + w * Rat(static_cast<long>(j));
        ivs.emplace_back(lo, lo + w);
    }
    return IntervalBox(std::move(ivs));
}

// Number of cells at `depth` in `dim` dimensions, saturating.
inline std::uint64_t cells_at_depth(int depth, std::size_t dim) {
    int bits = depth * static_cast<int>(dim);
    if (bits >= 62) return std::uint64_t{1} << 62;
    return std::uint64_t{1} << bits;
}

// Decodes a flat index into (depth, cell) pairs enumerated depth by depth.
inline std::optional<std::pair<int, std::uint64_t>> unrank_depth_cell(std::uint64_t m,
                                                                      std::size_t dim,
                                                                      int max_depth = 62) {
    for (int d = 0; d <= max_depth; ++d) {
        std::uint64_t c = cells_at_depth(d, dim);
        if (m < c) return std::make_pair(d, m);
        m -= c;
    }
    return std::nullopt;
}

// Largest ball at the cell midpoint certified inside every ball of `walls`:
// radius = min margin to the walls, verified exactly afterwards.
inline std::optional<OpenBall> margin_ball(const QVec& center,
                                           const std::vector<OpenBall>& walls) {
    Rat rad(0);
    bool first = true;
    for (const auto& w : walls) {
        Rat m = w.radius - sqrt_upper(dist_sq(center, w.center), 40);
        if (first || m < rad) rad = m;
        first = false;
    }
    if (rad.sign() <= 0) return std::nullopt;
    rad *= Rat(63, 64); // strict margin even when distances are exact
    ClosedBall cb(center, rad);
    for (const auto& w : walls)
        if (!closed_ball_in_open_ball(cb, w)) return std::nullopt;
    return OpenBall(center, rad);
}

} // namespace detail

inline OpenSetEnum OpenSetEnum::open_box(const IntervalBox& box) {
    std::size_t n = box.dim();
    return OpenSetEnum(
        n,
        [box, n](std::uint64_t idx) -> std::optional<OpenBall> {
            auto dc = detail::unrank_depth_cell(idx, n);
            if (!dc) return std::nullopt;
            IntervalBox cell = detail::dyadic_cell(box, dc->first, dc->second);
            QVec center = cell.mid();
            // Euclidean radius = min axis margin keeps the ball in the box.
            Rat rad = box[0].hi() - box[0].lo();
            for (std::size_t i = 0; i < n; ++i) {
                rad = min(rad, center[i] - box[i].lo());
                rad = min(rad, box[i].hi() - center[i]);
            }
            if (rad.sign() <= 0) return std::nullopt;
            // skip deep-interior cells: shallower cells already emitted a
            // larger ball around the same region
            Rat side(0);
            for (std::size_t i = 0; i < n; ++i) side = max(side, cell[i].width());
            if (rad > side * Rat(8)) return std::nullopt;
            return OpenBall(center, rad);
        },
        box);
}

// Union of a finite family, interleaved round-robin: prefix N*k sees the first
// k indices of every input.
inline OpenSetEnum union_countable(const std::vector<OpenSetEnum>& sets) {
    if (sets.empty()) return OpenSetEnum::empty(1);
    std::size_t dim = sets[0].dim();
    for (const auto& s : sets)
        if (s.dim() != dim) throw DimensionMismatch("union_countable");
    std::optional<IntervalBox> bound;
    bool all_bounded = true, all_finite = true;
    std::uint64_t max_size = 0;
    for (const auto& s : sets) {
        if (!s.bound()) all_bounded = false;
        if (!s.finite_size()) all_finite = false;
        else if (*s.finite_size() > max_size) max_size = *s.finite_size();
    }
    if (all_bounded) {
        std::vector<Interval> hull;
        for (std::size_t i = 0; i < dim; ++i) hull.push_back((*sets[0].bound())[i]);
        for (const auto& s : sets)
            for (std::size_t i = 0; i < dim; ++i) hull[i] = hull[i].hull((*s.bound())[i]);
        bound = IntervalBox(std::move(hull));
    }
    auto inputs = std::make_shared<std::vector<OpenSetEnum>>(sets);
    std::optional<std::uint64_t> size;
    if (all_finite) size = max_size * inputs->size();
    return OpenSetEnum(
        dim,
        [inputs](std::uint64_t i) -> std::optional<OpenBall> {
            std::size_t k = inputs->size();
            return (*inputs)[i % k].ball_at(i / k);
        },
        std::move(bound), size);
}

// U ∩ V: per ball pair, balls at dyadic grid centers with full-margin radii,
// exactly certified inside both input balls. Finite inputs get a fair
// round-robin over pairs; otherwise pairs are dovetailed.
inline OpenSetEnum intersect(const OpenSetEnum& u, const OpenSetEnum& v) {
    if (u.dim() != v.dim()) throw DimensionMismatch("intersect");
    std::size_t n = u.dim();
    std::optional<IntervalBox> bound;
    if (u.bound() && v.bound()) {
        auto meet = u.bound()->intersect(*v.bound());
        if (!meet) return OpenSetEnum::empty(n);
        bound = *meet;
    }
    OpenSetEnum uu = u, vv = v;
    std::optional<std::uint64_t> pair_count;
    if (uu.finite_size() && vv.finite_size()) {
        std::uint64_t p = *uu.finite_size() * *vv.finite_size();
        if (p == 0) return OpenSetEnum::empty(n);
        pair_count = p;
    }
    auto emit = [uu, vv, n](std::uint64_t iu, std::uint64_t iv,
                            std::uint64_t inner) -> std::optional<OpenBall> {
        auto bu = uu.ball_at(iu);
        auto bv = vv.ball_at(iv);
        if (!bu || !bv) return std::nullopt;
        auto meet = bu->bounding_box().intersect(bv->bounding_box());
        if (!meet) return std::nullopt;
        auto dc = detail::unrank_depth_cell(inner, n);
        if (!dc) return std::nullopt;
        QVec center = detail::dyadic_cell(*meet, dc->first, dc->second).mid();
        return detail::margin_ball(center, {*bu, *bv});
    };
    if (pair_count) {
        std::uint64_t p = *pair_count, us = *uu.finite_size();
        return OpenSetEnum(
            n,
            [emit, p, us](std::uint64_t idx) -> std::optional<OpenBall> {
                std::uint64_t pair = idx % p, inner = idx / p;
                return emit(pair % us, pair / us, inner);
            },
            bound);
    }
    return OpenSetEnum(
        n,
        [emit](std::uint64_t idx) -> std::optional<OpenBall> {
            auto [pair_idx, inner] = cantor_unpair(idx);
            auto [iu, iv] = cantor_unpair(pair_idx);
            return emit(iu, iv, inner);
        },
        bound);
}

} // namespace openmap

#endif
