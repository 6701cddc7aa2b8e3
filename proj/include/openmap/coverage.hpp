#ifndef OPENMAP_COVERAGE_HPP
#define OPENMAP_COVERAGE_HPP

#include <cstdint>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "openmap/enumeration.hpp"
#include "openmap/geom.hpp"
#include "openmap/stream.hpp"

namespace openmap {

// Finite witness for "closed ball inside the enumerated open set": the boxes
// tile the queried ball and each one sits strictly inside its covering ball.
struct CoverageCertificate {
    ClosedBall query;
    std::vector<std::pair<IntervalBox, std::uint64_t>> entries; // (box, ball index)
};

struct CoverageVerdict {
    std::optional<CoverageCertificate> yes; // nullopt = NotYet
    bool is_yes() const { return yes.has_value(); }
};

namespace detail {

inline bool cover_rec(const ClosedBall& query, const IntervalBox& box, int depth_left,
                      const std::vector<std::pair<std::uint64_t, OpenBall>>& candidates,
                      CoverageCertificate& cert) {
    if (closed_box_disjoint_closed_ball(box, query)) return true;
    for (const auto& [idx, ball] : candidates) {
        if (closed_box_in_open_ball(box, ball)) {
            cert.entries.emplace_back(box, idx);
            return true;
        }
    }
    if (depth_left == 0) return false;
    std::size_t n = box.dim();
    std::uint64_t children = std::uint64_t{1} << n;
    for (std::uint64_t c = 0; c < children; ++c) {
        IntervalBox child = dyadic_cell(box, 1, c);
        std::vector<std::pair<std::uint64_t, OpenBall>> sub;
        for (const auto& cand : candidates)
            if (closed_box_meets_open_ball(child, cand.second)) sub.push_back(cand);
        if (!cover_rec(query, child, depth_left - 1, sub, cert)) return false;
    }
    return true;
}

} // namespace detail

// Semidecision of "B̄ ⊆ U". Yes answers carry an exactly re-checkable
// certificate; soundness is unconditional, completeness holds in the limit of
// growing budgets for strict containment.
inline CoverageVerdict covers_closed_ball(const OpenSetEnum& u, const ClosedBall& b,
                                          const Budget& budget) {
    if (u.dim() != b.dim()) throw DimensionMismatch("covers_closed_ball");
    auto candidates = u.prefix(budget.max_prefix);
    CoverageCertificate cert{b, {}};
    if (detail::cover_rec(b, b.bounding_box(), budget.max_depth, candidates, cert))
        return CoverageVerdict{std::move(cert)};
    return CoverageVerdict{std::nullopt};
}

// Independent re-verification: (1) every certificate box is strictly inside
// the ball it names, (2) the boxes plus the parts disjoint from the query
// cover the query's bounding box. Shares only the exact geometry predicates
// with the producer.
inline bool verify_coverage_certificate(const OpenSetEnum& u, const CoverageCertificate& cert) {
    for (const auto& [box, idx] : cert.entries) {
        auto ball = u.ball_at(idx);
        if (!ball) return false;
        if (!closed_box_in_open_ball(box, *ball)) return false;
    }
    // Depth needed so every recursion cell is comparable with cert boxes.
    IntervalBox root = cert.query.bounding_box();
    Rat root_w = root.max_width();
    int depth = 1;
    for (const auto& [box, idx] : cert.entries) {
        (void)idx;
        Rat w = box.max_width();
        int d = 0;
        Rat cur = root_w;
        while (cur > w && d < 62) {
            cur = cur / Rat(2);
            ++d;
        }
        if (d + 1 > depth) depth = d + 1;
    }
    std::function<bool(const IntervalBox&, int)> check = [&](const IntervalBox& box,
                                                             int depth_left) {
        if (closed_box_disjoint_closed_ball(box, cert.query)) return true;
        for (const auto& [cb, idx] : cert.entries) {
            (void)idx;
            if (cb.contains(box)) return true;
        }
        if (depth_left == 0) return false;
        std::uint64_t children = std::uint64_t{1} << box.dim();
        for (std::uint64_t c = 0; c < children; ++c)
            if (!check(detail::dyadic_cell(box, 1, c), depth_left - 1)) return false;
        return true;
    };
    return check(root, depth);
}

// Result of the inner-radius search of "G": an exponent k with certificate
// that B̄(x̂, 2^-k + 2^-k-2) ⊆ U for the precision-(k+2) approximant x̂, which
// implies B̄(x, 2^-k) ⊆ U for the represented point x.
struct InnerRadius {
    int k = 0;
    QVec xhat;
    CoverageCertificate cert;
};

inline std::optional<InnerRadius> find_inner_radius(const OpenSetEnum& u, const RealStream& x,
                                                    const Budget& budget) {
    if (u.dim() != x.dim()) throw DimensionMismatch("find_inner_radius");
    for (int k = 0; k <= budget.max_precision; ++k) {
        QVec xhat = x.approximant(k + 2);
        if (member(u, xhat, budget) != Verdict::Yes) continue;
        ClosedBall query(xhat, Rat::pow2(-k) + Rat::pow2(-k - 2));
        CoverageVerdict v = covers_closed_ball(u, query, budget);
        if (v.is_yes()) return InnerRadius{k, std::move(xhat), std::move(*v.yes)};
    }
    return std::nullopt;
}

} // namespace openmap

#endif
