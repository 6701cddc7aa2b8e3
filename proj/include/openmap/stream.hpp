#ifndef OPENMAP_STREAM_HPP
#define OPENMAP_STREAM_HPP

#include <functional>
#include <memory>
#include <utility>

#include "openmap/errors.hpp"
#include "openmap/rational.hpp"
#include "openmap/vec.hpp"

namespace openmap {

// A rho-name: approximant(k) is a rational vector within 2^-k of the
// represented point (Euclidean, strict). Deterministic.
class RealStream {
public:
    using Fn = std::function<QVec(int)>;

    RealStream() : dim_(1), fn_([](int) { return QVec{Rat(0)}; }) {}
    RealStream(std::size_t dim, Fn fn) : dim_(dim), fn_(std::move(fn)) {}

    // Constant stream of an exactly known rational point.
    static RealStream exact(const QVec& v) {
        return RealStream(v.dim(), [v](int) { return v; });
    }

    // Canonical truncation stream: coordinatewise floor to k+2 fractional
    // bits. Two points in the same 2^-(k+2) grid cell share approximants up
    // to index k, which is what bound_modulus_over_box exploits.
    static RealStream dyadic_truncation(const QVec& v) {
        return RealStream(v.dim(), [v](int k) {
            QVec q(v.dim());
            for (std::size_t i = 0; i < v.dim(); ++i) q[i] = v[i].floor_dyadic(k + 2);
            return q;
        });
    }

    std::size_t dim() const { return dim_; }
    QVec approximant(int k) const {
        if (k < 0) k = 0;
        return fn_(k);
    }

    // Wrapper that records the highest index read.
    RealStream with_watermark(std::shared_ptr<int> high_water) const {
        Fn inner = fn_;
        return RealStream(dim_, [inner, high_water](int k) {
            if (k > *high_water) *high_water = k;
            return inner(k);
        });
    }

private:
    std::size_t dim_;
    Fn fn_;
};

// Upper rational approximations of a real number: value(t) is nonincreasing
// in t and converges to the represented number from above.
using UpperRatStream = std::function<Rat(int)>;

} // namespace openmap

#endif
