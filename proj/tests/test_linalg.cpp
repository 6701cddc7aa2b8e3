#include <catch2/catch.hpp>

#include "openmap/linalg.hpp"
#include "support/random_rat.hpp"

using namespace openmap;

namespace {

IntervalMatrix point_matrix(std::vector<std::vector<Rat>> rows) {
    IntervalMatrix m(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) m.at(i, j) = Interval(rows[i][j]);
    return m;
}

// Independent oracle: smallest eigenvalue of A^T A by bisection on sign
// changes of the characteristic polynomial, for 2x2 and 3x3 point matrices.
Rat sigma_min_oracle_sq(const IntervalMatrix& a) {
    std::size_t n = a.rows();
    IntervalMatrix b = mat_mul(transpose(a), a);
    auto cp = charpoly(b);
    std::vector<Rat> cs;
    for (auto& iv : cp) cs.push_back(iv.lo());
    UPoly<Rat> p{std::move(cs)};
    UPoly<Rat> sf = squarefree_part(p);
    auto chain = sturm_chain(sf);
    Rat trace(0);
    for (std::size_t i = 0; i < n; ++i) trace += b.at(i, i).lo();
    Rat lo(-1), hi = trace + Rat(1);
    for (int i = 0; i < 80; ++i) {
        Rat mid = (lo + hi) / Rat(2);
        if (count_roots_halfopen(chain, Rat(-1), mid) == 0) lo = mid;
        else hi = mid;
    }
    return lo; // lambda_min in (lo, hi]
}

} // namespace

TEST_CASE("sigma_min_lower on the spec matrices") {
    Rat tol = Rat(1, 1 << 12);

    Rat c1 = sigma_min_lower(IntervalMatrix::identity(2), tol);
    CHECK(c1 > Rat(1) - tol);
    CHECK(c1 <= Rat(1));

    Rat c2 = sigma_min_lower(point_matrix({{Rat(2), Rat(0)}, {Rat(0), Rat(1, 2)}}), tol);
    CHECK(c2 > Rat(1, 2) - tol);
    CHECK(c2 <= Rat(1, 2));

    // [[1,1],[0,1]]: sigma_min = (sqrt5 - 1)/2; oracle-derived bracket
    IntervalMatrix sh = point_matrix({{Rat(1), Rat(1)}, {Rat(0), Rat(1)}});
    Rat c3 = sigma_min_lower(sh, tol);
    Rat oracle = sqrt_lower(sigma_min_oracle_sq(sh), 60);
    CHECK(c3 <= oracle + tol);
    CHECK(c3 > oracle - Rat(2) * tol);

    CHECK_THROWS_AS(sigma_min_lower(point_matrix({{Rat(1), Rat(1)}, {Rat(1), Rat(1)}}), tol),
                    NotCertified);
}

TEST_CASE("sigma_min_lower soundness on random matrices") {
    std::mt19937_64 rng(41);
    Rat tol = Rat(1, 1 << 10);
    int certified = 0;
    for (int rep = 0; rep < 60; ++rep) {
        std::size_t n = (rep % 2 == 0) ? 2 : 3;
        IntervalMatrix a(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                a.at(i, j) = Interval(testing::random_rat(rng, 8, 8));
        try {
            Rat c = sigma_min_lower(a, tol);
            ++certified;
            CHECK(c.sign() > 0);
            CHECK(c * c <= sigma_min_oracle_sq(a) + tol); // c <= sigma_min
        } catch (const NotCertified&) {
            // singular draw
        }
    }
    CHECK(certified > 40);
}

TEST_CASE("sigma_min_lower with interval entries") {
    IntervalMatrix a = IntervalMatrix::identity(2);
    Rat eps = Rat(1, 1024);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            const Interval& e = a.at(i, j);
            a.at(i, j) = Interval(e.lo() - eps, e.hi() + eps);
        }
    Rat c = sigma_min_lower(a, Rat(1, 1 << 10));
    CHECK(c.sign() > 0);
    CHECK(c < Rat(1)); // must account for the perturbation
}

TEST_CASE("matrix_norm_sq_sum") {
    CHECK(matrix_norm_sq_sum(point_matrix({{Rat(3), Rat(4)}})) == Rat(5));
    CHECK(matrix_norm_sq_sum(point_matrix({{Rat(0), Rat(0)}, {Rat(0), Rat(0)}})) == Rat(0));
    Rat r = matrix_norm_sq_sum(IntervalMatrix::identity(2));
    CHECK(r * r >= Rat(2));
    CHECK(r * r <= Rat(2) * (Rat(1) + Rat(1, 1 << 20)));
}

TEST_CASE("rank_certified_lower") {
    IntervalMatrix tight = IntervalMatrix::identity(2);
    CHECK(rank_certified_lower(tight) == 2);
    CHECK(rank_certified_lower(IntervalMatrix(3, 3)) == 0);

    IntervalMatrix d(2, 2);
    d.at(0, 0) = Interval(Rat(1));
    d.at(1, 1) = Interval(-Rat(1, 1024), Rat(1, 1024));
    CHECK(rank_certified_lower(d) == 1);
}

TEST_CASE("interval_inverse via Cramer") {
    IntervalMatrix a = point_matrix({{Rat(2), Rat(1)}, {Rat(1), Rat(1)}});
    IntervalMatrix inv = interval_inverse(a);
    // exact inverse [[1,-1],[-1,2]]
    CHECK(inv.at(0, 0).contains(Rat(1)));
    CHECK(inv.at(0, 1).contains(Rat(-1)));
    CHECK(inv.at(1, 0).contains(Rat(-1)));
    CHECK(inv.at(1, 1).contains(Rat(2)));
    CHECK_THROWS_AS(interval_inverse(point_matrix({{Rat(1), Rat(1)}, {Rat(1), Rat(1)}})),
                    NotCertified);
}
