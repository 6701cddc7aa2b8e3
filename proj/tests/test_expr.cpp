#include <catch2/catch.hpp>

#include "openmap/expr.hpp"
#include "support/corpus.hpp"
#include "support/random_rat.hpp"

using namespace openmap;
using namespace openmap::testing;

TEST_CASE("eval_point exact") {
    CHECK(eval_point(cube(), QVec{Rat(2)}) == QVec{Rat(8)});
    // the paper's 3->2 example vanishes at the origin
    CHECK(eval_point(cubes_plus_square(), QVec{Rat(0), Rat(0), Rat(0)}) ==
          QVec{Rat(0), Rat(0)});
    FuncSystem inv(1, {Expr::constant(Rat(1)) / Expr::var(0)});
    CHECK_THROWS_AS(eval_point(inv, QVec{Rat(0)}), DivisionByZero);
    CHECK(eval_point(inv, QVec{Rat(2)}) == QVec{Rat(1, 2)});
}

TEST_CASE("eval_interval enclosures") {
    FuncSystem sq(1, {Expr::pow(Expr::var(0), 2)});
    IntervalBox out = eval_interval(sq, IntervalBox({Interval(Rat(1), Rat(2))}));
    CHECK(out[0] == Interval(Rat(1), Rat(4)));

    IntervalBox diff = eval_interval(
        FuncSystem(2, {Expr::var(0) - Expr::var(1)}),
        IntervalBox({Interval(Rat(0), Rat(1)), Interval(Rat(0), Rat(1))}));
    CHECK(diff[0] == Interval(Rat(-1), Rat(1)));

    IntervalBox unit3({Interval(Rat(0), Rat(1)), Interval(Rat(0), Rat(1)),
                       Interval(Rat(0), Rat(1))});
    IntervalBox enc = eval_interval(cubes_plus_square(), unit3);
    CHECK(Interval(Rat(0), Rat(2)).contains(enc[0]));
    CHECK(Interval(Rat(0), Rat(2)).contains(enc[1]));

    FuncSystem inv(1, {Expr::constant(Rat(1)) / Expr::var(0)});
    CHECK_THROWS_AS(eval_interval(inv, IntervalBox({Interval(Rat(-1), Rat(1))})), DomainBreach);
}

TEST_CASE("symbolic jacobians") {
    FuncSystem d = differentiate(cube());
    CHECK(d.component(0).eval(QVec{Rat(3)}) == Rat(27)); // 3x^2

    // F(x,y) = (x + y^3, y - x^3) -> [[1, 3y^2], [-3x^2, 1]]
    FuncSystem js = differentiate(shear());
    QVec p{Rat(1, 2), Rat(1, 3)};
    CHECK(js.component(0).eval(p) == Rat(1));
    CHECK(js.component(1).eval(p) == Rat(3) * Rat(1, 9));
    CHECK(js.component(2).eval(p) == Rat(-3) * Rat(1, 4));
    CHECK(js.component(3).eval(p) == Rat(1));

    // F = (x^3 + z^2, y^3 + z^2) -> [[3x^2, 0, 2z], [0, 3y^2, 2z]]
    FuncSystem jc = differentiate(cubes_plus_square());
    QVec q{Rat(1), Rat(2), Rat(3)};
    CHECK(jc.component(0).eval(q) == Rat(3));
    CHECK(jc.component(1).eval(q) == Rat(0));
    CHECK(jc.component(2).eval(q) == Rat(6));
    CHECK(jc.component(3).eval(q) == Rat(0));
    CHECK(jc.component(4).eval(q) == Rat(12));
    CHECK(jc.component(5).eval(q) == Rat(6));
}

TEST_CASE("inclusion monotonicity") {
    std::mt19937_64 rng(31);
    std::vector<FuncSystem> corpus{cube(), double_x(), shear(), planar_square(),
                                   cubes_plus_square(), rotation35(), sum_xy()};
    for (const auto& f : corpus) {
        for (int rep = 0; rep < 30; ++rep) {
            IntervalBox outer = testing::random_box(rng, f.input_dim());
            // inner box: shrink each interval toward its midpoint
            std::vector<Interval> inner_ivs;
            for (std::size_t i = 0; i < outer.dim(); ++i) {
                Rat m = outer[i].mid();
                inner_ivs.emplace_back((outer[i].lo() + m) / Rat(2), (m + outer[i].hi()) / Rat(2));
            }
            IntervalBox inner(std::move(inner_ivs));
            IntervalBox yo = eval_interval(f, outer);
            IntervalBox yi = eval_interval(f, inner);
            for (std::size_t j = 0; j < f.output_dim(); ++j) CHECK(yo[j].contains(yi[j]));
        }
    }
}

TEST_CASE("point consistency") {
    std::mt19937_64 rng(32);
    std::vector<FuncSystem> corpus{cube(), double_x(), shear(), planar_square(),
                                   cubes_plus_square(), rotation35(), sum_xy()};
    for (const auto& f : corpus) {
        for (int rep = 0; rep < 150; ++rep) {
            QVec x = testing::random_vec(rng, f.input_dim());
            QVec y = eval_point(f, x);
            IntervalBox enc = eval_interval(f, IntervalBox::degenerate(x));
            for (std::size_t j = 0; j < f.output_dim(); ++j) CHECK(enc[j].contains(y[j]));
            // with rounding the enclosure stays sound
            IntervalBox rounded = eval_interval(f, IntervalBox::degenerate(x), 20);
            for (std::size_t j = 0; j < f.output_dim(); ++j) CHECK(rounded[j].contains(y[j]));
        }
    }
}

TEST_CASE("jacobian matches finite differences") {
    std::mt19937_64 rng(33);
    std::vector<FuncSystem> corpus{cube(), shear(), planar_square(), cubes_plus_square()};
    for (const auto& f : corpus) {
        FuncSystem jac = differentiate(f);
        for (int rep = 0; rep < 10; ++rep) {
            QVec x = testing::random_vec(rng, f.input_dim(), 4, 8);
            for (std::size_t j = 0; j < f.output_dim(); ++j)
                for (std::size_t i = 0; i < f.input_dim(); ++i) {
                    Rat sym = jac.component(j * f.input_dim() + i).eval(x);
                    std::vector<Rat> errs;
                    for (int hbits : {10, 12, 14}) {
                        Rat h = Rat::pow2(-hbits);
                        QVec xp = x, xm = x;
                        xp[i] += h;
                        xm[i] -= h;
                        Rat fd = (f.component(j).eval(xp) - f.component(j).eval(xm)) /
                                 (Rat(2) * h);
                        errs.push_back((fd - sym).abs());
                    }
                    // error <= C*h with C calibrated at the coarsest step
                    Rat c = errs[0] / Rat::pow2(-10) + Rat(1);
                    CHECK(errs[1] <= c * Rat::pow2(-12));
                    CHECK(errs[2] <= c * Rat::pow2(-14));
                    // at least linear decay per two-bit step
                    if (errs[0] > Rat(1, 1000000)) {
                        CHECK(errs[1] * Rat(3) <= errs[0]);
                        CHECK(errs[2] * Rat(3) <= errs[1]);
                    }
                }
        }
    }
}

TEST_CASE("restrict_inputs freezes coordinates") {
    FuncSystem f = cubes_plus_square();
    QVec anchor{Rat(1, 2), Rat(1, 3), Rat(1, 5)};
    FuncSystem g = restrict_inputs(f, {0, 1}, anchor);
    CHECK(g.input_dim() == 2);
    QVec w{Rat(2), Rat(3)};
    QVec full{Rat(2), Rat(3), Rat(1, 5)};
    CHECK(eval_point(g, w) == eval_point(f, full));
}
