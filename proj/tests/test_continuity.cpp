#include <catch2/catch.hpp>

#include "openmap/continuity.hpp"
#include "support/corpus.hpp"
#include "support/random_rat.hpp"
#include "support/sets.hpp"

using namespace openmap;
using namespace openmap::testing;

TEST_CASE("moc satisfies its exact certificate") {
    Budget budget;
    for (int k = 0; k <= 20; ++k) {
        auto ell = moc(double_x(), RealStream::exact(QVec{Rat(0)}), k, budget);
        REQUIRE(ell.has_value());
        CHECK(*ell <= k + 2); // analytically forced for f(x) = 2x
        CHECK(moc_check(double_x(), QVec{Rat(0)}, *ell, k));
    }
    // constant functions: the first candidate already certifies
    FuncSystem c(1, {Expr::constant(Rat(7))});
    auto ell = moc(c, RealStream::exact(QVec{Rat(5)}), 3, budget);
    REQUIRE(ell.has_value());
    CHECK(moc_check(c, QVec{Rat(5)}, *ell, 3));
}

TEST_CASE("moc on x^3 near 1") {
    // the derived claim behind the spec example: |(1 +- 2^-6)^3 - 1| < 2^-4
    Rat lo = (Rat(1) - Rat::pow2(-6)).pow_int(3), hi = (Rat(1) + Rat::pow2(-6)).pow_int(3);
    CHECK((Rat(1) - lo).abs() < Rat::pow2(-4));
    CHECK((hi - Rat(1)).abs() < Rat::pow2(-4));

    Budget budget;
    auto ell = moc(cube(), RealStream::exact(QVec{Rat(1)}), 4, budget);
    REQUIRE(ell.has_value());
    CHECK(moc_check(cube(), QVec{Rat(1)}, *ell, 4));
    // postcondition sampled: f[B(1, 2^-ell)] inside B(1, 2^-4)
    std::mt19937_64 rng(71);
    for (int i = 0; i < 200; ++i) {
        Rat p = random_rat_in(rng, Rat(1) - Rat::pow2(-*ell), Rat(1) + Rat::pow2(-*ell));
        CHECK((p.pow_int(3) - Rat(1)).abs() < Rat::pow2(-4));
    }
}

TEST_CASE("moc with truncation streams certifies on every call") {
    Budget budget;
    std::mt19937_64 rng(72);
    std::vector<FuncSystem> corpus{cube(), double_x(), shear(), rotation35()};
    for (const auto& f : corpus) {
        for (int rep = 0; rep < 10; ++rep) {
            QVec x = random_vec(rng, f.input_dim(), 2, 8);
            RealStream s = RealStream::dyadic_truncation(x);
            int k = 1 + rep % 5;
            auto ell = moc(f, s, k, budget);
            REQUIRE(ell.has_value());
            CHECK(moc_check(f, s.approximant(*ell + 2), *ell, k));
        }
    }
}

TEST_CASE("preimage of (0,1) under cube") {
    Budget budget(4096, 10, 30);
    OpenSetEnum v = interval_set(Rat(0), Rat(1));
    OpenSetEnum x = interval_set(Rat(-2), Rat(2));
    OpenSetEnum pre = preimage(cube(), v, x, budget);

    // soundness: sampled points of emitted balls map into (0,1)
    std::mt19937_64 rng(73);
    auto balls = pre.prefix(budget.max_prefix);
    REQUIRE(!balls.empty());
    for (const auto& [i, b] : balls) {
        (void)i;
        for (int rep = 0; rep < 20; ++rep) {
            QVec p = random_vec_in_ball(rng, b.center, b.radius);
            Rat y = p[0].pow_int(3);
            CHECK(y > Rat(0));
            CHECK(y < Rat(1));
        }
    }

    // exhaustion: every i/128 in (0,1) is covered within depth <= 10
    Budget scan(16384, 10, 30);
    for (long i = 1; i < 128; ++i) {
        QVec p{Rat(i, 128)};
        CHECK(member(pre, p, scan) == Verdict::Yes);
    }
}

TEST_CASE("preimage spec examples") {
    Budget budget(2048, 8, 30);
    // unit disk = preimage of (-1,1) under x^2+y^2
    FuncSystem ssq(2, {Expr::pow(Expr::var(0), 2) + Expr::pow(Expr::var(1), 2)});
    OpenSetEnum disk = preimage(ssq, interval_set(Rat(-1), Rat(1)),
                                OpenSetEnum::single_ball(ball2(Rat(0), Rat(0), Rat(2))), budget);
    auto balls = disk.prefix(budget.max_prefix);
    REQUIRE(!balls.empty());
    for (const auto& [i, b] : balls) {
        (void)i;
        CHECK(b.center.norm_sq() < Rat(1)); // center inside the unit disk
        std::mt19937_64 rng(74);
        for (int rep = 0; rep < 10; ++rep) {
            QVec p = random_vec_in_ball(rng, b.center, b.radius);
            CHECK(p.norm_sq() < Rat(1));
        }
    }
    CHECK(member(disk, QVec{Rat(1, 2), Rat(1, 2)}, Budget(8192, 8, 30)) == Verdict::Yes);

    // preimage of the empty set is empty
    OpenSetEnum none = preimage(identity(1), OpenSetEnum::empty(1),
                                interval_set(Rat(-1), Rat(1)), budget);
    CHECK(none.prefix(2048).empty());
}

TEST_CASE("eval_from_dense agrees with exact evaluation") {
    Budget budget(4096, 8, 30);
    OpenSetEnum x01 = interval_set(Rat(0), Rat(1));

    FuncSystem sq(1, {Expr::pow(Expr::var(0), 2)});
    DenseSeq dense = make_dense_dyadic(x01, sq, Budget(64, 8, 30));
    ModulusOracle oracle = make_moc_oracle(sq, budget);
    auto y = eval_from_dense(dense, oracle, RealStream::exact(QVec{Rat(1, 2)}), 8, budget);
    REQUIRE(y.has_value());
    CHECK(((*y)[0] - Rat(1, 4)).abs() < Rat::pow2(-8));

    // identity: the approximant itself qualifies
    DenseSeq dense_id = make_dense_dyadic(x01, identity(1), Budget(64, 8, 30));
    ModulusOracle oid = make_moc_oracle(identity(1), budget);
    auto z = eval_from_dense(dense_id, oid, RealStream::exact(QVec{Rat(1, 3)}), 10, budget);
    REQUIRE(z.has_value());
    CHECK(((*z)[0] - Rat(1, 3)).abs() < Rat::pow2(-10));

    // x^3 at a non-dyadic point: oracle value 8/27
    DenseSeq dense_cu = make_dense_dyadic(x01, cube(), Budget(64, 8, 30));
    ModulusOracle ocu = make_moc_oracle(cube(), budget);
    auto w = eval_from_dense(dense_cu, ocu, RealStream::dyadic_truncation(QVec{Rat(2, 3)}), 10,
                             budget);
    REQUIRE(w.has_value());
    CHECK(((*w)[0] - Rat(8, 27)).abs() < Rat::pow2(-10));
}

TEST_CASE("eval_from_dense vs eval_point on random rationals") {
    Budget budget(4096, 8, 30);
    OpenSetEnum x01 = interval_set(Rat(0), Rat(1));
    FuncSystem f = cube();
    DenseSeq dense = make_dense_dyadic(x01, f, Budget(64, 8, 30));
    ModulusOracle oracle = make_moc_oracle(f, budget);
    std::mt19937_64 rng(75);
    int hits = 0;
    for (int i = 0; i < 100; ++i) {
        QVec x{random_rat_in(rng, Rat(1, 8), Rat(7, 8))};
        auto y = eval_from_dense(dense, oracle, RealStream::exact(x), 9, budget);
        REQUIRE(y.has_value());
        CHECK(((*y)[0] - eval_point(f, x)[0]).abs() < Rat::pow2(-9));
        ++hits;
    }
    CHECK(hits == 100);
}

TEST_CASE("bound_modulus_over_box on synthetic oracles") {
    ModulusOracle plus_one;
    plus_one.kind = ModulusOracle::Kind::continuity;
    plus_one.realizer = [](const RealStream&, int k) { return std::optional<int>(k + 1); };
    plus_one.lookahead = [](int) { return 0; };
    IntervalBox box({Interval(Rat(0), Rat(1))});
    CHECK(bound_modulus_over_box(plus_one, box, 3) == 4);

    ModulusOracle zero;
    zero.kind = ModulusOracle::Kind::continuity;
    zero.realizer = [](const RealStream&, int) { return std::optional<int>(0); };
    zero.lookahead = [](int) { return 0; };
    CHECK(bound_modulus_over_box(zero, box, 5) == 0);

    ModulusOracle starving;
    starving.kind = ModulusOracle::Kind::continuity;
    starving.realizer = [](const RealStream&, int) { return std::optional<int>(); };
    starving.lookahead = [](int) { return 0; };
    CHECK_THROWS_AS(bound_modulus_over_box(starving, box, 1), BudgetExceeded);
}

TEST_CASE("bound_modulus_over_box dominates sampled realizer calls") {
    Budget budget(512, 6, 24);
    ModulusOracle oracle = make_moc_oracle(cube(), budget);
    IntervalBox box({Interval(Rat(1), Rat(2))});
    int n = bound_modulus_over_box(oracle, box, 4);
    for (int i = 0; i <= 8; ++i) {
        QVec x{Rat(1) + Rat(i, 8)};
        auto ell = oracle.realizer(RealStream::dyadic_truncation(x), 4);
        REQUIRE(ell.has_value());
        CHECK(*ell <= n);
    }
}
