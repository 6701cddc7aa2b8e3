#include <catch2/catch.hpp>

#include "openmap/enumeration.hpp"
#include "support/random_rat.hpp"
#include "support/sets.hpp"

using namespace openmap;
using namespace openmap::testing;

TEST_CASE("cantor pairing round-trips") {
    for (std::uint64_t z = 0; z < 5000; ++z) {
        auto [a, b] = cantor_unpair(z);
        CHECK(cantor_pair(a, b) == z);
    }
}

TEST_CASE("member on simple sets") {
    Budget budget;
    OpenSetEnum u01 = interval_set(Rat(0), Rat(1));
    CHECK(member(u01, QVec{Rat(1, 2)}, budget) == Verdict::Yes);
    CHECK(member(u01, QVec{Rat(1)}, budget) == Verdict::NotYet); // boundary
    CHECK(member(OpenSetEnum::empty(1), QVec{Rat(0)}, budget) == Verdict::NotYet);
}

TEST_CASE("union of intervals") {
    OpenSetEnum u = union_countable({interval_set(Rat(0), Rat(1)), interval_set(Rat(1), Rat(2))});
    Budget budget;
    CHECK(member(u, QVec{Rat(1, 2)}, budget) == Verdict::Yes);
    CHECK(member(u, QVec{Rat(3, 2)}, budget) == Verdict::Yes);
    CHECK(member(u, QVec{Rat(1)}, budget) == Verdict::NotYet);
    CHECK(member(u, QVec{Rat(3)}, budget) == Verdict::NotYet);

    // empty union is the empty enumeration
    OpenSetEnum none = union_countable({});
    CHECK(member(none, QVec{Rat(0)}, budget) == Verdict::NotYet);

    // prefix of length 2 contains both balls of a two-set union
    OpenSetEnum pair = union_countable({OpenSetEnum::single_ball(ball2(Rat(0), Rat(0), Rat(1))),
                                        OpenSetEnum::single_ball(ball2(Rat(0), Rat(0), Rat(2)))});
    auto pre = pair.prefix(2);
    REQUIRE(pre.size() == 2);
    CHECK(pre[0].second.radius == Rat(1));
    CHECK(pre[1].second.radius == Rat(2));
}

TEST_CASE("prefix stability") {
    OpenSetEnum u = intersect(interval_set(Rat(0), Rat(2)), interval_set(Rat(1), Rat(3)));
    auto a = u.prefix(64);
    OpenSetEnum v = intersect(interval_set(Rat(0), Rat(2)), interval_set(Rat(1), Rat(3)));
    auto b = v.prefix(200);
    REQUIRE(a.size() <= b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].first == b[i].first);
        CHECK(a[i].second == b[i].second);
    }
}

TEST_CASE("intersect: (0,2) with (1,3) fills (1,2)") {
    OpenSetEnum u = intersect(interval_set(Rat(0), Rat(2)), interval_set(Rat(1), Rat(3)));
    Budget big(4096, 8, 30);
    // all emitted balls inside (1,2)
    for (auto& [i, b] : u.prefix(big.max_prefix)) {
        (void)i;
        CHECK(b.center[0] - b.radius >= Rat(1));
        CHECK(b.center[0] + b.radius <= Rat(2));
    }
    // representative interior points get covered
    for (long k = 1; k < 16; ++k) {
        QVec p{Rat(1) + Rat(k, 16)};
        if (p[0] == Rat(2)) continue;
        CHECK(member(u, p, big) == Verdict::Yes);
    }
}

TEST_CASE("intersect with empty and disjoint sets") {
    Budget budget(2048, 8, 30);
    OpenSetEnum u = interval_set(Rat(0), Rat(1));
    OpenSetEnum v = intersect(u, OpenSetEnum::empty(1));
    CHECK(v.prefix(budget.max_prefix).empty());

    OpenSetEnum d = intersect(OpenSetEnum::single_ball(ball2(Rat(0), Rat(0), Rat(1))),
                              OpenSetEnum::single_ball(ball2(Rat(3), Rat(0), Rat(1))));
    CHECK(d.prefix(budget.max_prefix).empty());
}

TEST_CASE("union and intersect extensionality on random inputs") {
    std::mt19937_64 rng(51);
    Budget big(6000, 8, 30);
    for (int rep = 0; rep < 4; ++rep) {
        std::vector<OpenBall> from, to;
        for (int i = 0; i < 3; ++i) {
            from.push_back(ball2(random_rat(rng, 4, 4), random_rat(rng, 4, 4),
                                 Rat(1) + random_rat(rng, 4, 4).abs()));
            to.push_back(ball2(random_rat(rng, 4, 4), random_rat(rng, 4, 4),
                               Rat(1) + random_rat(rng, 4, 4).abs()));
        }
        OpenSetEnum a = OpenSetEnum::from_balls(2, from);
        OpenSetEnum b = OpenSetEnum::from_balls(2, to);
        OpenSetEnum uni = union_countable({a, b});
        OpenSetEnum meet = intersect(a, b);
        int covered_checks = 0;
        for (int pt = 0; pt < 250; ++pt) {
            QVec p = random_vec(rng, 2, 8, 8);
            bool in_a = false, in_b = false;
            for (auto& ball : from) in_a = in_a || ball.contains(p);
            for (auto& ball : to) in_b = in_b || ball.contains(p);
            // soundness both ways for the union (exact)
            CHECK((member(uni, p, big) == Verdict::Yes) == (in_a || in_b));
            // intersect: Yes implies membership; conversely interior points
            // with visible margin must be found at this budget
            bool got = member(meet, p, big) == Verdict::Yes;
            if (got) {
                CHECK(in_a);
                CHECK(in_b);
            }
            if (in_a && in_b) {
                Rat margin(1, 2);
                bool deep_a = false, deep_b = false;
                for (auto& ball : from)
                    deep_a = deep_a || dist_sq(p, ball.center) <
                                           (ball.radius - margin) * (ball.radius - margin);
                for (auto& ball : to)
                    deep_b = deep_b || dist_sq(p, ball.center) <
                                           (ball.radius - margin) * (ball.radius - margin);
                if (deep_a && deep_b) {
                    CHECK(got);
                    ++covered_checks;
                }
            }
        }
        (void)covered_checks;
    }
}

TEST_CASE("open_box exhausts the interior") {
    IntervalBox box({Interval(Rat(0), Rat(1)), Interval(Rat(0), Rat(1))});
    OpenSetEnum u = OpenSetEnum::open_box(box);
    Budget big(5000, 8, 30);
    CHECK(member(u, QVec{Rat(1, 2), Rat(1, 2)}, big) == Verdict::Yes);
    CHECK(member(u, QVec{Rat(1, 16), Rat(15, 16)}, big) == Verdict::Yes);
    CHECK(member(u, QVec{Rat(0), Rat(1, 2)}, big) == Verdict::NotYet); // boundary
    for (auto& [i, b] : u.prefix(big.max_prefix)) {
        (void)i;
        for (int c = 0; c < 2; ++c) {
            CHECK(b.center[c] - b.radius >= Rat(0));
            CHECK(b.center[c] + b.radius <= Rat(1));
        }
    }
}
