// Frozen values come from tests/oracles/oracle_dyadic.py.

#include <cmath>
#include <limits>

#include "doctest.h"
#include "homog/dyadic.hpp"
#include "homog/generators.hpp"

using namespace homog;

namespace {
QuasiMetricSpace fourpoint() {
    // two tight pairs far apart: {0, 1/32} and {1/2, 17/32}
    QuasiMetricSpace X = grid1d(4, 1.0);
    auto set = [&](int i, int j, double v) {
        X.dist[i * 4 + j] = v;
        X.dist[j * 4 + i] = v;
    };
    set(0, 1, 1.0 / 32);
    set(0, 2, 0.5);
    set(0, 3, 17.0 / 32);
    set(1, 2, 15.0 / 32);
    set(1, 3, 0.5);
    set(2, 3, 1.0 / 32);
    return X;
}
} // namespace

TEST_CASE("default base ratio rounds 1/(12 A0^3) down to a power of 1/2") {
    CHECK(default_delta(1.0) == 1.0 / 16);
    CHECK(default_delta(2.0) == 1.0 / 128);
}

TEST_CASE("single point: every net is {0}, sandwich trivial") {
    QuasiMetricSpace X = grid1d(1, 1.0);
    DyadicSystem dys = build_dyadic(X);
    CHECK(dys.K_max == 0);
    REQUIRE(dys.levels[0].net.size() == 1);
    CHECK(dys.levels[0].net[0] == 0);
    CHECK(dys.levels[0].c_achieved == std::numeric_limits<double>::infinity());
    CHECK(dys.levels[0].C_achieved == 0.0);
    CHECK(verify_dyadic(dys).ok());
}

TEST_CASE("two points at distance 1, delta = 1/12: both in the level-0 net") {
    QuasiMetricSpace X = grid1d(2, 1.0);
    DyadicSystem dys = build_dyadic(X, {.delta = 1.0 / 12});
    CHECK(dys.K_max == 0);
    REQUIRE(dys.levels[0].net.size() == 2);
    REQUIRE(dys.levels[0].cubes.size() == 2);
    CHECK(dys.levels[0].cubes[0].members == std::vector<int>{0});
    CHECK(dys.levels[0].cubes[1].members == std::vector<int>{1});
    CHECK(dys.levels[0].c_achieved == 1.0);
    CHECK(dys.levels[0].C_achieved == 0.0);
    CHECK(verify_dyadic(dys).ok());
}

TEST_CASE("unit-spacing 8-point grid: level-0 net is everything") {
    QuasiMetricSpace X = grid1d(8, 1.0);
    DyadicSystem dys = build_dyadic(X);
    CHECK(dys.K_max == 0);
    CHECK(dys.levels[0].net.size() == 8);
    CHECK(verify_dyadic(dys).ok());
}

TEST_CASE("default 8-point grid: two levels, measured sandwich constants") {
    QuasiMetricSpace X = grid1d(8);  // spacing 1/8
    DyadicSystem dys = build_dyadic(X);
    CHECK(dys.delta == 1.0 / 16);
    CHECK(dys.K_max == 1);
    CHECK(dys.j0 == 1);
    CHECK(dys.levels[0].net.size() == 1);
    CHECK(dys.levels[1].net.size() == 8);
    CHECK(dys.levels[0].c_achieved == std::numeric_limits<double>::infinity());
    CHECK(dys.levels[0].C_achieved == 0.875);
    CHECK(dys.levels[1].c_achieved == 2.0);
    CHECK(dys.levels[1].C_achieved == 0.0);
    CHECK(dys.subcubes(0, 0).size() == 8);
    CHECK(verify_dyadic(dys).ok());
}

TEST_CASE("two tight pairs: three levels, pair cubes, measured constants") {
    QuasiMetricSpace X = fourpoint();
    DyadicSystem dys = build_dyadic(X);
    CHECK(dys.K_max == 2);
    CHECK(dys.levels[0].net.size() == 1);
    CHECK(dys.levels[1].net.size() == 2);
    CHECK(dys.levels[2].net.size() == 4);
    REQUIRE(dys.levels[1].cubes.size() == 2);
    CHECK(dys.levels[1].cubes[0].members == std::vector<int>{0, 1});
    CHECK(dys.levels[1].cubes[1].members == std::vector<int>{2, 3});
    CHECK(dys.levels[0].C_achieved == 0.53125);
    CHECK(dys.levels[1].c_achieved == 7.5);  // gappy space: c exceeds C here
    CHECK(dys.levels[1].C_achieved == 0.5);
    CHECK(dys.levels[2].c_achieved == 8.0);
    CHECK(verify_dyadic(dys).ok());
}

TEST_CASE("256-point default grid: uneven level-1 cubes from the tie rule") {
    QuasiMetricSpace X = grid1d(256);  // spacing 1/256
    DyadicSystem dys = build_dyadic(X);
    CHECK(dys.K_max == 2);
    REQUIRE(dys.levels[1].net.size() == 16);
    for (int a = 0; a < 16; ++a) CHECK(dys.levels[1].net[a] == 16 * a);
    // midpoint ties go to the lower-index center: first cube gets 9 points,
    // middles 16, the last one 23
    CHECK(dys.levels[1].cubes[0].members.size() == 9);
    CHECK(dys.levels[1].cubes[0].members.back() == 8);
    CHECK(dys.levels[1].cubes[1].members.size() == 16);
    CHECK(dys.levels[1].cubes[15].members.size() == 23);
    CHECK(dys.levels[1].cubes[15].members.front() == 233);
    CHECK(dys.levels[0].C_achieved == 0.99609375);
    CHECK(dys.levels[1].c_achieved == 0.5);
    CHECK(dys.levels[1].C_achieved == 0.9375);
    CHECK(dys.levels[2].c_achieved == 1.0);
    CHECK(verify_dyadic(dys).ok());
}

TEST_CASE("parameter validation") {
    QuasiMetricSpace X = grid1d(4, 1.0);
    CHECK_THROWS(build_dyadic(X, {.delta = 0.5}));  // above 1/(12 A0^3)
    CHECK_THROWS(build_dyadic(X, {.delta = 1.0 / 16, .K_max = 30}));
    DyadicSystem dys = build_dyadic(X);
    CHECK(dys.j0 == 1);
    CHECK_THROWS(build_dyadic(X, {.j0 = -3}));  // negative is not "default", it is invalid
}

TEST_CASE("descendant enumeration partitions the parent and is center-ordered") {
    QuasiMetricSpace X = fourpoint();
    DyadicSystem dys = build_dyadic(X);
    auto subs = dys.subcubes(0, 0);  // level 0+j0 = 1
    REQUIRE(subs.size() == 2);
    size_t total = 0;
    for (int s : subs) total += dys.levels[dys.dlevel(0)].cubes[s].members.size();
    CHECK(total == dys.levels[0].cubes[0].members.size());
    // deep level clamps to the tree depth
    CHECK(dys.dlevel(2) == 2);
    CHECK(dys.subcubes(2, 0) == std::vector<int>{0});
}
