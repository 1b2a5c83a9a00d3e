// Frozen values come from tests/oracles/oracle_space.py.

#include <cmath>

#include "doctest.h"
#include "homog/generators.hpp"
#include "homog/space.hpp"

using namespace homog;

TEST_CASE("two-point unit space: profile and ball measures") {
    QuasiMetricSpace X = grid1d(2, 1.0);
    CHECK(verify_space(X).ok());
    CHECK(X.d(0, 1) == 1.0);
    CHECK(quasi_triangle_constant(X) == 1.0);

    DoublingProfile prof = doubling_profile(X);
    CHECK(prof.C_mu == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(prof.omega == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(prof.worst_center == 0);
    CHECK(prof.worst_radius == doctest::Approx(1.0).epsilon(1e-12));

    CHECK(X.Vr(0, 1.0) == 1.0);   // strict ball holds only the center
    CHECK(X.Vxy(0, 1) == 1.0);
    CHECK(X.Vxy(0, 0) == 0.0);    // empty strict ball
    CHECK(X.muTotal() == 2.0);
}

TEST_CASE("eight-point unit line: doubling constant 3 at the second point") {
    QuasiMetricSpace X = grid1d(8, 1.0);
    CHECK(verify_space(X).ok());
    DoublingProfile prof = doubling_profile(X);
    CHECK(prof.C_mu == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(prof.omega == doctest::Approx(1.584962500721156).epsilon(1e-12));
    CHECK(prof.worst_center == 1);
    CHECK(prof.worst_radius == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(X.ballMeasure(3, 2.5) == 5.0);
}

TEST_CASE("grid1d default spacing is 1/n") {
    QuasiMetricSpace X = grid1d(2);
    CHECK(X.d(0, 1) == 0.5);
}

TEST_CASE("squared line metric on three points is a genuine quasi-metric") {
    QuasiMetricSpace X = snowflake_square(3);
    CHECK(X.A0 == 2.0);
    CHECK(verify_space(X).ok());
    CHECK(quasi_triangle_constant(X) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("binary ultrametric: A0 = 1, strong triangle inequality, doubling 2") {
    QuasiMetricSpace X = cantor_ultrametric(3);
    CHECK(X.n == 8);
    CHECK(X.A0 == 1.0);
    CHECK(verify_space(X).ok());
    for (int x = 0; x < X.n; ++x)
        for (int y = 0; y < X.n; ++y)
            for (int z = 0; z < X.n; ++z)
                CHECK(X.d(x, y) <= std::max(X.d(x, z), X.d(z, y)) + 1e-15);
    DoublingProfile prof = doubling_profile(X);
    CHECK(prof.C_mu == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("radii family covers distances and consecutive midpoints") {
    QuasiMetricSpace X = grid1d(3, 1.0);  // distances 1, 2
    auto fam = radii_family(X);
    REQUIRE(fam.size() == 3);
    CHECK(fam[0] == 1.0);
    CHECK(fam[1] == 1.5);
    CHECK(fam[2] == 2.0);

    auto bf = ball_family_radii(X);
    REQUIRE(bf.size() == 5);
    CHECK(bf[0] == 0.5);   // d_min/2
    CHECK(bf[4] == 3.0);   // diameter + 1
}

TEST_CASE("random generators produce valid spaces") {
    QuasiMetricSpace C = random_cloud(20, 7);
    CHECK(verify_space(C).ok());
    CHECK(C.A0 == 1.0);

    QuasiMetricSpace G = weighted_graph(16, 11);
    CHECK(verify_space(G).ok());
    CHECK(G.diameter() == doctest::Approx(1.0).epsilon(1e-12));

    // same seed, same bytes
    QuasiMetricSpace G2 = weighted_graph(16, 11);
    CHECK(G2.dist == G.dist);
}

TEST_CASE("verify_space rejects broken inputs") {
    QuasiMetricSpace X = grid1d(3, 1.0);
    X.dist[1] = 5.0;  // break symmetry
    CHECK_FALSE(verify_space(X).ok());

    QuasiMetricSpace Y = snowflake_square(3);
    Y.A0 = 1.0;  // claims metric but the squared line needs 2
    CHECK_FALSE(verify_space(Y).ok());

    QuasiMetricSpace Z = grid1d(2, 1.0);
    Z.mu[1] = 0.0;
    CHECK_FALSE(verify_space(Z).ok());
}
