// Frozen values come from tests/oracles/oracle_reproducing.py.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "homog/dyadic.hpp"
#include "homog/generators.hpp"
#include "homog/kernels.hpp"
#include "homog/reproducing.hpp"
#include "homog/rng.hpp"

using namespace homog;

namespace {

double linf(const Vec& a, const Vec& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

// grid1d(4) with the default 1/4 spacing: one cube at level 0, singletons at
// level 1, so the family has exactly two scales.
struct FourPoint {
    QuasiMetricSpace X = grid1d(4);
    DyadicSystem dys = build_dyadic(X);
    OperatorFamily fam = build_haar_family(dys);
};

FourPoint& four() {
    static FourPoint s;
    return s;
}

// 64 points packed at spacing 1/4096: nets stall at one point through level
// 1, split into four 16-point cubes at level 2, and reach singletons at
// level 3, giving genuinely non-singleton refinement cubes to sample from.
struct PackedGrid {
    QuasiMetricSpace X = grid1d(64, 1.0 / 4096);
    DyadicSystem dys = build_dyadic(X);
    OperatorFamily fam = build_haar_family(dys);
};

PackedGrid& packed() {
    static PackedGrid s;
    return s;
}

} // namespace

TEST_CASE("exact reconstruction telescopes on the four-point grid") {
    auto& F = four();
    REQUIRE(F.fam.K == 1);

    Vec e0 = {1.0, 0.0, 0.0, 0.0};
    ReproducingReport rep;
    Vec full = reproduce_exact(F.fam, e0, F.fam.K, &rep);

    CHECK(rep.route == "exact_haar");
    CHECK(rep.N == -1);
    CHECK(rep.j0 == -1);
    REQUIRE(rep.residuals.size() == 2);
    CHECK(rep.residuals[0] == doctest::Approx(0.8660254037844386).epsilon(1e-12));
    CHECK(rep.residuals[1] <= 1e-10);
    CHECK(rep.residuals[1] < rep.residuals[0]);
    CHECK(linf(full, e0) <= 1e-12);

    ReproducingReport rep0;
    Vec coarse = reproduce_exact(F.fam, e0, 0, &rep0);
    REQUIRE(rep0.residuals.size() == 1);
    CHECK(rep0.residuals[0] == doctest::Approx(0.8660254037844386).epsilon(1e-12));
    for (int x = 0; x < 4; ++x) CHECK(coarse[x] == 0.25);

    SUBCASE("binary-exact constants reproduce bitwise at every truncation") {
        Vec c(4, 3.25);
        ReproducingReport r;
        Vec out = reproduce_exact(F.fam, c, F.fam.K, &r);
        for (int x = 0; x < 4; ++x) CHECK(out[x] == 3.25);
        for (double v : r.residuals) CHECK(v == 0.0);
    }

    SUBCASE("general constants reproduce at the coarsest truncation up to rounding") {
        Vec c(4, 0.1);
        ReproducingReport r;
        reproduce_exact(F.fam, c, F.fam.K, &r);
        CHECK(r.residuals[0] <= 1e-12);
        CHECK(r.residuals.back() <= 1e-12);
    }

    SUBCASE("the reconstruction is linear up to rounding") {
        Rng rng(707);
        Vec f(4), g(4), h(4);
        for (int x = 0; x < 4; ++x) {
            f[x] = rng.uniform(-1.0, 1.0);
            g[x] = rng.uniform(-1.0, 1.0);
            h[x] = 2.25 * f[x] - 0.5 * g[x];
        }
        Vec rf = reproduce_exact(F.fam, f, 0);
        Vec rg = reproduce_exact(F.fam, g, 0);
        Vec rh = reproduce_exact(F.fam, h, 0);
        for (int x = 0; x < 4; ++x)
            CHECK(rh[x] == doctest::Approx(2.25 * rf[x] - 0.5 * rg[x]).epsilon(1e-12));
    }

    SUBCASE("rejects the smoothed family and out-of-range truncations") {
        OperatorFamily gauss = build_gauss_sinkhorn_family(F.X, F.dys);
        Vec f(4, 1.0);
        CHECK_THROWS_AS(reproduce_exact(gauss, f, 0), std::invalid_argument);
        CHECK_THROWS_AS(reproduce_exact(F.fam, f, -1), std::invalid_argument);
        CHECK_THROWS_AS(reproduce_exact(F.fam, f, F.fam.K + 1), std::invalid_argument);
        CHECK_THROWS_AS(reproduce_exact(F.fam, Vec(3, 0.0), 0), std::invalid_argument);
    }
}

TEST_CASE("discrete reconstruction collapses to the exact route on singleton refinements") {
    auto& P = packed();
    REQUIRE(P.dys.K_max == 3);

    Rng rng(808);
    Vec f(P.X.n);
    for (double& v : f) v = rng.uniform(-1.0, 1.0);

    Vec exact = reproduce_exact(P.fam, f, P.fam.K);

    // depth >= K_max forces every refinement cube down to a single point
    ReproducingReport rc, rw, rr;
    Vec dc = reproduce_discrete(P.fam, P.dys, f, 1, P.dys.K_max, SamplerSpec::parse("center"), &rc);
    Vec dw = reproduce_discrete(P.fam, P.dys, f, 1, P.dys.K_max, SamplerSpec::parse("worst"), &rw);
    Vec dr =
        reproduce_discrete(P.fam, P.dys, f, 1, P.dys.K_max, SamplerSpec::parse("random:9"), &rr);

    CHECK(rc.route == "discrete_sampled");
    CHECK(rc.N == 1);
    CHECK(rc.j0 == P.dys.K_max);
    REQUIRE(rc.residuals.size() == static_cast<size_t>(P.fam.K) + 1);
    CHECK(linf(dc, exact) <= 1e-10);
    CHECK(rc.residuals.back() <= 1e-10);

    // a one-member cube leaves every sampler the same choice
    CHECK(linf(dc, dw) == 0.0);
    CHECK(linf(dc, dr) == 0.0);
}

TEST_CASE("discrete reconstruction with coarse refinement cubes") {
    auto& P = packed();
    bool sampled_nonsingleton = false;
    for (const auto& Q : P.dys.levels[2].cubes) sampled_nonsingleton |= Q.members.size() > 1;
    REQUIRE(sampled_nonsingleton);

    Rng rng(909);
    Vec f(P.X.n);
    for (double& v : f) v = rng.uniform(-1.0, 1.0);

    ReproducingReport rc, rw;
    Vec dc = reproduce_discrete(P.fam, P.dys, f, 0, 1, SamplerSpec::parse("center"), &rc);
    Vec dw = reproduce_discrete(P.fam, P.dys, f, 0, 1, SamplerSpec::parse("worst"), &rw);
    for (double v : rc.residuals) CHECK(std::isfinite(v));
    for (double v : rw.residuals) CHECK(std::isfinite(v));
    CHECK(dc.size() == static_cast<size_t>(P.X.n));
    CHECK(dw.size() == static_cast<size_t>(P.X.n));
    // comparison is informational: the adversarial pick usually loses, but
    // nothing forces it to on a fixed instance
    MESSAGE("final residual, center picker:     " << rc.residuals.back());
    MESSAGE("final residual, worst-case picker: " << rw.residuals.back());

    SUBCASE("a fixed seed makes the random picker repeatable") {
        Vec a = reproduce_discrete(P.fam, P.dys, f, 0, 1, SamplerSpec::parse("random:42"));
        Vec b = reproduce_discrete(P.fam, P.dys, f, 0, 1, SamplerSpec::parse("random:42"));
        CHECK(linf(a, b) == 0.0);
    }

    SUBCASE("zero input reconstructs to zero with zero residuals") {
        ReproducingReport r;
        Vec out = reproduce_discrete(P.fam, P.dys, Vec(P.X.n, 0.0), 0, 1,
                                     SamplerSpec::parse("center"), &r);
        for (double v : out) CHECK(v == 0.0);
        for (double v : r.residuals) CHECK(v == 0.0);
    }

    SUBCASE("rejects bad parameters, foreign refinement indexes, and bad sampler text") {
        Vec f0(P.X.n, 1.0);
        SamplerSpec s = SamplerSpec::parse("center");
        CHECK_THROWS_AS(reproduce_discrete(P.fam, P.dys, f0, -1, 1, s), std::invalid_argument);
        CHECK_THROWS_AS(reproduce_discrete(P.fam, P.dys, f0, 0, 0, s), std::invalid_argument);
        CHECK_THROWS_AS(reproduce_discrete(P.fam, P.dys, Vec(3, 0.0), 0, 1, s),
                        std::invalid_argument);
        DyadicSystem other = build_dyadic(P.X);
        CHECK_THROWS_AS(reproduce_discrete(P.fam, other, f0, 0, 1, s), std::invalid_argument);
        OperatorFamily gauss = build_gauss_sinkhorn_family(P.X, P.dys);
        CHECK_THROWS_AS(reproduce_discrete(gauss, P.dys, f0, 0, 1, s), std::invalid_argument);
        CHECK_THROWS_AS(SamplerSpec::parse("random:"), std::invalid_argument);
        CHECK_THROWS_AS(SamplerSpec::parse("random:7x"), std::invalid_argument);
        CHECK_THROWS_AS(SamplerSpec::parse("gauss"), std::invalid_argument);
        CHECK(SamplerSpec::parse("worst").kind == SamplerSpec::worst);
        CHECK(SamplerSpec::parse("random:17").seed == 17);
    }
}
