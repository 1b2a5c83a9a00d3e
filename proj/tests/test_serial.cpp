// The parallel kernels only partition independent output slots across
// threads, so the single-threaded mirrors must reproduce them bitwise.

#include <vector>

#include "doctest.h"
#include "homog/dyadic.hpp"
#include "homog/generators.hpp"
#include "homog/kernels.hpp"
#include "homog/maximal.hpp"
#include "homog/rng.hpp"
#include "homog/serial.hpp"
#include "homog/square.hpp"

using namespace homog;

namespace {

void expect_same(const Vec& a, const Vec& b) {
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

} // namespace

TEST_CASE("serial mirrors agree bitwise with the parallel kernels") {
    QuasiMetricSpace X = grid1d(48);
    DyadicSystem dys = build_dyadic(X);
    OperatorFamily haar = build_haar_family(dys);
    OperatorFamily gauss = build_gauss_sinkhorn_family(X, dys);

    Rng rng(12321);
    Vec f(X.n);
    for (double& v : f) v = rng.uniform(-2.0, 2.0);

    for (const OperatorFamily* fam : {&haar, &gauss}) {
        for (int k = 0; k <= fam->K; ++k) {
            expect_same(serial::applyP(*fam, k, f), fam->applyP(k, f));
            expect_same(serial::applyQ(*fam, k, f), fam->applyQ(k, f));
        }
        expect_same(serial::nontangential_maximal(*fam, f, 1.0),
                    nontangential_maximal(*fam, f, 1.0));
        int ds = -1, dp = -1;
        expect_same(serial::lusin_area(*fam, f, 1.0, &ds), lusin_area(*fam, f, 1.0, &dp));
        CHECK(ds == dp);
        expect_same(serial::g_lambda_star(*fam, f, 4.0, &ds), g_lambda_star(*fam, f, 4.0, &dp));
        CHECK(ds == dp);
    }

    SUBCASE("scaled kernel level, including the iteration count") {
        int it_s = -1, it_p = -1;
        double err_s = -1.0, err_p = -1.0;
        Matrix A = serial::sinkhorn_level(X, dys.scale(1), 1.0, 1.0, 1e-10, 10000, &it_s, &err_s);
        Matrix B = sinkhorn_level(X, dys.scale(1), 1.0, 1.0, 1e-10, 10000, &it_p, &err_p);
        CHECK(it_s == it_p);
        CHECK(err_s == err_p);
        REQUIRE(A.a.size() == B.a.size());
        for (size_t i = 0; i < A.a.size(); ++i) CHECK(A.a[i] == B.a[i]);
    }

    SUBCASE("dense kernel application") {
        expect_same(serial::apply_kernel(gauss.P[0], f, X.mu), gauss.applyP(0, f));
    }
}
