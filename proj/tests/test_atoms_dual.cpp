#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "homog/atoms.hpp"
#include "homog/rng.hpp"
#include "homog/space.hpp"

using namespace homog;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

QuasiMetricSpace pathSpace(int n) {
    QuasiMetricSpace X;
    X.n = n;
    X.A0 = 1.0;
    X.mu.assign(n, 1.0);
    X.dist.assign(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) X.dist[static_cast<size_t>(i) * n + j] = std::fabs(i - j);
    return X;
}

} // namespace

TEST_CASE("two-point sup-norm atoms across the p grid") {
    QuasiMetricSpace X = pathSpace(2);
    const double bounds[] = {0.3714985722842371, 0.42044820762685725, 0.4629373561436452, 0.5};
    const double ps[] = {0.7, 0.8, 0.9, 1.0};
    for (int i = 0; i < 4; ++i) {
        double p = ps[i];
        double c = std::pow(2.0, 0.0 - 1.0 / p);
        CHECK(c == doctest::Approx(bounds[i]).epsilon(1e-15));
        Vec a = {c, -c};
        AtomCheck chk = validate_local_atom(X, a, 0, 1.5, p, kInf);
        CHECK(chk.ok());
        CHECK(chk.size_bound == c);
        CHECK(chk.cancel_abs == 0.0);
        CHECK_FALSE(chk.cancellation_required);

        // same function as a global atom: size plus exact cancellation
        AtomCheck g = validate_global_atom(X, a, p, kInf);
        CHECK(g.ok());
        CHECK(g.cancellation_required);

        // signed normalized constants are global atoms with no cancellation
        Vec cpos(2, c), cneg(2, -c);
        CHECK(validate_global_atom(X, cpos, p, kInf).ok());
        CHECK(validate_global_atom(X, cneg, p, kInf).ok());
        CHECK_FALSE(validate_global_atom(X, cpos, p, kInf).cancellation_required);

        // every global atom passes the local validator on the whole-space ball
        CHECK(validate_local_atom(X, a, 0, X.diameter() + 1.0, p, kInf).ok());
        CHECK(validate_local_atom(X, cpos, 0, X.diameter() + 1.0, p, kInf).ok());

        // a non-normalized constant is neither branch
        Vec bad(2, 0.9 * c);
        CHECK_FALSE(validate_global_atom(X, bad, p, kInf).ok());
    }
}

TEST_CASE("local atom validator rejects each failure mode") {
    QuasiMetricSpace X = pathSpace(4);
    double p = 0.8;
    // support leak
    Vec leak = {0.1, -0.1, 0.0, 0.05};
    CHECK_FALSE(validate_local_atom(X, leak, 0, 1.5, p, kInf).ok());
    // size overflow: bound on B(0,1.5) (two points) is 2^{-1/p}
    Vec big = {1.0, -1.0, 0.0, 0.0};
    AtomCheck chk = validate_local_atom(X, big, 0, 1.5, p, kInf);
    CHECK_FALSE(chk.ok());
    CHECK(chk.lq_norm == 1.0);
    // cancellation required on small balls only
    Vec lump = {0.4, 0.0, 0.0, 0.0};
    CHECK_FALSE(validate_local_atom(X, lump, 0, 1.0, p, kInf).ok());
    CHECK(validate_local_atom(X, lump, 0, 1.5, p, kInf).ok());
    // finite q: L^2 bound mu(B)^{1/2-1/p}
    Vec two = {0.3, -0.3, 0.0, 0.0};
    AtomCheck q2 = validate_local_atom(X, two, 0, 1.5, p, 2.0);
    CHECK(q2.ok());
    CHECK(q2.lq_norm == doctest::Approx(0.3 * std::sqrt(2.0)).epsilon(1e-15));
    CHECK(q2.size_bound == doctest::Approx(std::pow(2.0, 0.5 - 1.25)).epsilon(1e-15));
    CHECK_THROWS(validate_local_atom(X, two, 0, 1.5, 1.5, kInf));
    CHECK_THROWS(validate_local_atom(X, two, 0, 1.5, p, 1.0));
}

TEST_CASE("dual norms of a constant on the unit-spacing 8-point grid") {
    QuasiMetricSpace X = pathSpace(8);
    Vec f(8, 3.0);
    CHECK(campanato_norm(X, f, 0.25, 2.0) == doctest::Approx(2.522689245761143).epsilon(1e-12));
    CHECK(lipschitz_norm(X, f, 0.25) == doctest::Approx(2.5226892457611436).epsilon(1e-12));
    // the small-ball part of campanato vanishes on constants; sup form agrees there
    CHECK(campanato_norm(X, f, 0.25, kInf) == doctest::Approx(2.5226892457611436).epsilon(1e-12));
    CHECK_THROWS(campanato_norm(X, f, 0.25, 1.0));
    CHECK_THROWS(campanato_norm(X, f, 0.25, 0.5));
    CHECK_THROWS(campanato_norm(X, f, -0.1, 2.0));
    CHECK_THROWS(lipschitz_norm(X, f, 0.0));
    CHECK_THROWS(lipschitz_norm(X, f, 1.0));
    // zero only for f == 0: both norms see constants through the big balls
    CHECK(lipschitz_norm(X, Vec(8, 0.0), 0.25) == 0.0);
    CHECK(campanato_norm(X, Vec(8, 0.0), 0.25, 2.0) == 0.0);
}

TEST_CASE("duality instance on the two-point space at p = 0.9") {
    QuasiMetricSpace X = pathSpace(2);
    double p = 0.9, alpha = 1.0 / p - 1.0;
    double c = std::pow(2.0, 0.0 - 1.0 / p);
    Vec f = {1.0, 0.0};
    Vec a = {c, -c};
    double pr = std::fabs(pairing(X, f, a));
    CHECK(pr == doctest::Approx(0.4629373561436452).epsilon(1e-14));
    double lip = lipschitz_norm(X, f, alpha);
    CHECK(lip == doctest::Approx(0.9258747122872903).epsilon(1e-14));
    CHECK(pr / lip == doctest::Approx(0.5).epsilon(1e-14));
    // the pairing against an atom never exceeds the dual norm, constant one
    CHECK(pr <= lip * (1.0 + 1e-12));

    AtomicDecomposition dec;
    dec.p = p;
    dec.q = kInf;
    dec.atoms.push_back({a, 0, 1.5, 2.0, false});
    CHECK(duality_pairing(X, f, dec) == doctest::Approx(2.0 * pairing(X, f, a)).epsilon(1e-15));
    Vec syn = reconstruct(dec, 2);
    CHECK(syn[0] == 2.0 * c);
    CHECK(syn[1] == -2.0 * c);
}

TEST_CASE("random small-ball atoms pass the validator") {
    QuasiMetricSpace X = pathSpace(8);
    Rng rng(77);
    std::vector<double> radii = ball_family_radii(X);
    int made = 0;
    for (int rep = 0; rep < 60; ++rep) {
        int x0 = static_cast<int>(rng.below(8));
        double r0 = radii[rng.below(radii.size())];
        std::vector<int> B = X.ball(x0, r0);
        if (B.size() < 2) continue;
        Vec a(8, 0.0);
        for (int y : B) a[y] = rng.uniform(-1.0, 1.0);
        double muB = 0.0;
        for (int y : B) muB += X.mu[y];
        if (r0 <= 1.0) {
            double mean = 0.0;
            for (int y : B) mean += a[y] * X.mu[y];
            mean /= muB;
            for (int y : B) a[y] -= mean;
        }
        double p = (rep % 2) ? 0.9 : 0.7;
        double m = 0.0;
        for (int y : B) m = std::max(m, std::fabs(a[y]));
        if (m == 0.0) continue;
        double s = 0.9 * std::pow(muB, -1.0 / p) / m;
        for (int y : B) a[y] *= s;
        AtomCheck chk = validate_local_atom(X, a, x0, r0, p, kInf);
        CHECK(chk.ok());
        ++made;
    }
    CHECK(made >= 40);
}

TEST_CASE("molecule on the 40-point path: validation, split, frozen lp sum") {
    QuasiMetricSpace X = pathSpace(40);
    double p = 0.8, q = 2.0, r0 = 1.5;
    std::vector<double> eps = {0.25, 0.0625};
    Vec a(40, 0.0);
    a[0] = 0.3;
    a[1] = -0.25;
    for (int y = 2; y < 24; ++y) a[y] = 0.004;
    for (int y = 24; y < 40; ++y) a[y] = 0.0008;

    MoleculeCheck chk = validate_molecule(X, a, 0, r0, p, q, eps);
    CHECK(chk.ok());
    CHECK(chk.annuli_checked == 2);
    CHECK_FALSE(chk.cancellation_required);
    CHECK(chk.eps_series == doctest::Approx(std::pow(0.25, p) + 2.0 * std::pow(0.0625, p))
                                .epsilon(1e-15));

    std::vector<AtomEntry> atoms = molecule_to_atoms(X, a, 0, r0, p, q, eps);
    REQUIRE(atoms.size() == 3);
    double lpsum = 0.0;
    for (const auto& e : atoms) {
        lpsum += std::pow(e.lambda, p);
        AtomCheck ac = validate_local_atom(X, e.a, e.x0, e.r0, p, q);
        CHECK(ac.ok());
    }
    CHECK(lpsum == doctest::Approx(1.438695798105239).epsilon(1e-14));
    CHECK(atoms[0].r0 == 1.5);
    CHECK(atoms[1].r0 == 24.0);
    CHECK(atoms[2].r0 == 384.0);

    AtomicDecomposition dec;
    dec.p = p;
    dec.q = q;
    dec.atoms = atoms;
    Vec rec = reconstruct(dec, 40);
    for (int y = 0; y < 40; ++y) CHECK(std::fabs(rec[y] - a[y]) <= 1e-14);

    CHECK_THROWS_AS(molecule_to_atoms(X, a, 0, 0.9, p, q, eps), std::invalid_argument);
    Vec fat = a;
    fat[0] = 5.0;
    CHECK_THROWS_AS(molecule_to_atoms(X, fat, 0, r0, p, q, eps), std::runtime_error);
    // a nonempty annulus with no eps entry is a validation failure
    CHECK_FALSE(validate_molecule(X, a, 0, r0, p, q, {0.25}).ok());
    // a small-ball molecule without cancellation fails; with it, passes
    Vec sm(40, 0.0);
    sm[0] = 0.2;
    MoleculeCheck small = validate_molecule(X, sm, 0, 1.0, p, q, {0.25, 0.25, 0.25});
    CHECK_FALSE(small.ok());
    Vec sm2(40, 0.0);
    sm2[0] = 0.2;
    sm2[2] = -0.2;  // lives in the first annulus, restores the integral
    MoleculeCheck small2 = validate_molecule(X, sm2, 0, 1.0, p, q, {0.25, 0.25, 0.25});
    CHECK(small2.cancellation_required);
    CHECK(small2.cancel_abs == 0.0);
}

TEST_CASE("global mean split") {
    QuasiMetricSpace X = pathSpace(8);
    double p = 0.9;
    Vec f = {5.0, 1.0, 2.0, 0.0, 3.0, 3.0, 1.0, 1.0};
    double mean = 0.0;
    Vec rem = split_global_atom(X, f, &mean);
    CHECK(mean == doctest::Approx(2.0).epsilon(1e-15));
    double s = 0.0;
    for (int y = 0; y < 8; ++y) s += rem[y] * X.mu[y];
    CHECK(std::fabs(s) <= 1e-12);
    // for a valid global atom the mean is dominated by the normalized constant
    double c = std::pow(8.0, -1.0 / p);
    Vec g(8, c);
    double gm = 0.0;
    split_global_atom(X, g, &gm);
    CHECK(std::fabs(gm) <= std::pow(X.muTotal(), -1.0 / p) * (1.0 + 1e-15));
}
