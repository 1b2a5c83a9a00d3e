#pragma once

#include <vector>

#include "homog/common.hpp"
#include "homog/dyadic.hpp"
#include "homog/space.hpp"

namespace homog {

enum class FamilyKind { haar_martingale, gauss_sinkhorn };

struct FamilyDiagnostics {
    double size_C = 0.0;        // best constant in the exponential size bound
    double eta_eff = 0.0;       // effective regularity exponent in [0,1]
    double fitted_slope = 0.0;  // raw least-squares slope (reported even when eta_eff is pinned to 0)
    double second_diff_C = 0.0; // worst sampled second-difference constant at eta_eff
    double marginal_err = 0.0;  // worst |row marginal - 1| over all levels
    double cancel_err = 0.0;    // worst |mu-weighted row sum of Q_k|, k >= 1
    int sinkhorn_iters = 0;     // worst per-level iteration count (gauss only)
};

// A finite family of averaging kernels P_0..P_K with differences
// Q_0 = P_0, Q_k = P_k - P_{k-1}. Two constructions:
//  - haar_martingale: cube-conditional expectations; exact algebra
//    (orthogonal differences, sum telescopes to the identity).
//  - gauss_sinkhorn: exp(-nu (d/delta^k)^a) symmetrized to unit marginals;
//    genuine Hoelder-type regularity, conservation to 1e-10.
struct OperatorFamily {
    FamilyKind kind = FamilyKind::haar_martingale;
    const QuasiMetricSpace* X = nullptr;  // non-owning
    const DyadicSystem* dys = nullptr;    // non-owning
    double nu = 1.0, a = 1.0;
    double delta = 0.5;
    int K = 0;
    std::vector<Matrix> P;  // 0..K
    std::vector<Matrix> Q;  // 0..K
    FamilyDiagnostics diag;

    // (P_k f)(x) = sum_y P_k(x,y) f(y) mu(y). The haar path averages over
    // cubes directly so that constants are preserved bit-exactly.
    Vec applyP(int k, const Vec& f) const;
    Vec applyQ(int k, const Vec& f) const;  // Q_0 f = P_0 f, else P_k f - P_{k-1} f
};

// Requires every deepest-level cube to be a single point (else the sum of the
// differences cannot reach the identity); throws with that instruction.
OperatorFamily build_haar_family(const DyadicSystem& dys);

// Per level: kernel exp(-nu (d/delta^k)^a), then symmetric diagonal scaling
// s <- s / sqrt(marginal) until both mu-weighted marginals are 1 within tol.
OperatorFamily build_gauss_sinkhorn_family(const QuasiMetricSpace& X, const DyadicSystem& dys,
                                           double nu = 1.0, double a = 1.0);

// One scaled level built standalone (used to stream large spaces level by
// level without holding the whole family). scale = delta^k.
Matrix sinkhorn_level(const QuasiMetricSpace& X, double scale, double nu, double a,
                      double tol = 1e-10, int max_iter = 10000, int* iters_out = nullptr,
                      double* err_out = nullptr);

// Fills fam.diag and returns it: exact-form size constant, regularity fit
// over close pairs, seeded second-difference sample, conservation errors.
FamilyDiagnostics verify_iati(OperatorFamily& fam);

} // namespace homog
