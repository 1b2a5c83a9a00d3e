#pragma once

#include <vector>

#include "homog/common.hpp"
#include "homog/kernels.hpp"
#include "homog/space.hpp"

namespace homog {

struct GNormParams {
    int x1 = 0;       // anchor point
    double r = 1.0;   // scale, > 0
    double beta = 0.49, gamma = 0.49;  // beta in (0,1], gamma > 0
};

// Best constant in the two test-function conditions, brute force:
// size   max_x |phi(x)| (V_r(x1)+V(x1,x)) ((r+d(x1,x))/r)^gamma
// smooth max over pairs d(x,y) <= (2A0)^{-1}(r+d(x1,x)), x != y, of
//        |phi(x)-phi(y)| ((r+d(x1,x))/d(x,y))^beta (V_r(x1)+V(x1,x)) ((r+d(x1,x))/r)^gamma
double g_norm(const QuasiMetricSpace& X, const Vec& phi, const GNormParams& prm);

// Hardy-Littlewood maximal function over every ball the finite space realizes
// (all centers, radii from ball_family_radii). O(n^3); intended for desk-scale spaces.
Vec hl_maximal(const QuasiMetricSpace& X, const Vec& f);

// Radial local maximal function: for k <= N the sup of |P_k f| over the
// refinement cube containing x, for k >= N the pointwise |P_k f(x)|; N appears
// in both branches. Requires 0 <= N (k > K contributes nothing).
Vec radial_local_maximal(const OperatorFamily& fam, const Vec& f, int N);

// sup over levels k of sup of |P_k f| over the strict ball B(x, theta delta^k).
Vec nontangential_maximal(const OperatorFamily& fam, const Vec& f, double theta);

// Finite dictionary of candidate test functions, three generators per level l:
//   0: the averaging kernel row P_l(x,.) anchored at x
//   1: the tent bump y -> max(0, 1 - d(x,y)/delta^l)
//   2: the row damped by a double-width tent
// Each (generator, level, anchor) has its exact brute-force g_norm at scale
// delta^l precomputed. The induced grand maximal function is a certified lower
// bound for the sup over the full unit ball of the test class.
struct TestDictionary {
    const QuasiMetricSpace* X = nullptr;
    const OperatorFamily* fam = nullptr;
    double beta = 0.49, gamma = 0.49;
    int L = 0;                               // levels 0..L
    std::vector<std::vector<double>> norms;  // [entry][anchor], entry = kind*(L+1)+level
    int entries() const { return 3 * (L + 1); }
    int kindOf(int e) const { return e / (L + 1); }
    int levelOf(int e) const { return e % (L + 1); }
    Vec entryPhi(int e, int x) const;  // materialize the candidate anchored at x
};

TestDictionary build_test_dictionary(const OperatorFamily& fam, double beta, double gamma);

// f*(x) = max over dictionary entries of |<f, phi>| / ||phi||_{G(x, delta^l, beta, gamma)}.
Vec grand_maximal_dict(const TestDictionary& dict, const Vec& f);

// (sum |F|^p mu)^{1/p}; max norm at p = infinity.
double lp_quasinorm(const QuasiMetricSpace& X, const Vec& F, double p);

} // namespace homog
