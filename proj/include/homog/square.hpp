#pragma once

#include <vector>

#include "homog/common.hpp"
#include "homog/kernels.hpp"

namespace homog {

// All three functionals sum levels 0..K in ascending order; levels whose
// difference operator output is uniformly below 1e-14 contribute nothing and
// are counted into *dropped_out when given (relevant for the gauss family's
// flat tail; the haar family's deep levels carry genuine detail).

// S_{theta,0}(f)(x) = ( sum_k sum_{d(x,y) < theta delta^k} |Q_k f(y)|^2 mu(y)/V_{theta delta^k}(x) )^{1/2}
Vec lusin_area(const OperatorFamily& fam, const Vec& f, double theta, int* dropped_out = nullptr);

// g_0(f)(x) = ( sum_{k<=N} average over the refinement cube containing x of |Q_k f|^2
//             + sum_{k>N} |Q_k f(x)|^2 )^{1/2};  N = -1 gives the fully pointwise variant.
Vec g_function(const OperatorFamily& fam, const Vec& f, int N, int* dropped_out = nullptr);

// g*_{lambda,0}(f)(x) = ( sum_k sum_y |Q_k f(y)|^2 (delta^k/(delta^k+d(x,y)))^lambda
//                         mu(y)/(V_{delta^k}(x)+V_{delta^k}(y)) )^{1/2}
Vec g_lambda_star(const OperatorFamily& fam, const Vec& f, double lambda, int* dropped_out = nullptr);

} // namespace homog
