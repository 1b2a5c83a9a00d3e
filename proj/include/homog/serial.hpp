#pragma once

#include "homog/common.hpp"
#include "homog/kernels.hpp"
#include "homog/space.hpp"

// Single-threaded mirrors of the OpenMP kernels, loop for loop with the same
// per-point arithmetic. Because the parallel versions only partition
// independent output slots, the mirrors must agree bitwise; the tests assert
// exactly that and the benchmark times the gap.
namespace homog::serial {

Vec apply_kernel(const Matrix& M, const Vec& f, const Vec& mu);
Vec applyP(const OperatorFamily& fam, int k, const Vec& f);
Vec applyQ(const OperatorFamily& fam, int k, const Vec& f);

Vec nontangential_maximal(const OperatorFamily& fam, const Vec& f, double theta);
Vec lusin_area(const OperatorFamily& fam, const Vec& f, double theta, int* dropped_out = nullptr);
Vec g_lambda_star(const OperatorFamily& fam, const Vec& f, double lambda,
                  int* dropped_out = nullptr);

Matrix sinkhorn_level(const QuasiMetricSpace& X, double scale, double nu, double a,
                      double tol = 1e-10, int max_iter = 10000, int* iters_out = nullptr,
                      double* err_out = nullptr);

} // namespace homog::serial
