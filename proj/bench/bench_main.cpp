// Times the OpenMP kernels against their single-threaded mirrors on a
// mid-size grid and prints one row per kernel. Run manually; not a test.

#include <chrono>
#include <cstdio>
#include <functional>

#include "homog/dyadic.hpp"
#include "homog/generators.hpp"
#include "homog/kernels.hpp"
#include "homog/maximal.hpp"
#include "homog/rng.hpp"
#include "homog/serial.hpp"
#include "homog/square.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace homog;

namespace {

double time_ms(const std::function<void()>& body, int reps) {
    body();  // warm up
    auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) body();
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void row(const char* name, double serial_ms, double parallel_ms) {
    std::printf("%-22s %12.3f %14.3f %9.2fx\n", name, serial_ms, parallel_ms,
                serial_ms / parallel_ms);
}

} // namespace

int main() {
    const int side = 24;
    QuasiMetricSpace X = grid2d(side, side);
    DyadicSystem dys = build_dyadic(X);
    OperatorFamily haar = build_haar_family(dys);
    OperatorFamily gauss = build_gauss_sinkhorn_family(X, dys);

    Rng rng(4242);
    Vec f(X.n);
    for (double& v : f) v = rng.uniform(-1.0, 1.0);

    int threads = 1;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif
    std::printf("grid2d %dx%d, n = %d, K = %d, threads = %d\n", side, side, X.n, gauss.K,
                threads);
    std::printf("%-22s %12s %14s %9s\n", "kernel", "serial ms", "parallel ms", "speedup");

    const int reps = 5;
    row("dense apply",
        time_ms([&] { serial::apply_kernel(gauss.P[1], f, X.mu); }, reps * 10),
        time_ms([&] { gauss.applyP(1, f); }, reps * 10));
    row("nontangential max",
        time_ms([&] { serial::nontangential_maximal(gauss, f, 1.0); }, reps),
        time_ms([&] { nontangential_maximal(gauss, f, 1.0); }, reps));
    row("lusin area", time_ms([&] { serial::lusin_area(gauss, f, 1.0); }, reps),
        time_ms([&] { lusin_area(gauss, f, 1.0); }, reps));
    row("g_lambda_star", time_ms([&] { serial::g_lambda_star(gauss, f, 4.0); }, reps),
        time_ms([&] { g_lambda_star(gauss, f, 4.0); }, reps));
    row("sinkhorn level",
        time_ms([&] { serial::sinkhorn_level(X, dys.scale(1), 1.0, 1.0); }, reps),
        time_ms([&] { sinkhorn_level(X, dys.scale(1), 1.0, 1.0); }, reps));
    row("haar grouped apply",
        time_ms([&] { serial::applyP(haar, 1, f); }, reps * 10),
        time_ms([&] { haar.applyP(1, f); }, reps * 10));
    return 0;
}
