#include "homog/square.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "homog/dyadic.hpp"

namespace homog {

namespace {

constexpr double kDropTol = 1e-14;

// Q_k f for every level, with the flat ones flagged
std::vector<Vec> all_levels(const OperatorFamily& fam, const Vec& f, std::vector<char>& live,
                            int* dropped_out) {
    std::vector<Vec> Qf(fam.K + 1);
    live.assign(fam.K + 1, 0);
    int dropped = 0;
    for (int k = 0; k <= fam.K; ++k) {
        Qf[k] = fam.applyQ(k, f);
        double mx = 0.0;
        for (double v : Qf[k]) mx = std::max(mx, std::abs(v));
        if (mx < kDropTol)
            ++dropped;
        else
            live[k] = 1;
    }
    if (dropped_out) *dropped_out = dropped;
    return Qf;
}

} // namespace

Vec lusin_area(const OperatorFamily& fam, const Vec& f, double theta, int* dropped_out) {
    if (!(theta > 0.0)) throw std::invalid_argument("lusin_area needs theta > 0");
    const QuasiMetricSpace& X = *fam.X;
    const int n = X.n;
    std::vector<char> live;
    auto Qf = all_levels(fam, f, live, dropped_out);

    Vec out(n, 0.0);
#pragma omp parallel for schedule(static)
    for (int x = 0; x < n; ++x) {
        double acc = 0.0;
        for (int k = 0; k <= fam.K; ++k) {
            if (!live[k]) continue;
            double rad = theta * fam.dys->scale(k);
            double vol = 0.0, s = 0.0;
            for (int y = 0; y < n; ++y)
                if (X.d(x, y) < rad) {
                    vol += X.mu[y];
                    s += Qf[k][y] * Qf[k][y] * X.mu[y];
                }
            acc += s / vol;
        }
        out[x] = std::sqrt(acc);
    }
    return out;
}

Vec g_function(const OperatorFamily& fam, const Vec& f, int N, int* dropped_out) {
    const QuasiMetricSpace& X = *fam.X;
    const DyadicSystem& dys = *fam.dys;
    const int n = X.n;
    if (N < -1) throw std::invalid_argument("g_function needs N >= -1");
    std::vector<char> live;
    auto Qf = all_levels(fam, f, live, dropped_out);

    Vec out(n, 0.0);
#pragma omp parallel for schedule(static)
    for (int x = 0; x < n; ++x) {
        double acc = 0.0;
        for (int k = 0; k <= fam.K; ++k) {
            if (!live[k]) continue;
            if (k <= N) {
                int dl = dys.dlevel(k);
                const auto& sub = dys.levels[dl].cubes[dys.cubeAt(dl, x)];
                double num = 0.0, den = 0.0;
                for (int y : sub.members) {
                    num += Qf[k][y] * Qf[k][y] * X.mu[y];
                    den += X.mu[y];
                }
                acc += num / den;
            } else {
                acc += Qf[k][x] * Qf[k][x];
            }
        }
        out[x] = std::sqrt(acc);
    }
    return out;
}

Vec g_lambda_star(const OperatorFamily& fam, const Vec& f, double lambda, int* dropped_out) {
    if (!(lambda > 0.0)) throw std::invalid_argument("g_lambda_star needs lambda > 0");
    const QuasiMetricSpace& X = *fam.X;
    const int n = X.n;
    std::vector<char> live;
    auto Qf = all_levels(fam, f, live, dropped_out);

    std::vector<Vec> V(fam.K + 1, Vec(n));
    for (int k = 0; k <= fam.K; ++k)
        for (int x = 0; x < n; ++x) V[k][x] = X.ballMeasure(x, fam.dys->scale(k));

    Vec out(n, 0.0);
#pragma omp parallel for schedule(static)
    for (int x = 0; x < n; ++x) {
        double acc = 0.0;
        for (int k = 0; k <= fam.K; ++k) {
            if (!live[k]) continue;
            double sk = fam.dys->scale(k);
            for (int y = 0; y < n; ++y) {
                double w = std::pow(sk / (sk + X.d(x, y)), lambda);
                acc += Qf[k][y] * Qf[k][y] * w * X.mu[y] / (V[k][x] + V[k][y]);
            }
        }
        out[x] = std::sqrt(acc);
    }
    return out;
}

} // namespace homog
