#include "homog/serial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace homog::serial {

namespace {

constexpr double kDropTol = 1e-14;

void haar_apply_level(const DyadicSystem& dys, int k, const Vec& f, const Vec& mu, Vec& out) {
    const auto& cubes = dys.levels[k].cubes;
    for (size_t a = 0; a < cubes.size(); ++a) {
        const auto& Q = cubes[a];
        if (Q.members.size() == 1) {
            out[Q.members[0]] = f[Q.members[0]];
            continue;
        }
        double num = 0.0, den = 0.0;
        for (int y : Q.members) {
            num += f[y] * mu[y];
            den += mu[y];
        }
        double avg = num / den;
        for (int y : Q.members) out[y] = avg;
    }
}

std::vector<Vec> all_levels(const OperatorFamily& fam, const Vec& f, std::vector<char>& live,
                            int* dropped_out) {
    std::vector<Vec> Qf(fam.K + 1);
    live.assign(fam.K + 1, 0);
    int dropped = 0;
    for (int k = 0; k <= fam.K; ++k) {
        Qf[k] = applyQ(fam, k, f);
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

Vec apply_kernel(const Matrix& M, const Vec& f, const Vec& mu) {
    const int n = M.n;
    Vec out(n, 0.0);
    for (int x = 0; x < n; ++x) {
        double s = 0.0;
        for (int y = 0; y < n; ++y) s += M.at(x, y) * f[y] * mu[y];
        out[x] = s;
    }
    return out;
}

Vec applyP(const OperatorFamily& fam, int k, const Vec& f) {
    if (fam.kind == FamilyKind::haar_martingale) {
        Vec out(fam.X->n, 0.0);
        haar_apply_level(*fam.dys, k, f, fam.X->mu, out);
        return out;
    }
    return apply_kernel(fam.P[k], f, fam.X->mu);
}

Vec applyQ(const OperatorFamily& fam, int k, const Vec& f) {
    if (k == 0) return applyP(fam, 0, f);
    Vec hi = applyP(fam, k, f), lo = applyP(fam, k - 1, f);
    for (int x = 0; x < fam.X->n; ++x) hi[x] -= lo[x];
    return hi;
}

Vec nontangential_maximal(const OperatorFamily& fam, const Vec& f, double theta) {
    if (!(theta > 0.0)) throw std::invalid_argument("nontangential maximal needs theta > 0");
    const QuasiMetricSpace& X = *fam.X;
    const int K = fam.K;
    std::vector<Vec> Pf(K + 1);
    for (int k = 0; k <= K; ++k) Pf[k] = applyP(fam, k, f);

    Vec out(X.n, 0.0);
    for (int x = 0; x < X.n; ++x) {
        double best = 0.0;
        for (int k = 0; k <= K; ++k) {
            double rad = theta * fam.dys->scale(k);
            for (int y = 0; y < X.n; ++y)
                if (X.d(x, y) < rad) best = std::max(best, std::abs(Pf[k][y]));
        }
        out[x] = best;
    }
    return out;
}

Vec lusin_area(const OperatorFamily& fam, const Vec& f, double theta, int* dropped_out) {
    if (!(theta > 0.0)) throw std::invalid_argument("lusin_area needs theta > 0");
    const QuasiMetricSpace& X = *fam.X;
    const int n = X.n;
    std::vector<char> live;
    auto Qf = all_levels(fam, f, live, dropped_out);

    Vec out(n, 0.0);
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

Matrix sinkhorn_level(const QuasiMetricSpace& X, double scale, double nu, double a, double tol,
                      int max_iter, int* iters_out, double* err_out) {
    const int n = X.n;
    Matrix K0(n);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) K0.at(x, y) = std::exp(-nu * std::pow(X.d(x, y) / scale, a));

    Vec s(n, 1.0), m(n, 0.0);
    double err = 0.0;
    int iters = 0;
    for (int it = 0; it <= max_iter; ++it) {
        for (int x = 0; x < n; ++x) {
            double acc = 0.0;
            for (int y = 0; y < n; ++y) acc += K0.at(x, y) * s[y] * X.mu[y];
            m[x] = s[x] * acc;
        }
        err = 0.0;
        for (int x = 0; x < n; ++x) err = std::max(err, std::abs(m[x] - 1.0));
        if (err <= tol) break;
        if (it == max_iter) break;
        for (int x = 0; x < n; ++x) s[x] /= std::sqrt(m[x]);
        ++iters;
    }
    if (err > tol)
        throw std::runtime_error("sinkhorn scaling failed to reach tol, residual = " +
                                 std::to_string(err));
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) K0.at(x, y) = s[x] * K0.at(x, y) * s[y];
    if (iters_out) *iters_out = iters;
    if (err_out) *err_out = err;
    return K0;
}

} // namespace homog::serial
