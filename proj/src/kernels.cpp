#include "homog/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "homog/rng.hpp"

namespace homog {

namespace {

// cube-conditional average; single-member cubes copy the value so the
// identity at the deepest level is bit-exact
void haar_apply_level(const DyadicSystem& dys, int k, const Vec& f, const Vec& mu, Vec& out) {
    const auto& cubes = dys.levels[k].cubes;
#pragma omp parallel for schedule(static)
    for (int a = 0; a < static_cast<int>(cubes.size()); ++a) {
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
        double avg = num / den;  // f constant => num and den share every rounding
        for (int y : Q.members) out[y] = avg;
    }
}

Vec dense_apply(const Matrix& M, const Vec& f, const Vec& mu) {
    const int n = M.n;
    Vec out(n, 0.0);
#pragma omp parallel for schedule(static)
    for (int x = 0; x < n; ++x) {
        double s = 0.0;
        for (int y = 0; y < n; ++y) s += M.at(x, y) * f[y] * mu[y];
        out[x] = s;
    }
    return out;
}

struct FitAccum {
    std::vector<double> lx, ly;
    void add(double a, double b) {
        lx.push_back(a);
        ly.push_back(b);
    }
    // least-squares slope; 0 when the abscissae are (nearly) constant
    double slope() const {
        size_t m = lx.size();
        if (m < 8) return 0.0;
        double sx = 0, sy = 0;
        for (size_t i = 0; i < m; ++i) {
            sx += lx[i];
            sy += ly[i];
        }
        double mx = sx / m, my = sy / m, sxx = 0, sxy = 0;
        for (size_t i = 0; i < m; ++i) {
            sxx += (lx[i] - mx) * (lx[i] - mx);
            sxy += (lx[i] - mx) * (ly[i] - my);
        }
        if (sxx < 1e-12) return 0.0;
        return sxy / sxx;
    }
};

} // namespace

Vec OperatorFamily::applyP(int k, const Vec& f) const {
    if (kind == FamilyKind::haar_martingale) {
        Vec out(X->n, 0.0);
        haar_apply_level(*dys, k, f, X->mu, out);
        return out;
    }
    return dense_apply(P[k], f, X->mu);
}

Vec OperatorFamily::applyQ(int k, const Vec& f) const {
    if (k == 0) return applyP(0, f);
    Vec hi = applyP(k, f), lo = applyP(k - 1, f);
    for (int x = 0; x < X->n; ++x) hi[x] -= lo[x];
    return hi;
}

OperatorFamily build_haar_family(const DyadicSystem& dys) {
    const QuasiMetricSpace& X = *dys.X;
    for (const auto& Q : dys.levels[dys.K_max].cubes)
        if (Q.members.size() != 1)
            throw std::invalid_argument(
                "haar family needs singleton cubes at the deepest level; rebuild with a larger K_max");
    OperatorFamily fam;
    fam.kind = FamilyKind::haar_martingale;
    fam.X = &X;
    fam.dys = &dys;
    fam.delta = dys.delta;
    fam.K = dys.K_max;
    fam.P.assign(fam.K + 1, Matrix(X.n));
    fam.Q.assign(fam.K + 1, Matrix(X.n));
    for (int k = 0; k <= fam.K; ++k) {
        Matrix& M = fam.P[k];
        for (const auto& Qc : dys.levels[k].cubes) {
            double m = 0.0;
            for (int y : Qc.members) m += X.mu[y];
            double v = 1.0 / m;
            for (int x : Qc.members)
                for (int y : Qc.members) M.at(x, y) = v;
        }
        Matrix& D = fam.Q[k];
        for (int x = 0; x < X.n; ++x)
            for (int y = 0; y < X.n; ++y)
                D.at(x, y) = k == 0 ? M.at(x, y) : M.at(x, y) - fam.P[k - 1].at(x, y);
    }
    return fam;
}

Matrix sinkhorn_level(const QuasiMetricSpace& X, double scale, double nu, double a, double tol,
                      int max_iter, int* iters_out, double* err_out) {
    const int n = X.n;
    Matrix K0(n);
#pragma omp parallel for schedule(static)
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) K0.at(x, y) = std::exp(-nu * std::pow(X.d(x, y) / scale, a));

    Vec s(n, 1.0), m(n, 0.0);
    double err = 0.0;
    int iters = 0;
    for (int it = 0; it <= max_iter; ++it) {
#pragma omp parallel for schedule(static)
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
        throw std::runtime_error("sinkhorn scaling failed to reach tol, residual = " + std::to_string(err));
#pragma omp parallel for schedule(static)
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) K0.at(x, y) = s[x] * K0.at(x, y) * s[y];
    if (iters_out) *iters_out = iters;
    if (err_out) *err_out = err;
    return K0;
}

OperatorFamily build_gauss_sinkhorn_family(const QuasiMetricSpace& X, const DyadicSystem& dys,
                                           double nu, double a) {
    if (!(nu > 0.0) || !(a > 0.0) || a > 1.0)
        throw std::invalid_argument("need nu > 0 and a in (0,1]");
    OperatorFamily fam;
    fam.kind = FamilyKind::gauss_sinkhorn;
    fam.X = &X;
    fam.dys = &dys;
    fam.nu = nu;
    fam.a = a;
    fam.delta = dys.delta;
    fam.K = dys.K_max;
    fam.P.reserve(fam.K + 1);
    for (int k = 0; k <= fam.K; ++k) {
        int iters = 0;
        double err = 0.0;
        fam.P.push_back(sinkhorn_level(X, dys.scale(k), nu, a, 1e-10, 10000, &iters, &err));
        fam.diag.sinkhorn_iters = std::max(fam.diag.sinkhorn_iters, iters);
        fam.diag.marginal_err = std::max(fam.diag.marginal_err, err);
    }
    fam.Q.assign(fam.K + 1, Matrix(X.n));
    for (int k = 0; k <= fam.K; ++k)
        for (int x = 0; x < X.n; ++x)
            for (int y = 0; y < X.n; ++y)
                fam.Q[k].at(x, y) =
                    k == 0 ? fam.P[0].at(x, y) : fam.P[k].at(x, y) - fam.P[k - 1].at(x, y);
    return fam;
}

FamilyDiagnostics verify_iati(OperatorFamily& fam) {
    const QuasiMetricSpace& X = *fam.X;
    const int n = X.n;
    FamilyDiagnostics diag;
    diag.sinkhorn_iters = fam.diag.sinkhorn_iters;

    std::vector<Vec> logV(fam.K + 1, Vec(n, 0.0));
    std::vector<double> scales(fam.K + 1);
    for (int k = 0; k <= fam.K; ++k) {
        scales[k] = fam.dys->scale(k);
        for (int x = 0; x < n; ++x) logV[k][x] = std::log(X.ballMeasure(x, scales[k]));
    }

    // size constant, exact scan in log space
    double logC = -1e300;
    for (int k = 0; k <= fam.K; ++k)
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y) {
                double q = std::abs(fam.Q[k].at(x, y));
                if (q == 0.0) continue;
                double lt = std::log(q) + 0.5 * (logV[k][x] + logV[k][y]) +
                            fam.nu * std::pow(X.d(x, y) / scales[k], fam.a);
                logC = std::max(logC, lt);
            }
    diag.size_C = logC > -1e300 ? std::exp(logC) : 0.0;

    // regularity fit: log(quotient) against log(d(x,x')/delta^k) over close pairs
    FitAccum fit;
    Rng pick(0x5eedf17ull);
    for (int k = 0; k <= fam.K; ++k) {
        std::vector<std::pair<int, int>> pairs;
        for (int x = 0; x < n; ++x)
            for (int xp = x + 1; xp < n; ++xp)
                if (X.d(x, xp) <= scales[k]) pairs.emplace_back(x, xp);
        if (pairs.size() > 2000) {
            std::vector<std::pair<int, int>> sub;
            for (int i = 0; i < 2000; ++i) sub.push_back(pairs[pick.below(pairs.size())]);
            pairs = std::move(sub);
        }
        std::vector<int> ys;
        if (n <= 64)
            for (int y = 0; y < n; ++y) ys.push_back(y);
        else
            for (int i = 0; i < 64; ++i) ys.push_back(static_cast<int>(pick.below(n)));
        for (auto [x, xp] : pairs) {
            double r = X.d(x, xp) / scales[k];
            if (r <= 0.0) continue;
            for (int y : ys) {
                double num = std::abs(fam.Q[k].at(x, y) - fam.Q[k].at(xp, y)) +
                             std::abs(fam.Q[k].at(y, x) - fam.Q[k].at(y, xp));
                if (num == 0.0) continue;
                double lq = std::log(num) + 0.5 * (logV[k][x] + logV[k][y]) +
                            fam.nu * std::pow(X.d(x, y) / scales[k], fam.a);
                fit.add(std::log(r), lq);
            }
        }
    }
    diag.fitted_slope = fit.slope();
    diag.eta_eff = fam.kind == FamilyKind::haar_martingale
                       ? 0.0
                       : std::clamp(diag.fitted_slope, 0.0, 1.0);

    // second differences over a seeded quadruple sample, constant at eta_eff
    Rng quad(0x2dd1ff5ull);
    double log2C = -1e300;
    int got = 0;
    for (long att = 0; att < 2000000 && got < 10000; ++att) {
        int k = static_cast<int>(quad.below(fam.K + 1));
        int x = static_cast<int>(quad.below(n)), xp = static_cast<int>(quad.below(n));
        int y = static_cast<int>(quad.below(n)), yp = static_cast<int>(quad.below(n));
        double rx = X.d(x, xp) / scales[k], ry = X.d(y, yp) / scales[k];
        if (rx <= 0.0 || rx > 1.0 || ry <= 0.0 || ry > 1.0) continue;
        ++got;
        double num = std::abs((fam.Q[k].at(x, y) - fam.Q[k].at(xp, y)) -
                              (fam.Q[k].at(x, yp) - fam.Q[k].at(xp, yp)));
        if (num == 0.0) continue;
        double lt = std::log(num) + 0.5 * (logV[k][x] + logV[k][y]) +
                    fam.nu * std::pow(X.d(x, y) / scales[k], fam.a) -
                    diag.eta_eff * (std::log(rx) + std::log(ry));
        log2C = std::max(log2C, lt);
    }
    diag.second_diff_C = log2C > -1e300 ? std::exp(log2C) : 0.0;

    // conservation through the operator path
    Vec ones(n, 1.0);
    for (int k = 0; k <= fam.K; ++k) {
        Vec pk = fam.applyP(k, ones);
        for (int x = 0; x < n; ++x) diag.marginal_err = std::max(diag.marginal_err, std::abs(pk[x] - 1.0));
        if (k >= 1) {
            Vec qk = fam.applyQ(k, ones);
            for (int x = 0; x < n; ++x) diag.cancel_err = std::max(diag.cancel_err, std::abs(qk[x]));
        }
    }
    fam.diag = diag;
    return diag;
}

} // namespace homog
