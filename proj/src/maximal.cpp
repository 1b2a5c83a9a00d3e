#include "homog/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace homog {

double g_norm(const QuasiMetricSpace& X, const Vec& phi, const GNormParams& prm) {
    if (!(prm.r > 0.0)) throw std::invalid_argument("g_norm needs r > 0");
    if (!(prm.beta > 0.0) || prm.beta > 1.0 || !(prm.gamma > 0.0))
        throw std::invalid_argument("g_norm needs beta in (0,1] and gamma > 0");
    const int n = X.n;
    const int x1 = prm.x1;
    const double r = prm.r;
    Vec env(n);  // (V_r(x1)+V(x1,x)) ((r+d(x1,x))/r)^gamma
    double Vr = X.ballMeasure(x1, r);
    for (int x = 0; x < n; ++x)
        env[x] = (Vr + X.Vxy(x1, x)) * std::pow((r + X.d(x1, x)) / r, prm.gamma);

    double best = 0.0;
    for (int x = 0; x < n; ++x) best = std::max(best, std::abs(phi[x]) * env[x]);
    for (int x = 0; x < n; ++x) {
        double adm = (r + X.d(x1, x)) / (2.0 * X.A0);
        for (int y = 0; y < n; ++y) {
            if (y == x) continue;
            double dxy = X.d(x, y);
            if (dxy > adm) continue;
            double diff = std::abs(phi[x] - phi[y]);
            if (diff == 0.0) continue;
            best = std::max(best, diff * std::pow((r + X.d(x1, x)) / dxy, prm.beta) * env[x]);
        }
    }
    return best;
}

Vec hl_maximal(const QuasiMetricSpace& X, const Vec& f) {
    const int n = X.n;
    Vec out(n, 0.0);
    auto radii = ball_family_radii(X);
    for (int z = 0; z < n; ++z)
        for (double r : radii) {
            double num = 0.0, den = 0.0;
            for (int y = 0; y < n; ++y)
                if (X.d(z, y) < r) {
                    num += std::abs(f[y]) * X.mu[y];
                    den += X.mu[y];
                }
            if (den == 0.0) continue;
            double avg = num / den;
            for (int y = 0; y < n; ++y)
                if (X.d(z, y) < r) out[y] = std::max(out[y], avg);
        }
    return out;
}

Vec radial_local_maximal(const OperatorFamily& fam, const Vec& f, int N) {
    const QuasiMetricSpace& X = *fam.X;
    const DyadicSystem& dys = *fam.dys;
    if (N < 0) throw std::invalid_argument("radial maximal needs N >= 0");
    const int K = fam.K;
    std::vector<Vec> Pf(K + 1);
    for (int k = 0; k <= K; ++k) Pf[k] = fam.applyP(k, f);

    Vec out(X.n, 0.0);
#pragma omp parallel for schedule(static)
    for (int x = 0; x < X.n; ++x) {
        double best = 0.0;
        for (int k = 0; k <= std::min(N, K); ++k) {
            // sup of |P_k f| over the refinement cube containing x
            int dl = dys.dlevel(k);
            const auto& sub = dys.levels[dl].cubes[dys.cubeAt(dl, x)];
            for (int z : sub.members) best = std::max(best, std::abs(Pf[k][z]));
        }
        for (int k = std::min(N, K); k <= K; ++k) best = std::max(best, std::abs(Pf[k][x]));
        out[x] = best;
    }
    return out;
}

Vec nontangential_maximal(const OperatorFamily& fam, const Vec& f, double theta) {
    if (!(theta > 0.0)) throw std::invalid_argument("nontangential maximal needs theta > 0");
    const QuasiMetricSpace& X = *fam.X;
    const int K = fam.K;
    std::vector<Vec> Pf(K + 1);
    for (int k = 0; k <= K; ++k) Pf[k] = fam.applyP(k, f);

    Vec out(X.n, 0.0);
#pragma omp parallel for schedule(static)
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

Vec TestDictionary::entryPhi(int e, int x) const {
    const int n = X->n;
    int kind = kindOf(e), l = levelOf(e);
    double s = fam->dys->scale(l);
    Vec phi(n, 0.0);
    switch (kind) {
        case 0:
            for (int y = 0; y < n; ++y) phi[y] = fam->P[l].at(x, y);
            break;
        case 1:
            for (int y = 0; y < n; ++y) phi[y] = std::max(0.0, 1.0 - X->d(x, y) / s);
            break;
        default:
            for (int y = 0; y < n; ++y)
                phi[y] = fam->P[l].at(x, y) * std::max(0.0, 1.0 - X->d(x, y) / (2.0 * s));
    }
    return phi;
}

TestDictionary build_test_dictionary(const OperatorFamily& fam, double beta, double gamma) {
    TestDictionary dict;
    dict.X = fam.X;
    dict.fam = &fam;
    dict.beta = beta;
    dict.gamma = gamma;
    dict.L = fam.K;
    const int n = fam.X->n;
    dict.norms.assign(dict.entries(), std::vector<double>(n, 0.0));
    for (int e = 0; e < dict.entries(); ++e) {
        double r = fam.dys->scale(dict.levelOf(e));
#pragma omp parallel for schedule(static)
        for (int x = 0; x < n; ++x)
            dict.norms[e][x] = g_norm(*fam.X, dict.entryPhi(e, x), {x, r, beta, gamma});
    }
    return dict;
}

Vec grand_maximal_dict(const TestDictionary& dict, const Vec& f) {
    const QuasiMetricSpace& X = *dict.X;
    const int n = X.n;
    Vec out(n, 0.0);
#pragma omp parallel for schedule(static)
    for (int x = 0; x < n; ++x) {
        double best = 0.0;
        for (int e = 0; e < dict.entries(); ++e) {
            double nrm = dict.norms[e][x];
            if (!(nrm > 0.0)) continue;
            Vec phi = dict.entryPhi(e, x);
            double ip = 0.0;
            for (int y = 0; y < n; ++y) ip += f[y] * phi[y] * X.mu[y];
            best = std::max(best, std::abs(ip) / nrm);
        }
        out[x] = best;
    }
    return out;
}

double lp_quasinorm(const QuasiMetricSpace& X, const Vec& F, double p) {
    if (!(p > 0.0)) throw std::invalid_argument("lp_quasinorm needs p > 0");
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : F) m = std::max(m, std::abs(v));
        return m;
    }
    double s = 0.0;
    for (int x = 0; x < X.n; ++x) s += std::pow(std::abs(F[x]), p) * X.mu[x];
    return std::pow(s, 1.0 / p);
}

} // namespace homog
