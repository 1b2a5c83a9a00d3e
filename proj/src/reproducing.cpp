#include "homog/reproducing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "homog/rng.hpp"

namespace homog {

namespace {

double l2mu(const QuasiMetricSpace& X, const Vec& a, const Vec& b) {
    double s = 0.0;
    for (int x = 0; x < X.n; ++x) {
        double d = a[x] - b[x];
        s += d * d * X.mu[x];
    }
    return std::sqrt(s);
}

void require_haar(const OperatorFamily& fam, const char* what) {
    if (fam.kind != FamilyKind::haar_martingale)
        throw std::invalid_argument(std::string("unsupported family: ") + what +
                                    " needs the martingale construction");
}

} // namespace

SamplerSpec SamplerSpec::parse(const std::string& text) {
    if (text == "center") return {center, 0};
    if (text == "worst") return {worst, 0};
    if (text.rfind("random:", 0) == 0) {
        size_t pos = 0;
        uint64_t seed = std::stoull(text.substr(7), &pos);
        if (pos != text.size() - 7)
            throw std::invalid_argument("bad sampler seed: " + text);
        return {random_seeded, seed};
    }
    throw std::invalid_argument("unknown sampler \"" + text +
                                "\"; expected center, worst, or random:<seed>");
}

Vec reproduce_exact(const OperatorFamily& fam, const Vec& f, int K, ReproducingReport* report) {
    require_haar(fam, "the exact reconstruction");
    const QuasiMetricSpace& X = *fam.X;
    if (static_cast<int>(f.size()) != X.n)
        throw std::invalid_argument("input length does not match the space");
    if (K < 0 || K > fam.K)
        throw std::invalid_argument("truncation level outside the family's range");

    Vec partial(X.n, 0.0);
    std::vector<double> residuals;
    residuals.reserve(K + 1);
    for (int k = 0; k <= K; ++k) {
        Vec t = fam.applyQ(k, fam.applyQ(k, f));
        for (int x = 0; x < X.n; ++x) partial[x] += t[x];
        residuals.push_back(l2mu(X, f, partial));
    }
    if (report) {
        report->route = "exact_haar";
        report->residuals = std::move(residuals);
        report->N = -1;
        report->j0 = -1;
    }
    return partial;
}

Vec reproduce_discrete(const OperatorFamily& fam, const DyadicSystem& subidx, const Vec& f,
                       int N, int j0, const SamplerSpec& sampler, ReproducingReport* report) {
    require_haar(fam, "the discrete reconstruction");
    if (fam.dys != &subidx)
        throw std::invalid_argument(
            "refinement index missing: the discrete reconstruction needs the cube system the "
            "family was built on");
    const QuasiMetricSpace& X = *fam.X;
    if (static_cast<int>(f.size()) != X.n)
        throw std::invalid_argument("input length does not match the space");
    if (N < 0) throw std::invalid_argument("averaged/sampled split level must be nonnegative");
    if (j0 < 1) throw std::invalid_argument("refinement depth must be at least one");

    Rng rng(sampler.seed);
    Vec partial(X.n, 0.0);
    std::vector<double> residuals;
    residuals.reserve(fam.K + 1);
    for (int k = 0; k <= fam.K; ++k) {
        const Vec Dkf = fam.applyQ(k, f);
        const Matrix& Qk = fam.Q[k];
        int dl = std::min(k + j0, subidx.K_max);
        const auto& cubes = subidx.levels[dl].cubes;
        int C = static_cast<int>(cubes.size());

        std::vector<double> muQ(C), avg(C);
        for (int c = 0; c < C; ++c) {
            double m = 0.0, s = 0.0;
            for (int y : cubes[c].members) {
                m += X.mu[y];
                s += Dkf[y] * X.mu[y];
            }
            muQ[c] = m;
            avg[c] = s / m;
        }

        if (k <= N) {
            // averaged branch: (integral of the kernel column over the cube)
            // times the cube average of D_k f
#pragma omp parallel for schedule(static)
            for (int x = 0; x < X.n; ++x) {
                double acc = 0.0;
                for (int c = 0; c < C; ++c) {
                    double col = 0.0;
                    for (int y : cubes[c].members) col += Qk.at(x, y) * X.mu[y];
                    acc += col * avg[c];
                }
                partial[x] += acc;
            }
        } else {
            // sampled branch: one representative point per cube
            std::vector<int> ys(C);
            for (int c = 0; c < C; ++c) {
                const auto& mem = cubes[c].members;
                switch (sampler.kind) {
                case SamplerSpec::center: ys[c] = cubes[c].center; break;
                case SamplerSpec::worst: {
                    int best = mem[0];
                    double worst = -1.0;
                    for (int y : mem) {
                        double dev = std::fabs(Dkf[y] - avg[c]);
                        if (dev > worst) {
                            worst = dev;
                            best = y;
                        }
                    }
                    ys[c] = best;
                    break;
                }
                case SamplerSpec::random_seeded:
                    ys[c] = mem[static_cast<size_t>(rng.below(mem.size()))];
                    break;
                }
            }
#pragma omp parallel for schedule(static)
            for (int x = 0; x < X.n; ++x) {
                double acc = 0.0;
                for (int c = 0; c < C; ++c) acc += muQ[c] * Qk.at(x, ys[c]) * Dkf[ys[c]];
                partial[x] += acc;
            }
        }
        residuals.push_back(l2mu(X, f, partial));
    }
    if (report) {
        report->route = "discrete_sampled";
        report->residuals = std::move(residuals);
        report->N = N;
        report->j0 = j0;
    }
    return partial;
}

} // namespace homog
