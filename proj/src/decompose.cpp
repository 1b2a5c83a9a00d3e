#include "homog/decompose.hpp"

#include "homog/square.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace homog {

namespace {

constexpr double kInfQ = std::numeric_limits<double>::infinity();

double linf(const Vec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

double l2mu(const QuasiMetricSpace& X, const Vec& v) {
    double s = 0.0;
    for (int y = 0; y < X.n; ++y) s += v[y] * v[y] * X.mu[y];
    return std::sqrt(s);
}

bool all_zero(const Vec& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

// L^q norm over the ball members in ascending order, matching the validator's
// summation exactly so bounds arranged here survive re-checking there.
double ball_lq(const QuasiMetricSpace& X, const Vec& v, int x0, double r0, double q) {
    double s = 0.0, m = 0.0;
    for (int y = 0; y < X.n; ++y) {
        if (!(X.d(x0, y) < r0)) continue;
        if (std::isinf(q))
            m = std::max(m, std::fabs(v[y]));
        else
            s += std::pow(std::fabs(v[y]), q) * X.mu[y];
    }
    return std::isinf(q) ? m : std::pow(s, 1.0 / q);
}

} // namespace

WhitneyCover whitney_cover(const QuasiMetricSpace& X, const std::vector<char>& omega, double A) {
    if (static_cast<int>(omega.size()) != X.n)
        throw std::invalid_argument("omega mask size must match the space");
    int inside = 0;
    for (char c : omega) inside += (c != 0);
    if (inside == 0) throw std::runtime_error("empty set has no cover");
    if (inside == X.n)
        throw std::runtime_error("the whole space has no complement to anchor the radii");
    double A0 = X.A0;
    if (A <= 0.0) A = 16.0 * A0 * A0 * A0 * A0;
    if (A < 1.0) throw std::invalid_argument("dilation parameter must be >= 1");

    WhitneyCover cov;
    cov.omega = omega;
    cov.A = A;

    // per-point radius and nearest outside partner (ties to the lowest index)
    std::vector<double> rad(X.n, 0.0);
    std::vector<int> near(X.n, -1);
    std::vector<int> cand;
    for (int x = 0; x < X.n; ++x) {
        if (!omega[x]) continue;
        double dmin = std::numeric_limits<double>::infinity();
        int arg = -1;
        for (int y = 0; y < X.n; ++y) {
            if (omega[y]) continue;
            if (X.d(x, y) < dmin) {
                dmin = X.d(x, y);
                arg = y;
            }
        }
        rad[x] = dmin / (2.0 * A * A0);
        near[x] = arg;
        cand.push_back(x);
    }
    std::sort(cand.begin(), cand.end(), [&](int a, int b) {
        if (rad[a] != rad[b]) return rad[a] > rad[b];
        return a < b;
    });

    // greedy selection: keep x iff its shrunken ball avoids every point already
    // claimed by a selected shrunken ball
    double shrink = 1.0 / (5.0 * A0 * A0 * A0);
    std::vector<char> blocked(X.n, 0);
    for (int x : cand) {
        double sr = rad[x] * shrink;
        bool clash = false;
        for (int z = 0; z < X.n && !clash; ++z)
            if (X.d(x, z) < sr && blocked[z]) clash = true;
        if (clash) continue;
        for (int z = 0; z < X.n; ++z)
            if (X.d(x, z) < sr) blocked[z] = 1;
        cov.centers.push_back(x);
        cov.radii.push_back(rad[x]);
        cov.partners.push_back(near[x]);
    }

    // overlap bound of the A-dilated balls, self included
    int K = cov.size();
    int words = (X.n + 63) / 64;
    std::vector<uint64_t> masks(static_cast<size_t>(K) * words, 0);
    for (int k = 0; k < K; ++k)
        for (int z = 0; z < X.n; ++z)
            if (X.d(cov.centers[k], z) < A * cov.radii[k])
                masks[static_cast<size_t>(k) * words + z / 64] |= (uint64_t{1} << (z % 64));
    int L0 = 0;
    for (int k = 0; k < K; ++k) {
        int cnt = 0;
        for (int j = 0; j < K; ++j) {
            bool meet = false;
            for (int w = 0; w < words && !meet; ++w)
                meet = (masks[static_cast<size_t>(k) * words + w] &
                        masks[static_cast<size_t>(j) * words + w]) != 0;
            cnt += meet;
        }
        L0 = std::max(L0, cnt);
    }
    cov.L0 = L0;

    ValidationReport rep = verify_whitney(X, cov);
    if (!rep.ok()) throw std::logic_error("whitney cover verification failed:\n" + rep.joined());
    return cov;
}

ValidationReport verify_whitney(const QuasiMetricSpace& X, const WhitneyCover& cov) {
    ValidationReport rep;
    double A0 = X.A0, A = cov.A;
    int K = cov.size();
    double shrink = 1.0 / (5.0 * A0 * A0 * A0);

    // (i) shrunken balls pairwise disjoint
    std::vector<int> owner(X.n, -1);
    for (int k = 0; k < K; ++k)
        for (int z = 0; z < X.n; ++z)
            if (X.d(cov.centers[k], z) < cov.radii[k] * shrink) {
                if (owner[z] >= 0)
                    rep.add("shrunken balls " + std::to_string(owner[z]) + " and " +
                            std::to_string(k) + " share point " + std::to_string(z));
                owner[z] = k;
            }

    // distance to the complement per point
    std::vector<double> dc(X.n, std::numeric_limits<double>::infinity());
    for (int x = 0; x < X.n; ++x)
        for (int y = 0; y < X.n; ++y)
            if (!cov.omega[y]) dc[x] = std::min(dc[x], X.d(x, y));

    // (ii) covering equals Omega; dilated balls stay inside
    std::vector<char> covered(X.n, 0);
    for (int k = 0; k < K; ++k)
        for (int z = 0; z < X.n; ++z) {
            if (X.d(cov.centers[k], z) < cov.radii[k]) covered[z] = 1;
            if (X.d(cov.centers[k], z) < A * cov.radii[k] && !cov.omega[z])
                rep.add("dilated ball " + std::to_string(k) + " leaves Omega at point " +
                        std::to_string(z));
        }
    for (int z = 0; z < X.n; ++z) {
        if (cov.omega[z] && !covered[z]) rep.add("point " + std::to_string(z) + " uncovered");
        if (!cov.omega[z] && covered[z])
            rep.add("point " + std::to_string(z) + " covered but outside Omega");
    }

    // (iii) distance sandwich on every undilated ball
    for (int k = 0; k < K; ++k)
        for (int z = 0; z < X.n; ++z) {
            if (!(X.d(cov.centers[k], z) < cov.radii[k])) continue;
            if (!(A * cov.radii[k] <= dc[z] && dc[z] <= 3.0 * A * A0 * A0 * cov.radii[k]))
                rep.add("distance sandwich fails on ball " + std::to_string(k) + " at point " +
                        std::to_string(z));
        }

    // (iv) partners exist outside within 3 A A0 r_k
    for (int k = 0; k < K; ++k) {
        int y = cov.partners[k];
        if (y < 0 || y >= X.n || cov.omega[y])
            rep.add("partner of ball " + std::to_string(k) + " is not outside Omega");
        else if (!(X.d(cov.centers[k], y) < 3.0 * A * A0 * cov.radii[k]))
            rep.add("partner of ball " + std::to_string(k) + " too far");
    }

    // (v) meeting dilated balls have comparable radii; L0 matches
    int L0 = 0;
    for (int k = 0; k < K; ++k) {
        int cnt = 0;
        for (int j = 0; j < K; ++j) {
            bool meet = false;
            for (int z = 0; z < X.n && !meet; ++z)
                meet = X.d(cov.centers[k], z) < A * cov.radii[k] &&
                       X.d(cov.centers[j], z) < A * cov.radii[j];
            if (!meet) continue;
            ++cnt;
            double hi = 8.0 * A0 * A0;
            if (!(cov.radii[j] <= hi * cov.radii[k] && cov.radii[k] <= hi * cov.radii[j]))
                rep.add("radii of meeting balls " + std::to_string(k) + "," + std::to_string(j) +
                        " not comparable");
        }
        L0 = std::max(L0, cnt);
    }
    if (L0 != cov.L0)
        rep.add("stored L0 " + std::to_string(cov.L0) + " != measured " + std::to_string(L0));
    return rep;
}

PartitionOfUnity partition_of_unity(const QuasiMetricSpace& X, const WhitneyCover& cov,
                                    double beta, double gamma) {
    PartitionOfUnity pou;
    int K = cov.size();
    if (K == 0) return pou;
    double A0 = X.A0;
    double eps = std::numeric_limits<double>::epsilon();

    std::vector<Vec> psi(K, Vec(X.n, 0.0));
    for (int k = 0; k < K; ++k) {
        double rk = cov.radii[k];
        double den = (2.0 * A0 - 1.0) * rk + eps;
        for (int x = 0; x < X.n; ++x) {
            if (!cov.omega[x]) continue;
            double t = (2.0 * A0 * rk - X.d(cov.centers[k], x)) / den;
            psi[k][x] = std::clamp(t, 0.0, 1.0);
        }
    }

    pou.phi.assign(K, Vec(X.n, 0.0));
    for (int x = 0; x < X.n; ++x) {
        if (!cov.omega[x]) continue;
        double S = 0.0;
        for (int k = 0; k < K; ++k) S += psi[k][x];
        if (S == 0.0)
            throw std::runtime_error("point " + std::to_string(x) +
                                     " of Omega carries no bump weight");
        for (int k = 0; k < K; ++k) pou.phi[k][x] = psi[k][x] / S;
        // exact unit sum: the last positive weight holds the complement of
        // the ascending prefix (the final rounding then lands on one), with
        // trailing crumbs folded backward if the prefix overshot
        for (int idx = K - 1; idx >= 0; --idx) {
            if (pou.phi[idx][x] <= 0.0) continue;
            double P = 0.0;
            for (int k = 0; k < idx; ++k) P += pou.phi[k][x];
            double comp = 1.0 - P;
            if (comp < 0.0) {
                pou.phi[idx][x] = 0.0;
                continue;
            }
            pou.phi[idx][x] = comp;
            break;
        }
        double T = 0.0;
        for (int k = 0; k < K; ++k) T += pou.phi[k][x];
        if (T != 1.0)
            throw std::logic_error("partition weights failed to reach an exact sum of one");
    }

    pou.min_ratio = std::numeric_limits<double>::infinity();
    for (int k = 0; k < K; ++k)
        for (int x = 0; x < X.n; ++x) {
            if (!cov.omega[x] || !(X.d(cov.centers[k], x) < cov.radii[k])) continue;
            double ratio = pou.phi[k][x] * cov.L0;
            if (ratio < 1.0 - 1e-9)
                throw std::logic_error("partition weight below the overlap floor at point " +
                                       std::to_string(x));
            pou.min_ratio = std::min(pou.min_ratio, ratio);
        }
    if (!std::isfinite(pou.min_ratio)) pou.min_ratio = 0.0;

    pou.holder_C = 0.0;
    for (int k = 0; k < K; ++k) {
        GNormParams prm;
        prm.x1 = cov.centers[k];
        prm.r = cov.radii[k];
        prm.beta = beta;
        prm.gamma = gamma;
        double gn = g_norm(X, pou.phi[k], prm);
        pou.holder_C = std::max(pou.holder_C, gn / X.ballMeasure(cov.centers[k], cov.radii[k]));
    }
    return pou;
}

namespace {

// one level of the good/bad splitting; empty omega produces the synthetic top
// level (g = f, no balls) used by the telescoping driver
CZParts cz_level(const QuasiMetricSpace& X, const Vec& f, int j, double p,
                 const std::vector<char>& omega) {
    CZParts parts;
    parts.j = j;
    parts.thresh = std::ldexp(1.0, j);
    parts.p = p;
    parts.omega = omega;

    int inside = 0;
    for (char c : omega) inside += (c != 0);
    double fmax = linf(f);
    if (inside == 0) {
        parts.g = f;
        parts.g_bound_C = fmax / parts.thresh;
        return parts;
    }

    parts.cover = whitney_cover(X, omega);
    parts.pou = partition_of_unity(X, parts.cover);
    int K = parts.cover.size();
    double A0 = X.A0;
    double t1 = 1.0 / (48.0 * std::pow(A0, 5.0));
    double tstar = std::pow(2.0 * A0, -4.0);
    parts.in_I1.assign(K, 0);
    parts.in_Istar.assign(K, 0);
    parts.m.assign(K, 0.0);
    parts.b.assign(K, Vec(X.n, 0.0));

#pragma omp parallel for schedule(static)
    for (int k = 0; k < K; ++k) {
        parts.in_I1[k] = parts.cover.radii[k] <= t1;
        parts.in_Istar[k] = parts.cover.radii[k] <= tstar;
        const Vec& phi = parts.pou.phi[k];
        double num = 0.0, den = 0.0;
        for (int x = 0; x < X.n; ++x) {
            num += f[x] * phi[x] * X.mu[x];
            den += phi[x] * X.mu[x];
        }
        parts.m[k] = num / den;
        for (int x = 0; x < X.n; ++x)
            parts.b[k][x] = parts.in_Istar[k] ? (f[x] - parts.m[k]) * phi[x] : f[x] * phi[x];
    }

    parts.g = f;
    for (int k = 0; k < K; ++k)
        for (int x = 0; x < X.n; ++x) parts.g[x] -= parts.b[k][x];

    // diagnostics: fresh re-summation, closed form, mean cancellation, sup bound
    Vec s(X.n, 0.0);
    for (int k = 0; k < K; ++k)
        for (int x = 0; x < X.n; ++x) s[x] += parts.b[k][x];
    Vec diff(X.n, 0.0);
    for (int x = 0; x < X.n; ++x) diff[x] = f[x] - parts.g[x] - s[x];
    double fl2 = l2mu(X, f);
    parts.recon_err = fl2 > 0.0 ? l2mu(X, diff) / fl2 : 0.0;

    double iderr = 0.0;
    for (int x = 0; x < X.n; ++x) {
        double closed;
        if (omega[x]) {
            closed = 0.0;
            for (int k = 0; k < K; ++k)
                if (parts.in_Istar[k]) closed += parts.m[k] * parts.pou.phi[k][x];
        } else {
            closed = f[x];
        }
        iderr = std::max(iderr, std::fabs(parts.g[x] - closed));
    }
    parts.identity_err = fmax > 0.0 ? iderr / fmax : iderr;

    for (int k = 0; k < K; ++k) {
        if (!parts.in_Istar[k]) continue;
        double integ = 0.0;
        for (int x = 0; x < X.n; ++x) integ += parts.b[k][x] * X.mu[x];
        parts.cancel_worst = std::max(parts.cancel_worst, std::fabs(integ));
    }
    parts.g_bound_C = linf(parts.g) / parts.thresh;
    return parts;
}

std::vector<char> level_set(const Vec& fstar, double thresh) {
    std::vector<char> omega(fstar.size(), 0);
    for (size_t x = 0; x < fstar.size(); ++x) omega[x] = fstar[x] > thresh;
    return omega;
}

} // namespace

CZParts cz_decompose(const QuasiMetricSpace& X, const OperatorFamily& fam,
                     const TestDictionary& dict, const Vec& f, int j, double p) {
    if (dict.X != &X || dict.fam != &fam)
        throw std::invalid_argument("dictionary was built for a different space or family");
    Vec fstar = grand_maximal_dict(dict, f);
    std::vector<char> omega = level_set(fstar, std::ldexp(1.0, j));
    int inside = 0;
    for (char c : omega) inside += (c != 0);
    if (inside == 0)
        throw std::runtime_error("level set at j=" + std::to_string(j) +
                                 " is empty: threshold above the maximal function");
    if (inside == X.n)
        throw std::runtime_error("level set at j=" + std::to_string(j) +
                                 " is the whole space: threshold too low");
    return cz_level(X, f, j, p, omega);
}

void cz_corrections(const QuasiMetricSpace& X, const Vec& f, CZParts& lo, const CZParts& hi) {
    lo.istar_next.clear();
    for (int l = 0; l < hi.cover.size(); ++l)
        if (hi.in_Istar[l]) lo.istar_next.push_back(l);
    int K = lo.cover.size();
    int M = static_cast<int>(lo.istar_next.size());
    lo.L.assign(K, std::vector<double>(M, 0.0));
    if (K == 0 || M == 0) return;

#pragma omp parallel for schedule(static)
    for (int li = 0; li < M; ++li) {
        int l = lo.istar_next[li];
        const Vec& phil = hi.pou.phi[l];
        double den = 0.0;
        for (int x = 0; x < X.n; ++x) den += phil[x] * X.mu[x];
        for (int k = 0; k < K; ++k) {
            const Vec& phik = lo.pou.phi[k];
            double num = 0.0;
            for (int x = 0; x < X.n; ++x) {
                if (phil[x] == 0.0 || phik[x] == 0.0) continue;
                num += (f[x] - hi.m[l]) * phik[x] * phil[x] * X.mu[x];
            }
            lo.L[k][li] = num / den;
        }
    }

    double fmax = std::max(linf(f), 1e-300);
    double worst = 0.0, bound = 0.0;
    for (int li = 0; li < M; ++li) {
        double col = 0.0;
        for (int k = 0; k < K; ++k) {
            col += lo.L[k][li];
            bound = std::max(bound, std::fabs(lo.L[k][li]));
        }
        int l = lo.istar_next[li];
        for (int x = 0; x < X.n; ++x)
            worst = std::max(worst, std::fabs(col * hi.pou.phi[l][x]));
    }
    lo.corr_cancel_err = worst / fmax;
    lo.corr_bound_C = bound / lo.thresh;
}

AtomicDecomposition atomic_decompose_maximal(const QuasiMetricSpace& X, const OperatorFamily& fam,
                                             const TestDictionary& dict, const Vec& f, double p,
                                             int j_lo_override, int j_hi_override) {
    if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("p must be in (0, 1]");
    if (dict.X != &X || dict.fam != &fam)
        throw std::invalid_argument("dictionary was built for a different space or family");
    AtomicDecomposition dec;
    dec.p = p;
    dec.q = kInfQ;
    if (all_zero(f)) return dec;

    Vec fstar = grand_maximal_dict(dict, f);
    double normp = lp_quasinorm(X, fstar, p);
    int j0 = std::ilogb(normp);
    while (std::ldexp(1.0, j0) < normp) ++j0;
    while (std::ldexp(1.0, j0 - 1) >= normp) --j0;
    // the cover needs a complement: raise the floor past all-space level sets
    for (;;) {
        std::vector<char> omega = level_set(fstar, std::ldexp(1.0, j0));
        int inside = 0;
        for (char c : omega) inside += (c != 0);
        if (inside < X.n) break;
        ++j0;
    }
    if (j_lo_override != INT_MIN) j0 = j_lo_override;

    std::vector<CZParts> levels;
    for (int j = j0;; ++j) {
        std::vector<char> omega = level_set(fstar, std::ldexp(1.0, j));
        int inside = 0;
        for (char c : omega) inside += (c != 0);
        if (j > j_hi_override || inside == 0) {
            levels.push_back(cz_level(X, f, j, p, std::vector<char>(X.n, 0)));
            break;
        }
        if (inside == X.n)
            throw std::runtime_error("level set at j=" + std::to_string(j) +
                                     " is the whole space: raise the range floor");
        levels.push_back(cz_level(X, f, j, p, omega));
        if (j - j0 > 2100)
            throw std::logic_error("threshold range exhausted without an empty level");
    }
    int T = static_cast<int>(levels.size()) - 1;
    for (int t = 0; t < T; ++t) cz_corrections(X, f, levels[t], levels[t + 1]);

    struct Piece {
        Vec h;
        int x0 = 0;
        double rad = 0.0;
        int j = 0, k = 0;
    };
    std::vector<Piece> pieces;
    double A0 = X.A0;
    double ballC = 48.0 * std::pow(A0, 5.0);
    for (int t = 0; t < T; ++t) {
        CZParts& lo = levels[t];
        const CZParts& hi = levels[t + 1];
        int K = lo.cover.size();
        size_t base = pieces.size();
        pieces.resize(base + K);
#pragma omp parallel for schedule(static)
        for (int k = 0; k < K; ++k) {
            Piece pc;
            pc.h.assign(X.n, 0.0);
            const Vec& phik = lo.pou.phi[k];
            if (lo.in_I1[k]) {
                pc.h = lo.b[k];
                for (size_t li = 0; li < lo.istar_next.size(); ++li) {
                    int l = lo.istar_next[li];
                    for (int x = 0; x < X.n; ++x) pc.h[x] -= hi.b[l][x] * phik[x];
                    double Lkl = lo.L[k][li];
                    if (Lkl != 0.0)
                        for (int x = 0; x < X.n; ++x) pc.h[x] += Lkl * hi.pou.phi[l][x];
                }
            } else {
                double shift = lo.in_Istar[k] ? lo.m[k] : 0.0;
                for (int x = 0; x < X.n; ++x) pc.h[x] = (hi.g[x] - shift) * phik[x];
                for (size_t li = 0; li < lo.istar_next.size(); ++li) {
                    int l = lo.istar_next[li];
                    double Lkl = lo.L[k][li];
                    if (Lkl != 0.0)
                        for (int x = 0; x < X.n; ++x) pc.h[x] += Lkl * hi.pou.phi[l][x];
                }
            }
            pc.x0 = lo.cover.centers[k];
            pc.rad = ballC * lo.cover.radii[k];
            pc.j = lo.j;
            pc.k = k;
            pieces[base + k] = std::move(pc);
        }
    }

    double ctil = 0.0;
    for (const Piece& pc : pieces) ctil = std::max(ctil, linf(pc.h) / std::ldexp(1.0, pc.j));
    dec.scale_C = ctil;

    for (Piece& pc : pieces) {
        if (linf(pc.h) == 0.0) continue;
        double muB = X.ballMeasure(pc.x0, pc.rad);
        double lambda = ctil * std::ldexp(1.0, pc.j) * std::pow(muB, 1.0 / p);
        double bound = std::pow(muB, 0.0 - 1.0 / p);
        AtomEntry e;
        e.a.assign(X.n, 0.0);
        for (int x = 0; x < X.n; ++x) {
            double v = pc.h[x] / lambda;
            if (std::fabs(v) > bound) v = std::copysign(bound, v);
            e.a[x] = v;
        }
        e.x0 = pc.x0;
        e.r0 = pc.rad;
        e.lambda = lambda;
        e.j = pc.j;
        e.k = pc.k;
        dec.atoms.push_back(std::move(e));
    }

    const Vec& g0 = levels.front().g;
    if (linf(g0) > 0.0) {
        double rad = X.diameter() + 1.0;
        double muB = X.ballMeasure(0, rad);
        double bound = std::pow(muB, 0.0 - 1.0 / p);
        bool constant = std::all_of(g0.begin(), g0.end(), [&](double v) { return v == g0[0]; });
        AtomEntry e;
        e.a.assign(X.n, 0.0);
        if (constant) {
            // emit the signed normalized constant bitwise; the coefficient
            // absorbs the magnitude so the pair still rebuilds g exactly
            for (int x = 0; x < X.n; ++x) e.a[x] = std::copysign(bound, g0[0]);
            e.lambda = std::fabs(g0[0]) * std::pow(muB, 1.0 / p);
        } else {
            double c = linf(g0) / std::ldexp(1.0, j0);
            e.lambda = c * std::ldexp(1.0, j0) * std::pow(muB, 1.0 / p);
            for (int x = 0; x < X.n; ++x) {
                double v = g0[x] / e.lambda;
                if (std::fabs(v) > bound) v = std::copysign(bound, v);
                e.a[x] = v;
            }
        }
        e.x0 = 0;
        e.r0 = rad;
        e.j = j0;
        e.k = -1;
        e.global = true;
        dec.atoms.push_back(std::move(e));
    }

    for (const AtomEntry& e : dec.atoms) {
        dec.lp_sum += std::pow(e.lambda, p);
        if (!validate_local_atom(X, e.a, e.x0, e.r0, p, kInfQ).ok()) ++dec.invalid;
    }
    Vec rec = reconstruct(dec, X.n);
    Vec diff(X.n);
    for (int x = 0; x < X.n; ++x) diff[x] = f[x] - rec[x];
    double fl2 = l2mu(X, f);
    dec.residual_rel = fl2 > 0.0 ? l2mu(X, diff) / fl2 : 0.0;
    dec.route_C = dec.lp_sum / std::pow(normp, p);
    return dec;
}

namespace {

// cube handle over the real levels 1..K plus a virtual all-singleton level
// K+1 pairing with the deepest operator
struct CubeKey {
    int lvl = 0;
    int idx = 0;
};

} // namespace

AtomicDecomposition atomic_decompose_wavelet(const QuasiMetricSpace& X, const DyadicSystem& dys,
                                             const Vec& f, double p, int N,
                                             std::vector<WaveletPiece>* pieces_out) {
    OperatorFamily fam = build_haar_family(dys);
    return atomic_decompose_wavelet(X, fam, f, p, N, pieces_out);
}

AtomicDecomposition atomic_decompose_wavelet(const QuasiMetricSpace& X, const OperatorFamily& fam,
                                             const Vec& f, double p, int N,
                                             std::vector<WaveletPiece>* pieces_out) {
    if (fam.kind != FamilyKind::haar_martingale)
        throw std::invalid_argument(
            "unsupported family: the square-function route needs the martingale construction");
    if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("p must be in (0, 1]");
    if (N < 0) throw std::invalid_argument("N must be >= 0");
    const DyadicSystem& dys = *fam.dys;
    int K = fam.K;
    AtomicDecomposition dec;
    dec.p = p;
    dec.q = 2.0;
    if (pieces_out) pieces_out->clear();
    if (all_zero(f)) return dec;

    Vec S0 = lusin_area(fam, f, 1.0);
    double smax = 0.0, smin = std::numeric_limits<double>::infinity();
    for (double s : S0) {
        smax = std::max(smax, s);
        if (s > 0.0) smin = std::min(smin, s);
    }
    if (smax == 0.0) return dec;  // unreachable for f != 0; kept for safety
    int khi = std::ilogb(smax) + 1;
    int klo = std::ilogb(smin) - 2;

    std::vector<Vec> Qf(K + 1);
    for (int k = 0; k <= K; ++k) Qf[k] = fam.applyQ(k, f);

    // cube access helpers; virtual level K+1 holds one singleton per point
    auto cube_count = [&](int lvl) {
        return lvl <= K ? static_cast<int>(dys.levels[lvl].cubes.size()) : X.n;
    };
    auto members = [&](int lvl, int idx) -> std::vector<int> {
        if (lvl <= K) return dys.levels[lvl].cubes[idx].members;
        return {idx};
    };
    auto center_of = [&](int lvl, int idx) {
        return lvl <= K ? dys.levels[lvl].cubes[idx].center : idx;
    };
    auto anchor = [&](int lvl, int idx) {  // a member point, for ancestor lookups
        return lvl <= K ? dys.levels[lvl].cubes[idx].members.front() : idx;
    };

    // cube measures at the real levels, member order matching the kernels
    std::vector<std::vector<double>> cmu(K + 1);
    for (int lvl = 0; lvl <= K; ++lvl) {
        cmu[lvl].assign(dys.levels[lvl].cubes.size(), 0.0);
        for (size_t c = 0; c < dys.levels[lvl].cubes.size(); ++c)
            for (int y : dys.levels[lvl].cubes[c].members) cmu[lvl][c] += X.mu[y];
    }

    // class of each cube: the largest k with mu(Q cap {S0 > 2^k}) > mu(Q)/2
    const int kUnclassified = INT_MIN;
    std::vector<std::vector<int>> cls(K + 2);
    for (int lvl = 1; lvl <= K + 1; ++lvl) {
        int nc = cube_count(lvl);
        cls[lvl].assign(nc, kUnclassified);
#pragma omp parallel for schedule(static)
        for (int c = 0; c < nc; ++c) {
            std::vector<int> mem = members(lvl, c);
            double half = 0.0;
            for (int y : mem) half += X.mu[y];
            half *= 0.5;
            for (int k = khi; k >= klo; --k) {
                double t = std::ldexp(1.0, k);
                double w = 0.0;
                for (int y : mem)
                    if (S0[y] > t) w += X.mu[y];
                if (w > half) {
                    cls[lvl][c] = k;
                    break;
                }
            }
            if (cls[lvl][c] == kUnclassified) {
                int op = lvl - 1;
                for (int y : mem)
                    if (Qf[op][y] != 0.0)
                        throw std::logic_error(
                            "unclassified cube carries kernel mass; classification is broken");
            }
        }
    }

    // group each classified cube under its topmost same-class ancestor
    struct Group {
        std::vector<CubeKey> cubes;
    };
    std::map<std::tuple<int, int, int>, Group> groups;
    for (int lvl = 1; lvl <= K + 1; ++lvl) {
        int nc = cube_count(lvl);
        for (int c = 0; c < nc; ++c) {
            if (cls[lvl][c] == kUnclassified) continue;
            int k = cls[lvl][c];
            int rl = lvl, ri = c;
            int pt = anchor(lvl, c);
            for (int m = 1; m < lvl && m <= K; ++m) {
                int a = dys.cubeAt(m, pt);
                if (cls[m][a] == k) {
                    rl = m;
                    ri = a;
                    break;
                }
            }
            groups[{k, rl, ri}].cubes.push_back({lvl, c});
        }
    }

    double delta = dys.delta;
    double diam = X.diameter();
    double worst_fix = 1.0;

    for (const auto& [key, grp] : groups) {
        int gcls = std::get<0>(key);
        int rl = std::get<1>(key), ri = std::get<2>(key);
        int zR = center_of(rl, ri);
        double muR = rl <= K ? cmu[rl][ri] : X.mu[ri];

        for (int part = 1; part <= 2; ++part) {
            double E = 0.0;
            for (const CubeKey& ck : grp.cubes) {
                bool inS1 = ck.lvl <= N + 1;
                if ((part == 1) != inS1) continue;
                int op = ck.lvl - 1;
                for (int y : members(ck.lvl, ck.idx)) E += Qf[op][y] * Qf[op][y] * X.mu[y];
            }
            if (E == 0.0) continue;
            double lambda = std::pow(muR, 1.0 / p - 0.5) * std::sqrt(E);

            // assemble the group's kernel mass through the grouped averaging
            // structure so untouched points stay bitwise zero
            Vec piece(X.n, 0.0);
            for (const CubeKey& ck : grp.cubes) {
                bool inS1 = ck.lvl <= N + 1;
                if ((part == 1) != inS1) continue;
                int op = ck.lvl - 1;
                std::vector<int> mem = members(ck.lvl, ck.idx);
                double s1 = 0.0;
                for (int y : mem) s1 += Qf[op][y] * X.mu[y];
                int pt = mem.front();
                {
                    int a1 = dys.cubeAt(op, pt);
                    const auto& c1 = dys.levels[op].cubes[a1];
                    if (c1.members.size() == 1)
                        piece[c1.members[0]] += Qf[op][c1.members[0]];
                    else {
                        double v = s1 / cmu[op][a1];
                        for (int x : c1.members) piece[x] += v;
                    }
                }
                if (op >= 1) {
                    int a0 = dys.cubeAt(op - 1, pt);
                    const auto& c0 = dys.levels[op - 1].cubes[a0];
                    if (c0.members.size() == 1)
                        piece[c0.members[0]] -= Qf[op][c0.members[0]];
                    else {
                        double v = s1 / cmu[op - 1][a0];
                        for (int x : c0.members) piece[x] -= v;
                    }
                }
            }

            // supporting ball: the fixed coarse ball for the shallow part, the
            // measured support ball (midpoint radius) for the deep part
            double rball;
            if (part == 1) {
                rball = 1.0 / delta;
            } else {
                double maxd = 0.0;
                for (int x = 0; x < X.n; ++x)
                    if (piece[x] != 0.0) maxd = std::max(maxd, X.d(zR, x));
                double next = diam + 1.0;
                for (int x = 0; x < X.n; ++x)
                    if (X.d(zR, x) > maxd) next = std::min(next, X.d(zR, x));
                rball = 0.5 * (maxd + next);
            }
            double muB = X.ballMeasure(zR, rball);
            double bound = std::pow(muB, 0.5 - 1.0 / p);

            Vec b(X.n);
            for (int x = 0; x < X.n; ++x) b[x] = piece[x] / lambda;
            double l2b = ball_lq(X, b, zR, rball, 2.0);
            double c = std::max(1.0, l2b * std::pow(muB, 1.0 / p - 0.5));
            Vec a(X.n);
            for (int guard = 0;; ++guard) {
                for (int x = 0; x < X.n; ++x) a[x] = b[x] / c;
                if (ball_lq(X, a, zR, rball, 2.0) <= bound) break;
                if (guard >= 64)
                    throw std::logic_error("size normalization failed to settle");
                c *= 1.0 + std::ldexp(1.0, -50);
            }
            worst_fix = std::max(worst_fix, c);

            int atom_index;
            if (part == 1) {
                // route the shallow piece through the molecule splitter; on
                // these coarse balls every annulus is empty so it returns the
                // core restriction alone
                std::vector<AtomEntry> got = molecule_to_atoms(X, a, zR, rball, p, 2.0, {});
                atom_index = static_cast<int>(dec.atoms.size());
                for (AtomEntry& e : got) {
                    e.lambda *= lambda * c;
                    e.j = gcls;
                    e.k = atom_index;
                    dec.atoms.push_back(std::move(e));
                }
            } else {
                AtomEntry e;
                e.a = a;
                e.x0 = zR;
                e.r0 = rball;
                e.lambda = lambda * c;
                e.j = gcls;
                e.k = static_cast<int>(dec.atoms.size());
                atom_index = e.k;
                dec.atoms.push_back(std::move(e));
            }
            if (pieces_out) {
                WaveletPiece info;
                info.cls = gcls;
                info.R_level = rl;
                info.R_index = ri;
                info.part = part;
                info.energy = E;
                info.lambda = lambda * c;
                info.norm_fix = c;
                info.atom_index = atom_index;
                pieces_out->push_back(info);
            }
        }
    }

    dec.scale_C = worst_fix;
    for (const AtomEntry& e : dec.atoms) {
        dec.lp_sum += std::pow(e.lambda, p);
        if (!validate_local_atom(X, e.a, e.x0, e.r0, p, 2.0).ok()) ++dec.invalid;
    }
    Vec rec = reconstruct(dec, X.n);
    Vec diff(X.n);
    for (int x = 0; x < X.n; ++x) diff[x] = f[x] - rec[x];
    double fl2 = l2mu(X, f);
    dec.residual_rel = fl2 > 0.0 ? l2mu(X, diff) / fl2 : 0.0;
    double s0norm = lp_quasinorm(X, S0, p);
    dec.route_C = s0norm > 0.0 ? dec.lp_sum / std::pow(s0norm, p) : 0.0;
    return dec;
}

} // namespace homog
