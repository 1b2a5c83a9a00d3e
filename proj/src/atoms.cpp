#include "homog/atoms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "homog/dyadic.hpp"

namespace homog {

namespace {

constexpr double kCancelTol = 1e-10;

double qinv_of(double q) { return std::isinf(q) ? 0.0 : 1.0 / q; }

// L^q norm of f restricted to the listed points, ascending order assumed.
double lq_on(const QuasiMetricSpace& X, const Vec& f, const std::vector<int>& pts, double q) {
    if (std::isinf(q)) {
        double m = 0.0;
        for (int y : pts) m = std::max(m, std::fabs(f[y]));
        return m;
    }
    double s = 0.0;
    for (int y : pts) s += std::pow(std::fabs(f[y]), q) * X.mu[y];
    return std::pow(s, 1.0 / q);
}

void check_q(double q) {
    if (!(q > 1.0) && !std::isinf(q)) throw std::invalid_argument("q must be in (1, inf]");
}

void check_p(double p) {
    if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("p must be in (0, 1]");
}

} // namespace

Vec reconstruct(const AtomicDecomposition& dec, int n) {
    Vec out(n, 0.0);
    for (const auto& e : dec.atoms)
        for (int i = 0; i < n; ++i) out[i] += e.lambda * e.a[i];
    return out;
}

AtomCheck validate_local_atom(const QuasiMetricSpace& X, const Vec& a, int x0, double r0,
                              double p, double q) {
    check_p(p);
    check_q(q);
    AtomCheck chk;
    std::vector<int> B = X.ball(x0, r0);
    int outside = 0;
    {
        std::vector<char> in(X.n, 0);
        for (int y : B) in[y] = 1;
        for (int y = 0; y < X.n; ++y)
            if (!in[y] && a[y] != 0.0) ++outside;
    }
    if (outside > 0)
        chk.report.add("support leaks outside B(x0,r0) at " + std::to_string(outside) + " points");
    double muB = 0.0;
    for (int y : B) muB += X.mu[y];
    if (B.empty()) {
        bool allz = std::all_of(a.begin(), a.end(), [](double v) { return v == 0.0; });
        if (!allz) chk.report.add("support ball is empty but the function is not zero");
        return chk;
    }
    chk.lq_norm = lq_on(X, a, B, q);
    chk.size_bound = std::pow(muB, qinv_of(q) - 1.0 / p);
    if (!(chk.lq_norm <= chk.size_bound))
        chk.report.add("size bound fails: ||a||_q = " + std::to_string(chk.lq_norm) +
                       " > " + std::to_string(chk.size_bound));
    double integ = 0.0;
    for (int y = 0; y < X.n; ++y) integ += a[y] * X.mu[y];
    chk.cancel_abs = std::fabs(integ);
    chk.cancellation_required = (r0 <= 1.0);
    if (chk.cancellation_required && chk.cancel_abs > kCancelTol)
        chk.report.add("cancellation fails: |integral| = " + std::to_string(chk.cancel_abs));
    return chk;
}

AtomCheck validate_global_atom(const QuasiMetricSpace& X, const Vec& a, double p, double q) {
    check_p(p);
    check_q(q);
    AtomCheck chk;
    double muX = X.muTotal();
    double c = std::pow(muX, -1.0 / p);
    bool const_plus = true, const_minus = true;
    for (int y = 0; y < X.n; ++y) {
        const_plus = const_plus && (a[y] == c);
        const_minus = const_minus && (a[y] == -c);
    }
    std::vector<int> all(X.n);
    for (int y = 0; y < X.n; ++y) all[y] = y;
    chk.lq_norm = lq_on(X, a, all, q);
    chk.size_bound = std::pow(muX, qinv_of(q) - 1.0 / p);
    double integ = 0.0;
    for (int y = 0; y < X.n; ++y) integ += a[y] * X.mu[y];
    chk.cancel_abs = std::fabs(integ);
    if (const_plus || const_minus) return chk;
    chk.cancellation_required = true;
    if (!(chk.lq_norm <= chk.size_bound))
        chk.report.add("size bound fails: ||a||_q = " + std::to_string(chk.lq_norm) +
                       " > " + std::to_string(chk.size_bound));
    if (chk.cancel_abs > kCancelTol)
        chk.report.add("cancellation fails: |integral| = " + std::to_string(chk.cancel_abs) +
                       " and the function is not the signed normalized constant");
    return chk;
}

MoleculeCheck validate_molecule(const QuasiMetricSpace& X, const Vec& a, int x0, double r0,
                                double p, double q, const std::vector<double>& eps) {
    check_p(p);
    check_q(q);
    if (!(r0 > 0.0)) throw std::invalid_argument("molecule core radius must be positive");
    for (double e : eps)
        if (!(e > 0.0)) throw std::invalid_argument("eps entries must be positive");
    MoleculeCheck chk;
    double delta = default_delta(X.A0);
    std::vector<int> B = X.ball(x0, r0);
    double muB = 0.0;
    for (int y : B) muB += X.mu[y];
    if (B.empty()) {
        chk.report.add("core ball is empty");
        return chk;
    }
    chk.lq_norm = lq_on(X, a, B, q);
    chk.size_bound = std::pow(muB, qinv_of(q) - 1.0 / p);
    if (!(chk.lq_norm <= chk.size_bound))
        chk.report.add("core size bound fails: ||a||_q = " + std::to_string(chk.lq_norm) +
                       " > " + std::to_string(chk.size_bound));
    double diam = X.diameter();
    double r_in = r0;
    for (int m = 1;; ++m) {
        double r_out = r0 / std::pow(delta, m);
        std::vector<int> ann;
        for (int y = 0; y < X.n; ++y)
            if (X.d(x0, y) >= r_in && X.d(x0, y) < r_out) ann.push_back(y);
        if (ann.empty()) break;
        if (static_cast<size_t>(m) > eps.size()) {
            chk.report.add("annulus " + std::to_string(m) + " is nonempty but eps has only " +
                           std::to_string(eps.size()) + " entries");
            break;
        }
        double muOut = X.ballMeasure(x0, r_out);
        double bound = eps[m - 1] * std::pow(muOut, qinv_of(q) - 1.0 / p);
        double nrm = lq_on(X, a, ann, q);
        if (!(nrm <= bound))
            chk.report.add("annulus " + std::to_string(m) + " bound fails: " +
                           std::to_string(nrm) + " > " + std::to_string(bound));
        chk.eps_series += m * std::pow(eps[m - 1], p);
        chk.annuli_checked = m;
        r_in = r_out;
        if (r_in > diam) {
            // every later annulus is empty; the walk is done
            break;
        }
    }
    double integ = 0.0;
    for (int y = 0; y < X.n; ++y) integ += a[y] * X.mu[y];
    chk.cancel_abs = std::fabs(integ);
    chk.cancellation_required = (r0 <= 1.0);
    if (chk.cancellation_required && chk.cancel_abs > kCancelTol)
        chk.report.add("cancellation fails: |integral| = " + std::to_string(chk.cancel_abs));
    return chk;
}

std::vector<AtomEntry> molecule_to_atoms(const QuasiMetricSpace& X, const Vec& a, int x0,
                                         double r0, double p, double q,
                                         const std::vector<double>& eps) {
    if (!(r0 > 1.0))
        throw std::invalid_argument(
            "molecule_to_atoms needs r0 > 1: a small-ball molecule keeps a cancellation "
            "condition its restrictions would lose, and a whole-space molecule is already "
            "a global atom up to scale");
    MoleculeCheck chk = validate_molecule(X, a, x0, r0, p, q, eps);
    if (!chk.ok()) throw std::runtime_error("molecule validation failed:\n" + chk.report.joined());

    std::vector<AtomEntry> out;
    double delta = default_delta(X.A0);
    std::vector<int> B = X.ball(x0, r0);
    {
        AtomEntry core;
        core.a.assign(X.n, 0.0);
        for (int y : B) core.a[y] = a[y];
        core.x0 = x0;
        core.r0 = r0;
        core.lambda = 1.0;
        out.push_back(std::move(core));
    }
    double diam = X.diameter();
    double r_in = r0;
    for (int m = 1; m <= chk.annuli_checked; ++m) {
        double r_out = r0 / std::pow(delta, m);
        AtomEntry piece;
        piece.a.assign(X.n, 0.0);
        bool nonempty = false;
        for (int y = 0; y < X.n; ++y)
            if (X.d(x0, y) >= r_in && X.d(x0, y) < r_out) {
                piece.a[y] = a[y] / eps[m - 1];
                nonempty = true;
            }
        r_in = r_out;
        if (!nonempty) break;
        piece.x0 = x0;
        piece.r0 = r_out;
        piece.lambda = eps[m - 1];
        // the scaled restriction can overshoot its own bound by an ulp; shave it back
        std::vector<int> Bout = X.ball(x0, r_out);
        double muOut = 0.0;
        for (int y : Bout) muOut += X.mu[y];
        double bound = std::pow(muOut, qinv_of(q) - 1.0 / p);
        for (int guard = 0; guard < 8; ++guard) {
            double cur = lq_on(X, piece.a, Bout, q);
            if (cur <= bound) break;
            double shave = (bound / cur) * (1.0 - std::ldexp(1.0, -50));
            for (int y = 0; y < X.n; ++y) piece.a[y] *= shave;
        }
        out.push_back(std::move(piece));
        if (r_in > diam) break;
    }
    return out;
}

double campanato_norm(const QuasiMetricSpace& X, const Vec& f, double alpha, double q) {
    check_q(q);
    if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be >= 0");
    std::vector<double> radii = ball_family_radii(X);
    double best = 0.0;
    for (int x = 0; x < X.n; ++x) {
        for (double r : radii) {
            std::vector<int> B = X.ball(x, r);
            if (B.empty()) continue;
            double mB = 0.0;
            for (int y : B) mB += X.mu[y];
            double val;
            if (r <= 1.0) {
                double mean = 0.0;
                for (int y : B) mean += f[y] * X.mu[y];
                mean /= mB;
                if (std::isinf(q)) {
                    double m = 0.0;
                    for (int y : B) m = std::max(m, std::fabs(f[y] - mean));
                    val = m * std::pow(mB, -alpha);
                } else {
                    double s = 0.0;
                    for (int y : B) s += std::pow(std::fabs(f[y] - mean), q) * X.mu[y];
                    val = std::pow(s, 1.0 / q) * std::pow(mB, -alpha - 1.0 / q);
                }
            } else {
                if (std::isinf(q)) {
                    double m = 0.0;
                    for (int y : B) m = std::max(m, std::fabs(f[y]));
                    val = m * std::pow(mB, -alpha);
                } else {
                    double s = 0.0;
                    for (int y : B) s += std::pow(std::fabs(f[y]), q) * X.mu[y];
                    val = std::pow(s, 1.0 / q) * std::pow(mB, -alpha - 1.0 / q);
                }
            }
            best = std::max(best, val);
        }
    }
    return best;
}

double lipschitz_norm(const QuasiMetricSpace& X, const Vec& f, double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::invalid_argument("alpha must be in (0, 1)");
    std::vector<double> radii = ball_family_radii(X);
    double best = 0.0;
    for (int x = 0; x < X.n; ++x) {
        for (double r : radii) {
            std::vector<int> B = X.ball(x, r);
            if (B.empty()) continue;
            double mB = 0.0;
            for (int y : B) mB += X.mu[y];
            double val;
            if (r <= 1.0) {
                double lo = f[B[0]], hi = f[B[0]];
                for (int y : B) {
                    lo = std::min(lo, f[y]);
                    hi = std::max(hi, f[y]);
                }
                val = (hi - lo) / std::pow(mB, alpha);
            } else {
                double m = 0.0;
                for (int y : B) m = std::max(m, std::fabs(f[y]));
                val = m / std::pow(mB, alpha);
            }
            best = std::max(best, val);
        }
    }
    return best;
}

double pairing(const QuasiMetricSpace& X, const Vec& f, const Vec& g) {
    double s = 0.0;
    for (int y = 0; y < X.n; ++y) s += f[y] * g[y] * X.mu[y];
    return s;
}

double duality_pairing(const QuasiMetricSpace& X, const Vec& f, const AtomicDecomposition& dec) {
    double s = 0.0;
    for (const auto& e : dec.atoms) s += e.lambda * pairing(X, f, e.a);
    return s;
}

Vec split_global_atom(const QuasiMetricSpace& X, const Vec& f, double* out_mean) {
    double muX = X.muTotal();
    double mean = 0.0;
    for (int y = 0; y < X.n; ++y) mean += f[y] * X.mu[y];
    mean /= muX;
    Vec out(X.n);
    for (int y = 0; y < X.n; ++y) out[y] = f[y] - mean;
    if (out_mean) *out_mean = mean;
    return out;
}

} // namespace homog
