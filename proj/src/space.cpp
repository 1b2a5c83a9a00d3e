#include "homog/space.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace homog {

double QuasiMetricSpace::muTotal() const {
    double s = 0.0;
    for (double m : mu) s += m;
    return s;
}

double QuasiMetricSpace::diameter() const {
    double dm = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) dm = std::max(dm, d(i, j));
    return dm;
}

std::vector<int> QuasiMetricSpace::ball(int x, double r) const {
    std::vector<int> out;
    for (int y = 0; y < n; ++y)
        if (d(x, y) < r) out.push_back(y);
    return out;
}

double QuasiMetricSpace::ballMeasure(int x, double r) const {
    double s = 0.0;
    for (int y = 0; y < n; ++y)
        if (d(x, y) < r) s += mu[y];
    return s;
}

ValidationReport verify_space(const QuasiMetricSpace& X) {
    ValidationReport rep;
    const int n = X.n;
    if (n <= 0) {
        rep.add("space has no points");
        return rep;
    }
    if (static_cast<int>(X.mu.size()) != n) rep.add("mu size mismatch");
    if (static_cast<int>(X.dist.size()) != n * n) rep.add("distance matrix size mismatch");
    if (!X.labels.empty() && static_cast<int>(X.labels.size()) != n) rep.add("labels size mismatch");
    if (!rep.ok()) return rep;

    for (int i = 0; i < n; ++i) {
        if (!(X.mu[i] > 0.0)) rep.add("mu must be positive at point " + std::to_string(i));
        if (X.d(i, i) != 0.0) rep.add("diagonal distance nonzero at point " + std::to_string(i));
        for (int j = i + 1; j < n; ++j) {
            if (X.d(i, j) != X.d(j, i))
                rep.add("asymmetric distance at (" + std::to_string(i) + "," + std::to_string(j) + ")");
            if (!(X.d(i, j) > 0.0))
                rep.add("nonpositive distance between distinct points (" + std::to_string(i) + "," +
                        std::to_string(j) + ")");
        }
    }
    if (!rep.ok()) return rep;

    double worst = quasi_triangle_constant(X);
    if (worst > X.A0 * (1.0 + 1e-12))
        rep.add("claimed A0 = " + std::to_string(X.A0) + " violated, needs " + std::to_string(worst));
    return rep;
}

double quasi_triangle_constant(const QuasiMetricSpace& X) {
    const int n = X.n;
    double worst = 1.0;
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            if (y == x) continue;
            for (int z = 0; z < n; ++z) {
                if (z == x || z == y) continue;
                double denom = X.d(x, z) + X.d(z, y);
                if (denom > 0.0) worst = std::max(worst, X.d(x, y) / denom);
            }
        }
    return worst;
}

std::vector<double> radii_family(const QuasiMetricSpace& X) {
    std::set<double> ds;
    for (int i = 0; i < X.n; ++i)
        for (int j = i + 1; j < X.n; ++j) ds.insert(X.d(i, j));
    std::vector<double> sorted(ds.begin(), ds.end());
    std::vector<double> fam = sorted;
    for (size_t i = 0; i + 1 < sorted.size(); ++i) fam.push_back(0.5 * (sorted[i] + sorted[i + 1]));
    std::sort(fam.begin(), fam.end());
    return fam;
}

std::vector<double> ball_family_radii(const QuasiMetricSpace& X) {
    std::vector<double> fam = radii_family(X);
    double cap = X.diameter() + 1.0;
    if (!fam.empty()) fam.insert(fam.begin(), 0.5 * fam.front());
    fam.push_back(cap);
    std::vector<double> out;
    for (double r : fam)
        if (r <= cap) out.push_back(r);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

DoublingProfile doubling_profile(const QuasiMetricSpace& X) {
    DoublingProfile prof;
    std::vector<double> fam = radii_family(X);
    prof.C_mu = 1.0;
    prof.worst_center = 0;
    prof.worst_radius = fam.empty() ? 1.0 : fam.front();
    for (int x = 0; x < X.n; ++x) {
        for (double r : fam) {
            double small = X.ballMeasure(x, r);
            if (small <= 0.0) continue;
            double big = X.ballMeasure(x, 2.0 * r);
            double ratio = big / small;
            if (ratio > prof.C_mu) {
                prof.C_mu = ratio;
                prof.worst_center = x;
                prof.worst_radius = r;
            }
        }
    }
    prof.omega = std::log2(prof.C_mu);
    return prof;
}

} // namespace homog
