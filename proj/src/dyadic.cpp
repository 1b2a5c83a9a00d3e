#include "homog/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace homog {

namespace {
constexpr int kLevelCap = 24;
}

double DyadicSystem::scale(int k) const { return std::pow(delta, k); }

double default_delta(double A0) {
    double bound = 1.0 / (12.0 * A0 * A0 * A0);
    double d = 1.0;
    while (d > bound) d *= 0.5;
    return d;
}

int default_j0(double delta, double A0, double C_nat) {
    double bound = C_nat / std::pow(2.0 * A0, 4);
    int j = 1;
    double p = delta;
    while (p > bound && j < 64) {
        p *= delta;
        ++j;
    }
    return j;
}

std::vector<std::vector<int>> build_nets(const QuasiMetricSpace& X, double delta, int K_max) {
    const int n = X.n;
    std::vector<std::vector<int>> nets;
    std::vector<char> selected(n, 0);
    std::vector<int> net;
    for (int k = 0; K_max < 0 || k <= K_max; ++k) {
        double thresh = std::pow(delta, k);
        for (int x = 0; x < n; ++x) {
            if (selected[x]) continue;
            bool ok = true;
            for (int z : net)
                if (X.d(x, z) < thresh) {
                    ok = false;
                    break;
                }
            if (ok) {
                net.push_back(x);
                selected[x] = 1;
            }
        }
        std::vector<int> sorted = net;
        std::sort(sorted.begin(), sorted.end());
        nets.push_back(std::move(sorted));
        if (K_max < 0 && (static_cast<int>(net.size()) == n || k >= kLevelCap)) break;
    }
    return nets;
}

DyadicSystem assign_cubes(const QuasiMetricSpace& X, double delta, int j0,
                          const std::vector<std::vector<int>>& nets) {
    DyadicSystem dys;
    dys.X = &X;
    dys.delta = delta;
    dys.K_max = static_cast<int>(nets.size()) - 1;
    dys.j0 = j0;
    dys.levels.resize(nets.size());

    const double inf = std::numeric_limits<double>::infinity();
    auto nearest = [&](int x, const std::vector<int>& centers) {
        int best = centers.front();
        double bd = X.d(x, best);
        for (int z : centers) {
            double v = X.d(x, z);
            if (v < bd) {  // ties keep the earlier (lower) index
                bd = v;
                best = z;
            }
        }
        return best;
    };

    // center tree: per level, center point -> cube index, then attach finer centers
    for (int k = 0; k <= dys.K_max; ++k) {
        DyadicLevel& L = dys.levels[k];
        L.net = nets[k];
        L.cubes.resize(L.net.size());
        for (size_t a = 0; a < L.net.size(); ++a) L.cubes[a].center = L.net[a];
        L.cube_of.assign(X.n, -1);
    }
    std::vector<std::vector<int>> cube_index(nets.size());  // center point -> cube index
    for (int k = 0; k <= dys.K_max; ++k) {
        cube_index[k].assign(X.n, -1);
        for (size_t a = 0; a < nets[k].size(); ++a) cube_index[k][nets[k][a]] = static_cast<int>(a);
    }
    for (int k = 0; k < dys.K_max; ++k)
        for (size_t b = 0; b < nets[k + 1].size(); ++b) {
            int z = nets[k + 1][b];
            int pc = cube_index[k][nearest(z, nets[k])];
            dys.levels[k + 1].cubes[b].parent = pc;
            dys.levels[k].cubes[pc].children.push_back(static_cast<int>(b));
        }

    // points attach at the deepest level, membership propagates up
    for (int x = 0; x < X.n; ++x) {
        int a = cube_index[dys.K_max][nearest(x, nets[dys.K_max])];
        for (int k = dys.K_max; k >= 0; --k) {
            dys.levels[k].cubes[a].members.push_back(x);
            dys.levels[k].cube_of[x] = a;
            a = dys.levels[k].cubes[a].parent;
        }
    }

    // measured sandwich constants
    for (int k = 0; k <= dys.K_max; ++k) {
        DyadicLevel& L = dys.levels[k];
        double sk = dys.scale(k);
        double cmin = inf, Cmax = 0.0;
        for (const DyadicCube& Q : L.cubes) {
            double out = inf, in = 0.0;
            size_t mi = 0;
            for (int y = 0; y < X.n; ++y) {
                if (mi < Q.members.size() && Q.members[mi] == y) {
                    in = std::max(in, X.d(Q.center, y));
                    ++mi;
                } else {
                    out = std::min(out, X.d(Q.center, y));
                }
            }
            cmin = std::min(cmin, out / sk);
            Cmax = std::max(Cmax, in / sk);
        }
        L.c_achieved = cmin;
        L.C_achieved = Cmax;
    }
    return dys;
}

DyadicSystem build_dyadic(const QuasiMetricSpace& X, DyadicOptions opt) {
    double bound = 1.0 / (12.0 * X.A0 * X.A0 * X.A0);
    double delta = opt.delta > 0.0 ? opt.delta : default_delta(X.A0);
    if (!(delta > 0.0) || delta > bound)
        throw std::invalid_argument("delta must lie in (0, 1/(12 A0^3)] = (0, " + std::to_string(bound) + "]");
    if (opt.K_max > kLevelCap) throw std::invalid_argument("K_max exceeds the level cap of 24");
    if (opt.j0 < 0) throw std::invalid_argument("j0 must be >= 1 (0 selects the default)");

    auto nets = build_nets(X, delta, opt.K_max);
    double C_nat = 2.0 * X.A0;
    int j0 = opt.j0 > 0 ? opt.j0 : default_j0(delta, X.A0, C_nat);
    double jb = C_nat / std::pow(2.0 * X.A0, 4);
    if (std::pow(delta, j0) > jb)
        throw std::invalid_argument("j0 too small: need delta^j0 <= C_nat/(2 A0)^4 = " + std::to_string(jb));
    return assign_cubes(X, delta, j0, nets);
}

std::vector<int> DyadicSystem::descendants(int k, int a, int l) const {
    std::vector<int> cur{a};
    for (int j = k; j < l; ++j) {
        std::vector<int> next;
        for (int c : cur)
            for (int ch : levels[j].cubes[c].children) next.push_back(ch);
        cur = std::move(next);
    }
    auto byCenter = [&](int u, int v) { return levels[l].cubes[u].center < levels[l].cubes[v].center; };
    std::sort(cur.begin(), cur.end(), byCenter);
    return cur;
}

std::vector<int> DyadicSystem::newCenters(int k) const {
    std::vector<int> out;
    std::set_difference(levels[k + 1].net.begin(), levels[k + 1].net.end(), levels[k].net.begin(),
                        levels[k].net.end(), std::back_inserter(out));
    return out;
}

ValidationReport verify_dyadic(const DyadicSystem& dys) {
    ValidationReport rep;
    const QuasiMetricSpace& X = *dys.X;
    const double inf = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= dys.K_max; ++k) {
        const DyadicLevel& L = dys.levels[k];
        double sk = dys.scale(k);
        // separation and covering with c0 = C0 = 1
        for (size_t a = 0; a < L.net.size(); ++a)
            for (size_t b = a + 1; b < L.net.size(); ++b)
                if (X.d(L.net[a], L.net[b]) < dys.c0 * sk)
                    rep.add("level " + std::to_string(k) + ": net points too close");
        for (int x = 0; x < X.n; ++x) {
            double best = inf;
            for (int z : L.net) best = std::min(best, X.d(x, z));
            if (best > dys.C0 * sk) rep.add("level " + std::to_string(k) + ": point not covered");
        }
        // partition: disjoint and exhaustive
        std::vector<int> seen(X.n, 0);
        for (const DyadicCube& Q : L.cubes) {
            bool has_center = false;
            for (int y : Q.members) {
                ++seen[y];
                if (y == Q.center) has_center = true;
            }
            if (!has_center) rep.add("level " + std::to_string(k) + ": cube misses its center");
        }
        for (int x = 0; x < X.n; ++x)
            if (seen[x] != 1) rep.add("level " + std::to_string(k) + ": partition broken at point");
        // nesting: each member of a child cube belongs to the parent cube
        if (k > 0)
            for (const DyadicCube& Q : L.cubes) {
                const DyadicCube& P = dys.levels[k - 1].cubes[Q.parent];
                for (int y : Q.members)
                    if (!std::binary_search(P.members.begin(), P.members.end(), y))
                        rep.add("level " + std::to_string(k) + ": nesting broken");
            }
        // sandwich constants re-derived
        double cmin = inf, Cmax = 0.0;
        for (const DyadicCube& Q : L.cubes) {
            double out = inf;
            size_t mi = 0;
            for (int y = 0; y < X.n; ++y) {
                if (mi < Q.members.size() && Q.members[mi] == y)
                    ++mi;
                else
                    out = std::min(out, X.d(Q.center, y));
            }
            for (int y : Q.members) Cmax = std::max(Cmax, X.d(Q.center, y) / sk);
            cmin = std::min(cmin, out / sk);
        }
        if (cmin != L.c_achieved || Cmax != L.C_achieved)
            rep.add("level " + std::to_string(k) + ": stored sandwich constants stale");
        if (!(L.c_achieved > 0.0)) rep.add("level " + std::to_string(k) + ": inner sandwich constant not positive");
        if (L.C_achieved > dys.C_nat())
            rep.add("level " + std::to_string(k) + ": outer sandwich constant exceeds 2 A0");
    }
    return rep;
}

} // namespace homog
