#include "homog/generators.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "homog/rng.hpp"

namespace homog {

namespace {

QuasiMetricSpace blank(int n, double A0) {
    if (n < 1) throw std::invalid_argument("generator needs at least one point");
    QuasiMetricSpace X;
    X.n = n;
    X.A0 = A0;
    X.dist.assign(static_cast<size_t>(n) * n, 0.0);
    X.mu.assign(n, 1.0);
    return X;
}

void setD(QuasiMetricSpace& X, int i, int j, double v) {
    X.dist[static_cast<size_t>(i) * X.n + j] = v;
    X.dist[static_cast<size_t>(j) * X.n + i] = v;
}

} // namespace

QuasiMetricSpace grid1d(int n, double spacing) {
    double h = spacing > 0.0 ? spacing : 1.0 / n;
    QuasiMetricSpace X = blank(n, 1.0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) setD(X, i, j, h * (j - i));
    return X;
}

QuasiMetricSpace grid2d(int nx, int ny, double spacing) {
    if (nx < 1 || ny < 1) throw std::invalid_argument("grid2d needs positive dims");
    double h = spacing > 0.0 ? spacing : 1.0 / std::max(nx, ny);
    QuasiMetricSpace X = blank(nx * ny, 1.0);
    // row-major point order: index = iy*nx + ix
    for (int p = 0; p < X.n; ++p)
        for (int q = p + 1; q < X.n; ++q) {
            int dx = (q % nx) - (p % nx), dy = (q / nx) - (p / nx);
            setD(X, p, q, h * std::sqrt(static_cast<double>(dx) * dx + static_cast<double>(dy) * dy));
        }
    return X;
}

QuasiMetricSpace snowflake_square(int n, double spacing) {
    double h = spacing > 0.0 ? spacing : 1.0 / n;
    QuasiMetricSpace X = blank(n, 2.0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double u = h * (j - i);
            setD(X, i, j, u * u);
        }
    return X;
}

QuasiMetricSpace cantor_ultrametric(int depth) {
    if (depth < 1 || depth > 14) throw std::invalid_argument("cantor depth out of range");
    int n = 1 << depth;
    QuasiMetricSpace X = blank(n, 1.0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            int diff = i ^ j;
            // common prefix length of the depth-bit strings, MSB first
            int lcp = 0;
            for (int b = depth - 1; b >= 0 && !((diff >> b) & 1); --b) ++lcp;
            setD(X, i, j, std::pow(2.0, -lcp));
        }
    return X;
}

QuasiMetricSpace weighted_graph(int n, uint64_t seed) {
    if (n < 2) throw std::invalid_argument("weighted_graph needs at least two vertices");
    Rng rng(seed ^ 0x77a9f3d1c5b82e64ULL);
    const double inf = 1e300;
    std::vector<double> w(static_cast<size_t>(n) * n, inf);
    auto edge = [&](int i, int j, double v) {
        size_t a = static_cast<size_t>(i) * n + j, b = static_cast<size_t>(j) * n + i;
        if (v < w[a]) w[a] = w[b] = v;
    };
    for (int i = 0; i < n; ++i) w[static_cast<size_t>(i) * n + i] = 0.0;
    // ring backbone keeps it connected; random chords break the symmetry
    for (int i = 0; i < n; ++i) edge(i, (i + 1) % n, rng.uniform(0.5, 1.5));
    for (int c = 0; c < n; ++c) {
        int i = static_cast<int>(rng.below(n)), j = static_cast<int>(rng.below(n));
        if (i != j) edge(i, j, rng.uniform(0.5, 2.0));
    }
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double via = w[static_cast<size_t>(i) * n + k] + w[static_cast<size_t>(k) * n + j];
                if (via < w[static_cast<size_t>(i) * n + j]) w[static_cast<size_t>(i) * n + j] = via;
            }
    // scale so the diameter is 1; keeps scales comparable across generators
    double dm = 0.0;
    for (double v : w) dm = std::max(dm, v);
    QuasiMetricSpace X = blank(n, 1.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) X.dist[static_cast<size_t>(i) * n + j] = w[static_cast<size_t>(i) * n + j] / dm;
    return X;
}

QuasiMetricSpace random_cloud(int n, uint64_t seed) {
    if (n < 1) throw std::invalid_argument("random_cloud needs at least one point");
    Rng rng(seed ^ 0x51c64b3a9e0df217ULL);
    std::vector<double> xs(n), ys(n);
    for (int i = 0; i < n; ++i) {
        xs[i] = rng.uniform01();
        ys[i] = rng.uniform01();
    }
    QuasiMetricSpace X = blank(n, 1.0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            setD(X, i, j, std::hypot(xs[i] - xs[j], ys[i] - ys[j]));
    return X;
}

} // namespace homog
