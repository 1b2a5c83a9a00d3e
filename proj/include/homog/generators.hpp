#pragma once

#include <cstdint>

#include "homog/space.hpp"

namespace homog {

// All generators give every point unit mass; callers may rescale mu afterwards.
// spacing <= 0 selects the documented default for that family.

// n points on a line, consecutive spacing h (default 1/n), Euclidean distance, A0 = 1.
QuasiMetricSpace grid1d(int n, double spacing = 0.0);

// nx*ny lattice, spacing h (default 1/max(nx,ny)), Euclidean distance, A0 = 1.
QuasiMetricSpace grid2d(int nx, int ny, double spacing = 0.0);

// n points on a line with the squared metric d(x,y) = |x-y|^2; genuine
// quasi-metric with A0 = 2. spacing default 1/n.
QuasiMetricSpace snowflake_square(int n, double spacing = 0.0);

// 2^depth leaves of a binary tree, d = 2^{-(common prefix length)}, ultrametric A0 = 1.
QuasiMetricSpace cantor_ultrametric(int depth);

// Random connected weighted graph on n vertices, shortest-path metric.
QuasiMetricSpace weighted_graph(int n, uint64_t seed);

// n uniform points in the unit square with Euclidean distance.
QuasiMetricSpace random_cloud(int n, uint64_t seed);

} // namespace homog
