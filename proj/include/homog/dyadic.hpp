#pragma once

#include <vector>

#include "homog/common.hpp"
#include "homog/space.hpp"

namespace homog {

struct DyadicCube {
    int center = -1;            // point index of the cube's center
    int parent = -1;            // cube index one level up, -1 at level 0
    std::vector<int> children;  // cube indices one level down
    std::vector<int> members;   // ascending point indices
};

struct DyadicLevel {
    std::vector<int> net;           // ascending point indices, nested across levels
    std::vector<DyadicCube> cubes;  // ascending center order
    std::vector<int> cube_of;       // per point: its cube index at this level
    // Measured per level: c = min over cubes of (nearest point outside)/delta^k,
    // infinite for a whole-space cube; C = max over cubes of (farthest member)/delta^k,
    // zero at all-singleton levels. Honest measurements; on gappy spaces c can
    // exceed C, so no ordering between them is asserted.
    double c_achieved = 0.0;
    double C_achieved = 0.0;
};

// Nested partition tree: nets are greedy maximal delta^k-separated supersets of
// the previous level, cubes come from deterministic nearest-center assignment.
struct DyadicSystem {
    const QuasiMetricSpace* X = nullptr;  // non-owning; caller keeps the space alive
    double delta = 0.5;
    int K_max = 0;
    int j0 = 1;                 // subcube refinement depth
    double c0 = 1.0, C0 = 1.0;  // guaranteed separation/covering constants
    std::vector<DyadicLevel> levels;  // size K_max + 1

    double c_nat() const { return c0 / (3.0 * X->A0 * X->A0); }
    double C_nat() const { return 2.0 * X->A0 * C0; }
    double scale(int k) const;  // delta^k

    int cubeAt(int k, int x) const { return levels[k].cube_of[x]; }
    // refinement level for subcubes of a level-k cube, clamped to the tree depth
    int dlevel(int k) const { return std::min(k + j0, K_max); }
    // descendant cube indices of cube (k, a) at level l >= k, ascending center order
    std::vector<int> descendants(int k, int a, int l) const;
    std::vector<int> subcubes(int k, int a) const { return descendants(k, a, dlevel(k)); }
    // centers new at level k+1: net(k+1) minus net(k)
    std::vector<int> newCenters(int k) const;
};

// Largest power of 1/2 that is <= 1/(12 A0^3); the default base ratio.
double default_delta(double A0);

// Minimal j >= 1 with delta^j <= (2 A0)^{-4} * C_nat; the default refinement depth.
int default_j0(double delta, double A0, double C_nat);

struct DyadicOptions {
    double delta = 0.0;  // <= 0 selects default_delta
    int K_max = -1;      // < 0 selects smallest level with an all-point net, capped at 24
    int j0 = 0;          // <= 0 selects default_j0
};

// Greedy nets, coarse to fine. Level k admits points in ascending index order,
// keeping the previous net, accepting a candidate iff it is >= delta^k from
// everything already selected. K_max < 0 builds until the net holds every point.
std::vector<std::vector<int>> build_nets(const QuasiMetricSpace& X, double delta, int K_max);

// Top-down cube assignment over prebuilt nets: each finer center attaches to its
// nearest coarser center (ties to the lowest point index), points attach at the
// deepest level, membership propagates up. Measures the sandwich constants.
DyadicSystem assign_cubes(const QuasiMetricSpace& X, double delta, int j0,
                          const std::vector<std::vector<int>>& nets);

// build_nets + assign_cubes with defaults resolved; validates delta and j0.
DyadicSystem build_dyadic(const QuasiMetricSpace& X, DyadicOptions opt = {});

// Exhaustive re-check: separation, covering, partition, nesting, centers inside
// their cubes, sandwich constants match the stored ones, C_achieved <= C_nat.
ValidationReport verify_dyadic(const DyadicSystem& dys);

} // namespace homog
