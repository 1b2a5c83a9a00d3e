#pragma once

#include <string>
#include <vector>

#include "homog/common.hpp"

namespace homog {

// Finite quasi-metric measure space. Balls are strict: B(x,r) = {y : d(x,y) < r}.
struct QuasiMetricSpace {
    int n = 0;
    double A0 = 1.0;           // quasi-triangle constant the space claims
    std::vector<double> dist;  // row-major n*n
    Vec mu;                    // per-point masses, all > 0
    std::vector<std::string> labels;  // optional, size 0 or n

    double d(int i, int j) const { return dist[static_cast<size_t>(i) * n + j]; }

    double muTotal() const;
    double diameter() const;

    std::vector<int> ball(int x, double r) const;  // strict
    double ballMeasure(int x, double r) const;     // mu(B(x,r)), strict
    double Vr(int x, double r) const { return ballMeasure(x, r); }
    // V(x,y) = mu(B(x, d(x,y))); V(x,x) = 0 because the ball is strict and empty
    double Vxy(int x, int y) const { return ballMeasure(x, d(x, y)); }
};

// Checks symmetry, zero diagonal, positivity off diagonal, positive masses,
// and that A0 really bounds d(x,y)/(d(x,z)+d(z,y)).
ValidationReport verify_space(const QuasiMetricSpace& X);

// max over triples x!=z!=y of d(x,y)/(d(x,z)+d(z,y)), at least 1
double quasi_triangle_constant(const QuasiMetricSpace& X);

struct DoublingProfile {
    double C_mu = 1.0;
    double omega = 0.0;  // log2(C_mu)
    int worst_center = 0;
    double worst_radius = 0.0;
};

// Smallest C with mu(B(x,2r)) <= C mu(B(x,r)) over all x and the finite
// radius family where the ratio can change.
DoublingProfile doubling_profile(const QuasiMetricSpace& X);

// Distinct positive pairwise distances plus midpoints of consecutive ones.
// Every strict-ball measure ratio is realized on this family.
std::vector<double> radii_family(const QuasiMetricSpace& X);

// radii_family plus d_min/2 and a cap radius (diameter + 1), capped at diameter + 1.
std::vector<double> ball_family_radii(const QuasiMetricSpace& X);

} // namespace homog
