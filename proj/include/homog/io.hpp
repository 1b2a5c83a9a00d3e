#pragma once

#include <string>

#include "homog/atoms.hpp"
#include "homog/common.hpp"
#include "homog/dyadic.hpp"
#include "homog/kernels.hpp"
#include "homog/space.hpp"

namespace homog {

// All readers throw std::runtime_error with the offending path and reason.
// Numeric fields round-trip exactly: JSON doubles use shortest-round-trip
// printing and the kernel matrices travel as raw little-endian doubles.

// {"A0": a, "mu": [..], "d": [[..]] | {"kind":"euclidean-grid","dims":[nx(,ny)],"spacing":h},
//  "labels": [..] optional}.  Saving always writes the dense matrix.
QuasiMetricSpace load_space(const std::string& path);
void save_space(const QuasiMetricSpace& X, const std::string& path);

// Cube tree with per-level nets, memberships, and the measured sandwich
// constants; one JSON document.
void save_dyadic(const DyadicSystem& dys, const std::string& path);

// A family is two sibling files: <base>.json carries kind, parameters, and
// diagnostics; <base>.bin carries P_0..P_K then Q_0..Q_K, each n*n row-major
// doubles.  Loading rebuilds the cube system into *dys_out from the stored
// parameters (the space must be the one the family was built on).
void save_family(const OperatorFamily& fam, const std::string& base);
OperatorFamily load_family(const std::string& base, const QuasiMetricSpace& X,
                           DyadicSystem* dys_out);

// Plain JSON array, or {"f":[..]}.
Vec load_vec(const std::string& path);
void save_vec(const Vec& v, const std::string& path);

// Decomposition with inline atom vectors.
void save_decomposition(const AtomicDecomposition& dec, const std::string& path);
AtomicDecomposition load_decomposition(const std::string& path);

// "%.17g" — the shortest fixed format that round-trips every double.
std::string fmt17(double v);

} // namespace homog
