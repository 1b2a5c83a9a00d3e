#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "homog/common.hpp"
#include "homog/dyadic.hpp"
#include "homog/kernels.hpp"

namespace homog {

// Point picker for the sampled high-frequency terms of the discrete
// reconstruction.  "center" takes each refinement cube's net point, "worst"
// the member whose difference-operator value strays farthest from its cube
// average (ties to the lowest index), "random:<seed>" a seeded uniform
// member, drawn in ascending (level, cube) order so runs are repeatable.
struct SamplerSpec {
    enum Kind { center, worst, random_seeded };
    Kind kind = center;
    uint64_t seed = 0;

    static SamplerSpec parse(const std::string& text);
};

struct ReproducingReport {
    std::string route;             // "exact_haar" or "discrete_sampled"
    std::vector<double> residuals; // ||f - partial sum through level k||_{L2(mu)}, k = 0.. ascending
    int N = -1;                    // averaged/sampled split level (discrete route only)
    int j0 = -1;                   // refinement depth of the sampling cubes (discrete route only)
};

// Partial sum over k <= K of D_k D_k f for the martingale family,
// accumulated in ascending k; the report logs one residual per truncation
// level.  At K = fam.K the sum telescopes back to f up to rounding.
Vec reproduce_exact(const OperatorFamily& fam, const Vec& f, int K,
                    ReproducingReport* report = nullptr);

// Discrete reconstruction over the refinement cubes of the family's own
// system at level min(k + j0, K_max): levels k <= N pair the cube-averaged
// kernel column with the cube average of D_k f, levels k > N evaluate both
// at one sampled point per cube.  The residual is measured, never assumed
// small; once every refinement cube is a singleton both branches collapse
// to the exact route.
Vec reproduce_discrete(const OperatorFamily& fam, const DyadicSystem& subidx, const Vec& f,
                       int N, int j0, const SamplerSpec& sampler,
                       ReproducingReport* report = nullptr);

} // namespace homog
