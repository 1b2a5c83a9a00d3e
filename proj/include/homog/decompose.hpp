#pragma once

#include <climits>
#include <vector>

#include "homog/atoms.hpp"
#include "homog/common.hpp"
#include "homog/dyadic.hpp"
#include "homog/kernels.hpp"
#include "homog/maximal.hpp"
#include "homog/space.hpp"

namespace homog {

// Ball cover of a proper subset Omega: radii r_k = d(x_k, complement)/(2 A A0),
// greedy selection descending by radius with shrunken-ball disjointness.
// partners[k] is a point outside Omega within 3 A A0 r_k of the center.
// L0 counts, at the worst k, the A-dilated balls meeting B(x_k, A r_k),
// self included.
struct WhitneyCover {
    std::vector<char> omega;  // size n membership mask
    double A = 0.0;
    std::vector<int> centers;
    std::vector<double> radii;
    std::vector<int> partners;
    int L0 = 0;
    int size() const { return static_cast<int>(centers.size()); }
};

// A <= 0 selects the default 16 A0^4. Throws if Omega is empty or everything.
WhitneyCover whitney_cover(const QuasiMetricSpace& X, const std::vector<char>& omega,
                           double A = 0.0);

// Exhaustive re-check of the cover properties: shrunken disjointness, exact
// covering, dilated containment in Omega, distance sandwich on each ball,
// partner distances, radius comparability of meeting dilated balls, and the
// stored L0.
ValidationReport verify_whitney(const QuasiMetricSpace& X, const WhitneyCover& cov);

// Tent weights phi_k: 0 <= phi_k <= 1, supported in B(x_k, 2 A0 r_k), summing
// to exactly 1 on Omega and 0 off it; phi_k >= 1/L0 on B(x_k, r_k).
struct PartitionOfUnity {
    std::vector<Vec> phi;
    double min_ratio = 0.0;  // min over k and x in B(x_k, r_k) of phi_k(x) * L0
    double holder_C = 0.0;   // max_k g_norm(phi_k at x_k, scale r_k) / V_{r_k}(x_k)
};

PartitionOfUnity partition_of_unity(const QuasiMetricSpace& X, const WhitneyCover& cov,
                                    double beta = 0.49, double gamma = 0.49);

// One threshold level of the good/bad splitting driven by the dictionary
// maximal function: Omega = {fstar > 2^j}, Whitney cover + partition, means
// m_k = <f, phi_k>/||phi_k||_1, bad parts b_k = (f - m_k) phi_k on the
// small-ball class and f phi_k otherwise, good part g = f - sum b_k.
// Corrections toward the next level (filled by cz_corrections) redistribute
// the finer bad parts so the small-ball differences keep mean zero.
struct CZParts {
    int j = 0;
    double thresh = 0.0;  // 2^j
    double p = 1.0;
    std::vector<char> omega;
    WhitneyCover cover;
    PartitionOfUnity pou;
    std::vector<char> in_I1;     // r_k <= (48 A0^5)^{-1}
    std::vector<char> in_Istar;  // r_k <= (2 A0)^{-4}
    Vec m;                       // per-ball means
    std::vector<Vec> b;
    Vec g;
    double recon_err = 0.0;     // ||f - g - sum b||_2 / ||f||_2
    double identity_err = 0.0;  // max |g - (f off Omega + sum_{Istar} m phi)| / ||f||_inf
    double cancel_worst = 0.0;  // worst |sum b_k mu| over the mean-corrected class
    double g_bound_C = 0.0;     // ||g||_inf / 2^j

    // corrections toward level j+1
    std::vector<int> istar_next;          // ball indices of the next level in its small class
    std::vector<std::vector<double>> L;   // [k][li]: <(f - m_l) phi_k, phi_l> / ||phi_l||_1
    double corr_cancel_err = 0.0;         // max_x |sum_k sum_l L phi_l(x)|
    double corr_bound_C = 0.0;            // max |L| / 2^j
};

// Throws when the level set {fstar > 2^j} is empty or the whole space.
CZParts cz_decompose(const QuasiMetricSpace& X, const OperatorFamily& fam,
                     const TestDictionary& dict, const Vec& f, int j, double p);

// Fills lo.L and the correction diagnostics between consecutive levels
// (hi must be the parts at level lo.j + 1 for the same f).
void cz_corrections(const QuasiMetricSpace& X, const Vec& f, CZParts& lo, const CZParts& hi);

// Atom stream from the good-part telescope: levels j0..j_top with j0 minimal
// such that 2^{j0} >= ||fstar||_{L^p} (bumped up while the level set is still
// everything) and j_top the first empty level; differences g^{j+1} - g^j split
// per ball into compactly supported pieces, normalized by the run-wide
// constant max ||h||_inf / 2^j into (p,inf)-atoms on B(x_k, 48 A0^5 r_k), plus
// one coarse atom carrying g^{j0} on the whole space. The level-range
// overrides truncate the telescope for experiments; the defaults reproduce
// the full decomposition.
AtomicDecomposition atomic_decompose_maximal(const QuasiMetricSpace& X, const OperatorFamily& fam,
                                             const TestDictionary& dict, const Vec& f, double p,
                                             int j_lo_override = INT_MIN,
                                             int j_hi_override = INT_MAX);

// Diagnostic record for one emitted group of the square-function route.
struct WaveletPiece {
    int cls = 0;                   // class level of the group
    int R_level = 0, R_index = 0;  // maximal cube (cube level; index, point index at the virtual level)
    int part = 1;                  // 1: cube levels <= N+1, 2: deeper levels
    double energy = 0.0;           // sum over member cubes of the squared L2 mass
    double lambda = 0.0;           // emitted coefficient, normalization included
    double norm_fix = 1.0;         // the max(1, .) size-bound correction
    int atom_index = -1;           // position in the returned decomposition
};

// Square-function route: classifies dyadic cubes by the level sets of the
// area functional S_0(f), groups them under maximal same-class ancestors,
// assembles each group's kernel mass into a compactly supported piece, and
// normalizes the pieces into (p,2)-atoms. Exactness of the underlying
// reproducing identity needs the martingale family, so only that construction
// is accepted.
AtomicDecomposition atomic_decompose_wavelet(const QuasiMetricSpace& X, const DyadicSystem& dys,
                                             const Vec& f, double p, int N = 1,
                                             std::vector<WaveletPiece>* pieces_out = nullptr);
AtomicDecomposition atomic_decompose_wavelet(const QuasiMetricSpace& X, const OperatorFamily& fam,
                                             const Vec& f, double p, int N = 1,
                                             std::vector<WaveletPiece>* pieces_out = nullptr);

} // namespace homog
