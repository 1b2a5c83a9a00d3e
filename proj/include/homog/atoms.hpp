#pragma once

#include <vector>

#include "homog/common.hpp"
#include "homog/space.hpp"

namespace homog {

// One normalized atom with its ball, coefficient, and provenance (threshold
// level j, ball/group index k). Global atoms live on the whole space (ball
// center 0, radius diameter + 1).
struct AtomEntry {
    Vec a;
    int x0 = 0;
    double r0 = 1.0;
    double lambda = 0.0;
    int j = 0;
    int k = 0;
    bool global = false;
};

struct AtomicDecomposition {
    double p = 1.0;
    double q = 0.0;  // L^q index the atoms were validated against; inf for sup-norm
    std::vector<AtomEntry> atoms;
    double lp_sum = 0.0;        // sum_j |lambda_j|^p
    double residual_rel = 0.0;  // ||f - sum lambda a||_2 / ||f||_2, 0 when f == 0
    double route_C = 0.0;       // lp_sum / (route quasinorm)^p, the measured equivalence constant
    double scale_C = 0.0;       // internal normalization: max ||h||_inf/2^j, or the worst molecule fix
    int invalid = 0;            // atoms that failed validation (0 on every healthy run)
};

// sum_j lambda_j a_j as a function on the space.
Vec reconstruct(const AtomicDecomposition& dec, int n);

struct AtomCheck {
    double lq_norm = 0.0;   // measured L^q norm over the support ball
    double size_bound = 0.0;  // mu(B)^{1/q - 1/p}; 1/q = 0 at q = inf
    double cancel_abs = 0.0;  // |sum a mu|
    bool cancellation_required = false;
    ValidationReport report;
    bool ok() const { return report.ok(); }
};

// Local (p,q)-atom: bitwise zero outside the strict ball B(x0, r0),
// ||a||_{L^q} <= mu(B)^{1/q - 1/p} as an exact comparison, and
// |integral| <= 1e-10 required exactly when r0 <= 1.
AtomCheck validate_local_atom(const QuasiMetricSpace& X, const Vec& a, int x0, double r0,
                              double p, double q);

// Global (p,q)-atom: either the constant +-mu(X)^{-1/p} bitwise, or the size
// bound over the whole space together with unconditional cancellation.
AtomCheck validate_global_atom(const QuasiMetricSpace& X, const Vec& a, double p, double q);

struct MoleculeCheck {
    double lq_norm = 0.0;     // over the core ball
    double size_bound = 0.0;  // mu(B)^{1/q - 1/p}
    double cancel_abs = 0.0;
    bool cancellation_required = false;
    int annuli_checked = 0;       // up to the first empty annulus
    double eps_series = 0.0;      // sum_m m * eps_m^p over checked annuli
    ValidationReport report;
    bool ok() const { return report.ok(); }
};

// (p,q,eps)-molecule centered on B(x0, r0): atom-type size on the core ball,
// and on each annulus ann_m = B(x0, delta^{-m} r0) \ B(x0, delta^{-m+1} r0)
// the bound ||a||_{L^q(ann_m)} <= eps[m-1] * mu(B(x0, delta^{-m} r0))^{1/q-1/p}.
// Annuli are walked until the first empty one; delta = default_delta(X.A0).
// Cancellation |sum a mu| <= 1e-10 required exactly when r0 <= 1.
MoleculeCheck validate_molecule(const QuasiMetricSpace& X, const Vec& a, int x0, double r0,
                                double p, double q, const std::vector<double>& eps);

// Splits a molecule with r0 > 1 into atoms: the core restriction with
// coefficient 1 and each annulus restriction scaled by 1/eps_m with
// coefficient eps_m, so sum_m lambda_m a_m rebuilds the molecule to a few ulp
// and sum lambda^p = 1 + sum eps^p. Throws if validation fails or r0 <= 1
// (small-ball molecules keep a cancellation condition the pieces would lose;
// a molecule on the whole space is already a global atom up to scale).
std::vector<AtomEntry> molecule_to_atoms(const QuasiMetricSpace& X, const Vec& a, int x0,
                                         double r0, double p, double q,
                                         const std::vector<double>& eps);

// max over ball-family balls of mu(B)^{-alpha-1/q} ||f - m_B(f)||_{L^q(B)} for
// r <= 1 and the un-centered mu(B)^{-alpha-1/q} ||f||_{L^q(B)} for r > 1.
// q in (1, inf) or inf (sup form); alpha >= 0.
double campanato_norm(const QuasiMetricSpace& X, const Vec& f, double alpha, double q);

// Same ball family: oscillation max_B f - min_B f over mu(B)^alpha for r <= 1,
// sup-norm over mu(B)^alpha for r > 1. alpha in (0, 1).
double lipschitz_norm(const QuasiMetricSpace& X, const Vec& f, double alpha);

// sum_x f(x) g(x) mu(x)
double pairing(const QuasiMetricSpace& X, const Vec& f, const Vec& g);

// sum_j lambda_j <f, a_j>_mu over the decomposition
double duality_pairing(const QuasiMetricSpace& X, const Vec& f, const AtomicDecomposition& dec);

// f minus its mu-average; out_mean receives m_X(f). The remainder integrates
// to zero so it splits into local atoms, the mean rides on the global atom.
Vec split_global_atom(const QuasiMetricSpace& X, const Vec& f, double* out_mean = nullptr);

} // namespace homog
