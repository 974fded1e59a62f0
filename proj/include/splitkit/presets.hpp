#pragma once

#include <string>

#include "splitkit/selection.hpp"
#include "splitkit/structure.hpp"

namespace splitkit {

enum class PresetKind { DFBR, PDYR, SDYR };

PresetKind preset_from_name(const std::string& name);
std::string preset_name(PresetKind kind);

/// Admissible stepsize range for a closed-form realization. The PSD residual
/// of the ring (DFBR) and chain (SDYR) realizations is a weighted graph
/// Laplacian, so nonnegative edge weights certify it: per edge i between
/// consecutive blocks, t - d*(1/(2 sigma_i) + L_{i-1} + L_i) >= lambda^2 d
/// with t = 1 (DFBR) resp. 2 (SDYR). For the star realization (PDYR) the
/// residual reduces exactly to lambda^2 d <= 2 - d*lambda_max(Phi) with
/// Phi = diag(1/(2 sigma_j) + L_j) + pathLaplacian(L). d_bar is the supremum
/// of stepsizes with positive slack; slack(d) caps both lambda^2 d and the
/// substituted relaxation gamma_tilde = lambda^2 d gamma.
struct PresetBounds {
    double d_bar = 0.0;
    double necessary_d_bar = 0.0;  // the looser diagonal-condition bound
    int active_index = -1;         // binding edge (DFBR/SDYR); -1 for PDYR
    Vec term_t;                    // per-condition constants
    Vec term_s;                    // per-condition slopes: slack = min(t - d*s)

    double slack(double d) const;
    double gamma_cap(double d) const { return slack(d); }
    /// lambda with lambda^2 d = frac * slack(d).
    double lambda_for(double d, double frac = 0.5) const;
};

PresetBounds preset_bounds(PresetKind kind, const Vec& sigma, const Vec& lip);

/// The diagonal-condition stepsize bound (necessary, not sufficient: the PSD
/// residual can be indefinite below it). Kept for reference and reporting.
double necessary_bound(PresetKind kind, const Vec& sigma, const Vec& lip);

/// Ring-structured realization (n >= 3, m = n-1, l = n-2). d in (0, d_bar);
/// lambda <= 0 picks the half-slack default.
SplittingDesign dfbr_design(int n, const Vec& sigma, const Vec& lip, double d, double lambda = -1.0);

/// Star-structured parallel realization.
SplittingDesign pdyr_design(int n, const Vec& sigma, const Vec& lip, double d, double lambda = -1.0);

/// Chain-structured sequential realization.
SplittingDesign sdyr_design(int n, const Vec& sigma, const Vec& lip, double d, double lambda = -1.0);

SplittingDesign preset_design(PresetKind kind, int n, const Vec& sigma, const Vec& lip, double d,
                              double lambda = -1.0);

/// Assemble the complete-graph design: Laplacian n I - e e^T, U = 0,
/// H,G,P,Q,R from the spectral-norm minimization, K from the standard
/// construction.
SplittingDesign crfb_design(int n, int m, int l, const Vec& sigma, const Vec& lip, const PatternSet& patterns,
                            const UpsilonOptions& opts = {});

}  // namespace splitkit
