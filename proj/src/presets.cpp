#include "splitkit/presets.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace splitkit {

PresetKind preset_from_name(const std::string& name) {
    if (name == "DFBR" || name == "dfbr") return PresetKind::DFBR;
    if (name == "PDYR" || name == "pdyr") return PresetKind::PDYR;
    if (name == "SDYR" || name == "sdyr") return PresetKind::SDYR;
    throw std::invalid_argument("unknown preset: " + name);
}

std::string preset_name(PresetKind kind) {
    switch (kind) {
        case PresetKind::DFBR: return "DFBR";
        case PresetKind::PDYR: return "PDYR";
        case PresetKind::SDYR: return "SDYR";
    }
    return "?";
}

namespace {

void check_preset_sizes(int n, const Vec& sigma, const Vec& lip) {
    if (n < 3) throw std::invalid_argument("preset: n must be >= 3");
    if (static_cast<int>(sigma.size()) != n - 1) throw std::invalid_argument("preset: need m = n-1 cocoercive constants");
    if (static_cast<int>(lip.size()) != n - 2) throw std::invalid_argument("preset: need l = n-2 Lipschitz constants");
    for (double s : sigma)
        if (!(s > 0.0)) throw std::domain_error("preset: sigma must be positive");
    for (double s : lip)
        if (!(s > 0.0)) throw std::domain_error("preset: lip must be positive");
}

// Shifted identities shared by all three realizations.
Matrix shifted_identity(int n, int cols, int shift) {
    Matrix A(n, cols);
    for (int j = 0; j < cols; ++j)
        if (j + shift < n) A(j + shift, j) = 1.0;
    return A;
}

Matrix left_identity(int rows, int n) {
    Matrix A(rows, n);
    for (int i = 0; i < rows; ++i) A(i, i) = 1.0;
    return A;
}

Matrix first_column_ones(int rows, int n) {
    Matrix A(rows, n);
    for (int i = 0; i < rows; ++i) A(i, 0) = 1.0;
    return A;
}

Matrix chain_governor(int n, double lambda) {
    Matrix M(n, n - 1);
    for (int j = 0; j < n - 1; ++j) {
        M(j, j) = lambda;
        M(j + 1, j) = -lambda;
    }
    return M;
}

Matrix star_governor(int n, double lambda) {
    Matrix M(n, n - 1);
    for (int j = 0; j < n - 1; ++j) {
        M(0, j) = lambda;
        M(j + 1, j) = -lambda;
    }
    return M;
}

// d * K for each realization (the stepsize-free integer profile).
Matrix khat_matrix(PresetKind kind, int n) {
    Matrix K(n, n);
    switch (kind) {
        case PresetKind::DFBR:
            for (int i = 0; i < n; ++i) K(i, i) = 2.0;
            for (int i = 0; i + 1 < n; ++i) K(i, i + 1) = K(i + 1, i) = -1.0;
            K(0, n - 1) = K(n - 1, 0) = -1.0;
            break;
        case PresetKind::PDYR:
            K(0, 0) = 2.0 * (n - 1);
            for (int j = 1; j < n; ++j) {
                K(j, j) = 2.0;
                K(0, j) = K(j, 0) = -2.0;
            }
            break;
        case PresetKind::SDYR:
            K(0, 0) = K(n - 1, n - 1) = 2.0;
            for (int i = 1; i + 1 < n; ++i) K(i, i) = 4.0;
            for (int i = 0; i + 1 < n; ++i) K(i, i + 1) = K(i + 1, i) = -2.0;
            break;
    }
    return K;
}

struct PresetMatrices {
    Matrix H, G, P, Q, R;
};

PresetMatrices preset_matrices(PresetKind kind, int n) {
    PresetMatrices pm;
    pm.H = shifted_identity(n, n - 1, 1);
    pm.P = shifted_identity(n, n - 2, 1);
    pm.Q = shifted_identity(n, n - 2, 2);
    if (kind == PresetKind::PDYR) {
        pm.G = first_column_ones(n - 1, n);
        pm.R = first_column_ones(n - 2, n);
    } else {
        pm.G = left_identity(n - 1, n);
        pm.R = left_identity(n - 2, n);
    }
    return pm;
}

PatternSet preset_patterns(int n) {
    PatternSet pat;
    pat.hg.resize(n);
    pat.e.resize(n);
    pat.f.resize(n);
    for (int i = 0; i < n; ++i) {
        pat.hg[i] = i;
        pat.e[i] = std::min(i, n - 2);
        pat.f[i] = std::max(i - 1, 0);
    }
    pat.f[0] = 0;
    return pat;
}

}  // namespace

double PresetBounds::slack(double d) const {
    double s = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < term_t.size(); ++r) s = std::min(s, term_t[r] - d * term_s[r]);
    return s;
}

double PresetBounds::lambda_for(double d, double frac) const {
    const double cap = slack(d);
    if (!(cap > 0.0)) throw std::domain_error("preset bounds: no admissible lambda at this stepsize");
    return std::sqrt(frac * cap / d);
}

double necessary_bound(PresetKind kind, const Vec& sigma, const Vec& lip) {
    const int n = static_cast<int>(sigma.size()) + 1;
    check_preset_sizes(n, sigma, lip);
    PresetMatrices pm = preset_matrices(kind, n);
    const Matrix W = coupling_matrix(pm.H, pm.G, pm.P, pm.Q, pm.R, sigma, lip);
    const Matrix Kh = khat_matrix(kind, n);
    double bound = std::numeric_limits<double>::infinity();
    for (int r = 0; r < n; ++r) bound = std::min(bound, Kh(r, r) / W(r, r));
    return bound;
}

PresetBounds preset_bounds(PresetKind kind, const Vec& sigma, const Vec& lip) {
    const int n = static_cast<int>(sigma.size()) + 1;
    check_preset_sizes(n, sigma, lip);
    PresetBounds b;
    b.necessary_d_bar = necessary_bound(kind, sigma, lip);
    if (kind == PresetKind::PDYR) {
        // Exact reduced condition: slack(d) = 2 - d * lambda_max(Phi).
        Matrix Phi(n - 1, n - 1);
        for (int j = 0; j < n - 1; ++j) {
            const double Lj = j < n - 2 ? lip[j] : 0.0;
            Phi(j, j) = 0.5 / sigma[j] + Lj;
        }
        for (int j = 0; j < n - 2; ++j) {
            Phi(j, j) += lip[j];
            Phi(j + 1, j + 1) += lip[j];
            Phi(j, j + 1) -= lip[j];
            Phi(j + 1, j) -= lip[j];
        }
        b.term_t = {2.0};
        b.term_s = {max_eigenvalue(Phi)};
        b.d_bar = 2.0 / b.term_s[0];
        b.active_index = -1;
        return b;
    }
    // Ring (DFBR) and chain (SDYR): nonnegative edge weights. Edge i joins
    // blocks i and i+1 and carries 1/(2 sigma_i) + L_{i-1} + L_i.
    const double t = kind == PresetKind::DFBR ? 1.0 : 2.0;
    b.term_t.assign(n - 1, t);
    b.term_s.resize(n - 1);
    b.d_bar = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n - 1; ++i) {
        double s = 0.5 / sigma[i];
        if (i - 1 >= 0 && i - 1 < n - 2) s += lip[i - 1];
        if (i < n - 2) s += lip[i];
        b.term_s[i] = s;
        const double cand = t / s;
        if (cand < b.d_bar) {
            b.d_bar = cand;
            b.active_index = i;
        }
    }
    return b;
}

namespace {

SplittingDesign realize(PresetKind kind, int n, const Vec& sigma, const Vec& lip, double d, double lambda) {
    check_preset_sizes(n, sigma, lip);
    PresetBounds b = preset_bounds(kind, sigma, lip);
    if (!(d > 0.0) || d >= b.d_bar) {
        const std::string which = b.active_index >= 0
                                      ? "edge condition " + std::to_string(b.active_index + 1)
                                      : "the reduced spectral condition";
        throw std::domain_error(preset_name(kind) + ": stepsize d must lie in (0, " + std::to_string(b.d_bar) +
                                "); bound set by " + which);
    }
    if (lambda <= 0.0) lambda = b.lambda_for(d, 0.5);
    if (lambda * lambda * d > b.slack(d) + 1e-12)
        throw std::domain_error(preset_name(kind) + ": lambda^2 d exceeds the admissible slack " +
                                std::to_string(b.slack(d)));

    SplittingDesign design;
    design.n = n;
    design.m = n - 1;
    design.l = n - 2;
    PresetMatrices pm = preset_matrices(kind, n);
    design.H = std::move(pm.H);
    design.G = std::move(pm.G);
    design.P = std::move(pm.P);
    design.Q = std::move(pm.Q);
    design.R = std::move(pm.R);
    design.M = kind == PresetKind::PDYR ? star_governor(n, lambda) : chain_governor(n, lambda);
    PatternSet pat = preset_patterns(n);
    design.pattern_HG = pat.hg;
    design.pattern_E = pat.e;
    design.pattern_F = pat.f;
    design.sigma = sigma;
    design.lip = lip;

    design.K = khat_matrix(kind, n);
    design.K *= 1.0 / d;
    design.N = Matrix(n, n);
    design.d.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        design.d[i] = 2.0 / design.K(i, i);
        for (int j = 0; j < i; ++j) design.N(i, j) = -design.K(i, j);
    }
    design.has_K = true;
    design.check_shapes();
    return design;
}

}  // namespace

SplittingDesign dfbr_design(int n, const Vec& sigma, const Vec& lip, double d, double lambda) {
    return realize(PresetKind::DFBR, n, sigma, lip, d, lambda);
}

SplittingDesign pdyr_design(int n, const Vec& sigma, const Vec& lip, double d, double lambda) {
    return realize(PresetKind::PDYR, n, sigma, lip, d, lambda);
}

SplittingDesign sdyr_design(int n, const Vec& sigma, const Vec& lip, double d, double lambda) {
    return realize(PresetKind::SDYR, n, sigma, lip, d, lambda);
}

SplittingDesign preset_design(PresetKind kind, int n, const Vec& sigma, const Vec& lip, double d, double lambda) {
    return realize(kind, n, sigma, lip, d, lambda);
}

SplittingDesign crfb_design(int n, int m, int l, const Vec& sigma, const Vec& lip, const PatternSet& patterns,
                            const UpsilonOptions& opts) {
    SelectionResult sel = minimize_upsilon(n, m, l, patterns, sigma, lip, opts);
    SplittingDesign design;
    design.n = n;
    design.m = m;
    design.l = l;
    design.H = std::move(sel.H);
    design.G = std::move(sel.G);
    design.P = std::move(sel.P);
    design.Q = std::move(sel.Q);
    design.R = std::move(sel.R);
    // The raw complete-graph Laplacian n I - e e^T. Normalizing it to unit
    // norm starves the governor when the coupling dominates K.
    Matrix L = laplacian_complete(n);
    L *= static_cast<double>(n);
    design.laplacian = std::move(L);
    design.pattern_HG = patterns.hg;
    design.pattern_E = patterns.e;
    design.pattern_F = patterns.f;
    build_K(design, sigma, lip);
    return design;
}

}  // namespace splitkit
