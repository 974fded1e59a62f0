#include "splitkit/structure.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace splitkit {

void check_staircase_vector(const StaircaseVector& e, int n, int m, const std::string& what) {
    if (static_cast<int>(e.size()) != n) throw std::invalid_argument(what + ": length must equal n");
    if (n == 0) return;
    if (e.front() != 0) throw std::invalid_argument(what + ": first entry must be 0");
    if (e.back() != m) throw std::invalid_argument(what + ": last entry must equal m");
    for (int i = 0; i + 1 < n; ++i)
        if (e[i] > e[i + 1]) throw std::invalid_argument(what + ": entries must be nondecreasing");
    for (int v : e)
        if (v < 0 || v > m) throw std::invalid_argument(what + ": entries must lie in [0,m]");
}

bool in_staircase(const Matrix& A, const StaircaseVector& E, bool complement) {
    if (static_cast<int>(E.size()) != A.rows()) throw std::invalid_argument("in_staircase: pattern length mismatch");
    for (int i = 0; i < A.rows(); ++i) {
        for (int j = 0; j < A.cols(); ++j) {
            const bool must_be_zero = complement ? (j + 1 <= E[i]) : (j + 1 > E[i]);
            if (must_be_zero && A(i, j) != 0.0) return false;
        }
    }
    return true;
}

namespace {

// Locates the first entry breaking the (complement) staircase rule.
std::optional<PatternViolation> first_violation(const Matrix& A, const StaircaseVector& E, bool complement,
                                                const std::string& name) {
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j) {
            const bool must_be_zero = complement ? (j + 1 <= E[i]) : (j + 1 > E[i]);
            if (must_be_zero && A(i, j) != 0.0) return PatternViolation{i, j, name};
        }
    return std::nullopt;
}

}  // namespace

std::string CausalReport::summary() const {
    if (pass) return "pass";
    std::ostringstream os;
    os << "fail:";
    for (const auto& v : violations) os << " " << v.matrix << "(" << v.row + 1 << "," << v.col + 1 << ")";
    return os.str();
}

CausalReport validate_causal_pair(const Matrix& H, const Matrix& G, const StaircaseVector& E) {
    const int n = H.rows();
    const int m = H.cols();
    if (G.rows() != m || G.cols() != n) throw std::invalid_argument("validate_causal_pair: G must be m x n");
    check_staircase_vector(E, n, m, "causal pattern");
    CausalReport rep;
    if (auto v = first_violation(H, E, false, "H")) {
        rep.pass = false;
        rep.violations.push_back(*v);
    }
    if (auto v = first_violation(G.transposed(), E, true, "G^T")) {
        rep.pass = false;
        rep.violations.push_back(*v);
    }
    return rep;
}

CausalReport validate_relatively_causal(const Matrix& P, const Matrix& Q, const Matrix& R,
                                        const StaircaseVector& Etilde, const StaircaseVector& F) {
    const int n = P.rows();
    const int l = P.cols();
    if (Q.rows() != n || Q.cols() != l) throw std::invalid_argument("validate_relatively_causal: Q shape");
    if (R.rows() != l || R.cols() != n) throw std::invalid_argument("validate_relatively_causal: R shape");
    check_staircase_vector(Etilde, n, l, "Etilde");
    check_staircase_vector(F, n, l, "F");
    CausalReport rep;
    for (int i = 1; i < n; ++i) {
        if (Etilde[i - 1] < F[i]) {
            rep.pass = false;
            rep.violations.push_back({i, -1, "Etilde>=F(shifted)"});
            break;
        }
    }
    if (auto v = first_violation(Q, F, false, "Q")) {
        rep.pass = false;
        rep.violations.push_back(*v);
    }
    if (auto v = first_violation(R.transposed(), Etilde, true, "R^T")) {
        rep.pass = false;
        rep.violations.push_back(*v);
    }
    if (auto v = first_violation(P, F, true, "P(vsF)")) {
        rep.pass = false;
        rep.violations.push_back(*v);
    }
    if (auto v = first_violation(P, Etilde, false, "P(vsE)")) {
        rep.pass = false;
        rep.violations.push_back(*v);
    }
    return rep;
}

void SplittingDesign::check_shapes() const {
    if (n < 1) throw std::invalid_argument("design: n must be >= 1");
    if (m < 0 || l < 0) throw std::invalid_argument("design: negative operator count");
    if (!M && !laplacian) throw std::invalid_argument("design: one of M, laplacian required");
    if (M && (M->rows() != n || M->cols() != n - 1)) throw std::invalid_argument("design: M must be n x (n-1)");
    if (laplacian && (laplacian->rows() != n || laplacian->cols() != n))
        throw std::invalid_argument("design: laplacian must be n x n");
    if (U && U->rows() != n) throw std::invalid_argument("design: U must have n rows");
    if (H.rows() != n || H.cols() != m) throw std::invalid_argument("design: H must be n x m");
    if (G.rows() != m || G.cols() != n) throw std::invalid_argument("design: G must be m x n");
    if (P.rows() != n || P.cols() != l) throw std::invalid_argument("design: P must be n x l");
    if (Q.rows() != n || Q.cols() != l) throw std::invalid_argument("design: Q must be n x l");
    if (R.rows() != l || R.cols() != n) throw std::invalid_argument("design: R must be l x n");
    check_staircase_vector(pattern_HG, n, m, "pattern_HG");
    check_staircase_vector(pattern_E, n, l, "pattern_E");
    check_staircase_vector(pattern_F, n, l, "pattern_F");
    if (static_cast<int>(sigma.size()) != m) throw std::invalid_argument("design: sigma length must equal m");
    if (static_cast<int>(lip.size()) != l) throw std::invalid_argument("design: lip length must equal l");
}

Matrix coupling_matrix(const Matrix& H, const Matrix& G, const Matrix& P, const Matrix& Q, const Matrix& R,
                       const Vec& sigma, const Vec& lip) {
    const int n = H.rows() > 0 ? H.rows() : P.rows();
    Matrix W(n, n);
    if (H.cols() > 0) {
        if (static_cast<int>(sigma.size()) != H.cols()) throw std::invalid_argument("coupling: sigma length mismatch");
        Matrix D = H - G.transposed();  // n x m
        Vec inv_sigma(sigma.size());
        for (std::size_t i = 0; i < sigma.size(); ++i) {
            if (!(sigma[i] > 0.0)) throw std::domain_error("coupling: sigma must be positive");
            inv_sigma[i] = 1.0 / sigma[i];
        }
        W += 0.5 * (D * diag_matrix(inv_sigma) * D.transposed());
    }
    if (P.cols() > 0) {
        if (static_cast<int>(lip.size()) != P.cols()) throw std::invalid_argument("coupling: lip length mismatch");
        for (double L : lip)
            if (!(L > 0.0)) throw std::domain_error("coupling: lip must be positive");
        const Matrix Ld = diag_matrix(lip);
        Matrix PQ = P - Q;
        W += PQ * Ld * PQ.transposed();
        Matrix PR = P - R.transposed();
        W += PR * Ld * PR.transposed();
    }
    return W;
}

namespace {

Matrix governor_gram(const SplittingDesign& design) {
    if (design.laplacian) return *design.laplacian;
    return *design.M * design.M->transposed();
}

Matrix coupling_matrix(const SplittingDesign& design, const Vec& sigma, const Vec& lip) {
    if (design.m == 0 && design.l == 0) return Matrix(design.n, design.n);
    return coupling_matrix(design.H, design.G, design.P, design.Q, design.R, sigma, lip);
}

}  // namespace

void build_K(SplittingDesign& design, const Vec& sigma, const Vec& lip) {
    design.sigma = sigma;
    design.lip = lip;
    design.check_shapes();
    Matrix K = governor_gram(design);
    if (design.U && !design.U->empty()) K += *design.U * design.U->transposed();
    K += coupling_matrix(design, sigma, lip);

    const int n = design.n;
    design.K = K;
    design.N = Matrix(n, n);
    design.d.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        if (!(K(i, i) > 0.0)) throw std::domain_error("build_K: degenerate diagonal, K_ii <= 0 at row " + std::to_string(i + 1));
        design.d[i] = 2.0 / K(i, i);
        for (int j = 0; j < i; ++j) design.N(i, j) = -K(i, j);
    }
    design.has_K = true;
}

Matrix assumption_residual(const SplittingDesign& design, const Vec& sigma, const Vec& lip) {
    if (!design.has_K) throw std::invalid_argument("assumption_residual: design has no K");
    Matrix res = design.K;
    res -= governor_gram(design);
    res -= coupling_matrix(design, sigma, lip);
    return res;
}

AssumptionCertificate validate_assumption(const SplittingDesign& design, const Vec& sigma, const Vec& lip) {
    design.check_shapes();
    const int n = design.n;
    AssumptionCertificate cert;

    // (a) ker M^T contained in R e_n: M^T e_n = 0 and rank(M^T) = n-1 via the
    // spectrum of the governor Gram matrix (exactly one eigenvalue near zero).
    {
        bool kernel_ok = true;
        Matrix Gm = governor_gram(design);
        if (design.M) {
            const Matrix& M = *design.M;
            double colmax = 0.0;
            for (int j = 0; j < M.cols(); ++j) {
                double s = 0.0;
                for (int i = 0; i < M.rows(); ++i) s += M(i, j);
                colmax = std::max(colmax, std::abs(s));
            }
            if (colmax > 1e-10 * (1.0 + M.max_abs())) {
                kernel_ok = false;
                cert.messages.push_back("M^T e_n != 0");
            }
        } else {
            for (int i = 0; i < n; ++i) {
                double s = 0.0;
                for (int j = 0; j < n; ++j) s += Gm(i, j);
                if (std::abs(s) > 1e-10 * (1.0 + Gm.max_abs())) {
                    kernel_ok = false;
                    cert.messages.push_back("laplacian row sums nonzero");
                    break;
                }
            }
        }
        if (design.M && design.laplacian) {
            Matrix diff = *design.laplacian - *design.M * design.M->transposed();
            if (diff.max_abs() > 1e-10 * (1.0 + design.laplacian->max_abs())) {
                kernel_ok = false;
                cert.messages.push_back("laplacian != M M^T");
            }
        }
        if (n == 1) {
            cert.kernel_pass = kernel_ok;  // empty M, nothing more to check
        } else {
            auto eig = symmetric_eigen(Gm);
            const double lmax = std::max(0.0, eig.values.back());
            const double thresh = 1e-9 * (1.0 + lmax);
            int small = 0;
            for (double v : eig.values)
                if (v < thresh) ++small;
            if (small != 1) {
                kernel_ok = false;
                cert.messages.push_back("governor Gram matrix has rank != n-1 (" + std::to_string(small) +
                                        " near-zero eigenvalues)");
            }
            cert.kernel_pass = kernel_ok;
        }
    }

    // (b) row/column sums and the causality patterns.
    {
        bool ok = true;
        auto check_sums = [&](const Matrix& A, bool columns, const std::string& name) {
            const int outer = columns ? A.cols() : A.rows();
            const int inner = columns ? A.rows() : A.cols();
            for (int a = 0; a < outer; ++a) {
                double s = 0.0;
                for (int b = 0; b < inner; ++b) s += columns ? A(b, a) : A(a, b);
                if (std::abs(s - 1.0) > 1e-10) {
                    ok = false;
                    cert.messages.push_back(name + (columns ? " column " : " row ") + std::to_string(a + 1) +
                                            " sums to " + std::to_string(s));
                    return;
                }
            }
        };
        if (design.m > 0) {
            check_sums(design.H, true, "H");
            check_sums(design.G, false, "G");
        }
        if (design.l > 0) {
            check_sums(design.P, true, "P");
            check_sums(design.Q, true, "Q");
            check_sums(design.R, false, "R");
        }
        if (design.U && !design.U->empty()) {
            const Matrix& U = *design.U;
            for (int j = 0; j < U.cols(); ++j) {
                double s = 0.0;
                for (int i = 0; i < U.rows(); ++i) s += U(i, j);
                if (std::abs(s) > 1e-10 * (1.0 + U.max_abs())) {
                    ok = false;
                    cert.messages.push_back("U^T e_n != 0 in column " + std::to_string(j + 1));
                    break;
                }
            }
        }
        cert.causal_hg = design.m > 0 ? validate_causal_pair(design.H, design.G, design.pattern_HG) : CausalReport{};
        cert.causal_pqr = design.l > 0
                              ? validate_relatively_causal(design.P, design.Q, design.R, design.pattern_E, design.pattern_F)
                              : CausalReport{};
        if (!cert.causal_hg.pass) {
            ok = false;
            cert.messages.push_back("causal pair (H,G): " + cert.causal_hg.summary());
        }
        if (!cert.causal_pqr.pass) {
            ok = false;
            cert.messages.push_back("relatively causal (P,Q,R): " + cert.causal_pqr.summary());
        }
        if (design.has_K) {
            double quad = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) quad += design.K(i, j);
            if (std::abs(quad) > 1e-8 * (1.0 + design.K.max_abs())) {
                ok = false;
                cert.messages.push_back("e^T K e = " + std::to_string(quad));
            }
            double asym = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) asym = std::max(asym, std::abs(design.K(i, j) - design.K(j, i)));
            if (asym > 1e-10 * (1.0 + design.K.max_abs())) {
                ok = false;
                cert.messages.push_back("K not symmetric");
            }
        } else {
            ok = false;
            cert.messages.push_back("design has no K");
        }
        cert.structure_pass = ok;
    }

    // (c) the PSD residual.
    if (design.has_K) {
        Matrix res = assumption_residual(design, sigma, lip);
        auto eig = symmetric_eigen(res);
        cert.min_eig = eig.values.front();
        const double spec = std::max(std::abs(eig.values.front()), std::abs(eig.values.back()));
        cert.psd_scale = 1.0 + spec;
        cert.psd_pass = cert.min_eig >= -1e-9 * cert.psd_scale;
        if (!cert.psd_pass)
            cert.messages.push_back("PSD residual has min eigenvalue " + std::to_string(cert.min_eig));
    }

    return cert;
}

std::string AssumptionCertificate::report() const {
    std::ostringstream os;
    os << "(a) kernel/rank:        " << (kernel_pass ? "pass" : "FAIL") << "\n";
    os << "(b) sums + causality:   " << (structure_pass ? "pass" : "FAIL") << "\n";
    os << "(c) PSD residual:       " << (psd_pass ? "pass" : "FAIL") << "  (min eig " << min_eig << ", scale "
       << psd_scale << ")\n";
    for (const auto& msg : messages) os << "    - " << msg << "\n";
    return os.str();
}

void ensure_governor_factor(SplittingDesign& design) {
    if (design.M) return;
    if (!design.laplacian) throw std::invalid_argument("ensure_governor_factor: no laplacian");
    const int n = design.n;
    auto eig = symmetric_eigen(*design.laplacian);
    Matrix M(n, std::max(n - 1, 0));
    // Ascending eigenvalues: index 0 is the kernel direction e_n; the factor
    // uses the remaining n-1 eigenpairs.
    for (int j = 1; j < n; ++j) {
        const double lam = std::max(eig.values[j], 0.0);
        const double s = std::sqrt(lam);
        for (int i = 0; i < n; ++i) M(i, j - 1) = s * eig.vectors(i, j);
    }
    design.M = std::move(M);
}

}  // namespace splitkit
