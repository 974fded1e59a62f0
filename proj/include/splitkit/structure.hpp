#pragma once

#include <optional>
#include <string>
#include <vector>

#include "splitkit/linalg.hpp"

namespace splitkit {

/// Nondecreasing integer vector in [0,m] with first entry 0 and last entry m;
/// governs the staircase zero patterns.
using StaircaseVector = std::vector<int>;

void check_staircase_vector(const StaircaseVector& e, int n, int m, const std::string& what);

/// Plain: A_ij = 0 for all j > E_i. Complement: A_ij = 0 for all j <= E_i.
/// Exact zero test.
bool in_staircase(const Matrix& A, const StaircaseVector& E, bool complement);

struct PatternViolation {
    int row = -1;
    int col = -1;
    std::string matrix;
};

struct CausalReport {
    bool pass = true;
    std::vector<PatternViolation> violations;  // first violation per matrix
    std::string summary() const;
};

/// H in S(E) and G^T in S^c(E).
CausalReport validate_causal_pair(const Matrix& H, const Matrix& G, const StaircaseVector& E);

/// Q in S(F), R^T in S^c(Etilde), P in S^c(F) and S(Etilde), with
/// Etilde_{i-1} >= F_i for i = 2..n.
CausalReport validate_relatively_causal(const Matrix& P, const Matrix& Q, const Matrix& R,
                                        const StaircaseVector& Etilde, const StaircaseVector& F);

/// The matrix family driving one splitting scheme. Exactly one of M and
/// laplacian selects the governor form (both may be present when consistent,
/// laplacian = M M^T). K may be supplied explicitly; otherwise build_K fills
/// it from the standard construction. d_i = 2 / K_ii.
struct SplittingDesign {
    int n = 0, m = 0, l = 0;

    std::optional<Matrix> M;          // n x (n-1)
    std::optional<Matrix> laplacian;  // n x n, = M M^T
    std::optional<Matrix> U;          // n x t, absent means zero

    Matrix H;  // n x m
    Matrix G;  // m x n
    Matrix P;  // n x l
    Matrix Q;  // n x l
    Matrix R;  // l x n

    StaircaseVector pattern_HG;  // for (H, G^T)
    StaircaseVector pattern_E;   // Etilde, for (P, R^T)
    StaircaseVector pattern_F;   // for (Q, P)

    // Constants the design was certified against.
    Vec sigma;  // length m
    Vec lip;    // length l

    // Derived by build_K (or supplied for the closed-form realizations).
    Matrix K;             // n x n
    Matrix N;             // n x n, -slt(K)
    Vec d;                // d_i = 2 / K_ii

    bool has_K = false;

    void check_shapes() const;
};

/// The pattern triple a design is built against.
struct PatternSet {
    StaircaseVector hg;  // for (H, G^T)
    StaircaseVector e;   // Etilde, for (P, R^T)
    StaircaseVector f;   // for (Q, P)
};

/// (1/2)(H-G^T) Sigma^{-1} (H^T-G) + (P-Q) L (P^T-Q^T) + (P-R^T) L (P^T-R).
Matrix coupling_matrix(const Matrix& H, const Matrix& G, const Matrix& P, const Matrix& Q, const Matrix& R,
                       const Vec& sigma, const Vec& lip);

/// K = MM^T + UU^T + (1/2)(H-G^T) Sigma^{-1} (H^T-G)
///       + (P-Q) L (P^T-Q^T) + (P-R^T) L (P^T-R),
/// with the MM^T term replaced by the laplacian when only that is given.
/// Fills K, N, d in place. K_ii <= 0 is a design error.
void build_K(SplittingDesign& design, const Vec& sigma, const Vec& lip);

/// The PSD residual K - MM^T - (1/2)(H-G^T)Sigma^{-1}(H^T-G)
///                 - (P-Q)L(P^T-Q^T) - (P-R^T)L(P^T-R).
Matrix assumption_residual(const SplittingDesign& design, const Vec& sigma, const Vec& lip);

struct AssumptionCertificate {
    bool kernel_pass = false;    // (a) rank M^T = n-1 and M^T e_n = 0
    bool structure_pass = false; // (b) sum constraints and causality
    bool psd_pass = false;       // (c) residual PSD
    double min_eig = 0.0;        // smallest eigenvalue of the residual
    double psd_scale = 0.0;      // 1 + ||residual||_2
    CausalReport causal_hg;
    CausalReport causal_pqr;
    std::vector<std::string> messages;

    bool pass() const { return kernel_pass && structure_pass && psd_pass; }
    std::string report() const;
};

AssumptionCertificate validate_assumption(const SplittingDesign& design, const Vec& sigma, const Vec& lip);

/// Governor factor with M M^T = laplacian and M^T e_n = 0, from the
/// eigendecomposition. Fills design.M when only the laplacian is present.
void ensure_governor_factor(SplittingDesign& design);

}  // namespace splitkit
