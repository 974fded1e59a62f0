#pragma once

#include <utility>

#include "splitkit/structure.hpp"

namespace splitkit {

struct RandomDesignMatrices {
    Matrix H, G, P, Q, R;
};

struct SampleIntervals {
    std::pair<double, double> H{0.0, 1.0};
    std::pair<double, double> G{0.0, 1.0};
    std::pair<double, double> P{0.0, 1.0};
    std::pair<double, double> Q{0.0, 1.0};
    std::pair<double, double> R{0.0, 1.0};
};

/// Feasible pattern triple with evenly spread staircases; reproduces the
/// closed-form realizations' shapes at m = n-1, l = n-2.
PatternSet default_patterns(int n, int m, int l);

/// Random feasible pattern triple (seeded).
PatternSet random_patterns(int n, int m, int l, unsigned seed);

/// Sample entries uniformly on the given intervals, zero out per the
/// staircase rules, then normalize the constrained lines to sum to one.
/// A constrained line without a free entry is an infeasible pattern.
RandomDesignMatrices random_design(int n, int m, int l, const PatternSet& patterns,
                                   const SampleIntervals& intervals, unsigned seed);

/// Graph Laplacians normalized to unit spectral norm.
Matrix laplacian_complete(int n);
Matrix laplacian_watts_strogatz(int n, int degree, double rewire_p, unsigned seed);
Matrix laplacian_random_factor(int n, unsigned seed);

/// Smallest nonzero eigenvalue of a Laplacian.
double algebraic_connectivity(const Matrix& laplacian);

struct UpsilonOptions {
    long iters = 5000;
    double step = 1.0;
    unsigned start_seed = 0;  // 0 = uniform feasible start, otherwise a random_design start
};

struct SelectionResult {
    Matrix H, G, P, Q, R;
    double upsilon_norm = 0.0;
    long iterations = 0;
    bool converged = false;
};

/// Stacked coupling factor [W1 W2 W3] whose squared spectral norm is ||W||_2.
Matrix upsilon_matrix(const Matrix& H, const Matrix& G, const Matrix& P, const Matrix& Q, const Matrix& R,
                      const Vec& sigma, const Vec& lip);

/// Projected subgradient descent on ||Upsilon||_2 over the affine pattern and
/// sum constraints; step opts.step/sqrt(k+1); returns the best iterate with
/// pattern entries snapped to exact zero.
SelectionResult minimize_upsilon(int n, int m, int l, const PatternSet& patterns, const Vec& sigma, const Vec& lip,
                                 const UpsilonOptions& opts = {});

struct WMatrixResult {
    Matrix W;
    double norm2 = 0.0;
};

/// The symmetric W = Upsilon Upsilon^T; checks ||W||_2 = ||Upsilon||_2^2.
WMatrixResult w_matrix(const Matrix& H, const Matrix& G, const Matrix& P, const Matrix& Q, const Matrix& R,
                       const Vec& sigma, const Vec& lip);

}  // namespace splitkit
