#pragma once

#include <functional>
#include <string>
#include <vector>

#include "splitkit/linalg.hpp"

namespace splitkit {

/// Resolvent oracle J_{tau A} for a maximally monotone A, supplied in closed
/// form. Resolvents are single-valued and firmly nonexpansive.
struct ResolventOracle {
    std::string name;
    std::function<Vec(double tau, const Vec&)> resolve;
};

/// Forward oracle for a sigma-cocoercive operator.
struct CocoerciveOracle {
    std::string name;
    std::function<Vec(const Vec&)> apply;
    double sigma = 0.0;
};

/// Forward oracle for a monotone, lip-Lipschitz operator.
struct LipschitzMonotoneOracle {
    std::string name;
    std::function<Vec(const Vec&)> apply;
    double lip = 0.0;
};

/// The problem instance: find x with 0 in sum A_i(x) + sum B_i(x) + sum C_i(x).
struct OperatorTriple {
    int dim = 0;
    std::vector<ResolventOracle> A;
    std::vector<CocoerciveOracle> B;
    std::vector<LipschitzMonotoneOracle> C;

    int n() const { return static_cast<int>(A.size()); }
    int m() const { return static_cast<int>(B.size()); }
    int l() const { return static_cast<int>(C.size()); }

    Vec sigma_diag() const;
    Vec lip_diag() const;
};

/// prox of tau * ||. - xi||: shrink v toward the anchor, collapsing to xi
/// when ||v - xi|| <= tau.
Vec prox_norm_distance(const Vec& xi, double tau, const Vec& v);

/// Euclidean projection onto the unit simplex (sort-and-threshold).
Vec simplex_project(const Vec& v);

/// Derivative of the Huber-like scalar h_{d1,d2}: flat up to d1, quadratic up
/// to d2, linear growth beyond.
double huber_deriv(double z, double d1, double d2);

/// The scalar potential h_{d1,d2} itself.
double huber_value(double z, double d1, double d2);

/// B_i(x) = h'(psi_row . x - y_i) * psi_row^T, with sigma = 1/||psi_row||^2.
struct HuberComponent {
    Vec psi_row;
    double y = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;

    HuberComponent(Vec psi, double y_i, double delta1, double delta2);
    Vec operator()(const Vec& x) const;
    double sigma() const;
};

Vec huber_grad_component(const Vec& psi_row, double y_i, double d1, double d2, const Vec& x);

/// C(x) = Theta x for a square Theta with Theta + Theta^T >= 0; lip is the
/// spectral norm of Theta. Construction rejects non-monotone matrices.
LipschitzMonotoneOracle linear_monotone(const Matrix& theta, const std::string& name = "linear");

/// Stack forward oracles blockwise: output block i = op_i(v_i).
template <typename Oracle>
BlockVector apply_stacked(const std::vector<Oracle>& ops, const BlockVector& v) {
    BlockVector out(v.blocks(), v.dim());
    for (int i = 0; i < v.blocks(); ++i) out.set_block(i, ops[i].apply(v.block_copy(i)));
    return out;
}

/// Randomized sampling checks of the declared oracle properties: firm
/// nonexpansiveness of each resolvent, cocoercivity of each B, monotonicity
/// and the Lipschitz bound of each C (100 pairs each, tolerance 1e-9).
/// Violations are domain errors naming the oracle.
void validate_oracles(const OperatorTriple& ops, unsigned seed, int pairs = 100);

}  // namespace splitkit
