#pragma once

#include <string>
#include <vector>

#include "splitkit/operators.hpp"

namespace splitkit {

/// Geometric-median style composite: sum of anchored norms, a Huber data term
/// and convex quadratics.
struct HuberProblem {
    int dim = 0;
    std::vector<Vec> xi;        // n anchors
    Matrix Psi;                 // m x dim
    Vec y;                      // m
    double delta1 = 0.0;
    double delta2 = 0.0;
    std::vector<Matrix> Theta;  // l PSD matrices, dim x dim
};

enum class HuberScaling { none, heterogeneous };

struct HuberInstance {
    HuberProblem problem;
    OperatorTriple ops;
};

HuberInstance make_huber_problem(int n, int m, int l, int dim, double delta1, double delta2,
                                 HuberScaling scaling, unsigned seed);

double huber_objective(const HuberProblem& p, const Vec& x);

/// Distance of 0 to the subdifferential of the objective at x; the anchored
/// norms contribute unit balls when x sits within near_tol of an anchor.
double fermat_residual(const HuberProblem& p, const Vec& x, double near_tol = 1e-7);

/// Two-team zero-sum matrix game with quadratic regularization-like terms on
/// both simplices.
struct GameProblem {
    int d1 = 0, d2 = 0;
    std::vector<Matrix> Theta;  // l payoff blocks, d2 x d1
    std::vector<Matrix> V;      // m factors on the u side, d1 x d1
    std::vector<Matrix> J;      // m factors on the v side, d2 x d2

    Matrix theta_sum() const;
    Matrix u_quadratic() const;  // sum V^T V
    Matrix v_quadratic() const;  // sum J^T J
    double value(const Vec& u, const Vec& v) const;
};

enum class GameDistribution { uniform, normal, exponential, poisson };

GameDistribution game_distribution_from_name(const std::string& name);
std::string game_distribution_name(GameDistribution d);

struct GameInstance {
    GameProblem problem;
    OperatorTriple ops;
};

GameInstance make_game_problem(int n, int m, int l, int dim, GameDistribution distribution, unsigned seed);

struct GapValue {
    double value = 0.0;  // reported, clamped at zero
    double raw = 0.0;    // signed inner-solver result
};

/// Primal-dual gap max_vbar F(u,vbar) - min_ubar F(ubar,v) over the two
/// simplices. The two quadratic subproblems are solved by accelerated
/// projected gradient with restart to projected-gradient residual <= tol.
GapValue primal_dual_gap(const GameProblem& p, const Vec& u, const Vec& v, double tol = 1e-9);

/// min of 0.5 x^T A x + b^T x over the unit simplex (A PSD); exposed for the
/// gap subproblems and their cross-checks.
Vec simplex_qp_minimize(const Matrix& A, const Vec& b, double tol, long max_iter = 100000);

}  // namespace splitkit
