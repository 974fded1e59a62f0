#include "splitkit/problems.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace splitkit {

HuberInstance make_huber_problem(int n, int m, int l, int dim, double delta1, double delta2,
                                 HuberScaling scaling, unsigned seed) {
    if (n < 1 || m < 0 || l < 0 || dim < 1) throw std::invalid_argument("make_huber_problem: bad sizes");
    if (delta1 < 0.0 || delta1 > delta2) throw std::domain_error("make_huber_problem: need 0 <= delta1 <= delta2");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> upsi(-2.5, 2.5);
    std::uniform_real_distribution<double> uy(0.0, 1.0);
    std::normal_distribution<double> nxi(0.0, 5.0);
    std::uniform_real_distribution<double> utheta(0.0, 1.0);

    HuberInstance inst;
    HuberProblem& p = inst.problem;
    p.dim = dim;
    p.delta1 = delta1;
    p.delta2 = delta2;
    p.Psi = Matrix(m, dim);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < dim; ++j) p.Psi(i, j) = upsi(rng);
    p.y.resize(m);
    for (int i = 0; i < m; ++i) p.y[i] = uy(rng);
    p.xi.resize(n);
    for (int i = 0; i < n; ++i) {
        p.xi[i].resize(dim);
        for (int j = 0; j < dim; ++j) p.xi[i][j] = nxi(rng);
    }
    std::vector<Matrix> theta_bar(l, Matrix(dim, dim));
    for (int k = 0; k < l; ++k)
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) theta_bar[k](i, j) = utheta(rng);

    if (scaling == HuberScaling::heterogeneous) {
        std::uniform_int_distribution<int> row_pick(0, m - 1);
        for (int r = 0; r < 2 && m > 0; ++r) {
            const int row = row_pick(rng);
            for (int j = 0; j < dim; ++j) p.Psi(row, j) *= 5.0;
        }
        std::uniform_int_distribution<int> mat_pick(0, l - 1);
        for (int r = 0; r < 2 && l > 0; ++r) {
            const int k = mat_pick(rng);
            theta_bar[k] *= 5.0;
        }
    }

    p.Theta.resize(l);
    for (int k = 0; k < l; ++k) p.Theta[k] = theta_bar[k].transposed() * theta_bar[k];

    OperatorTriple& ops = inst.ops;
    ops.dim = dim;
    for (int i = 0; i < n; ++i) {
        ResolventOracle a;
        a.name = "dist_to_xi" + std::to_string(i + 1);
        Vec anchor = p.xi[i];
        a.resolve = [anchor](double tau, const Vec& v) { return prox_norm_distance(anchor, tau, v); };
        ops.A.push_back(std::move(a));
    }
    for (int i = 0; i < m; ++i) {
        Vec row(dim);
        for (int j = 0; j < dim; ++j) row[j] = p.Psi(i, j);
        HuberComponent comp(row, p.y[i], delta1, delta2);
        CocoerciveOracle b;
        b.name = "huber" + std::to_string(i + 1);
        b.sigma = comp.sigma();
        b.apply = [comp](const Vec& x) { return comp(x); };
        ops.B.push_back(std::move(b));
    }
    for (int k = 0; k < l; ++k) ops.C.push_back(linear_monotone(p.Theta[k], "theta" + std::to_string(k + 1)));
    validate_oracles(ops, seed ^ 0x9e3779b9u);
    return inst;
}

double huber_objective(const HuberProblem& p, const Vec& x) {
    if (static_cast<int>(x.size()) != p.dim) throw std::invalid_argument("huber_objective: dimension mismatch");
    double f = 0.0;
    for (const Vec& xi : p.xi) {
        Vec d = x;
        axpy(-1.0, xi, d);
        f += norm(d);
    }
    if (p.Psi.rows() > 0) {
        Vec z = p.Psi.apply(x);
        for (int i = 0; i < p.Psi.rows(); ++i) f += huber_value(z[i] - p.y[i], p.delta1, p.delta2);
    }
    for (const Matrix& T : p.Theta) f += 0.5 * dot(x, T.apply(x));
    return f;
}

double fermat_residual(const HuberProblem& p, const Vec& x, double near_tol) {
    Vec g(p.dim, 0.0);
    int free_balls = 0;
    for (const Vec& xi : p.xi) {
        Vec d = x;
        axpy(-1.0, xi, d);
        const double r = norm(d);
        if (r <= near_tol) {
            ++free_balls;
        } else {
            axpy(1.0 / r, d, g);
        }
    }
    if (p.Psi.rows() > 0) {
        Vec z = p.Psi.apply(x);
        Vec hd(p.Psi.rows());
        for (int i = 0; i < p.Psi.rows(); ++i) hd[i] = huber_deriv(z[i] - p.y[i], p.delta1, p.delta2);
        Vec gt = p.Psi.apply_transposed(hd);
        axpy(1.0, gt, g);
    }
    for (const Matrix& T : p.Theta) axpy(1.0, T.apply(x), g);
    return std::max(0.0, norm(g) - static_cast<double>(free_balls));
}

Matrix GameProblem::theta_sum() const {
    Matrix S(d2, d1);
    for (const Matrix& T : Theta) S += T;
    return S;
}

Matrix GameProblem::u_quadratic() const {
    Matrix S(d1, d1);
    for (const Matrix& Vm : V) S += Vm.transposed() * Vm;
    return S;
}

Matrix GameProblem::v_quadratic() const {
    Matrix S(d2, d2);
    for (const Matrix& Jm : J) S += Jm.transposed() * Jm;
    return S;
}

double GameProblem::value(const Vec& u, const Vec& v) const {
    double f = dot(v, theta_sum().apply(u));
    for (const Matrix& Vm : V) {
        Vec t = Vm.apply(u);
        f += 0.5 * dot(t, t);
    }
    for (const Matrix& Jm : J) {
        Vec t = Jm.apply(v);
        f -= 0.5 * dot(t, t);
    }
    return f;
}

GameDistribution game_distribution_from_name(const std::string& name) {
    if (name == "uniform") return GameDistribution::uniform;
    if (name == "normal") return GameDistribution::normal;
    if (name == "exponential") return GameDistribution::exponential;
    if (name == "poisson") return GameDistribution::poisson;
    throw std::invalid_argument("unknown game distribution: " + name);
}

std::string game_distribution_name(GameDistribution d) {
    switch (d) {
        case GameDistribution::uniform: return "uniform";
        case GameDistribution::normal: return "normal";
        case GameDistribution::exponential: return "exponential";
        case GameDistribution::poisson: return "poisson";
    }
    return "?";
}

namespace {

Matrix sample_matrix(int rows, int cols, GameDistribution dist, bool regularizer, std::mt19937_64& rng) {
    Matrix A(rows, cols);
    std::uniform_real_distribution<double> uni(regularizer ? -1.0 : -10.0, regularizer ? 1.0 : 10.0);
    std::normal_distribution<double> nrm(0.0, regularizer ? 1.0 : std::sqrt(10.0));
    // exponential entries with means 0.2 and 2
    std::exponential_distribution<double> expd(regularizer ? 5.0 : 0.5);
    std::poisson_distribution<int> poi(regularizer ? 0.2 : 2.0);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            switch (dist) {
                case GameDistribution::uniform: A(i, j) = uni(rng); break;
                case GameDistribution::normal: A(i, j) = nrm(rng); break;
                case GameDistribution::exponential: A(i, j) = expd(rng); break;
                case GameDistribution::poisson: A(i, j) = static_cast<double>(poi(rng)); break;
            }
        }
    return A;
}

Vec split_u(const Vec& x, int d1) { return Vec(x.begin(), x.begin() + d1); }
Vec split_v(const Vec& x, int d1) { return Vec(x.begin() + d1, x.end()); }

Vec join_uv(const Vec& u, const Vec& v) {
    Vec x = u;
    x.insert(x.end(), v.begin(), v.end());
    return x;
}

}  // namespace

GameInstance make_game_problem(int n, int m, int l, int dim, GameDistribution distribution, unsigned seed) {
    if (n < 1 || m < 0 || l < 0 || dim < 1) throw std::invalid_argument("make_game_problem: bad sizes");
    std::mt19937_64 rng(seed);
    GameInstance inst;
    GameProblem& p = inst.problem;
    p.d1 = dim;
    p.d2 = dim;
    for (int j = 0; j < m; ++j) {
        Matrix Om = sample_matrix(dim, dim, distribution, true, rng);
        p.V.push_back(Om);
        p.J.push_back(Om);
    }
    for (int j = 0; j < l; ++j) p.Theta.push_back(sample_matrix(dim, dim, distribution, false, rng));

    OperatorTriple& ops = inst.ops;
    ops.dim = p.d1 + p.d2;
    const int d1 = p.d1;
    for (int j = 0; j < n; ++j) {
        ResolventOracle a;
        a.name = "simplex_pair" + std::to_string(j + 1);
        // Resolvent of the product normal cone: projection, tau-independent.
        a.resolve = [d1](double, const Vec& x) {
            return join_uv(simplex_project(split_u(x, d1)), simplex_project(split_v(x, d1)));
        };
        ops.A.push_back(std::move(a));
    }
    for (int j = 0; j < m; ++j) {
        const Matrix VtV = p.V[j].transposed() * p.V[j];
        const Matrix JtJ = p.J[j].transposed() * p.J[j];
        const double nv = spectral_norm(p.V[j]).value;
        const double nj = spectral_norm(p.J[j]).value;
        CocoerciveOracle b;
        b.name = "regularizer" + std::to_string(j + 1);
        b.sigma = 1.0 / std::max({nv * nv, nj * nj, 1e-12});
        b.apply = [VtV, JtJ, d1](const Vec& x) {
            return join_uv(VtV.apply(split_u(x, d1)), JtJ.apply(split_v(x, d1)));
        };
        ops.B.push_back(std::move(b));
    }
    for (int j = 0; j < l; ++j) {
        const Matrix Th = p.Theta[j];
        const Matrix ThT = Th.transposed();
        LipschitzMonotoneOracle c;
        c.name = "payoff" + std::to_string(j + 1);
        c.lip = spectral_norm(Th).value;
        c.apply = [Th, ThT, d1](const Vec& x) {
            Vec u = split_u(x, d1);
            Vec v = split_v(x, d1);
            Vec top = ThT.apply(v);
            Vec bottom = scaled(Th.apply(u), -1.0);
            return join_uv(top, bottom);
        };
        ops.C.push_back(std::move(c));
    }
    validate_oracles(ops, seed ^ 0x9e3779b9u);
    return inst;
}

Vec simplex_qp_minimize(const Matrix& A, const Vec& b, double tol, long max_iter) {
    const int d = static_cast<int>(b.size());
    if (A.rows() != d || A.cols() != d) throw std::invalid_argument("simplex_qp_minimize: shape mismatch");
    const double Lq = A.max_abs() == 0.0 ? 0.0 : spectral_norm(A).value;
    if (Lq <= 1e-14) {
        // Pure linear program over the simplex: best vertex.
        Vec x(d, 0.0);
        int best = 0;
        for (int i = 1; i < d; ++i)
            if (b[i] < b[best]) best = i;
        x[best] = 1.0;
        return x;
    }
    const double step = 1.0 / Lq;
    Vec x(d, 1.0 / d);
    Vec yv = x;
    double t = 1.0;
    auto grad = [&](const Vec& p) {
        Vec g = A.apply(p);
        axpy(1.0, b, g);
        return g;
    };
    auto fval = [&](const Vec& p) { return 0.5 * dot(p, A.apply(p)) + dot(b, p); };
    double fx = fval(x);
    for (long k = 0; k < max_iter; ++k) {
        Vec g = grad(yv);
        Vec cand = yv;
        axpy(-step, g, cand);
        Vec x_new = simplex_project(cand);

        // Projected-gradient residual at the new point.
        Vec gx = grad(x_new);
        Vec probe = x_new;
        axpy(-step, gx, probe);
        Vec px = simplex_project(probe);
        double res = 0.0;
        for (int i = 0; i < d; ++i) {
            const double diff = (x_new[i] - px[i]) * Lq;
            res += diff * diff;
        }
        res = std::sqrt(res);
        if (res <= tol) return x_new;

        const double f_new = fval(x_new);
        if (f_new > fx) {
            // Function-value restart: keep the point, drop the momentum.
            t = 1.0;
            yv = x_new;
        } else {
            const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
            yv = x_new;
            const double mix = (t - 1.0) / t_new;
            for (int i = 0; i < d; ++i) yv[i] = x_new[i] + mix * (x_new[i] - x[i]);
            t = t_new;
        }
        x = std::move(x_new);
        fx = f_new;
    }
    throw std::runtime_error("simplex_qp_minimize: no convergence within iteration budget");
}

GapValue primal_dual_gap(const GameProblem& p, const Vec& u_in, const Vec& v_in, double tol) {
    if (static_cast<int>(u_in.size()) != p.d1 || static_cast<int>(v_in.size()) != p.d2)
        throw std::invalid_argument("primal_dual_gap: dimension mismatch");
    Vec u = simplex_project(u_in);
    Vec v = simplex_project(v_in);
    {
        Vec du = u, dv = v;
        axpy(-1.0, u_in, du);
        axpy(-1.0, v_in, dv);
        if (norm(du) > 1e-8 || norm(dv) > 1e-8)
            throw std::domain_error("primal_dual_gap: point too far from the simplex");
    }
    const Matrix Th = p.theta_sum();
    const Matrix Au = p.u_quadratic();
    const Matrix Av = p.v_quadratic();

    // max over vbar of <Th u, vbar> - 0.5 vbar' Av vbar  ==  -min 0.5 vbar' Av vbar - <Th u, vbar>
    Vec bu = scaled(Th.apply(u), -1.0);
    Vec v_star = simplex_qp_minimize(Av, bu, tol);
    const double best_max = dot(Th.apply(u), v_star) - 0.5 * dot(v_star, Av.apply(v_star)) + 0.5 * dot(u, Au.apply(u));

    // min over ubar of <Th ubar, v> + 0.5 ubar' Au ubar
    Vec bv = Th.apply_transposed(v);
    Vec u_star = simplex_qp_minimize(Au, bv, tol);
    const double best_min = dot(v, Th.apply(u_star)) + 0.5 * dot(u_star, Au.apply(u_star)) - 0.5 * dot(v, Av.apply(v));

    GapValue gap;
    gap.raw = best_max - best_min;
    if (gap.raw < -10.0 * tol) throw std::runtime_error("primal_dual_gap: negative gap beyond solver tolerance");
    gap.value = std::max(gap.raw, 0.0);
    return gap;
}

}  // namespace splitkit
