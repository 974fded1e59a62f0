#include "splitkit/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace splitkit {

Vec OperatorTriple::sigma_diag() const {
    Vec s;
    s.reserve(B.size());
    for (const auto& b : B) s.push_back(b.sigma);
    return s;
}

Vec OperatorTriple::lip_diag() const {
    Vec s;
    s.reserve(C.size());
    for (const auto& c : C) s.push_back(c.lip);
    return s;
}

Vec prox_norm_distance(const Vec& xi, double tau, const Vec& v) {
    if (!(tau > 0.0)) throw std::domain_error("prox_norm_distance: tau must be positive");
    if (xi.size() != v.size()) throw std::invalid_argument("prox_norm_distance: dimension mismatch");
    Vec diff = v;
    axpy(-1.0, xi, diff);
    const double r = norm(diff);
    if (r <= tau) return xi;
    const double shrink = 1.0 - tau / r;
    Vec out = xi;
    axpy(shrink, diff, out);
    return out;
}

Vec simplex_project(const Vec& v) {
    const int d = static_cast<int>(v.size());
    if (d == 0) throw std::invalid_argument("simplex_project: empty vector");
    Vec u = v;
    std::sort(u.begin(), u.end(), std::greater<double>());
    double cssum = 0.0;
    double theta = 0.0;
    int rho = 0;
    for (int j = 0; j < d; ++j) {
        cssum += u[j];
        const double t = (cssum - 1.0) / (j + 1);
        if (u[j] - t > 0.0) {
            rho = j + 1;
            theta = t;
        }
    }
    (void)rho;
    Vec out(d);
    for (int j = 0; j < d; ++j) out[j] = std::max(0.0, v[j] - theta);
    return out;
}

double huber_deriv(double z, double d1, double d2) {
    if (d1 > d2 || d1 < 0.0) throw std::domain_error("huber_deriv: need 0 <= d1 <= d2");
    const double a = std::abs(z);
    if (a <= d1) return 0.0;
    const double s = z >= 0.0 ? 1.0 : -1.0;
    if (a <= d2) return s * (a - d1);
    return s * (d2 - d1);
}

double huber_value(double z, double d1, double d2) {
    if (d1 > d2 || d1 < 0.0) throw std::domain_error("huber_value: need 0 <= d1 <= d2");
    const double a = std::abs(z);
    if (a <= d1) return 0.0;
    if (a <= d2) return 0.5 * (a - d1) * (a - d1);
    return (d2 - d1) * a - 0.5 * (d2 * d2 - d1 * d1);
}

HuberComponent::HuberComponent(Vec psi, double y_i, double delta1, double delta2)
    : psi_row(std::move(psi)), y(y_i), d1(delta1), d2(delta2) {
    if (d1 > d2 || d1 < 0.0) throw std::domain_error("HuberComponent: need 0 <= d1 <= d2");
}

Vec HuberComponent::operator()(const Vec& x) const {
    const double z = dot(psi_row, x) - y;
    return scaled(psi_row, huber_deriv(z, d1, d2));
}

double HuberComponent::sigma() const {
    const double n2 = dot(psi_row, psi_row);
    return 1.0 / std::max(n2, 1e-300);
}

Vec huber_grad_component(const Vec& psi_row, double y_i, double d1, double d2, const Vec& x) {
    return HuberComponent(psi_row, y_i, d1, d2)(x);
}

void validate_oracles(const OperatorTriple& ops, unsigned seed, int pairs) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(-3.0, 3.0);
    std::uniform_real_distribution<double> taud(0.1, 2.0);
    auto sample = [&]() {
        Vec v(ops.dim);
        for (auto& x : v) x = coord(rng);
        return v;
    };
    auto diff = [](const Vec& a, const Vec& b) {
        Vec d = a;
        axpy(-1.0, b, d);
        return d;
    };
    for (const auto& a : ops.A) {
        for (int k = 0; k < pairs; ++k) {
            const double tau = taud(rng);
            Vec u = sample(), v = sample();
            Vec ju = a.resolve(tau, u), jv = a.resolve(tau, v);
            Vec dj = diff(jv, ju);
            if (dot(dj, dj) > dot(dj, diff(v, u)) + 1e-9)
                throw std::domain_error("oracle '" + a.name + "' is not firmly nonexpansive");
        }
    }
    for (const auto& b : ops.B) {
        if (!(b.sigma > 0.0)) throw std::domain_error("oracle '" + b.name + "' has nonpositive sigma");
        for (int k = 0; k < pairs; ++k) {
            Vec x = sample(), y = sample();
            Vec db = diff(b.apply(x), b.apply(y));
            if (dot(db, diff(x, y)) < b.sigma * dot(db, db) - 1e-9)
                throw std::domain_error("oracle '" + b.name + "' violates its cocoercivity constant");
        }
    }
    for (const auto& c : ops.C) {
        for (int k = 0; k < pairs; ++k) {
            Vec x = sample(), y = sample();
            Vec dc = diff(c.apply(x), c.apply(y));
            Vec dxy = diff(x, y);
            if (dot(dc, dxy) < -1e-9) throw std::domain_error("oracle '" + c.name + "' is not monotone");
            if (norm(dc) > c.lip * norm(dxy) + 1e-9)
                throw std::domain_error("oracle '" + c.name + "' violates its Lipschitz constant");
        }
    }
}

LipschitzMonotoneOracle linear_monotone(const Matrix& theta, const std::string& name) {
    if (theta.rows() != theta.cols()) throw std::invalid_argument("linear_monotone: matrix not square");
    Matrix sym = theta;
    sym += theta.transposed();
    sym *= 0.5;
    const double lam = theta.rows() > 0 ? min_eigenvalue(sym) : 0.0;
    if (lam < -1e-9 * (1.0 + sym.max_abs()))
        throw std::domain_error("linear_monotone: not monotone (theta + theta^T indefinite)");
    LipschitzMonotoneOracle op;
    op.name = name;
    op.lip = spectral_norm(theta).value;
    op.apply = [theta](const Vec& x) { return theta.apply(x); };
    return op;
}

}  // namespace splitkit
