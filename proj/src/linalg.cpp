#include "splitkit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace splitkit {

double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, const Vec& x, Vec& y) {
    if (x.size() != y.size()) throw std::invalid_argument("axpy: length mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

Vec scaled(const Vec& x, double alpha) {
    Vec r = x;
    for (double& v : r) v *= alpha;
    return r;
}

Matrix::Matrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, 0.0) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("Matrix: negative dimension");
}

Matrix::Matrix(int rows, int cols, std::vector<double> entries) : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != static_cast<std::size_t>(rows) * cols)
        throw std::invalid_argument("Matrix: entry count does not match rows*cols");
}

Matrix Matrix::identity(int n) {
    Matrix I(n, n);
    for (int i = 0; i < n; ++i) I(i, i) = 1.0;
    return I;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const int r = static_cast<int>(rows.size());
    const int c = r > 0 ? static_cast<int>(rows.begin()->size()) : 0;
    Matrix M(r, c);
    int i = 0;
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != c) throw std::invalid_argument("from_rows: ragged rows");
        int j = 0;
        for (double v : row) M(i, j++) = v;
        ++i;
    }
    return M;
}

Matrix Matrix::transposed() const {
    Matrix T(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) T(j, i) = (*this)(i, j);
    return T;
}

Matrix Matrix::operator*(const Matrix& other) const {
    if (cols_ != other.rows_) throw std::invalid_argument("Matrix multiply: inner dimension mismatch");
    Matrix R(rows_, other.cols_);
    for (int i = 0; i < rows_; ++i)
        for (int k = 0; k < cols_; ++k) {
            const double a = (*this)(i, k);
            if (a == 0.0) continue;
            for (int j = 0; j < other.cols_; ++j) R(i, j) += a * other(k, j);
        }
    return R;
}

Matrix& Matrix::operator+=(const Matrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) throw std::invalid_argument("Matrix add: shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) throw std::invalid_argument("Matrix subtract: shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

Matrix& Matrix::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

Vec Matrix::apply(const Vec& x) const {
    if (static_cast<int>(x.size()) != cols_) throw std::invalid_argument("Matrix apply: length mismatch");
    Vec y(rows_, 0.0);
    for (int i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (int j = 0; j < cols_; ++j) s += (*this)(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

Vec Matrix::apply_transposed(const Vec& x) const {
    if (static_cast<int>(x.size()) != rows_) throw std::invalid_argument("Matrix apply_transposed: length mismatch");
    Vec y(cols_, 0.0);
    for (int i = 0; i < rows_; ++i) {
        const double xi = x[i];
        if (xi == 0.0) continue;
        for (int j = 0; j < cols_; ++j) y[j] += (*this)(i, j) * xi;
    }
    return y;
}

double Matrix::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

Matrix diag_matrix(const Vec& d) {
    Matrix D(static_cast<int>(d.size()), static_cast<int>(d.size()));
    for (int i = 0; i < D.rows(); ++i) D(i, i) = d[i];
    return D;
}

BlockVector::BlockVector(int n, int dim) : n_(n), dim_(dim), data_(static_cast<std::size_t>(n) * dim, 0.0) {
    if (n < 0 || dim < 0) throw std::invalid_argument("BlockVector: negative dimension");
}

Vec BlockVector::block_copy(int i) const {
    auto b = block(i);
    return Vec(b.begin(), b.end());
}

void BlockVector::set_block(int i, const Vec& v) {
    if (static_cast<int>(v.size()) != dim_) throw std::invalid_argument("set_block: dimension mismatch");
    std::copy(v.begin(), v.end(), block(i).begin());
}

void BlockVector::add_scaled_block(int i, double alpha, const Vec& v) {
    if (static_cast<int>(v.size()) != dim_) throw std::invalid_argument("add_scaled_block: dimension mismatch");
    auto b = block(i);
    for (int k = 0; k < dim_; ++k) b[k] += alpha * v[k];
}

double BlockVector::norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
}

BlockVector& BlockVector::operator+=(const BlockVector& other) {
    if (n_ != other.n_ || dim_ != other.dim_) throw std::invalid_argument("BlockVector add: shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

BlockVector& BlockVector::operator-=(const BlockVector& other) {
    if (n_ != other.n_ || dim_ != other.dim_) throw std::invalid_argument("BlockVector subtract: shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

BlockVector& BlockVector::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

Vec BlockVector::block_mean() const {
    Vec mean(dim_, 0.0);
    for (int i = 0; i < n_; ++i) {
        auto b = block(i);
        for (int k = 0; k < dim_; ++k) mean[k] += b[k];
    }
    for (double& v : mean) v /= n_;
    return mean;
}

bool BlockVector::finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

double distance(const BlockVector& a, const BlockVector& b) {
    BlockVector d = a;
    d -= b;
    return d.norm();
}

BlockVector block_apply(const Matrix& P, const BlockVector& v) {
    if (P.cols() != v.blocks()) throw std::invalid_argument("block_apply: column count does not match block count");
    BlockVector out(P.rows(), v.dim());
    for (int i = 0; i < P.rows(); ++i) {
        auto oi = out.block(i);
        for (int j = 0; j < P.cols(); ++j) {
            const double p = P(i, j);
            if (p == 0.0) continue;
            auto vj = v.block(j);
            for (int k = 0; k < v.dim(); ++k) oi[k] += p * vj[k];
        }
    }
    return out;
}

double weighted_norm_sq(const BlockVector& v, const Vec& weights) {
    if (static_cast<int>(weights.size()) != v.blocks())
        throw std::invalid_argument("weighted_norm_sq: weight count does not match block count");
    for (double w : weights)
        if (!(w > 0.0)) throw std::domain_error("weighted_norm_sq: weights must be positive");
    double s = 0.0;
    for (int i = 0; i < v.blocks(); ++i) {
        auto b = v.block(i);
        double bi = 0.0;
        for (double x : b) bi += x * x;
        s += weights[i] * bi;
    }
    return s;
}

namespace {

// One cyclic Jacobi sweep over all off-diagonal pairs; returns the largest
// rotated off-diagonal magnitude seen before rotation.
double jacobi_sweep(Matrix& A, Matrix& V) {
    const int n = A.rows();
    double largest = 0.0;
    for (int p = 0; p < n - 1; ++p) {
        for (int q = p + 1; q < n; ++q) {
            const double apq = A(p, q);
            largest = std::max(largest, std::abs(apq));
            if (apq == 0.0) continue;
            const double app = A(p, p);
            const double aqq = A(q, q);
            const double theta = (aqq - app) / (2.0 * apq);
            const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
            const double c = 1.0 / std::sqrt(t * t + 1.0);
            const double s = t * c;
            for (int k = 0; k < n; ++k) {
                const double akp = A(k, p);
                const double akq = A(k, q);
                A(k, p) = c * akp - s * akq;
                A(k, q) = s * akp + c * akq;
            }
            for (int k = 0; k < n; ++k) {
                const double apk = A(p, k);
                const double aqk = A(q, k);
                A(p, k) = c * apk - s * aqk;
                A(q, k) = s * apk + c * aqk;
            }
            for (int k = 0; k < n; ++k) {
                const double vkp = V(k, p);
                const double vkq = V(k, q);
                V(k, p) = c * vkp - s * vkq;
                V(k, q) = s * vkp + c * vkq;
            }
        }
    }
    return largest;
}

}  // namespace

EigenDecomposition symmetric_eigen(const Matrix& S) {
    if (S.rows() != S.cols()) throw std::invalid_argument("symmetric_eigen: matrix not square");
    const int n = S.rows();
    double asym = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) asym = std::max(asym, std::abs(S(i, j) - S(j, i)));
    if (asym > 1e-10 * (1.0 + S.max_abs()))
        throw std::domain_error("symmetric_eigen: matrix not symmetric within tolerance");

    Matrix A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = 0.5 * (S(i, j) + S(j, i));
    Matrix V = Matrix::identity(n);

    const double scale = std::max(1.0, A.max_abs());
    for (int sweep = 0; sweep < 64; ++sweep) {
        const double off = jacobi_sweep(A, V);
        if (off <= 1e-14 * scale) break;
    }

    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return A(a, a) < A(b, b); });

    EigenDecomposition r;
    r.values.resize(n);
    r.vectors = Matrix(n, n);
    for (int j = 0; j < n; ++j) {
        r.values[j] = A(order[j], order[j]);
        for (int i = 0; i < n; ++i) r.vectors(i, j) = V(i, order[j]);
    }
    return r;
}

double min_eigenvalue(const Matrix& S) {
    if (S.rows() == 0) throw std::invalid_argument("min_eigenvalue: empty matrix");
    return symmetric_eigen(S).values.front();
}

double max_eigenvalue(const Matrix& S) {
    if (S.rows() == 0) throw std::invalid_argument("max_eigenvalue: empty matrix");
    return symmetric_eigen(S).values.back();
}

SingularPair spectral_norm(const Matrix& A) {
    SingularPair out;
    out.u.assign(std::max(A.rows(), 1), 0.0);
    out.v.assign(std::max(A.cols(), 1), 0.0);
    out.u[0] = 1.0;
    out.v[0] = 1.0;
    if (A.empty()) return out;
    if (A.max_abs() == 0.0) return out;

    // Power iteration on A^T A. The start vector mixes all coordinates with
    // distinct weights so it is not orthogonal to the top singular space for
    // the structured matrices seen here; a deterministic reseed covers the rest.
    const int m = A.cols();
    Vec v(m);
    for (int j = 0; j < m; ++j) v[j] = 1.0 + static_cast<double>(j) / (m + 1.0);
    double nv = norm(v);
    for (double& x : v) x /= nv;

    double sigma = 0.0;
    for (int it = 0; it < 10000; ++it) {
        Vec av = A.apply(v);
        Vec w = A.apply_transposed(av);
        const double nw = norm(w);
        if (nw == 0.0) {
            // v is in the kernel; reseed deterministically.
            for (int j = 0; j < m; ++j) v[j] = std::cos(static_cast<double>((it + 1) * (j + 2)));
            nv = norm(v);
            for (double& x : v) x /= nv;
            continue;
        }
        const double sigma_new = std::sqrt(nw);
        for (int j = 0; j < m; ++j) v[j] = w[j] / nw;
        if (std::abs(sigma_new - sigma) <= 1e-10 * std::max(1.0, sigma_new)) {
            sigma = sigma_new;
            break;
        }
        sigma = sigma_new;
    }

    Vec av = A.apply(v);
    const double nav = norm(av);
    out.value = nav;
    out.v = v;
    if (nav > 0.0)
        for (int i = 0; i < A.rows(); ++i) out.u[i] = av[i] / nav;
    return out;
}

}  // namespace splitkit
