#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace splitkit {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b);
double norm(const Vec& a);
// y += alpha * x
void axpy(double alpha, const Vec& x, Vec& y);
Vec scaled(const Vec& x, double alpha);

/// Dense row-major matrix of scalars. Block operators P ⊗ Id are never
/// materialized; the scalar matrix acts on BlockVector via block_apply.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols);
    Matrix(int rows, int cols, std::vector<double> entries);

    static Matrix identity(int n);
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    Matrix transposed() const;
    Matrix operator*(const Matrix& other) const;
    Matrix& operator+=(const Matrix& other);
    Matrix& operator-=(const Matrix& other);
    Matrix& operator*=(double s);

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, double s) { return a *= s; }
    friend Matrix operator*(double s, Matrix a) { return a *= s; }

    Vec apply(const Vec& x) const;            // rows x cols times cols
    Vec apply_transposed(const Vec& x) const; // cols result

    double max_abs() const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

Matrix diag_matrix(const Vec& d);

/// Element of H^n with H = R^dim: n stacked points of equal dimension.
class BlockVector {
public:
    BlockVector() = default;
    BlockVector(int n, int dim);

    int blocks() const { return n_; }
    int dim() const { return dim_; }

    std::span<double> block(int i) { return {data_.data() + static_cast<std::size_t>(i) * dim_, static_cast<std::size_t>(dim_)}; }
    std::span<const double> block(int i) const { return {data_.data() + static_cast<std::size_t>(i) * dim_, static_cast<std::size_t>(dim_)}; }

    Vec block_copy(int i) const;
    void set_block(int i, const Vec& v);
    void add_scaled_block(int i, double alpha, const Vec& v);

    double norm() const;
    BlockVector& operator+=(const BlockVector& other);
    BlockVector& operator-=(const BlockVector& other);
    BlockVector& operator*=(double s);

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    Vec block_mean() const;
    bool finite() const;

private:
    int n_ = 0;
    int dim_ = 0;
    std::vector<double> data_;
};

double distance(const BlockVector& a, const BlockVector& b);

/// (P ⊗ Id) v: output block i = sum_j P_ij v_j.
BlockVector block_apply(const Matrix& P, const BlockVector& v);

/// sum_i w_i ||v_i||^2 with all w_i > 0.
double weighted_norm_sq(const BlockVector& v, const Vec& weights);

struct EigenDecomposition {
    Vec values;      // ascending
    Matrix vectors;  // column j is the eigenvector for values[j]
};

/// Cyclic Jacobi for symmetric matrices (n <= 256 by scope). Input is
/// symmetrized first; asymmetry beyond 1e-10 relative is a domain error.
EigenDecomposition symmetric_eigen(const Matrix& S);

double min_eigenvalue(const Matrix& S);
double max_eigenvalue(const Matrix& S);

struct SingularPair {
    double value = 0.0;
    Vec u;  // left vector, length rows
    Vec v;  // right vector, length cols
};

/// Largest singular value and a corresponding pair, by power iteration on
/// A^T A (relative tolerance 1e-10, at most 10000 iterations). A zero matrix
/// yields value 0 with an arbitrary unit pair.
SingularPair spectral_norm(const Matrix& A);

}  // namespace splitkit
