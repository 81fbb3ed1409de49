#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace safebai {

using Vector = std::vector<double>;

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
Vector subtract(std::span<const double> a, std::span<const double> b);
Vector scaled(std::span<const double> a, double c);

/// Dense row-major matrix. Only what the bandit code needs: small, square
/// or near-square systems with d and K in the tens at most.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

    static Matrix identity(std::size_t n, double scale = 1.0);
    /// Matrix whose columns are the given vectors.
    static Matrix from_columns(std::span<const Vector> columns);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    Vector apply(std::span<const double> x) const;
    Matrix transposed() const;
    Matrix operator*(const Matrix& other) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Square matrix that is symmetric to within 1e-12 relative.
class SymMatrix {
public:
    SymMatrix() = default;
    /// Throws std::invalid_argument when `m` is not square or not symmetric.
    explicit SymMatrix(Matrix m);

    static SymMatrix scaled_identity(std::size_t n, double scale);

    std::size_t dim() const { return m_.rows(); }
    double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
    const Matrix& dense() const { return m_; }

    /// xᵀ M y
    double bilinear(std::span<const double> x, std::span<const double> y) const;
    Vector apply(std::span<const double> x) const { return m_.apply(x); }

    void add_outer(std::span<const double> x, std::span<const double> y, double c);
    void add_diagonal(double c);
    void symmetrize();

private:
    Matrix m_;
};

bool is_symmetric(const Matrix& m, double rel_tol = 1e-12);

/// Gauss-Jordan inverse with partial pivoting; throws std::domain_error on a
/// singular pivot.
Matrix inverse(const Matrix& m);
/// Solves m x = b by Gaussian elimination with partial pivoting.
Vector solve(const Matrix& m, std::span<const double> b);
/// ln det via Cholesky; throws std::domain_error if `m` is not positive definite.
double log_det_spd(const SymMatrix& m);

/// Smallest eigenvalue by cyclic Jacobi rotations.
double min_eigenvalue(const SymMatrix& m);
double min_eigenvalue(const Matrix& m);

/// Positive definite matrix with a maintained inverse and log-determinant.
/// Rank-1 updates use the Sherman-Morrison identity; the inverse and the
/// determinant are recomputed from scratch every kRefactorInterval updates.
class PosDefState {
public:
    static constexpr int kRefactorInterval = 1000;

    PosDefState() = default;
    /// lambda * I. Throws std::invalid_argument on dim == 0 or lambda <= 0.
    static PosDefState scaled_identity(std::size_t dim, double lambda);

    std::size_t dim() const { return matrix_.dim(); }
    const SymMatrix& matrix() const { return matrix_; }
    const SymMatrix& inverse() const { return inverse_; }
    double log_det() const { return log_det_; }

    /// matrix += x xᵀ
    void rank1_update(std::span<const double> x);

    /// xᵀ A⁻¹ x
    double inv_quadratic(std::span<const double> x) const;
    /// sqrt(xᵀ A⁻¹ x)
    double inv_norm(std::span<const double> x) const;
    /// sqrt(xᵀ A x)
    double norm(std::span<const double> x) const;
    Vector inv_apply(std::span<const double> x) const;

private:
    void refactor();
    void check_dim(std::span<const double> x) const;

    SymMatrix matrix_;
    SymMatrix inverse_;
    double log_det_ = 0.0;
    int since_refactor_ = 0;
};

}  // namespace safebai
