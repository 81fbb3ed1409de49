#include "safebai/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace safebai {

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("dot: dimension mismatch");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

Vector subtract(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("subtract: dimension mismatch");
    }
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

Vector scaled(std::span<const double> a, double c) {
    Vector out(a.begin(), a.end());
    for (double& v : out) v *= c;
    return out;
}

// ---------------------------------------------------------------------------
// Matrix

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix Matrix::identity(std::size_t n, double scale) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = scale;
    return m;
}

Matrix Matrix::from_columns(std::span<const Vector> columns) {
    if (columns.empty()) return {};
    const std::size_t rows = columns.front().size();
    Matrix m(rows, columns.size());
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (columns[j].size() != rows) {
            throw std::invalid_argument("from_columns: ragged columns");
        }
        for (std::size_t i = 0; i < rows; ++i) m(i, j) = columns[j][i];
    }
    return m;
}

Vector Matrix::apply(std::span<const double> x) const {
    if (x.size() != cols_) throw std::invalid_argument("apply: dimension mismatch");
    Vector out(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
        double s = 0.0;
        const double* r = data_.data() + i * cols_;
        for (std::size_t j = 0; j < cols_; ++j) s += r[j] * x[j];
        out[i] = s;
    }
    return out;
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Matrix Matrix::operator*(const Matrix& other) const {
    if (cols_ != other.rows_) throw std::invalid_argument("matmul: dimension mismatch");
    Matrix out(rows_, other.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k) {
            const double a = (*this)(i, k);
            if (a == 0.0) continue;
            for (std::size_t j = 0; j < other.cols_; ++j) out(i, j) += a * other(k, j);
        }
    return out;
}

// ---------------------------------------------------------------------------
// SymMatrix

bool is_symmetric(const Matrix& m, double rel_tol) {
    if (m.rows() != m.cols()) return false;
    double scale = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) scale = std::max(scale, std::abs(m(i, j)));
    const double tol = rel_tol * std::max(scale, 1.0);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i + 1; j < m.cols(); ++j)
            if (std::abs(m(i, j) - m(j, i)) > tol) return false;
    return true;
}

SymMatrix::SymMatrix(Matrix m) : m_(std::move(m)) {
    if (m_.rows() == 0) throw std::invalid_argument("SymMatrix: empty matrix");
    if (!is_symmetric(m_)) throw std::invalid_argument("SymMatrix: input is not symmetric");
    symmetrize();
}

SymMatrix SymMatrix::scaled_identity(std::size_t n, double scale) {
    return SymMatrix(Matrix::identity(n, scale));
}

double SymMatrix::bilinear(std::span<const double> x, std::span<const double> y) const {
    const std::size_t n = dim();
    if (x.size() != n || y.size() != n) throw std::invalid_argument("bilinear: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (x[i] == 0.0) continue;
        double r = 0.0;
        for (std::size_t j = 0; j < n; ++j) r += m_(i, j) * y[j];
        s += x[i] * r;
    }
    return s;
}

void SymMatrix::add_outer(std::span<const double> x, std::span<const double> y, double c) {
    const std::size_t n = dim();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m_(i, j) += c * x[i] * y[j];
}

void SymMatrix::add_diagonal(double c) {
    for (std::size_t i = 0; i < dim(); ++i) m_(i, i) += c;
}

void SymMatrix::symmetrize() {
    const std::size_t n = dim();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double avg = 0.5 * (m_(i, j) + m_(j, i));
            m_(i, j) = avg;
            m_(j, i) = avg;
        }
}

// ---------------------------------------------------------------------------
// Dense solvers

Matrix inverse(const Matrix& m) {
    const std::size_t n = m.rows();
    if (n != m.cols()) throw std::invalid_argument("inverse: matrix is not square");
    Matrix a = m;
    Matrix inv = Matrix::identity(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
        if (a(piv, col) == 0.0) throw std::domain_error("inverse: singular matrix");
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(a(col, j), a(piv, j));
                std::swap(inv(col, j), inv(piv, j));
            }
        }
        const double p = a(col, col);
        for (std::size_t j = 0; j < n; ++j) {
            a(col, j) /= p;
            inv(col, j) /= p;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a(r, col);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                a(r, j) -= f * a(col, j);
                inv(r, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

Vector solve(const Matrix& m, std::span<const double> b) {
    const std::size_t n = m.rows();
    if (n != m.cols() || b.size() != n) throw std::invalid_argument("solve: dimension mismatch");
    Matrix a = m;
    Vector x(b.begin(), b.end());
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
        if (a(piv, col) == 0.0) throw std::domain_error("solve: singular matrix");
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(col, j), a(piv, j));
            std::swap(x[col], x[piv]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a(r, col) / a(col, col);
            if (f == 0.0) continue;
            for (std::size_t j = col; j < n; ++j) a(r, j) -= f * a(col, j);
            x[r] -= f * x[col];
        }
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = x[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
        x[i] = s / a(i, i);
    }
    return x;
}

double log_det_spd(const SymMatrix& m) {
    const std::size_t n = m.dim();
    Matrix l(n, n);
    double log_det = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double diag = m(j, j);
        for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
        if (!(diag > 0.0)) throw std::domain_error("log_det_spd: matrix is not positive definite");
        l(j, j) = std::sqrt(diag);
        log_det += 2.0 * std::log(l(j, j));
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = m(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    return log_det;
}

// ---------------------------------------------------------------------------
// Cyclic Jacobi

double min_eigenvalue(const SymMatrix& sym) {
    const std::size_t n = sym.dim();
    Matrix a = sym.dense();
    if (n == 1) return a(0, 0);

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) total += a(i, j) * a(i, j);
    const double stop = 1e-14 * std::max(1.0, std::sqrt(total));

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += 2.0 * a(p, q) * a(p, q);
        if (std::sqrt(off) < stop) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
            }
        }
    }
    double lo = a(0, 0);
    for (std::size_t i = 1; i < n; ++i) lo = std::min(lo, a(i, i));
    return lo;
}

double min_eigenvalue(const Matrix& m) { return min_eigenvalue(SymMatrix(m)); }

// ---------------------------------------------------------------------------
// PosDefState

PosDefState PosDefState::scaled_identity(std::size_t dim, double lambda) {
    if (dim == 0) throw std::invalid_argument("PosDefState: dimension must be positive");
    if (!(lambda > 0.0)) throw std::invalid_argument("PosDefState: lambda must be positive");
    PosDefState s;
    s.matrix_ = SymMatrix::scaled_identity(dim, lambda);
    s.inverse_ = SymMatrix::scaled_identity(dim, 1.0 / lambda);
    s.log_det_ = static_cast<double>(dim) * std::log(lambda);
    return s;
}

void PosDefState::check_dim(std::span<const double> x) const {
    if (x.size() != dim()) {
        throw std::invalid_argument("PosDefState: vector has dimension " + std::to_string(x.size()) +
                                    ", expected " + std::to_string(dim()));
    }
}

void PosDefState::rank1_update(std::span<const double> x) {
    check_dim(x);
    if (std::all_of(x.begin(), x.end(), [](double v) { return v == 0.0; })) return;

    const Vector u = inverse_.apply(x);
    const double denom = 1.0 + dot(x, u);
    matrix_.add_outer(x, x, 1.0);
    matrix_.symmetrize();
    inverse_.add_outer(u, u, -1.0 / denom);
    inverse_.symmetrize();
    log_det_ += std::log(denom);

    if (++since_refactor_ >= kRefactorInterval) refactor();
}

void PosDefState::refactor() {
    inverse_ = SymMatrix([&] {
        Matrix inv = safebai::inverse(matrix_.dense());
        // Gauss-Jordan leaves rounding-level asymmetry.
        for (std::size_t i = 0; i < inv.rows(); ++i)
            for (std::size_t j = i + 1; j < inv.cols(); ++j) {
                const double avg = 0.5 * (inv(i, j) + inv(j, i));
                inv(i, j) = avg;
                inv(j, i) = avg;
            }
        return inv;
    }());
    log_det_ = log_det_spd(matrix_);
    since_refactor_ = 0;
}

double PosDefState::inv_quadratic(std::span<const double> x) const {
    check_dim(x);
    return std::max(0.0, inverse_.bilinear(x, x));
}

double PosDefState::inv_norm(std::span<const double> x) const { return std::sqrt(inv_quadratic(x)); }

double PosDefState::norm(std::span<const double> x) const {
    check_dim(x);
    return std::sqrt(std::max(0.0, matrix_.bilinear(x, x)));
}

Vector PosDefState::inv_apply(std::span<const double> x) const {
    check_dim(x);
    return inverse_.apply(x);
}

}  // namespace safebai
