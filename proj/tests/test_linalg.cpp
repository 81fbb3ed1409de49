#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracle.hpp"
#include "safebai/linalg.hpp"

using namespace safebai;

namespace {

Eigen::MatrixXd to_eigen(const Matrix& m) {
    Eigen::MatrixXd e(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
    return e;
}

double max_abs_diff(const Matrix& a, const Eigen::MatrixXd& b) {
    return (to_eigen(a) - b).cwiseAbs().maxCoeff();
}

}  // namespace

TEST(Linalg, DotRejectsMismatch) {
    const Vector a{1, 2}, b{1, 2, 3};
    EXPECT_THROW(dot(a, b), std::invalid_argument);
    EXPECT_DOUBLE_EQ(dot(a, Vector{3, 4}), 11.0);
}

TEST(Linalg, InverseAndSolveMatchEigen) {
    std::mt19937_64 g(3);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + trial % 6;
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) m(i, j) = oracle::random_vector(g, 1)[0];
        for (std::size_t i = 0; i < n; ++i) m(i, i) += 3.0;
        const Eigen::MatrixXd e = to_eigen(m);
        EXPECT_LT(max_abs_diff(inverse(m), e.inverse()), 1e-10);
        const Vector b = oracle::random_vector(g, n);
        const Vector x = solve(m, b);
        const Eigen::VectorXd ex = e.partialPivLu().solve(oracle::to_eigen(b));
        for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(x[i], ex(static_cast<Eigen::Index>(i)), 1e-10);
    }
}

TEST(Linalg, SingularInverseThrows) {
    Matrix m(2, 2, 1.0);
    EXPECT_ANY_THROW(inverse(m));
}

TEST(Linalg, MinEigenvalueMatchesTrigonometricCubicRoot) {
    // 3x3 symmetric: smallest root of the characteristic cubic in closed form
    std::mt19937_64 g(11);
    for (int trial = 0; trial < 100; ++trial) {
        Matrix m(3, 3);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = i; j < 3; ++j) m(i, j) = m(j, i) = oracle::random_vector(g, 1)[0];
        const double q = (m(0, 0) + m(1, 1) + m(2, 2)) / 3.0;
        const double p1 = m(0, 1) * m(0, 1) + m(0, 2) * m(0, 2) + m(1, 2) * m(1, 2);
        const double p2 = (m(0, 0) - q) * (m(0, 0) - q) + (m(1, 1) - q) * (m(1, 1) - q) +
                          (m(2, 2) - q) * (m(2, 2) - q) + 2.0 * p1;
        const double p = std::sqrt(p2 / 6.0);
        Matrix b(3, 3);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) b(i, j) = (m(i, j) - (i == j ? q : 0.0)) / p;
        const double det_b = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) -
                             b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0)) +
                             b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
        const double r = std::clamp(det_b / 2.0, -1.0, 1.0);
        const double phi = std::acos(r) / 3.0;
        const double smallest = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
        EXPECT_NEAR(min_eigenvalue(m), smallest, 1e-9);
    }
}

TEST(Linalg, MinEigenvalueLargerMatrices) {
    std::mt19937_64 g(5);
    for (std::size_t n : {1u, 2u, 5u, 9u, 16u}) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) m(i, j) = m(j, i) = oracle::random_vector(g, 1)[0];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(m));
        EXPECT_NEAR(min_eigenvalue(m), es.eigenvalues().minCoeff(), 1e-9) << "n=" << n;
    }
}

TEST(Linalg, LogDetMatchesLuProduct) {
    std::mt19937_64 g(9);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 1 + trial % 5;
        SymMatrix s = SymMatrix::scaled_identity(n, 0.5);
        for (int r = 0; r < 4; ++r) {
            const Vector x = oracle::random_vector(g, n);
            s.add_outer(x, x, 1.0);
        }
        const double lu = std::log(to_eigen(s.dense()).partialPivLu().determinant());
        EXPECT_NEAR(log_det_spd(s), lu, 1e-10);
    }
    EXPECT_THROW(log_det_spd(SymMatrix::scaled_identity(2, -1.0)), std::domain_error);
}

TEST(PosDef, ShermanMorrisonTracksDirectInverse) {
    std::mt19937_64 g(17);
    for (int seq = 0; seq < 200; ++seq) {
        const std::size_t d = 2 + seq % 5;
        const double lambda = 0.1 + 0.1 * (seq % 10);
        PosDefState st = PosDefState::scaled_identity(d, lambda);
        Eigen::MatrixXd direct = lambda * Eigen::MatrixXd::Identity(d, d);
        for (int t = 0; t < 60; ++t) {
            const Vector x = oracle::random_vector(g, d);
            st.rank1_update(x);
            const Eigen::VectorXd ex = oracle::to_eigen(x);
            direct += ex * ex.transpose();
        }
        EXPECT_LT(max_abs_diff(st.inverse().dense(), direct.inverse()), 1e-10);
        EXPECT_LT(max_abs_diff(st.matrix().dense(), direct), 1e-9);
        EXPECT_NEAR(st.log_det(), std::log(direct.determinant()), 1e-9);
    }
}

TEST(PosDef, RefactorBoundaryKeepsAccuracy) {
    std::mt19937_64 g(23);
    PosDefState st = PosDefState::scaled_identity(3, 1.0);
    Eigen::MatrixXd direct = Eigen::MatrixXd::Identity(3, 3);
    for (int t = 0; t < 2 * PosDefState::kRefactorInterval + 7; ++t) {
        const Vector x = oracle::random_vector(g, 3, 0.3);
        st.rank1_update(x);
        const Eigen::VectorXd ex = oracle::to_eigen(x);
        direct += ex * ex.transpose();
    }
    const Eigen::MatrixXd inv = direct.inverse();
    EXPECT_LT(max_abs_diff(st.inverse().dense(), inv), 1e-12);
    const Vector y{0.3, -1.0, 2.0};
    const Eigen::VectorXd ey = oracle::to_eigen(y);
    EXPECT_NEAR(st.inv_quadratic(y), ey.dot(inv * ey), 1e-12);
    EXPECT_NEAR(st.norm(y), std::sqrt(ey.dot(direct * ey)), 1e-9);
}

TEST(PosDef, ZeroUpdateIsNoOpAndMismatchThrows) {
    PosDefState st = PosDefState::scaled_identity(2, 2.0);
    const double before = st.log_det();
    st.rank1_update(Vector{0.0, 0.0});
    EXPECT_DOUBLE_EQ(st.log_det(), before);
    EXPECT_THROW(st.rank1_update(Vector{1.0}), std::invalid_argument);
    EXPECT_THROW(st.inv_norm(Vector{1.0, 2.0, 3.0}), std::invalid_argument);
}
