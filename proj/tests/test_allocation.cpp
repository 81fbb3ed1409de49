#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <random>

#include "oracle.hpp"
#include "safebai/allocation.hpp"
#include "safebai/instance.hpp"
#include "safebai/simplex.hpp"

using namespace safebai;

TEST(Simplex, SmallProgramByHand) {
    // min x1 + 2x2 + 3x3 s.t. x1 + x2 + x3 = 1, x1 − x2 = 0 → x = (1/2, 1/2, 0)
    Matrix a(2, 3);
    a(0, 0) = a(0, 1) = a(0, 2) = 1.0;
    a(1, 0) = 1.0;
    a(1, 1) = -1.0;
    const Vector b{1.0, 0.0}, c{1.0, 2.0, 3.0};
    const LpSolution s = solve_standard_lp(a, b, c);
    EXPECT_NEAR(s.objective, 1.5, 1e-12);
    EXPECT_NEAR(s.x[0], 0.5, 1e-12);
    EXPECT_NEAR(s.x[1], 0.5, 1e-12);
    EXPECT_NEAR(s.x[2], 0.0, 1e-12);
}

TEST(Simplex, InfeasibleAndUnbounded) {
    Matrix a(1, 2);
    a(0, 0) = 1.0;
    a(0, 1) = 1.0;
    EXPECT_THROW(solve_standard_lp(a, Vector{-1.0}, Vector{1.0, 1.0}), InfeasibleProgram);
    Matrix u(1, 2);
    u(0, 0) = 1.0;
    u(0, 1) = -1.0;
    EXPECT_THROW(solve_standard_lp(u, Vector{1.0}, Vector{-1.0, -1.0}), UnboundedProgram);
}

TEST(L1Weights, HardInstanceDirection) {
    const Instance inst = hard_instance(3, 0.1, -0.5, 0.2);
    const Vector y = subtract(inst.arms[0], inst.arms[3]);
    const Allocation a = l1_min_weights(inst.arms, y);
    EXPECT_NEAR(a.weights[0], 1.0 - std::cos(0.1), 1e-12);
    EXPECT_NEAR(a.weights[1], -std::sin(0.1), 1e-12);
    EXPECT_NEAR(a.weights[2], 0.0, 1e-12);
    EXPECT_NEAR(a.weights[3], 0.0, 1e-12);
    EXPECT_NEAR(a.l1_norm, (1.0 - std::cos(0.1)) + std::sin(0.1), 1e-12);
    double sum = 0.0;
    for (double r : a.ratios) sum += r;
    EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(L1Weights, ZeroDirectionIsDegenerate) {
    const Instance inst = hard_instance(3, 0.1, -0.5, 0.2);
    const Allocation a = l1_min_weights(inst.arms, Vector{0, 0, 0});
    EXPECT_TRUE(a.degenerate);
    EXPECT_EQ(a.l1_norm, 0.0);
    for (double r : a.ratios) EXPECT_DOUBLE_EQ(r, 0.25);
}

TEST(L1Weights, OutsideSpanThrows) {
    const std::vector<Vector> arms{{1, 0, 0}, {0, 1, 0}};
    EXPECT_THROW(l1_min_weights(arms, Vector{0, 0, 1}), InfeasibleDirection);
    EXPECT_THROW(ratios_from_weights(Vector{0.0, 0.0}), DegenerateAllocation);
}

TEST(L1Weights, MatchesVertexEnumeration) {
    std::mt19937_64 g(41);
    for (int trial = 0; trial < 120; ++trial) {
        const std::size_t d = 2 + trial % 4;
        const std::size_t k = d + trial % (9 - d);
        std::vector<Vector> arms;
        for (std::size_t j = 0; j < k; ++j) arms.push_back(oracle::random_vector(g, d));
        if (k > d && trial % 7 == 0) arms[1] = scaled(arms[0], -2.0);  // repeated direction
        const Vector y = oracle::random_vector(g, d);
        const auto expect = oracle::l1_min_by_vertices(arms, y);
        ASSERT_TRUE(expect.has_value());
        const Allocation a = l1_min_weights(arms, y);
        EXPECT_NEAR(a.l1_norm, *expect, 1e-9 * std::max(1.0, *expect)) << "trial " << trial;
    }
}

TEST(FrankWolfe, MatchesGridOnThreeArms) {
    std::mt19937_64 g(8);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<Vector> arms;
        for (int j = 0; j < 3; ++j) arms.push_back(oracle::random_vector(g, 2));
        const Vector y = oracle::random_vector(g, 2);
        PosDefState design = PosDefState::scaled_identity(2, 0.5);
        const FrankWolfeResult fw = nu_star_finite(design, arms, y, 2000);
        double best = std::numeric_limits<double>::infinity();
        const int n = 400;
        for (int i = 0; i <= n; ++i) {
            for (int j = 0; i + j <= n; ++j) {
                const double nu[3] = {double(i) / n, double(j) / n, double(n - i - j) / n};
                Eigen::Matrix2d m = 0.5 * Eigen::Matrix2d::Identity();
                for (int a = 0; a < 3; ++a) {
                    const Eigen::Vector2d x(arms[a][0], arms[a][1]);
                    m += nu[a] * x * x.transpose();
                }
                const Eigen::Vector2d ey(y[0], y[1]);
                best = std::min(best, ey.dot(m.inverse() * ey));
            }
        }
        // grid spacing bounds how far above the optimum the grid minimum sits
        EXPECT_LE(fw.objective, best + 1e-9);
        EXPECT_GE(fw.objective, best * (1.0 - 2e-2) - 1e-9);
        double s = 0.0;
        for (double v : fw.nu) {
            EXPECT_GE(v, 0.0);
            s += v;
        }
        EXPECT_NEAR(s, 1.0, 1e-12);
    }
}

TEST(Greedy, BruteForceAgainstUpdatedInverses) {
    std::mt19937_64 g(13);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t d = 2 + trial % 4;
        const std::size_t k = 3 + trial % 5;
        PosDefState design = PosDefState::scaled_identity(d, 1.0);
        Eigen::MatrixXd a = Eigen::MatrixXd::Identity(d, d);
        for (int t = 0; t < 10; ++t) {
            const Vector x = oracle::random_vector(g, d);
            design.rank1_update(x);
            a += oracle::to_eigen(x) * oracle::to_eigen(x).transpose();
        }
        std::vector<Vector> arms;
        for (std::size_t j = 0; j < k; ++j) arms.push_back(oracle::random_vector(g, d));
        const Vector y = oracle::random_vector(g, d);
        std::vector<char> allowed_c(k, 1);
        if (trial % 3 == 0) allowed_c[0] = 0;
        const std::unique_ptr<bool[]> allowed(new bool[k]);
        for (std::size_t j = 0; j < k; ++j) allowed[j] = allowed_c[j];
        const double before = design.log_det();

        std::size_t best = k;
        double best_v = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < k; ++j) {
            if (!allowed_c[j]) continue;
            const Eigen::VectorXd x = oracle::to_eigen(arms[j]);
            const Eigen::MatrixXd next = a + x * x.transpose();
            const double v = oracle::to_eigen(y).dot(next.inverse() * oracle::to_eigen(y));
            if (v < best_v) {
                best_v = v;
                best = j;
            }
        }
        EXPECT_EQ(greedy_select(design, arms, y, std::span<const bool>(allowed.get(), k)), best);
        EXPECT_DOUBLE_EQ(design.log_det(), before);
    }
}

TEST(Rounding, PicksMostUnderSampledArm) {
    PullCounts c(3);
    c.record(0, 1.0);
    c.record(0, 1.0);
    c.record(1, 0.5);
    EXPECT_DOUBLE_EQ(c.n[0], 2.0);
    EXPECT_DOUBLE_EQ(c.n[1], 0.25);
    const Vector ratios{0.5, 0.25, 0.25};
    EXPECT_EQ(rounding_select(c, ratios), 2u);
    const bool allowed[3] = {true, true, false};
    EXPECT_EQ(rounding_select(c, ratios, allowed), 1u);
    const Vector zero_ratio{1.0, 0.0, 0.0};
    const bool only_two[3] = {false, true, true};
    EXPECT_THROW(rounding_select(c, zero_ratio, only_two), DegenerateAllocation);
}

TEST(Rounding, TracksRatios) {
    // proportions approach the target ratios at rate O(K/t)
    const Vector ratios{0.5, 0.3, 0.2};
    PullCounts c(3);
    for (int t = 1; t <= 1000; ++t) c.record(rounding_select(c, ratios), 1.0);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(c.n[k] / 1000.0, ratios[k], 3.0 / 1000.0);
}

TEST(DirectionCount, ByHand) {
    Allocation a;
    a.weights = {0.5, 0.0, -0.25};
    PullCounts c(3);
    c.n = {8.0, 1.0, 1.0};
    const Vector gammas{1.0, 1.0, 0.5};
    // min(8 / 0.5, 1 / (0.25 · 0.25)) = 16
    EXPECT_DOUBLE_EQ(direction_count(a, c, gammas), 16.0);
}

TEST(Equivalence, PrimalEqualsDualAndClosedForm) {
    std::mt19937_64 g(31);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t d = 2 + trial % 3;
        const std::size_t k = d + 1 + trial % 3;
        std::vector<Vector> cols;
        for (std::size_t j = 0; j < k; ++j) cols.push_back(oracle::random_vector(g, d));
        const Matrix x = Matrix::from_columns(cols);
        Vector mu(k);
        double s = 0.0;
        for (double& m : mu) s += (m = u(g));
        for (double& m : mu) m /= s;
        const Vector y = oracle::random_vector(g, d);
        const double reg = 1.0 / (10.0 + trial);
        const double primal = relaxed_design_value(x, mu, y, reg);
        const double dual = reproduction_value(x, mu, y, reg);
        // dual minimizer in closed form: w = M Xᵀ(reg I + X M Xᵀ)⁻¹ y
        const Eigen::MatrixXd ex = oracle::columns(cols);
        const Eigen::VectorXd em = oracle::to_eigen(mu);
        const Eigen::VectorXd ey = oracle::to_eigen(y);
        const Eigen::MatrixXd g_mat =
            reg * Eigen::MatrixXd::Identity(d, d) + ex * em.asDiagonal() * ex.transpose();
        const Eigen::VectorXd w = em.asDiagonal() * ex.transpose() * g_mat.ldlt().solve(ey);
        const double dual_oracle =
            (ey - ex * w).squaredNorm() + reg * (w.array().square() / em.array()).sum();
        EXPECT_NEAR(primal, dual, 1e-8 * std::abs(primal));
        EXPECT_NEAR(primal, dual_oracle, 1e-8 * std::abs(primal));
    }
}
