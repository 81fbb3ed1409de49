#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracle.hpp"
#include "safebai/estimation.hpp"
#include "safebai/instance.hpp"
#include "safebai/safety.hpp"

using namespace safebai;

namespace {

EstimatorSettings settings_for(std::size_t d, double lambda = 1.0) {
    EstimatorSettings s;
    s.dim = d;
    s.lambda = lambda;
    s.reward_noise = 1.0;
    s.reward_norm_bound = 2.0;
    s.safety_noise = 0.1;
    s.safety_norm_bound = 1.0;
    return s;
}

}  // namespace

TEST(Estimator, ReproducesBatchRidge) {
    std::mt19937_64 g(2);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t d = 2 + trial % 4;
        const double lambda = 0.5 + trial % 3;
        EstimatorState est(settings_for(d, lambda));
        std::vector<Vector> xs, xs_safe;
        Vector rs, ss;
        for (int t = 0; t < 50; ++t) {
            const Vector x = oracle::random_vector(g, d);
            const double r = oracle::random_vector(g, 1)[0];
            std::optional<double> s;
            if (t % 3 != 0) {
                s = oracle::random_vector(g, 1)[0];
                xs_safe.push_back(x);
                ss.push_back(*s);
            }
            est.update(x, r, s);
            xs.push_back(x);
            rs.push_back(r);
        }
        const Eigen::VectorXd theta = oracle::batch_ridge(xs, rs, lambda);
        const Eigen::VectorXd mu = oracle::batch_ridge(xs_safe, ss, lambda);
        const Vector th = est.theta_hat(), mh = est.mu_hat();
        for (std::size_t i = 0; i < d; ++i) {
            EXPECT_NEAR(th[i], theta(static_cast<Eigen::Index>(i)), 1e-9);
            EXPECT_NEAR(mh[i], mu(static_cast<Eigen::Index>(i)), 1e-9);
        }
        EXPECT_EQ(est.rounds(), 50);
        EXPECT_EQ(est.safety().observations, static_cast<std::int64_t>(xs_safe.size()));
    }
}

TEST(Estimator, DimensionMismatchThrows) {
    EstimatorState est(settings_for(3));
    EXPECT_THROW(est.update(Vector{1.0, 2.0}, 0.0, std::nullopt), std::invalid_argument);
}

TEST(Radius, SimplifiedBetaByHand) {
    // R√(d ln((1 + tL²s/λ)/δ)) + √λ D
    const double t = 800, d = 3, r = 0.1, dd = 1.0, lambda = 1.0, l = 1.0, delta = 0.001, s = 25.0;
    const double expect = r * std::sqrt(d * std::log((1.0 + t * l * l * s / lambda) / delta)) +
                          std::sqrt(lambda) * dd;
    EXPECT_NEAR(beta_simplified_at(t, 3, r, dd, lambda, l, delta, s), expect, 1e-14);
    EXPECT_THROW(beta_simplified_at(t, 3, r, dd, lambda, l, 0.0, s), std::invalid_argument);
    EXPECT_THROW(beta_simplified_at(t, 3, r, dd, lambda, l, 1.0, s), std::invalid_argument);
}

TEST(Radius, DeterminantFormByHand) {
    std::mt19937_64 g(4);
    EstimatorState est(settings_for(3, 2.0));
    Eigen::MatrixXd a = 2.0 * Eigen::MatrixXd::Identity(3, 3);
    for (int t = 0; t < 30; ++t) {
        const Vector x = oracle::random_vector(g, 3);
        est.update(x, 0.0, std::nullopt);
        const Eigen::VectorXd e = oracle::to_eigen(x);
        a += e * e.transpose();
    }
    const double delta = 0.05;
    const double ratio = std::sqrt(a.determinant() / std::pow(2.0, 3));
    const double expect = 1.0 * std::sqrt(2.0 * std::log(ratio / delta)) + std::sqrt(2.0) * 2.0;
    EXPECT_NEAR(c_radius(est.reward(), 2.0, delta).value, expect, 1e-10);
}

TEST(Radius, ZeroRoundsGivesRegularizerTerm) {
    EstimatorState est(settings_for(3));
    const double c = c_radius(est.reward(), 1.0, 0.1).value;
    EXPECT_NEAR(c, std::sqrt(2.0 * std::log(10.0)) + 2.0, 1e-12);
    EXPECT_TRUE(in_confidence_set(est.reward(), Vector{0, 0, 0}, {c, 0.1, RadiusKind::determinant}));
}

TEST(Coefficient, FromBound) {
    EXPECT_DOUBLE_EQ(coefficient_from_bound(0.3, -0.5), 1.0);
    EXPECT_DOUBLE_EQ(coefficient_from_bound(-0.5, -0.5), 1.0);
    EXPECT_DOUBLE_EQ(coefficient_from_bound(-1.0, -0.5), 0.5);
    EXPECT_DOUBLE_EQ(coefficient_from_bound(-4.0, -0.5), 0.125);
    EXPECT_DOUBLE_EQ(max_safe_coefficient(Vector{0, 1, 0}, Vector{0, -1, 0}, -0.5), 0.5);
}

TEST(ForcedExploration, ZeroRoundsLeavesEstimator) {
    const Instance inst = hard_instance(3, 0.1, -0.5, 0.2);
    Environment env(inst, 1.0, 0.1, 7);
    EstimatorState est(settings_for(3));
    const auto log = forced_exploration(env, est, {0, 0.2, Sampler::uniform});
    EXPECT_TRUE(log.empty());
    EXPECT_EQ(est.rounds(), 0);
    EXPECT_THROW(forced_exploration(env, est, {-1, 0.2, Sampler::uniform}), std::invalid_argument);
    EXPECT_THROW(forced_exploration(env, est, {5, 0.0, Sampler::uniform}), std::invalid_argument);
}

TEST(ForcedExploration, RoundRobinZeroNoiseBias) {
    // With exact responses the ridge error is λA⁻¹μ⋆.
    const Instance inst = hard_instance(3, 0.1, -0.5, 0.2);
    Environment env(inst, 0.0, 0.0, 7);
    EstimatorState est(settings_for(3));
    const auto log = forced_exploration(env, est, {800, 0.2, Sampler::round_robin});
    ASSERT_EQ(log.size(), 800u);
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(3, 3);
    for (const auto& p : log) {
        EXPECT_EQ(p.arm, static_cast<std::size_t>(p.round - 1) % 4);
        EXPECT_FALSE(p.violated);
        const Eigen::VectorXd x = 0.2 * oracle::to_eigen(inst.arms[p.arm]);
        a += x * x.transpose();
    }
    const Eigen::VectorXd mu = oracle::to_eigen(inst.mu_star);
    const Eigen::VectorXd bias = a.ldlt().solve(mu);
    const Vector mh = est.mu_hat();
    double err = 0.0;
    for (int i = 0; i < 3; ++i) {
        EXPECT_NEAR(mh[i], mu(i) - bias(i), 1e-12);
        err += (mh[i] - mu(i)) * (mh[i] - mu(i));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    EXPECT_LE(std::sqrt(err), mu.norm() / es.eigenvalues().minCoeff() + 1e-12);
}

TEST(ForcedExploration, ZeroNoiseGamma2Replay) {
    const Instance inst = hard_instance(3, 0.1, -0.5, 0.2);
    Environment env(inst, 0.0, 0.0, 21);
    EstimatorState est(settings_for(3));
    const auto log = forced_exploration(env, est, {800, 0.2, Sampler::uniform});
    const SafetyBoundSettings sb{-0.5, 0.001, 0.2};
    const SafetyProfile prof = build_profile(est, inst.arms, sb, false);

    // replay: batch ridge on the logged safety responses, LCB by hand
    std::vector<Vector> xs;
    Vector ss;
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(3, 3);
    for (const auto& p : log) {
        xs.push_back(scaled(inst.arms[p.arm], 0.2));
        ss.push_back(*p.safety);
        const Eigen::VectorXd x = oracle::to_eigen(xs.back());
        a += x * x.transpose();
    }
    const Eigen::VectorXd mu = oracle::batch_ridge(xs, ss, 1.0);
    const double beta = 0.1 * std::sqrt(3.0 * std::log((1.0 + 800.0 * 25.0) / 0.001)) + 1.0;
    const Eigen::VectorXd e2 = oracle::to_eigen(inst.arms[1]);
    const double lcb = e2.dot(mu) - beta * std::sqrt(e2.dot(a.inverse() * e2));
    const double expect = lcb >= -0.5 ? 1.0 : -0.5 / lcb;
    EXPECT_NEAR(prof.gamma_bar[1], expect, 1e-10);
    EXPECT_GT(prof.gamma_bar[1], 0.2);
    EXPECT_LE(prof.gamma_bar[1], 0.5);
    EXPECT_DOUBLE_EQ(prof.gamma_bar[0], 1.0);
    for (std::size_t k = 0; k < 4; ++k) EXPECT_LE(prof.gamma_bar[k], prof.gamma_opt[k]);
}

TEST(ForcedExploration, DeterministicPerSeed) {
    const Instance inst = hard_instance(3, 0.1, -0.5, 0.2);
    auto go = [&](std::uint64_t seed) {
        Environment env(inst, 1.0, 0.1, seed, 3);
        EstimatorState est(settings_for(3));
        return forced_exploration(env, est, {50, 0.2, Sampler::uniform});
    };
    const auto a = go(5), b = go(5), c = go(6);
    bool differ = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].arm, b[i].arm);
        EXPECT_EQ(a[i].reward, b[i].reward);
        differ = differ || a[i].reward != c[i].reward;
    }
    EXPECT_TRUE(differ);
}
