#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "safebai/linalg.hpp"
#include "safebai/rng.hpp"

namespace safebai {

/// Ground truth of a safe linear bandit problem.
///
/// Pulling arm k at coefficient gamma yields reward gamma * x_kᵀθ⋆ + noise and
/// safety signal gamma * x_kᵀμ⋆ + noise; the action is safe iff
/// gamma * x_kᵀμ⋆ >= eta0. `gamma_lb` is the level known a priori to be safe
/// for every arm.
struct Instance {
    std::vector<Vector> arms;
    Vector theta_star;
    Vector mu_star;
    double eta0 = -0.5;
    double gamma_lb = 0.2;
    /// L >= max_k ‖x_k‖
    double arm_norm_bound = 1.0;
    /// D >= ‖θ⋆‖
    double reward_norm_bound = 1.0;
    /// Bound on ‖μ⋆‖ used by the safety confidence radius.
    double safety_norm_bound = 1.0;

    std::size_t num_arms() const { return arms.size(); }
    std::size_t dim() const { return theta_star.size(); }

    /// Throws std::invalid_argument describing the first violated invariant.
    void validate() const;
};

/// Builds an instance and fills L, D and the safety bound from the data.
Instance make_instance(std::vector<Vector> arms, Vector theta_star, Vector mu_star, double eta0,
                       double gamma_lb);

/// d canonical arms plus (cos ω, sin ω, 0, ...); θ⋆ = 2 e₁, μ⋆ = -e₂.
Instance hard_instance(int d, double omega, double eta0, double gamma_lb);

/// Largest gamma in [0, 1] with gamma * xᵀμ >= eta0.
double max_safe_coefficient(std::span<const double> x, std::span<const double> mu, double eta0);

struct BestArm {
    std::size_t arm = 0;
    double coefficient = 1.0;
    double value = 0.0;
};

/// Exhaustive search over arms at their maximal safe coefficient; ties go to
/// the lowest index.
BestArm best_safe_arm(const Instance& instance);

struct Action {
    std::size_t arm = 0;
    double coefficient = 1.0;
};

struct Observation {
    double reward = 0.0;
    double safety = 0.0;
    /// Noise-free safety below the threshold.
    bool violated = false;
};

/// Stochastic oracle answering actions with Gaussian reward and safety noise.
/// Reward noise, safety noise and the policy's own randomness use three
/// independent substreams of the (seed, replication) pair.
class Environment {
public:
    Environment(Instance instance, double sigma_r, double sigma_s, std::uint64_t seed,
                std::uint64_t replication = 0);

    const Instance& instance() const { return instance_; }
    double sigma_r() const { return sigma_r_; }
    double sigma_s() const { return sigma_s_; }

    Observation step(const Action& action);

    /// Randomness available to the learner (forced-exploration sampling).
    CounterRng& policy_rng() { return policy_rng_; }

private:
    Instance instance_;
    double sigma_r_;
    double sigma_s_;
    CounterRng reward_rng_;
    CounterRng safety_rng_;
    CounterRng policy_rng_;
    std::normal_distribution<double> reward_noise_;
    std::normal_distribution<double> safety_noise_;
};

/// Instance plus the two noise levels, as stored on disk.
struct ProblemFile {
    Instance instance;
    double sigma_r = 1.0;
    double sigma_s = 0.1;
};

std::string to_json(const ProblemFile& problem);
ProblemFile problem_from_json(const std::string& text);

}  // namespace safebai
