#include "safebai/instance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "json.hpp"

namespace safebai {

void Instance::validate() const {
    if (arms.size() < 2) throw std::invalid_argument("instance: need at least two arms");
    const std::size_t d = theta_star.size();
    if (d == 0) throw std::invalid_argument("instance: empty theta_star");
    if (mu_star.size() != d) throw std::invalid_argument("instance: mu_star dimension mismatch");
    for (std::size_t k = 0; k < arms.size(); ++k) {
        if (arms[k].size() != d) {
            throw std::invalid_argument("instance: arm " + std::to_string(k + 1) +
                                        " has the wrong dimension");
        }
    }
    if (!(eta0 < 0.0)) throw std::invalid_argument("instance: eta0 must be negative");
    if (!(gamma_lb > 0.0 && gamma_lb <= 1.0)) {
        throw std::invalid_argument("instance: gamma_lb must lie in (0, 1]");
    }
    for (std::size_t k = 0; k < arms.size(); ++k) {
        if (gamma_lb * dot(arms[k], mu_star) < eta0) {
            throw std::invalid_argument("instance: gamma_lb is not safe for arm " +
                                        std::to_string(k + 1));
        }
        if (norm2(arms[k]) > arm_norm_bound * (1.0 + 1e-12)) {
            throw std::invalid_argument("instance: arm norm exceeds L");
        }
    }
    if (norm2(theta_star) > reward_norm_bound * (1.0 + 1e-12)) {
        throw std::invalid_argument("instance: ‖theta_star‖ exceeds D");
    }
}

Instance make_instance(std::vector<Vector> arms, Vector theta_star, Vector mu_star, double eta0,
                       double gamma_lb) {
    Instance inst;
    inst.arms = std::move(arms);
    inst.theta_star = std::move(theta_star);
    inst.mu_star = std::move(mu_star);
    inst.eta0 = eta0;
    inst.gamma_lb = gamma_lb;
    double l = 0.0;
    for (const auto& a : inst.arms) l = std::max(l, norm2(a));
    inst.arm_norm_bound = l;
    inst.reward_norm_bound = norm2(inst.theta_star);
    inst.safety_norm_bound = norm2(inst.mu_star);
    inst.validate();
    return inst;
}

Instance hard_instance(int d, double omega, double eta0, double gamma_lb) {
    if (d < 2) throw std::invalid_argument("hard_instance: d must be at least 2");
    if (!(omega >= 0.0 && omega < std::numbers::pi / 2)) {
        throw std::invalid_argument("hard_instance: omega must lie in [0, pi/2)");
    }
    if (!(eta0 < 0.0)) throw std::invalid_argument("hard_instance: eta0 must be negative");
    const auto n = static_cast<std::size_t>(d);
    std::vector<Vector> arms;
    for (std::size_t i = 0; i < n; ++i) {
        Vector e(n, 0.0);
        e[i] = 1.0;
        arms.push_back(std::move(e));
    }
    Vector perturbed(n, 0.0);
    perturbed[0] = std::cos(omega);
    perturbed[1] = std::sin(omega);
    arms.push_back(std::move(perturbed));

    Vector theta(n, 0.0);
    theta[0] = 2.0;
    Vector mu(n, 0.0);
    mu[1] = -1.0;

    Instance inst = make_instance(std::move(arms), std::move(theta), std::move(mu), eta0, gamma_lb);
    inst.arm_norm_bound = 1.0;
    inst.reward_norm_bound = 2.0;
    inst.safety_norm_bound = 1.0;
    return inst;
}

double max_safe_coefficient(std::span<const double> x, std::span<const double> mu, double eta0) {
    const double s = dot(x, mu);
    if (s >= eta0) return 1.0;
    return std::min(1.0, eta0 / s);
}

BestArm best_safe_arm(const Instance& instance) {
    BestArm best;
    bool first = true;
    for (std::size_t k = 0; k < instance.num_arms(); ++k) {
        const double g = max_safe_coefficient(instance.arms[k], instance.mu_star, instance.eta0);
        const double v = g * dot(instance.arms[k], instance.theta_star);
        if (first || v > best.value) {
            best = {k, g, v};
            first = false;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------

namespace {
enum Channel : std::uint64_t { kRewardNoise = 1, kSafetyNoise = 2, kPolicy = 3 };
}

Environment::Environment(Instance instance, double sigma_r, double sigma_s, std::uint64_t seed,
                         std::uint64_t replication)
    : instance_(std::move(instance)),
      sigma_r_(sigma_r),
      sigma_s_(sigma_s),
      reward_rng_(CounterRng::substream(seed, replication, kRewardNoise)),
      safety_rng_(CounterRng::substream(seed, replication, kSafetyNoise)),
      policy_rng_(CounterRng::substream(seed, replication, kPolicy)),
      reward_noise_(0.0, 1.0),
      safety_noise_(0.0, 1.0) {
    if (!(sigma_r >= 0.0) || !(sigma_s >= 0.0)) {
        throw std::invalid_argument("environment: noise levels must be nonnegative");
    }
    instance_.validate();
}

Observation Environment::step(const Action& action) {
    if (action.arm >= instance_.num_arms()) {
        throw std::invalid_argument("environment: arm index " + std::to_string(action.arm) +
                                    " out of range");
    }
    if (!(action.coefficient >= 0.0 && action.coefficient <= 1.0)) {
        throw std::invalid_argument("environment: coefficient must lie in [0, 1]");
    }
    const auto& x = instance_.arms[action.arm];
    const double mean_r = action.coefficient * dot(x, instance_.theta_star);
    const double mean_s = action.coefficient * dot(x, instance_.mu_star);
    Observation obs;
    // Draw unconditionally so that the stream position does not depend on sigma.
    const double zr = reward_noise_(reward_rng_);
    const double zs = safety_noise_(safety_rng_);
    obs.reward = mean_r + sigma_r_ * zr;
    obs.safety = mean_s + sigma_s_ * zs;
    obs.violated = mean_s < instance_.eta0;
    return obs;
}

// ---------------------------------------------------------------------------

std::string to_json(const ProblemFile& problem) {
    const Instance& inst = problem.instance;
    nlohmann::json j;
    j["arms"] = inst.arms;
    j["theta_star"] = inst.theta_star;
    j["mu_star"] = inst.mu_star;
    j["eta0"] = inst.eta0;
    j["gamma_lb"] = inst.gamma_lb;
    j["sigma_r"] = problem.sigma_r;
    j["sigma_s"] = problem.sigma_s;
    j["arm_norm_bound"] = inst.arm_norm_bound;
    j["reward_norm_bound"] = inst.reward_norm_bound;
    j["safety_norm_bound"] = inst.safety_norm_bound;
    return j.dump(2);
}

ProblemFile problem_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("instance json: ") + e.what());
    }
    try {
        Instance inst = make_instance(j.at("arms").get<std::vector<Vector>>(),
                                      j.at("theta_star").get<Vector>(),
                                      j.at("mu_star").get<Vector>(), j.at("eta0").get<double>(),
                                      j.at("gamma_lb").get<double>());
        if (j.contains("arm_norm_bound")) inst.arm_norm_bound = j["arm_norm_bound"].get<double>();
        if (j.contains("reward_norm_bound"))
            inst.reward_norm_bound = j["reward_norm_bound"].get<double>();
        if (j.contains("safety_norm_bound"))
            inst.safety_norm_bound = j["safety_norm_bound"].get<double>();
        inst.validate();
        ProblemFile p;
        p.instance = std::move(inst);
        p.sigma_r = j.at("sigma_r").get<double>();
        p.sigma_s = j.at("sigma_s").get<double>();
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("instance json: ") + e.what());
    }
}

}  // namespace safebai
