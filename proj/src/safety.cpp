#include "safebai/safety.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace safebai {

double safety_radius(const EstimatorState& est, const SafetyBoundSettings& settings) {
    const double scale = 1.0 / (settings.gamma_lb * settings.gamma_lb);
    return beta_simplified(est.safety(), est.lambda(), est.arm_norm_bound(),
                           settings.delta_s_prime, scale)
        .value;
}

double coefficient_from_bound(double bound, double eta0) {
    if (bound >= eta0) return 1.0;
    return std::clamp(eta0 / bound, 0.0, 1.0);
}

double pessimistic_gamma(const EstimatorState& est, std::span<const double> arm, double eta0,
                         double radius) {
    const double lcb = dot(arm, est.mu_hat()) - radius * est.safety().design.inv_norm(arm);
    return coefficient_from_bound(lcb, eta0);
}

double optimistic_gamma(const EstimatorState& est, std::span<const double> arm, double eta0,
                        double radius) {
    const double ucb = dot(arm, est.mu_hat()) + radius * est.safety().design.inv_norm(arm);
    return coefficient_from_bound(ucb, eta0);
}

bool SafetyProfile::same_as(const SafetyProfile& other, double tol) const {
    if (gamma_bar.size() != other.gamma_bar.size()) return false;
    for (std::size_t k = 0; k < gamma_bar.size(); ++k) {
        if (std::abs(gamma_bar[k] - other.gamma_bar[k]) > tol) return false;
        if (std::abs(gamma_opt[k] - other.gamma_opt[k]) > tol) return false;
    }
    return true;
}

SafetyProfile build_profile(const EstimatorState& est, std::span<const Vector> arms,
                            const SafetyBoundSettings& settings, bool dynamic) {
    SafetyProfile p;
    p.radius = safety_radius(est, settings);
    p.delta_s_prime = settings.delta_s_prime;
    p.frozen = !dynamic;
    const Vector mu = est.mu_hat();
    p.gamma_bar.reserve(arms.size());
    p.gamma_opt.reserve(arms.size());
    for (const auto& x : arms) {
        const double centre = dot(x, mu);
        const double width = p.radius * est.safety().design.inv_norm(x);
        p.gamma_bar.push_back(coefficient_from_bound(centre - width, settings.eta0));
        p.gamma_opt.push_back(coefficient_from_bound(centre + width, settings.eta0));
    }
    return p;
}

std::vector<Vector> scale_arms(std::span<const Vector> arms, std::span<const double> gammas) {
    if (arms.size() != gammas.size()) throw std::invalid_argument("scale_arms: size mismatch");
    std::vector<Vector> out;
    out.reserve(arms.size());
    for (std::size_t k = 0; k < arms.size(); ++k) out.push_back(scaled(arms[k], gammas[k]));
    return out;
}

std::vector<Pull> forced_exploration(Environment& env, EstimatorState& est,
                                     const ForcedExplorationSettings& settings,
                                     std::int64_t first_round) {
    if (settings.rounds < 0) throw std::invalid_argument("forced_exploration: negative length");
    if (!(settings.coefficient > 0.0 && settings.coefficient <= 1.0)) {
        throw std::invalid_argument("forced_exploration: coefficient must lie in (0, 1]");
    }
    const auto& arms = env.instance().arms;
    const std::size_t k_arms = arms.size();
    std::vector<Pull> log;
    log.reserve(static_cast<std::size_t>(settings.rounds));
    for (std::int64_t t = 0; t < settings.rounds; ++t) {
        std::size_t k;
        if (settings.sampler == Sampler::round_robin) {
            k = static_cast<std::size_t>(first_round - 1 + t) % k_arms;
        } else {
            // Lemire's multiply-shift keeps the draw count fixed at one per round.
            const auto r = env.policy_rng()();
            k = static_cast<std::size_t>(
                (static_cast<unsigned __int128>(r) * k_arms) >> 64);
        }
        const Action action{k, settings.coefficient};
        const Observation obs = env.step(action);
        const Vector x = scaled(arms[k], settings.coefficient);
        est.update(x, obs.reward, obs.safety);
        Pull p;
        p.round = first_round + t;
        p.phase = Phase::forced_exploration;
        p.arm = k;
        p.coefficient = settings.coefficient;
        p.reward = obs.reward;
        p.safety = obs.safety;
        p.violated = obs.violated;
        log.push_back(p);
    }
    return log;
}

}  // namespace safebai
