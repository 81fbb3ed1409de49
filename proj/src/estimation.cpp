#include "safebai/estimation.hpp"

#include <cmath>
#include <stdexcept>

namespace safebai {

namespace {

Channel make_channel(std::size_t dim, double lambda, double noise, double norm_bound) {
    Channel c;
    c.design = PosDefState::scaled_identity(dim, lambda);
    c.response.assign(dim, 0.0);
    c.noise = noise;
    c.norm_bound = norm_bound;
    return c;
}

void absorb(Channel& c, std::span<const double> x, double y) {
    c.design.rank1_update(x);
    for (std::size_t i = 0; i < x.size(); ++i) c.response[i] += y * x[i];
    ++c.observations;
}

void check_delta(double delta) {
    if (!(delta > 0.0 && delta < 1.0)) {
        throw std::invalid_argument("confidence level delta must lie in (0, 1)");
    }
}

}  // namespace

EstimatorState::EstimatorState(const EstimatorSettings& s)
    : reward_(make_channel(s.dim, s.lambda, s.reward_noise, s.reward_norm_bound)),
      safety_(make_channel(s.dim, s.lambda, s.safety_noise, s.safety_norm_bound)),
      lambda_(s.lambda),
      arm_norm_bound_(s.arm_norm_bound) {}

void EstimatorState::update(std::span<const double> action_vector, double reward,
                            std::optional<double> safety) {
    if (action_vector.size() != dim()) {
        throw std::invalid_argument("estimator_update: dimension mismatch");
    }
    absorb(reward_, action_vector, reward);
    if (safety) absorb(safety_, action_vector, *safety);
    ++rounds_;
}

double beta_simplified_at(double t, std::size_t dim, double noise, double norm_bound,
                          double lambda, double arm_norm_bound, double delta, double scale) {
    check_delta(delta);
    if (!(scale > 0.0)) throw std::invalid_argument("beta_simplified: scale must be positive");
    const double l2 = arm_norm_bound * arm_norm_bound * scale;
    const double log_term = std::log((1.0 + t * l2 / lambda) / delta);
    return noise * std::sqrt(static_cast<double>(dim) * log_term) + std::sqrt(lambda) * norm_bound;
}

ConfidenceRadius beta_simplified(const Channel& channel, double lambda, double arm_norm_bound,
                                 double delta, double scale) {
    const double v =
        beta_simplified_at(static_cast<double>(channel.observations), channel.design.dim(),
                           channel.noise, channel.norm_bound, lambda, arm_norm_bound, delta, scale);
    return {v, delta, RadiusKind::simplified};
}

ConfidenceRadius c_radius(const Channel& channel, double lambda, double delta) {
    check_delta(delta);
    const double d = static_cast<double>(channel.design.dim());
    const double half_log_ratio = 0.5 * (channel.design.log_det() - d * std::log(lambda));
    const double inner = 2.0 * (std::max(0.0, half_log_ratio) + std::log(1.0 / delta));
    const double v = channel.noise * std::sqrt(inner) + std::sqrt(lambda) * channel.norm_bound;
    return {v, delta, RadiusKind::determinant};
}

bool in_confidence_set(const Channel& channel, std::span<const double> candidate,
                       const ConfidenceRadius& radius) {
    const Vector diff = subtract(channel.estimate(), candidate);
    return channel.design.norm(diff) <= radius.value;
}

}  // namespace safebai
