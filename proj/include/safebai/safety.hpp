#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "safebai/estimation.hpp"
#include "safebai/instance.hpp"

namespace safebai {

enum class Phase { forced_exploration, identification };

/// One pull as it appears in a run log.
struct Pull {
    std::int64_t round = 0;  // 1-based over the whole run
    Phase phase = Phase::forced_exploration;
    std::size_t arm = 0;
    double coefficient = 0.0;
    double reward = 0.0;
    std::optional<double> safety;
    bool violated = false;
    std::optional<double> b_stat;
};

struct SafetyBoundSettings {
    double eta0 = -0.5;
    double delta_s_prime = 0.001;
    /// Known safe level; enters the radius as the scale 1/γ̲².
    double gamma_lb = 0.2;
};

/// β_FE on the safety channel of `est`.
double safety_radius(const EstimatorState& est, const SafetyBoundSettings& settings);

/// 1 when bound >= eta0, otherwise eta0 / bound clamped to [0, 1].
double coefficient_from_bound(double bound, double eta0);

/// Coefficient certified by the lower confidence bound xᵀμ̂ − radius·‖x‖_{A⁻¹}.
double pessimistic_gamma(const EstimatorState& est, std::span<const double> arm, double eta0,
                         double radius);
/// Same with the upper confidence bound.
double optimistic_gamma(const EstimatorState& est, std::span<const double> arm, double eta0,
                        double radius);

struct SafetyProfile {
    Vector gamma_bar;
    Vector gamma_opt;
    bool frozen = false;
    double delta_s_prime = 0.0;
    double radius = 0.0;

    bool same_as(const SafetyProfile& other, double tol = 1e-9) const;
};

SafetyProfile build_profile(const EstimatorState& est, std::span<const Vector> arms,
                            const SafetyBoundSettings& settings, bool dynamic);

std::vector<Vector> scale_arms(std::span<const Vector> arms, std::span<const double> gammas);

enum class Sampler { uniform, round_robin };

struct ForcedExplorationSettings {
    std::int64_t rounds = 800;
    double coefficient = 0.2;
    Sampler sampler = Sampler::uniform;
};

/// Pulls coefficient·x_k for `rounds` rounds, updating both channels, and
/// returns the pull log (rounds numbered from `first_round`).
std::vector<Pull> forced_exploration(Environment& env, EstimatorState& est,
                                     const ForcedExplorationSettings& settings,
                                     std::int64_t first_round = 1);

}  // namespace safebai
