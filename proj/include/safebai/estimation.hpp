#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "safebai/linalg.hpp"

namespace safebai {

/// One observed signal (reward or safety): the ridge design over the pulls on
/// which the signal was observed and the matching response vector.
struct Channel {
    PosDefState design;
    Vector response;
    std::int64_t observations = 0;
    /// Sub-Gaussian noise scale used in confidence radii.
    double noise = 1.0;
    /// Bound on the norm of the parameter this channel estimates.
    double norm_bound = 1.0;

    /// design⁻¹ · response
    Vector estimate() const { return design.inv_apply(response); }
};

struct EstimatorSettings {
    std::size_t dim = 0;
    double lambda = 1.0;
    double arm_norm_bound = 1.0;
    double reward_noise = 1.0;
    double reward_norm_bound = 1.0;
    double safety_noise = 1.0;
    double safety_norm_bound = 1.0;
};

/// Regularized least squares for θ⋆ and μ⋆. Both channels see the same
/// pulled vectors; the safety channel only absorbs pulls whose safety signal
/// was observed, so skipping the safety observation leaves μ̂ untouched.
class EstimatorState {
public:
    explicit EstimatorState(const EstimatorSettings& settings);

    /// Records a pull of `action_vector` (already scaled by its coefficient).
    void update(std::span<const double> action_vector, double reward,
                std::optional<double> safety);

    Vector theta_hat() const { return reward_.estimate(); }
    Vector mu_hat() const { return safety_.estimate(); }

    const Channel& reward() const { return reward_; }
    const Channel& safety() const { return safety_; }
    /// Total number of updates.
    std::int64_t rounds() const { return rounds_; }
    double lambda() const { return lambda_; }
    double arm_norm_bound() const { return arm_norm_bound_; }
    std::size_t dim() const { return reward_.design.dim(); }

private:
    Channel reward_;
    Channel safety_;
    std::int64_t rounds_ = 0;
    double lambda_;
    double arm_norm_bound_;
};

enum class RadiusKind { simplified, determinant };

struct ConfidenceRadius {
    double value = 0.0;
    double delta = 0.0;
    RadiusKind kind = RadiusKind::simplified;
};

/// R·sqrt(d·ln((1 + t·L²·scale/λ)/δ)) + sqrt(λ)·D over the given channel, with
/// t its observation count. scale = 1 is the self-normalized ellipsoid radius;
/// scale = 1/γ̲² is the forced-exploration variant.
ConfidenceRadius beta_simplified(const Channel& channel, double lambda, double arm_norm_bound,
                                 double delta, double scale = 1.0);

/// Same formula at an explicit t; used by the forced-exploration length bounds.
double beta_simplified_at(double t, std::size_t dim, double noise, double norm_bound,
                          double lambda, double arm_norm_bound, double delta, double scale);

/// R·sqrt(2·ln(det(A)^{1/2} det(λI)^{-1/2} / δ)) + sqrt(λ)·D from the
/// maintained log-determinant of the channel's design.
ConfidenceRadius c_radius(const Channel& channel, double lambda, double delta);

/// ‖θ̂ − candidate‖_A <= radius, with A the regularized design.
bool in_confidence_set(const Channel& channel, std::span<const double> candidate,
                       const ConfidenceRadius& radius);

}  // namespace safebai
