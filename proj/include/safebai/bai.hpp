#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "safebai/allocation.hpp"
#include "safebai/estimation.hpp"
#include "safebai/instance.hpp"
#include "safebai/safety.hpp"

namespace safebai {

enum class Criterion { greedy, rounding };
enum class Variant { lingape, safe_conservative, safe_optimistic, safe_fixed };
/// asymptotic: ν = p⋆ from the L1 program. finite: Frank-Wolfe on the
/// regularized program, refreshed every t_opt rounds.
enum class NuMode { asymptotic, finite };

std::string to_string(Criterion c);
std::string to_string(Variant v);
Criterion criterion_from_string(const std::string& s);
Variant variant_from_string(const std::string& s);

struct AlgoConfig {
    double epsilon = 0.01;
    double delta_r = 0.001;
    double delta_s_prime = 0.001;
    double lambda = 1.0;
    // Unset bounds are taken from the environment (R = σ_r, D, L, safety noise σ_s).
    std::optional<double> reward_noise;
    std::optional<double> reward_norm_bound;
    std::optional<double> arm_norm_bound;
    std::optional<double> safety_noise;
    std::optional<double> safety_norm_bound;
    /// Safety radius with R instead of σ_s.
    bool safety_radius_uses_R = false;

    std::int64_t t_fe = 800;
    double gamma_init = 0.2;
    Sampler sampler = Sampler::uniform;
    /// Coefficient used by the unsafe baseline during its forced exploration;
    /// unset means gamma_init.
    std::optional<double> baseline_fe_gamma;
    /// Stop forced exploration early once no γ̄ moves by more than the tolerance
    /// in one round; t_fe is then an upper limit.
    bool adaptive_fe = false;
    double adaptive_fe_tol = 1e-4;

    Criterion criterion = Criterion::greedy;
    Variant variant = Variant::safe_conservative;
    bool dynamic_gamma = true;
    bool observe_safety_in_bai = false;
    int t_opt = 10;
    NuMode nu_mode = NuMode::asymptotic;
    int fw_budget = 200;
    std::int64_t max_rounds = 1'000'000;
    int max_outer_iterations = 10;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

struct DirectionChoice {
    std::size_t x_max = 0;
    std::size_t x_opt = 0;
    Vector y;
    double b = 0.0;
};

/// Gap-based direction over `scaled_arms` restricted to `allowed` (empty means
/// all): x_max maximizes xᵀθ̂, x_opt maximizes (x − x_max)ᵀθ̂ + radius·‖x − x_max‖_{A⁻¹},
/// B is that maximum. Throws std::logic_error when nothing is allowed.
DirectionChoice select_direction(std::span<const double> theta_hat, const PosDefState& design,
                                 std::span<const Vector> scaled_arms, double radius,
                                 std::span<const bool> allowed = {});

inline bool stopping_check(const DirectionChoice& choice, double epsilon) {
    return choice.b <= epsilon;
}

/// (δ_s − δ_r) / ((1 − δ_r)(K + C(δ_r))).
double required_delta_s_prime(double delta_s, double delta_r, std::size_t num_arms,
                              double c_delta_r);

enum class RunStatus { stopped, truncated };

struct RunRecord {
    RunStatus status = RunStatus::stopped;
    /// Identification-phase pulls.
    std::int64_t tau = 0;
    std::int64_t fe_rounds = 0;
    std::int64_t wall_rounds_total = 0;
    Action recommended;
    double final_b = 0.0;
    std::vector<Pull> pulls;
    /// Violations among identification-phase pulls over tau.
    double unsafe_fraction = 0.0;
    /// Violations over all pulls, forced exploration included.
    double unsafe_fraction_total = 0.0;
    std::int64_t violations = 0;
    int outer_iterations = 1;
    SafetyProfile fe_profile;
    SafetyProfile final_profile;
};

/// What the learner sees at one identification round, before it pulls.
struct RoundView {
    std::int64_t round = 0;  // 1-based within the identification phase
    const EstimatorState& estimator;
    const SafetyProfile& profile;
    const DirectionChoice& choice;
    const PullCounts& counts;
    std::span<const Vector> pull_arms;
    /// L1 allocation over pull_arms for choice.y; null under criterion G.
    const Allocation* allocation;
};

using RoundObserver = std::function<void(const RoundView&)>;

RunRecord run(Environment& env, const AlgoConfig& config, const RoundObserver& observer = {});

}  // namespace safebai
