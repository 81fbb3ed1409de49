#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "safebai/linalg.hpp"
#include "safebai/simplex.hpp"

namespace safebai {

/// Raised when a direction cannot be reproduced by the (scaled) arms.
class InfeasibleDirection : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when an allocation carries no mass (zero direction or all-zero ratios).
class DegenerateAllocation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// L1-minimal reproduction of a direction by the arms, and the pull ratios it
/// induces: ratios_k = |w_k| / ‖w‖₁.
struct Allocation {
    Vector weights;
    Vector ratios;
    double l1_norm = 0.0;
    Vector target;
    /// Zero target: weights are zero and ratios are uniform by convention.
    bool degenerate = false;
};

/// min ‖w‖₁ s.t. Σ_k w_k·arm_k = y, via w = w⁺ − w⁻ and the dense simplex.
Allocation l1_min_weights(std::span<const Vector> scaled_arms, std::span<const double> y);

/// |w| / ‖w‖₁. Throws DegenerateAllocation for w = 0.
Vector ratios_from_weights(std::span<const double> weights);

/// Weighted pull counts N_k = Σ over pulls of arm k of coefficient².
struct PullCounts {
    Vector n;

    explicit PullCounts(std::size_t arms = 0) : n(arms, 0.0) {}
    void record(std::size_t arm, double coefficient) { n.at(arm) += coefficient * coefficient; }
};

struct FrankWolfeResult {
    Vector nu;
    double objective = 0.0;
    double duality_gap = 0.0;
    int iterations = 0;
    bool degenerate = false;
};

/// yᵀ(design + Σ ν_k x̃_k x̃_kᵀ)⁻¹y evaluated directly.
double allocation_objective(const SymMatrix& design, std::span<const Vector> scaled_arms,
                            std::span<const double> nu, std::span<const double> y);

/// Frank-Wolfe over the simplex for the finite-sample allocation program.
/// Step 2/(i+2); stops at `budget` iterations or duality gap < 1e-8.
FrankWolfeResult nu_star_finite(const PosDefState& design, std::span<const Vector> scaled_arms,
                                std::span<const double> y, int budget = 500);

/// argmin over allowed arms of yᵀ(A + x xᵀ)⁻¹y, evaluated through the rank-1
/// identity without touching `design`. Empty `allowed` means all arms.
/// Throws std::logic_error when no arm is allowed.
std::size_t greedy_select(const PosDefState& design, std::span<const Vector> scaled_arms,
                          std::span<const double> y, std::span<const bool> allowed = {});

/// argmin over allowed arms with ratio > 1e-12 of N_k / ratio_k.
std::size_t rounding_select(const PullCounts& counts, std::span<const double> ratios,
                            std::span<const bool> allowed = {});

/// Continuous design value reg·yᵀ(reg·I + X diag(mu) Xᵀ)⁻¹y (d×d solve).
double relaxed_design_value(const Matrix& arms_by_column, std::span<const double> mu,
                            std::span<const double> y, double reg);

/// min over w of ‖y − Xw‖² + reg·Σ w_k²/mu_k, solved through the K×K normal
/// equations (reg·diag(mu)⁻¹ + XᵀX) w = Xᵀy.
double reproduction_value(const Matrix& arms_by_column, std::span<const double> mu,
                          std::span<const double> y, double reg);

/// min over k with w_k != 0 of N_k / (γ_k²·|w_k|).
double direction_count(const Allocation& alloc, const PullCounts& counts,
                       std::span<const double> gammas);

}  // namespace safebai
