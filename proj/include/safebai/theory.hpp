#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include "safebai/instance.hpp"
#include "safebai/linalg.hpp"

namespace safebai {

/// A bound that may not apply; `reason` says why when `value` is empty.
struct MaybeValue {
    std::optional<double> value;
    std::string reason;
};

struct GapReport {
    Vector gaps;
    std::size_t best = 0;
    /// Another arm reaches the best scaled value.
    bool tied = false;
};

/// Δ_i = v_best − v_i, and for the best arm the smallest such gap, with
/// v_k = γ̄_k x_kᵀθ⋆.
GapReport gaps(const Instance& instance, std::span<const double> gamma_bar);

/// H_FE(ε) = Σ_k max_{i≠j} |w⋆_k(i,j)|·‖w⋆(i,j)‖₁ / max(ε, (ε+Δ_i)/3, (ε+Δ_j)/3)
/// with w⋆(i,j) the L1-minimal reproduction of γ̄_i x_i − γ̄_j x_j.
double problem_complexity(const Instance& instance, std::span<const double> gamma_bar,
                          double epsilon);

struct CAndM {
    double c_delta = 0.0;
    double m = 0.0;
};

CAndM c_and_m(double h, std::size_t num_arms, double noise, std::size_t dim, double arm_norm_bound,
              double lambda, double delta_r);

struct SigmaFe {
    double min_eig = 0.0;
    /// λ_min(Σ) − sqrt(2L²/γ̲² · λ_min(Σ) · ln(2d/δ))
    double lambda_minus = 0.0;
    /// λ_min(Σ)·(1 − 2γ̲²L²·ln(d/δ))
    double lambda_minus_appendix = 0.0;
};

/// Σ_FE = (γ̲²/K) Σ_k x_k x_kᵀ.
SymMatrix sigma_fe(const Instance& instance, double gamma_lb);
SigmaFe sigma_fe_and_lambda_minus(const Instance& instance, double gamma_lb, double delta_r);

/// min(1, d·exp(−ε²·λ_min(Σ_FE) / (2γ̲²L²))).
double matrix_hoeffding_tail(double min_eig_sigma, double eps, double gamma_lb,
                             double arm_norm_bound, std::size_t dim);

/// Principal branch W₀ by Halley iteration. Throws std::domain_error for x < −1/e.
double lambert_w(double x);

using BetaOfT = std::function<double(double)>;

/// sqrt(T) / (2β(T)) >= rhs
bool t_fe_predicate(double t, double rhs, const BetaOfT& beta);

/// Smallest integer T in [1, 1e12] satisfying t_fe_predicate, by bisection.
std::optional<std::int64_t> smallest_t_fe(double rhs, const BetaOfT& beta);

enum class LambdaMinusForm { theorem, appendix };

struct TfeInputs {
    double gamma_bar_star = 1.0;
    double epsilon = 0.01;
    double delta_r = 0.001;
    double delta_s = 0.001;
    double lambda = 1.0;
    double safety_noise = 0.1;
    LambdaMinusForm form = LambdaMinusForm::appendix;
};

struct TfeResult {
    std::optional<std::int64_t> t;
    double rhs = 0.0;
    double lambda_minus = 0.0;
    std::string reason;
};

/// Right-hand side (2γ̲⋆x⋆ᵀθ⋆/ε − 1) / (λ₋·|x⋆ᵀμ⋆|/‖x⋆‖) at the scaled optimal arm.
MaybeValue t_fe_rhs(const Instance& instance, const TfeInputs& in);

/// β_FE(T) on the safety channel of `instance` (scale 1/γ̲²).
BetaOfT beta_fe_of(const Instance& instance, const TfeInputs& in);

TfeResult t_fe_condition(const Instance& instance, const TfeInputs& in);

/// (sqrt(T) bound + 1)² from √T ≥ −a·W(−δ_s·e^{−1/a}/a) − 1 with
/// a = 2(‖x⋆‖/|x⋆ᵀμ⋆|)(2γ̲⋆x⋆ᵀθ⋆/ε − 1).
MaybeValue t_fe_closed_form(const Instance& instance, const TfeInputs& in);

struct ComplexityReport {
    GapReport gaps;
    Vector gamma_bar;
    double h_fe = 0.0;
    double c_delta = 0.0;
    double m = 0.0;
    SigmaFe sigma;
    double hoeffding_tail_half = 0.0;
    MaybeValue t_fe_rhs;
    TfeResult t_fe_condition;
    MaybeValue t_fe_closed_form;
};

/// All calculators at the true safe coefficients of `instance`.
ComplexityReport complexity_report(const Instance& instance, double sigma_r, const TfeInputs& in);

std::string to_json(const ComplexityReport& report);

}  // namespace safebai
