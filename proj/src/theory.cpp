#include "safebai/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "json.hpp"
#include "safebai/allocation.hpp"
#include "safebai/estimation.hpp"

namespace safebai {

GapReport gaps(const Instance& instance, std::span<const double> gamma_bar) {
    const std::size_t k_arms = instance.num_arms();
    if (gamma_bar.size() != k_arms) throw std::invalid_argument("gaps: gamma_bar size mismatch");
    Vector v(k_arms);
    for (std::size_t k = 0; k < k_arms; ++k) v[k] = gamma_bar[k] * dot(instance.arms[k], instance.theta_star);
    GapReport r;
    r.best = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
    r.gaps.assign(k_arms, 0.0);
    double smallest = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < k_arms; ++k) {
        if (k == r.best) continue;
        r.gaps[k] = v[r.best] - v[k];
        smallest = std::min(smallest, r.gaps[k]);
        if (r.gaps[k] == 0.0) r.tied = true;
    }
    r.gaps[r.best] = smallest;
    return r;
}

double problem_complexity(const Instance& instance, std::span<const double> gamma_bar,
                          double epsilon) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("problem_complexity: epsilon must be positive");
    const std::size_t k_arms = instance.num_arms();
    const GapReport g = gaps(instance, gamma_bar);
    const std::vector<Vector> scaled_arms = [&] {
        std::vector<Vector> out;
        for (std::size_t k = 0; k < k_arms; ++k) out.push_back(scaled(instance.arms[k], gamma_bar[k]));
        return out;
    }();

    Vector best(k_arms, 0.0);
    for (std::size_t i = 0; i < k_arms; ++i) {
        for (std::size_t j = 0; j < k_arms; ++j) {
            if (i == j) continue;
            const Allocation a = l1_min_weights(scaled_arms, subtract(scaled_arms[i], scaled_arms[j]));
            const double denom = std::max({epsilon, (epsilon + g.gaps[i]) / 3.0,
                                           (epsilon + g.gaps[j]) / 3.0});
            for (std::size_t k = 0; k < k_arms; ++k) {
                best[k] = std::max(best[k], std::abs(a.weights[k]) * a.l1_norm / denom);
            }
        }
    }
    double h = 0.0;
    for (double b : best) h += b;
    return h;
}

CAndM c_and_m(double h, std::size_t num_arms, double noise, std::size_t dim, double arm_norm_bound,
              double lambda, double delta_r) {
    const double k = static_cast<double>(num_arms);
    const double d = static_cast<double>(dim);
    const double r2 = noise * noise;
    const double l2 = arm_norm_bound * arm_norm_bound;
    const double log_k = std::log(k * k / delta_r);
    CAndM out;
    const double inner = 8.0 * h * r2 * log_k + k;
    out.m = 64.0 * h * r2 * r2 * d * l2 / lambda + 4.0 * inner * inner;
    out.c_delta = 8.0 * h * r2 * log_k + 4.0 * h * r2 * d * std::log(1.0 + out.m * l2 / (lambda * d));
    return out;
}

SymMatrix sigma_fe(const Instance& instance, double gamma_lb) {
    const std::size_t d = instance.dim();
    SymMatrix s = SymMatrix::scaled_identity(d, 0.0);
    const double w = gamma_lb * gamma_lb / static_cast<double>(instance.num_arms());
    for (const auto& x : instance.arms) s.add_outer(x, x, w);
    return s;
}

SigmaFe sigma_fe_and_lambda_minus(const Instance& instance, double gamma_lb, double delta_r) {
    SigmaFe out;
    const double d = static_cast<double>(instance.dim());
    const double l2 = instance.arm_norm_bound * instance.arm_norm_bound;
    const double g2 = gamma_lb * gamma_lb;
    out.min_eig = min_eigenvalue(sigma_fe(instance, gamma_lb));
    out.lambda_minus =
        out.min_eig - std::sqrt(2.0 * l2 / g2 * out.min_eig * std::log(2.0 * d / delta_r));
    out.lambda_minus_appendix = out.min_eig * (1.0 - 2.0 * g2 * l2 * std::log(d / delta_r));
    return out;
}

double matrix_hoeffding_tail(double min_eig_sigma, double eps, double gamma_lb,
                             double arm_norm_bound, std::size_t dim) {
    const double l2 = arm_norm_bound * arm_norm_bound;
    const double v = static_cast<double>(dim) *
                     std::exp(-eps * eps * min_eig_sigma / (2.0 * gamma_lb * gamma_lb * l2));
    return std::clamp(v, 0.0, 1.0);
}

double lambert_w(double x) {
    constexpr double inv_e = 1.0 / std::numbers::e;
    if (x < -inv_e) {
        // Accept the rounding of −1/e itself.
        if (x < -inv_e * (1.0 + 4.0 * std::numeric_limits<double>::epsilon())) {
            throw std::domain_error("lambert_w: argument below -1/e");
        }
        return -1.0;
    }
    if (x == 0.0) return 0.0;

    double w;
    if (x < -0.25) {
        // Series about the branch point.
        const double p = std::sqrt(std::max(0.0, 2.0 * (std::numbers::e * x + 1.0)));
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
    } else if (x < 3.0) {
        w = std::log1p(x);
    } else {
        const double l = std::log(x);
        w = l - std::log(l);
    }
    for (int it = 0; it < 100; ++it) {
        const double ew = std::exp(w);
        const double f = w * ew - x;
        const double wp1 = w + 1.0;
        if (wp1 == 0.0) break;
        const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        w -= step;
        if (std::abs(step) <= 1e-16 * (1.0 + std::abs(w))) break;
    }
    return w;
}

bool t_fe_predicate(double t, double rhs, const BetaOfT& beta) {
    return std::sqrt(t) / (2.0 * beta(t)) >= rhs;
}

std::optional<std::int64_t> smallest_t_fe(double rhs, const BetaOfT& beta) {
    constexpr std::int64_t hi_limit = 1'000'000'000'000;
    if (t_fe_predicate(1.0, rhs, beta)) return 1;
    if (!t_fe_predicate(static_cast<double>(hi_limit), rhs, beta)) return std::nullopt;
    std::int64_t lo = 1;  // fails
    std::int64_t hi = hi_limit;  // holds
    while (hi - lo > 1) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (t_fe_predicate(static_cast<double>(mid), rhs, beta)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

namespace {

struct StarArm {
    Vector x;
    double x_theta = 0.0;
    double x_mu = 0.0;
    double norm = 0.0;
};

StarArm star_arm(const Instance& instance) {
    const BestArm b = best_safe_arm(instance);
    StarArm s;
    s.x = scaled(instance.arms[b.arm], b.coefficient);
    s.x_theta = dot(s.x, instance.theta_star);
    s.x_mu = dot(s.x, instance.mu_star);
    s.norm = norm2(s.x);
    return s;
}

double chosen_lambda_minus(const Instance& instance, const TfeInputs& in) {
    const SigmaFe s = sigma_fe_and_lambda_minus(instance, instance.gamma_lb, in.delta_r);
    return in.form == LambdaMinusForm::theorem ? s.lambda_minus : s.lambda_minus_appendix;
}

}  // namespace

MaybeValue t_fe_rhs(const Instance& instance, const TfeInputs& in) {
    const StarArm s = star_arm(instance);
    const double cap = 2.0 * in.gamma_bar_star * s.x_theta;
    if (!(in.epsilon <= cap)) {
        return {std::nullopt, "epsilon exceeds 2*gamma_star*x_star'theta_star"};
    }
    if (s.x_mu == 0.0) return {std::nullopt, "x_star'mu_star = 0 makes the bound singular"};
    const double lm = chosen_lambda_minus(instance, in);
    if (!(lm > 0.0)) return {std::nullopt, "lambda_minus is not positive"};
    return {(cap / in.epsilon - 1.0) / (lm * std::abs(s.x_mu) / s.norm), {}};
}

BetaOfT beta_fe_of(const Instance& instance, const TfeInputs& in) {
    const std::size_t d = instance.dim();
    const double noise = in.safety_noise;
    const double bound = instance.safety_norm_bound;
    const double lambda = in.lambda;
    const double l = instance.arm_norm_bound;
    const double delta = in.delta_s;
    const double scale = 1.0 / (instance.gamma_lb * instance.gamma_lb);
    return [=](double t) { return beta_simplified_at(t, d, noise, bound, lambda, l, delta, scale); };
}

TfeResult t_fe_condition(const Instance& instance, const TfeInputs& in) {
    TfeResult r;
    r.lambda_minus = chosen_lambda_minus(instance, in);
    const MaybeValue rhs = t_fe_rhs(instance, in);
    if (!rhs.value) {
        r.reason = rhs.reason;
        return r;
    }
    r.rhs = *rhs.value;
    r.t = smallest_t_fe(r.rhs, beta_fe_of(instance, in));
    if (!r.t) r.reason = "no T up to 1e12 satisfies the condition";
    return r;
}

MaybeValue t_fe_closed_form(const Instance& instance, const TfeInputs& in) {
    const StarArm s = star_arm(instance);
    const double cap = 2.0 * in.gamma_bar_star * s.x_theta;
    if (!(in.epsilon <= cap)) {
        return {std::nullopt, "epsilon exceeds 2*gamma_star*x_star'theta_star"};
    }
    if (s.x_mu == 0.0) return {std::nullopt, "x_star'mu_star = 0 makes the bound singular"};
    const double a = 2.0 * (s.norm / std::abs(s.x_mu)) * (cap / in.epsilon - 1.0);
    if (a == 0.0) return {1.0, {}};
    const double arg = -in.delta_s * std::exp(-1.0 / a) / a;
    if (arg < -1.0 / std::numbers::e) {
        return {std::nullopt, "Lambert W argument below -1/e"};
    }
    const double root = -a * lambert_w(arg) - 1.0;
    return {root > 0.0 ? root * root : 0.0, {}};
}

ComplexityReport complexity_report(const Instance& instance, double sigma_r, const TfeInputs& in) {
    ComplexityReport r;
    for (const auto& x : instance.arms) {
        r.gamma_bar.push_back(max_safe_coefficient(x, instance.mu_star, instance.eta0));
    }
    r.gaps = gaps(instance, r.gamma_bar);
    r.h_fe = problem_complexity(instance, r.gamma_bar, in.epsilon);
    const CAndM cm = c_and_m(r.h_fe, instance.num_arms(), sigma_r, instance.dim(),
                             instance.arm_norm_bound, in.lambda, in.delta_r);
    r.c_delta = cm.c_delta;
    r.m = cm.m;
    r.sigma = sigma_fe_and_lambda_minus(instance, instance.gamma_lb, in.delta_r);
    r.hoeffding_tail_half = matrix_hoeffding_tail(r.sigma.min_eig, 0.5, instance.gamma_lb,
                                                  instance.arm_norm_bound, instance.dim());
    r.t_fe_rhs = t_fe_rhs(instance, in);
    r.t_fe_condition = t_fe_condition(instance, in);
    r.t_fe_closed_form = t_fe_closed_form(instance, in);
    return r;
}

namespace {

nlohmann::json maybe(const MaybeValue& v) {
    nlohmann::json j;
    j["value"] = v.value ? nlohmann::json(*v.value) : nlohmann::json(nullptr);
    if (!v.value) j["reason"] = v.reason;
    return j;
}

}  // namespace

std::string to_json(const ComplexityReport& r) {
    nlohmann::json j;
    j["gamma_star"] = r.gamma_bar;
    j["gaps"] = r.gaps.gaps;
    j["best_arm"] = r.gaps.best + 1;
    j["gaps_tied"] = r.gaps.tied;
    j["H_FE"] = r.h_fe;
    j["C_delta"] = r.c_delta;
    j["M"] = r.m;
    j["sigma_FE_min_eig"] = r.sigma.min_eig;
    j["lambda_minus"] = r.sigma.lambda_minus;
    j["lambda_minus_appendix"] = r.sigma.lambda_minus_appendix;
    j["hoeffding_tail_eps_0_5"] = r.hoeffding_tail_half;
    j["t_fe_condition_rhs"] = maybe(r.t_fe_rhs);
    nlohmann::json tc;
    tc["value"] = r.t_fe_condition.t ? nlohmann::json(*r.t_fe_condition.t) : nlohmann::json(nullptr);
    tc["lambda_minus_used"] = r.t_fe_condition.lambda_minus;
    if (!r.t_fe_condition.t) tc["reason"] = r.t_fe_condition.reason;
    j["t_fe_condition"] = tc;
    j["t_fe_closed_form"] = maybe(r.t_fe_closed_form);
    return j.dump(2);
}

}  // namespace safebai
