#include "safebai/bai.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

namespace safebai {

std::string to_string(Criterion c) { return c == Criterion::greedy ? "G" : "R"; }

std::string to_string(Variant v) {
    switch (v) {
        case Variant::lingape: return "lingape";
        case Variant::safe_conservative: return "safe";
        case Variant::safe_optimistic: return "safe-opt";
        case Variant::safe_fixed: return "safe-fixed";
    }
    return "?";
}

Criterion criterion_from_string(const std::string& s) {
    if (s == "G" || s == "g" || s == "greedy") return Criterion::greedy;
    if (s == "R" || s == "r" || s == "rounding") return Criterion::rounding;
    throw std::invalid_argument("unknown criterion '" + s + "' (expected G or R)");
}

Variant variant_from_string(const std::string& s) {
    if (s == "lingape") return Variant::lingape;
    if (s == "safe" || s == "safe_conservative") return Variant::safe_conservative;
    if (s == "safe-opt" || s == "safe_optimistic") return Variant::safe_optimistic;
    if (s == "safe-fixed" || s == "safe_fixed") return Variant::safe_fixed;
    throw std::invalid_argument("unknown variant '" + s + "'");
}

void AlgoConfig::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(std::string("algorithm config: ") + what);
    };
    require(epsilon > 0.0, "epsilon must be positive");
    require(delta_r > 0.0 && delta_r < 1.0, "delta_r must lie in (0, 1)");
    require(delta_s_prime > 0.0 && delta_s_prime < 1.0, "delta_s_prime must lie in (0, 1)");
    require(lambda > 0.0, "lambda must be positive");
    require(t_fe >= 0, "t_fe must be nonnegative");
    require(gamma_init > 0.0 && gamma_init <= 1.0, "gamma_init must lie in (0, 1]");
    require(!baseline_fe_gamma || (*baseline_fe_gamma > 0.0 && *baseline_fe_gamma <= 1.0),
            "baseline_fe_gamma must lie in (0, 1]");
    require(t_opt >= 1, "t_opt must be at least 1");
    require(fw_budget >= 1, "fw_budget must be at least 1");
    require(max_rounds >= 1, "max_rounds must be at least 1");
    require(max_outer_iterations >= 1, "max_outer_iterations must be at least 1");
    require(adaptive_fe_tol > 0.0, "adaptive_fe_tol must be positive");
}

DirectionChoice select_direction(std::span<const double> theta_hat, const PosDefState& design,
                                 std::span<const Vector> scaled_arms, double radius,
                                 std::span<const bool> allowed) {
    auto ok = [&](std::size_t k) { return allowed.empty() || allowed[k]; };
    const std::size_t k_arms = scaled_arms.size();
    std::size_t x_max = k_arms;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < k_arms; ++k) {
        if (!ok(k)) continue;
        const double v = dot(scaled_arms[k], theta_hat);
        if (v > best) {
            best = v;
            x_max = k;
        }
    }
    if (x_max == k_arms) throw std::logic_error("select_direction: empty safe set");

    DirectionChoice c;
    c.x_max = x_max;
    c.x_opt = x_max;
    c.b = 0.0;
    for (std::size_t k = 0; k < k_arms; ++k) {
        if (!ok(k) || k == x_max) continue;
        const Vector diff = subtract(scaled_arms[k], scaled_arms[x_max]);
        const double v = dot(diff, theta_hat) + radius * design.inv_norm(diff);
        if (v > c.b) {
            c.b = v;
            c.x_opt = k;
        }
    }
    c.y = subtract(scaled_arms[c.x_max], scaled_arms[c.x_opt]);
    return c;
}

double required_delta_s_prime(double delta_s, double delta_r, std::size_t num_arms,
                              double c_delta_r) {
    if (!(delta_s > delta_r)) {
        throw std::invalid_argument("required_delta_s_prime: delta_s must exceed delta_r");
    }
    return (delta_s - delta_r) /
           ((1.0 - delta_r) * (static_cast<double>(num_arms) + c_delta_r));
}

namespace {

SafetyProfile full_profile(std::size_t k_arms) {
    SafetyProfile p;
    p.gamma_bar.assign(k_arms, 1.0);
    p.gamma_opt.assign(k_arms, 1.0);
    p.frozen = true;
    return p;
}

class Runner {
public:
    Runner(Environment& env, const AlgoConfig& cfg, const RoundObserver& observer)
        : env_(env),
          cfg_(cfg),
          observer_(observer),
          arms_(env.instance().arms),
          est_(settings(env, cfg)),
          counts_(arms_.size()) {
        bounds_.eta0 = env.instance().eta0;
        bounds_.delta_s_prime = cfg.delta_s_prime;
        bounds_.gamma_lb = env.instance().gamma_lb;
    }

    RunRecord execute() {
        explore();
        if (cfg_.variant == Variant::lingape) {
            profile_ = full_profile(arms_.size());
        } else {
            profile_ = refresh_profile(cfg_.variant != Variant::safe_fixed && cfg_.dynamic_gamma);
        }
        rec_.fe_profile = profile_;

        if (cfg_.variant == Variant::safe_fixed) {
            run_fixed();
        } else {
            const bool refresh = cfg_.variant != Variant::lingape && cfg_.dynamic_gamma;
            identify(refresh);
        }
        finish();
        return std::move(rec_);
    }

private:
    static EstimatorSettings settings(const Environment& env, const AlgoConfig& cfg) {
        const Instance& inst = env.instance();
        EstimatorSettings s;
        s.dim = inst.dim();
        s.lambda = cfg.lambda;
        s.arm_norm_bound = cfg.arm_norm_bound.value_or(inst.arm_norm_bound);
        s.reward_noise = cfg.reward_noise.value_or(env.sigma_r());
        s.reward_norm_bound = cfg.reward_norm_bound.value_or(inst.reward_norm_bound);
        s.safety_noise =
            cfg.safety_radius_uses_R ? s.reward_noise : cfg.safety_noise.value_or(env.sigma_s());
        s.safety_norm_bound = cfg.safety_norm_bound.value_or(inst.safety_norm_bound);
        return s;
    }

    SafetyProfile refresh_profile(bool dynamic) const {
        return build_profile(est_, arms_, bounds_, dynamic);
    }

    void explore() {
        ForcedExplorationSettings fe;
        fe.coefficient = cfg_.variant == Variant::lingape ? cfg_.baseline_fe_gamma.value_or(cfg_.gamma_init)
                                                         : cfg_.gamma_init;
        fe.sampler = cfg_.sampler;
        if (!cfg_.adaptive_fe || cfg_.variant == Variant::lingape) {
            fe.rounds = cfg_.t_fe;
            append(forced_exploration(env_, est_, fe, 1));
            return;
        }
        fe.rounds = 1;
        SafetyProfile prev = refresh_profile(true);
        for (std::int64_t t = 0; t < cfg_.t_fe; ++t) {
            append(forced_exploration(env_, est_, fe, t + 1));
            SafetyProfile next = refresh_profile(true);
            const bool settled = t + 1 >= static_cast<std::int64_t>(arms_.size()) &&
                                 next.same_as(prev, cfg_.adaptive_fe_tol);
            prev = std::move(next);
            if (settled) break;
        }
    }

    void append(std::vector<Pull> pulls) {
        for (auto& p : pulls) {
            counts_.record(p.arm, p.coefficient);
            if (p.violated) ++fe_violations_;
            rec_.pulls.push_back(std::move(p));
        }
        rec_.fe_rounds = static_cast<std::int64_t>(rec_.pulls.size());
    }

    // One identification phase; returns false when the round cap was hit.
    bool identify(bool refresh) {
        std::vector<Vector> pull_arms = scale_arms(arms_, profile_.gamma_bar);
        std::vector<Vector> select_arms = cfg_.variant == Variant::safe_optimistic
                                              ? scale_arms(arms_, profile_.gamma_opt)
                                              : pull_arms;
        // std::vector<bool> has no contiguous storage to hand out as a span.
        std::unique_ptr<bool[]> mask(new bool[arms_.size()]);
        const std::span<const bool> allowed(mask.get(), arms_.size());
        auto rebuild_mask = [&] {
            for (std::size_t k = 0; k < arms_.size(); ++k) mask[k] = profile_.gamma_bar[k] > 0.0;
        };
        rebuild_mask();

        Allocation alloc;
        bool have_alloc = false;
        std::int64_t local = 0;

        while (true) {
            if (refresh && local > 0 && local % cfg_.t_opt == 0) {
                profile_ = refresh_profile(true);
                pull_arms = scale_arms(arms_, profile_.gamma_bar);
                select_arms = cfg_.variant == Variant::safe_optimistic
                                  ? scale_arms(arms_, profile_.gamma_opt)
                                  : pull_arms;
                rebuild_mask();
                have_alloc = false;
            }

            const Vector theta = est_.theta_hat();
            const double radius = c_radius(est_.reward(), cfg_.lambda, cfg_.delta_r).value;
            const DirectionChoice choice =
                select_direction(theta, est_.reward().design, select_arms, radius, allowed);
            last_choice_ = choice;

            const bool stop = stopping_check(choice, cfg_.epsilon);
            const bool rounding = cfg_.criterion == Criterion::rounding && !stop;
            if (rounding && (!have_alloc || alloc.target != choice.y)) {
                alloc = l1_min_weights(pull_arms, choice.y);
                have_alloc = true;
                fw_stale_ = true;
            }
            if (observer_) {
                RoundView view{rec_.tau + 1,  est_,      profile_,
                               choice,        counts_,   pull_arms,
                               rounding ? &alloc : nullptr};
                observer_(view);
            }
            if (stop) return true;
            if (rec_.tau >= cfg_.max_rounds) {
                rec_.status = RunStatus::truncated;
                return false;
            }

            std::size_t arm;
            if (cfg_.criterion == Criterion::greedy) {
                arm = greedy_select(est_.reward().design, pull_arms, choice.y, allowed);
            } else {
                if (cfg_.nu_mode == NuMode::finite && (fw_stale_ || local % cfg_.t_opt == 0)) {
                    nu_ = nu_star_finite(est_.reward().design, pull_arms, choice.y, cfg_.fw_budget).nu;
                    fw_stale_ = false;
                }
                arm = rounding_select(counts_,
                                      cfg_.nu_mode == NuMode::finite ? std::span<const double>(nu_)
                                                                     : std::span<const double>(alloc.ratios),
                                      allowed);
            }

            const double gamma = profile_.gamma_bar[arm];
            const Observation obs = env_.step({arm, gamma});
            const std::optional<double> safety =
                cfg_.observe_safety_in_bai ? std::optional<double>(obs.safety) : std::nullopt;
            est_.update(pull_arms[arm], obs.reward, safety);
            counts_.record(arm, gamma);

            ++rec_.tau;
            ++local;
            Pull p;
            p.round = static_cast<std::int64_t>(rec_.pulls.size()) + 1;
            p.phase = Phase::identification;
            p.arm = arm;
            p.coefficient = gamma;
            p.reward = obs.reward;
            p.safety = safety;
            p.violated = obs.violated;
            p.b_stat = choice.b;
            if (obs.violated) ++bai_violations_;
            rec_.pulls.push_back(p);
        }
    }

    void run_fixed() {
        std::optional<std::size_t> prev_rec;
        for (int outer = 1; outer <= cfg_.max_outer_iterations; ++outer) {
            rec_.outer_iterations = outer;
            profile_.frozen = true;
            if (!identify(false)) return;
            const std::size_t rec_arm = last_choice_.x_max;
            SafetyProfile next = refresh_profile(false);
            const bool stable = prev_rec && *prev_rec == rec_arm && next.same_as(profile_);
            if (stable) return;
            prev_rec = rec_arm;
            if (outer < cfg_.max_outer_iterations) profile_ = std::move(next);
        }
    }

    void finish() {
        rec_.final_profile = profile_;
        rec_.final_b = last_choice_.b;
        rec_.recommended = {last_choice_.x_max, profile_.gamma_bar[last_choice_.x_max]};
        rec_.wall_rounds_total = rec_.fe_rounds + rec_.tau;
        rec_.violations = fe_violations_ + bai_violations_;
        rec_.unsafe_fraction =
            rec_.tau > 0 ? static_cast<double>(bai_violations_) / static_cast<double>(rec_.tau) : 0.0;
        rec_.unsafe_fraction_total =
            rec_.wall_rounds_total > 0
                ? static_cast<double>(rec_.violations) / static_cast<double>(rec_.wall_rounds_total)
                : 0.0;
    }

    Environment& env_;
    const AlgoConfig& cfg_;
    const RoundObserver& observer_;
    const std::vector<Vector>& arms_;
    EstimatorState est_;
    PullCounts counts_;
    SafetyBoundSettings bounds_;
    SafetyProfile profile_;
    DirectionChoice last_choice_;
    Vector nu_;
    bool fw_stale_ = true;
    std::int64_t fe_violations_ = 0;
    std::int64_t bai_violations_ = 0;
    RunRecord rec_;
};

}  // namespace

RunRecord run(Environment& env, const AlgoConfig& config, const RoundObserver& observer) {
    config.validate();
    env.instance().validate();
    Runner runner(env, config, observer);
    return runner.execute();
}

}  // namespace safebai
