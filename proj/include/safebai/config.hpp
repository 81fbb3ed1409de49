#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "safebai/bai.hpp"
#include "safebai/instance.hpp"

namespace safebai {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Hard-instance parameters; theta_star / mu_star override the generated ones.
struct InstanceParams {
    int d = 3;
    double omega = 0.1;
    double eta0 = -0.5;
    double gamma_lb = 0.2;
    double sigma_r = 1.0;
    double sigma_s = 0.1;
    std::optional<Vector> theta_star;
    std::optional<Vector> mu_star;
};

struct SweepSpec {
    std::string parameter;
    std::vector<double> values;
};

struct ExperimentConfig {
    InstanceParams instance;
    AlgoConfig algo;
    /// When set, epsilon follows the instance as 2(1 − cos ω).
    bool epsilon_from_omega = true;
    /// When set (config key t_fe_per_arm), the forced-exploration length is
    /// t_fe_per_arm·K instead of a fixed algo.t_fe.
    bool t_fe_from_arms = false;
    std::int64_t t_fe_per_arm = 200;
    int replications = 10;
    std::uint64_t master_seed = 1;
    /// 0 lets OpenMP decide.
    int workers = 0;
    std::optional<SweepSpec> sweep;
};

/// Names accepted by apply_sweep_value.
const std::vector<std::string>& sweep_parameters();

ExperimentConfig parse_config(std::string_view toml_text);
ExperimentConfig load_config(const std::string& path);

Instance build_instance(const InstanceParams& params);
AlgoConfig resolved_algo(const ExperimentConfig& config);

/// Throws ConfigError for names outside sweep_parameters().
void apply_sweep_value(ExperimentConfig& config, const std::string& parameter, double value);

std::string to_json(const ExperimentConfig& config);
/// 16 hex digits identifying the resolved configuration (seed excluded).
std::string fingerprint(const ExperimentConfig& config);

}  // namespace safebai
