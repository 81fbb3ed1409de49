#include "safebai/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "toml.hpp"

namespace safebai {

namespace {

const std::set<std::string> kInstanceKeys = {"d",       "omega",   "eta0",       "gamma_lb",
                                              "sigma_r", "sigma_s", "theta_star", "mu_star"};
const std::set<std::string> kAlgorithmKeys = {
    "variant",        "criterion",         "epsilon",       "delta_r",
    "delta_s_prime",  "lambda",            "t_fe",          "t_fe_per_arm",  "gamma_init",
    "sampler",        "baseline_fe_gamma", "adaptive_fe",   "adaptive_fe_tol",
    "dynamic_gamma",  "observe_safety_in_bai", "safety_radius_uses_R", "t_opt",
    "nu_mode",        "fw_budget",         "max_rounds",    "max_outer_iterations"};
const std::set<std::string> kExperimentKeys = {"replications", "seed", "workers", "sweep"};
const std::set<std::string> kSweepKeys = {"parameter", "values"};

void check_keys(const toml::table& t, const std::set<std::string>& allowed, const std::string& where) {
    for (auto&& [k, v] : t) {
        if (!allowed.count(std::string(k.str()))) {
            throw ConfigError("unknown key '" + std::string(k.str()) + "' in [" + where + "]");
        }
    }
}

double get_double(const toml::table& t, const char* key, double fallback) {
    const toml::node* n = t.get(key);
    if (!n) return fallback;
    if (auto v = n->value<double>()) return *v;
    throw ConfigError(std::string("'") + key + "' must be a number");
}

std::int64_t get_int(const toml::table& t, const char* key, std::int64_t fallback) {
    const toml::node* n = t.get(key);
    if (!n) return fallback;
    if (n->is_integer()) return n->as_integer()->get();
    throw ConfigError(std::string("'") + key + "' must be an integer");
}

bool get_bool(const toml::table& t, const char* key, bool fallback) {
    const toml::node* n = t.get(key);
    if (!n) return fallback;
    if (n->is_boolean()) return n->as_boolean()->get();
    throw ConfigError(std::string("'") + key + "' must be true or false");
}

std::optional<std::string> get_string(const toml::table& t, const char* key) {
    const toml::node* n = t.get(key);
    if (!n) return std::nullopt;
    if (n->is_string()) return n->as_string()->get();
    throw ConfigError(std::string("'") + key + "' must be a string");
}

std::optional<Vector> get_vector(const toml::table& t, const char* key) {
    const toml::node* n = t.get(key);
    if (!n) return std::nullopt;
    const toml::array* a = n->as_array();
    if (!a) throw ConfigError(std::string("'") + key + "' must be an array of numbers");
    Vector out;
    for (const auto& e : *a) {
        auto v = e.value<double>();
        if (!v) throw ConfigError(std::string("'") + key + "' must be an array of numbers");
        out.push_back(*v);
    }
    return out;
}

const toml::table* section(const toml::table& root, const char* name) {
    const toml::node* n = root.get(name);
    if (!n) return nullptr;
    if (!n->is_table()) throw ConfigError(std::string("[") + name + "] must be a table");
    return n->as_table();
}

Sampler sampler_from_string(const std::string& s) {
    if (s == "uniform") return Sampler::uniform;
    if (s == "round_robin") return Sampler::round_robin;
    throw ConfigError("unknown sampler '" + s + "'");
}

NuMode nu_mode_from_string(const std::string& s) {
    if (s == "asymptotic") return NuMode::asymptotic;
    if (s == "finite") return NuMode::finite;
    throw ConfigError("unknown nu_mode '" + s + "'");
}

}  // namespace

const std::vector<std::string>& sweep_parameters() {
    static const std::vector<std::string> names = {"t_fe", "eta0", "dimension", "epsilon", "delta_r"};
    return names;
}

ExperimentConfig parse_config(std::string_view text) {
    toml::table root;
    try {
        root = toml::parse(text);
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << "TOML parse error at line " << e.source().begin.line << ": " << e.description();
        throw ConfigError(os.str());
    }
    check_keys(root, {"instance", "algorithm", "experiment"}, "top level");

    ExperimentConfig c;
    if (const toml::table* t = section(root, "instance")) {
        check_keys(*t, kInstanceKeys, "instance");
        auto& p = c.instance;
        p.d = static_cast<int>(get_int(*t, "d", p.d));
        p.omega = get_double(*t, "omega", p.omega);
        p.eta0 = get_double(*t, "eta0", p.eta0);
        p.gamma_lb = get_double(*t, "gamma_lb", p.gamma_lb);
        p.sigma_r = get_double(*t, "sigma_r", p.sigma_r);
        p.sigma_s = get_double(*t, "sigma_s", p.sigma_s);
        p.theta_star = get_vector(*t, "theta_star");
        p.mu_star = get_vector(*t, "mu_star");
    }
    if (const toml::table* t = section(root, "algorithm")) {
        check_keys(*t, kAlgorithmKeys, "algorithm");
        auto& a = c.algo;
        try {
            if (auto s = get_string(*t, "variant")) a.variant = variant_from_string(*s);
            if (auto s = get_string(*t, "criterion")) a.criterion = criterion_from_string(*s);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        if (t->contains("epsilon")) {
            a.epsilon = get_double(*t, "epsilon", a.epsilon);
            c.epsilon_from_omega = false;
        }
        a.delta_r = get_double(*t, "delta_r", a.delta_r);
        a.delta_s_prime = get_double(*t, "delta_s_prime", a.delta_s_prime);
        a.lambda = get_double(*t, "lambda", a.lambda);
        if (t->contains("t_fe")) {
            a.t_fe = get_int(*t, "t_fe", a.t_fe);
            c.t_fe_from_arms = false;
        }
        if (t->contains("t_fe_per_arm")) {
            if (t->contains("t_fe")) throw ConfigError("give either 't_fe' or 't_fe_per_arm'");
            c.t_fe_per_arm = get_int(*t, "t_fe_per_arm", c.t_fe_per_arm);
            if (c.t_fe_per_arm < 0) throw ConfigError("'t_fe_per_arm' must be nonnegative");
            c.t_fe_from_arms = true;
        }
        a.gamma_init = get_double(*t, "gamma_init", a.gamma_init);
        if (auto s = get_string(*t, "sampler")) a.sampler = sampler_from_string(*s);
        if (t->contains("baseline_fe_gamma")) a.baseline_fe_gamma = get_double(*t, "baseline_fe_gamma", 1.0);
        a.adaptive_fe = get_bool(*t, "adaptive_fe", a.adaptive_fe);
        a.adaptive_fe_tol = get_double(*t, "adaptive_fe_tol", a.adaptive_fe_tol);
        a.dynamic_gamma = get_bool(*t, "dynamic_gamma", a.dynamic_gamma);
        a.observe_safety_in_bai = get_bool(*t, "observe_safety_in_bai", a.observe_safety_in_bai);
        a.safety_radius_uses_R = get_bool(*t, "safety_radius_uses_R", a.safety_radius_uses_R);
        a.t_opt = static_cast<int>(get_int(*t, "t_opt", a.t_opt));
        if (auto s = get_string(*t, "nu_mode")) a.nu_mode = nu_mode_from_string(*s);
        a.fw_budget = static_cast<int>(get_int(*t, "fw_budget", a.fw_budget));
        a.max_rounds = get_int(*t, "max_rounds", a.max_rounds);
        a.max_outer_iterations =
            static_cast<int>(get_int(*t, "max_outer_iterations", a.max_outer_iterations));
    }
    if (const toml::table* t = section(root, "experiment")) {
        check_keys(*t, kExperimentKeys, "experiment");
        c.replications = static_cast<int>(get_int(*t, "replications", c.replications));
        const std::int64_t seed = get_int(*t, "seed", static_cast<std::int64_t>(c.master_seed));
        if (seed < 0) throw ConfigError("'seed' must be nonnegative");
        c.master_seed = static_cast<std::uint64_t>(seed);
        c.workers = static_cast<int>(get_int(*t, "workers", c.workers));
        if (const toml::table* s = section(*t, "sweep")) {
            check_keys(*s, kSweepKeys, "experiment.sweep");
            SweepSpec sw;
            auto name = get_string(*s, "parameter");
            auto values = get_vector(*s, "values");
            if (!name || !values) throw ConfigError("[experiment.sweep] needs parameter and values");
            sw.parameter = *name;
            sw.values = *values;
            bool known = false;
            for (const auto& n : sweep_parameters()) known = known || n == sw.parameter;
            if (!known) throw ConfigError("sweep parameter '" + sw.parameter + "' is not sweepable");
            c.sweep = sw;
        }
    }
    if (c.replications < 1) throw ConfigError("'replications' must be at least 1");
    if (c.workers < 0) throw ConfigError("'workers' must be nonnegative");
    try {
        build_instance(c.instance);
        resolved_algo(c).validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return parse_config(os.str());
}

Instance build_instance(const InstanceParams& p) {
    Instance inst = hard_instance(p.d, p.omega, p.eta0, p.gamma_lb);
    if (!(p.sigma_r >= 0.0) || !(p.sigma_s >= 0.0)) {
        throw std::invalid_argument("instance: noise levels must be nonnegative");
    }
    if (p.theta_star || p.mu_star) {
        return make_instance(inst.arms, p.theta_star.value_or(inst.theta_star),
                             p.mu_star.value_or(inst.mu_star), p.eta0, p.gamma_lb);
    }
    return inst;
}

AlgoConfig resolved_algo(const ExperimentConfig& c) {
    AlgoConfig a = c.algo;
    if (c.epsilon_from_omega) a.epsilon = 2.0 * (1.0 - std::cos(c.instance.omega));
    if (c.t_fe_from_arms) a.t_fe = c.t_fe_per_arm * (c.instance.d + 1);
    return a;
}

void apply_sweep_value(ExperimentConfig& c, const std::string& parameter, double value) {
    if (parameter == "t_fe") {
        c.algo.t_fe = static_cast<std::int64_t>(std::llround(value));
        c.t_fe_from_arms = false;
    } else if (parameter == "eta0") {
        c.instance.eta0 = value;
    } else if (parameter == "dimension") {
        c.instance.d = static_cast<int>(std::lround(value));
    } else if (parameter == "epsilon") {
        c.algo.epsilon = value;
        c.epsilon_from_omega = false;
    } else if (parameter == "delta_r") {
        c.algo.delta_r = value;
    } else {
        throw ConfigError("sweep parameter '" + parameter + "' is not sweepable");
    }
}

std::string to_json(const ExperimentConfig& c) {
    nlohmann::json j;
    const auto& p = c.instance;
    j["instance"] = {{"d", p.d},           {"omega", p.omega},     {"eta0", p.eta0},
                     {"gamma_lb", p.gamma_lb}, {"sigma_r", p.sigma_r}, {"sigma_s", p.sigma_s}};
    if (p.theta_star) j["instance"]["theta_star"] = *p.theta_star;
    if (p.mu_star) j["instance"]["mu_star"] = *p.mu_star;
    const AlgoConfig a = resolved_algo(c);
    j["algorithm"] = {{"variant", to_string(a.variant)},
                      {"criterion", to_string(a.criterion)},
                      {"epsilon", a.epsilon},
                      {"delta_r", a.delta_r},
                      {"delta_s_prime", a.delta_s_prime},
                      {"lambda", a.lambda},
                      {"t_fe", a.t_fe},
                      {"gamma_init", a.gamma_init},
                      {"sampler", a.sampler == Sampler::uniform ? "uniform" : "round_robin"},
                      {"baseline_fe_gamma", a.baseline_fe_gamma.value_or(a.gamma_init)},
                      {"adaptive_fe", a.adaptive_fe},
                      {"adaptive_fe_tol", a.adaptive_fe_tol},
                      {"dynamic_gamma", a.dynamic_gamma},
                      {"observe_safety_in_bai", a.observe_safety_in_bai},
                      {"safety_radius_uses_R", a.safety_radius_uses_R},
                      {"t_opt", a.t_opt},
                      {"nu_mode", a.nu_mode == NuMode::asymptotic ? "asymptotic" : "finite"},
                      {"fw_budget", a.fw_budget},
                      {"max_rounds", a.max_rounds},
                      {"max_outer_iterations", a.max_outer_iterations}};
    j["experiment"] = {{"replications", c.replications}, {"seed", c.master_seed}, {"workers", c.workers}};
    if (c.sweep) j["experiment"]["sweep"] = {{"parameter", c.sweep->parameter}, {"values", c.sweep->values}};
    return j.dump(2);
}

std::string fingerprint(const ExperimentConfig& c) {
    ExperimentConfig copy = c;
    copy.master_seed = 0;
    copy.workers = 0;
    const std::string text = to_json(copy);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace safebai
