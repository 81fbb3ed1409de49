#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "safebai/config.hpp"
#include "safebai/replicate.hpp"
#include "safebai/report.hpp"
#include "safebai/theory.hpp"

namespace fs = std::filesystem;
using namespace safebai;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;
constexpr int kExitTruncated = 3;

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> replications;
    std::optional<int> workers;
    std::string out = "out";
    std::optional<std::string> criterion;
    std::optional<std::string> variant;
    std::optional<std::string> dynamic_gamma;
    std::optional<std::string> parameter;
    std::vector<double> values;
    bool compare = false;
};

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--config", o.config_path, "TOML configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--replications", o.replications, "number of replications")->check(CLI::PositiveNumber);
    cmd->add_option("--workers", o.workers, "worker threads (0 = OpenMP default)")->check(CLI::NonNegativeNumber);
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--criterion", o.criterion, "sampling criterion")->check(CLI::IsMember({"G", "R"}));
    cmd->add_option("--variant", o.variant, "algorithm")
        ->check(CLI::IsMember({"lingape", "safe", "safe-opt", "safe-fixed"}));
    cmd->add_option("--dynamic-gamma", o.dynamic_gamma, "refresh safety coefficients")
        ->check(CLI::IsMember({"on", "off"}));
}

ExperimentConfig resolve(const Options& o) {
    ExperimentConfig c = o.config_path.empty() ? ExperimentConfig{} : load_config(o.config_path);
    if (o.seed) c.master_seed = *o.seed;
    if (o.replications) c.replications = *o.replications;
    if (o.workers) c.workers = *o.workers;
    if (o.criterion) c.algo.criterion = criterion_from_string(*o.criterion);
    if (o.variant) c.algo.variant = variant_from_string(*o.variant);
    if (o.dynamic_gamma) c.algo.dynamic_gamma = *o.dynamic_gamma == "on";
    return c;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << content;
    out.close();
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

fs::path prepare_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create '" + dir + "': " + ec.message());
    return fs::path(dir);
}

std::string run_file_name(int replication) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "run_%04d.csv", replication);
    return buf;
}

AggregateRow summarize(const ExperimentConfig& c, const std::vector<RunRecord>& records,
                       const std::string& label) {
    AggregateRow row = aggregate(records, build_instance(c.instance), resolved_algo(c).epsilon);
    row.fingerprint = fingerprint(c);
    row.label = label;
    return row;
}

bool any_truncated(const std::vector<RunRecord>& records) {
    for (const auto& r : records) {
        if (r.status == RunStatus::truncated) return true;
    }
    return false;
}

int cmd_run(const Options& o) {
    const ExperimentConfig c = resolve(o);
    const auto records = run_replications_parallel(c, c.workers);
    const fs::path dir = prepare_dir(o.out);
    for (std::size_t r = 0; r < records.size(); ++r) {
        write_file(dir / run_file_name(static_cast<int>(r) + 1), run_csv(records[r]));
    }
    const std::vector<AggregateRow> rows = {summarize(c, records, to_string(c.algo.variant))};
    std::ostringstream agg;
    write_aggregate_csv(agg, rows);
    write_file(dir / "aggregate.csv", agg.str());
    write_file(dir / "manifest.json", manifest_json(c, "run"));
    std::printf("%s: mean tau %.1f, unsafe %.2f%%, correct %.0f%%, %d truncated\n",
                rows[0].label.c_str(), rows[0].mean_tau, 100.0 * rows[0].mean_unsafe,
                100.0 * rows[0].correct_exact, rows[0].truncated);
    return any_truncated(records) ? kExitTruncated : 0;
}

int cmd_table1(const Options& o) {
    ExperimentConfig base = resolve(o);
    const fs::path dir = prepare_dir(o.out);
    std::vector<Table1Row> table;
    std::vector<AggregateRow> rows;
    bool truncated = false;
    for (Variant v : {Variant::lingape, Variant::safe_conservative}) {
        ExperimentConfig c = base;
        c.algo.variant = v;
        const auto records = run_replications_parallel(c, c.workers);
        truncated = truncated || any_truncated(records);
        rows.push_back(summarize(c, records, to_string(v)));
        const std::string fe = std::to_string(c.instance.d + 1) + "x" +
                               std::to_string(resolved_algo(c).t_fe / (c.instance.d + 1));
        table.push_back({v == Variant::lingape ? "LinGapE" : "Safe-LinGapE", fe, rows.back().mean_tau,
                         100.0 * rows.back().mean_unsafe});
    }
    std::ostringstream t, a;
    write_table1_csv(t, table);
    write_aggregate_csv(a, rows);
    write_file(dir / "table1.csv", t.str());
    write_file(dir / "table1_aggregate.csv", a.str());
    write_file(dir / "manifest.json", manifest_json(base, "table1"));
    std::cout << t.str();
    return truncated ? kExitTruncated : 0;
}

int cmd_sweep(const Options& o) {
    ExperimentConfig base = resolve(o);
    SweepSpec spec;
    if (base.sweep) spec = *base.sweep;
    if (o.parameter) spec.parameter = *o.parameter;
    if (!o.values.empty()) spec.values = o.values;
    if (spec.parameter.empty() || spec.values.empty()) {
        throw ConfigError("sweep needs a parameter and values (flags or [experiment.sweep])");
    }
    const fs::path dir = prepare_dir(o.out);
    std::vector<Variant> variants = {base.algo.variant};
    if (o.compare) variants = {Variant::lingape, Variant::safe_conservative};

    std::vector<AggregateRow> rows;
    std::vector<PlotSeries> tau_plot, unsafe_plot, gamma_plot;
    bool truncated = false;
    for (Variant v : variants) {
        PlotSeries tau{to_string(v), {}, {}, {}, {}};
        PlotSeries unsafe = tau, gamma = tau;
        for (double value : spec.values) {
            ExperimentConfig c = base;
            c.algo.variant = v;
            c.sweep.reset();
            apply_sweep_value(c, spec.parameter, value);
            const auto records = run_replications_parallel(c, c.workers);
            truncated = truncated || any_truncated(records);
            AggregateRow row = summarize(c, records, to_string(v));
            row.parameter = spec.parameter;
            row.value = value;
            tau.x.push_back(value);
            tau.mean.push_back(row.mean_tau);
            tau.lo.push_back(row.min_tau);
            tau.hi.push_back(row.max_tau);
            unsafe.x.push_back(value);
            unsafe.mean.push_back(row.mean_unsafe);
            unsafe.lo.push_back(row.mean_unsafe - row.std_unsafe);
            unsafe.hi.push_back(row.mean_unsafe + row.std_unsafe);
            gamma.x.push_back(value);
            gamma.mean.push_back(row.gamma_bar_fe.size() > 1 ? row.gamma_bar_fe[1] : 0.0);
            gamma.lo.push_back(row.min_gamma2_fe);
            gamma.hi.push_back(row.max_gamma2_fe);
            rows.push_back(std::move(row));
        }
        tau_plot.push_back(std::move(tau));
        unsafe_plot.push_back(std::move(unsafe));
        gamma_plot.push_back(std::move(gamma));
    }
    std::ostringstream a;
    write_aggregate_csv(a, rows);
    write_file(dir / "sweep.csv", a.str());
    write_file(dir / "sweep_tau.svg",
               line_plot_svg("Stopping time", spec.parameter, "mean tau", tau_plot));
    write_file(dir / "sweep_unsafe.svg",
               line_plot_svg("Ratio of safety violation", spec.parameter, "unsafe fraction", unsafe_plot));
    write_file(dir / "sweep_gamma2.svg",
               line_plot_svg("Safety coefficient of arm 2 after forced exploration", spec.parameter,
                             "gamma_bar_2", gamma_plot));
    ExperimentConfig echo = base;
    echo.sweep = spec;
    write_file(dir / "manifest.json", manifest_json(echo, "sweep"));
    std::cout << a.str();
    return truncated ? kExitTruncated : 0;
}

int cmd_bounds(const Options& o) {
    const ExperimentConfig c = resolve(o);
    const Instance inst = build_instance(c.instance);
    const AlgoConfig algo = resolved_algo(c);
    TfeInputs in;
    in.epsilon = algo.epsilon;
    in.delta_r = algo.delta_r;
    in.delta_s = algo.delta_s_prime;
    in.lambda = algo.lambda;
    in.safety_noise = algo.safety_radius_uses_R ? c.instance.sigma_r : c.instance.sigma_s;
    in.gamma_bar_star = best_safe_arm(inst).coefficient;
    const ComplexityReport report = complexity_report(inst, c.instance.sigma_r, in);
    const std::string json = to_json(report);
    std::cout << json << '\n';
    if (!o.out.empty() && o.out != "-") {
        const fs::path dir = prepare_dir(o.out);
        write_file(dir / "bounds.json", json + "\n");
        write_file(dir / "manifest.json", manifest_json(c, "bounds", report));
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Safe best-arm identification in linear bandits"};
    app.require_subcommand(1);
    Options o;
    auto* run = app.add_subcommand("run", "replicate one configuration");
    auto* table1 = app.add_subcommand("table1", "LinGapE and Safe-LinGapE at the default setting");
    auto* sweep = app.add_subcommand("sweep", "one aggregate row per parameter value");
    auto* bounds = app.add_subcommand("bounds", "theoretical quantities as JSON");
    for (auto* cmd : {run, table1, sweep, bounds}) add_common(cmd, o);
    sweep->add_option("--parameter", o.parameter, "swept parameter")
        ->check(CLI::IsMember(sweep_parameters()));
    sweep->add_option("--values", o.values, "comma-separated values")->delimiter(',');
    sweep->add_flag("--compare", o.compare, "run LinGapE and Safe-LinGapE side by side");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (run->parsed()) return cmd_run(o);
        if (table1->parsed()) return cmd_table1(o);
        if (sweep->parsed()) return cmd_sweep(o);
        return cmd_bounds(o);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kExitIo;
    }
}
