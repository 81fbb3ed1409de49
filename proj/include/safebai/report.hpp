#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "safebai/bai.hpp"
#include "safebai/config.hpp"
#include "safebai/theory.hpp"

namespace safebai {

/// round,phase,arm,coefficient,reward,safety,violated,b_stat
/// Arms are 1-based; absent safety or B values leave the field empty.
void write_run_csv(std::ostream& out, const RunRecord& record);
std::string run_csv(const RunRecord& record);

struct AggregateRow {
    std::string fingerprint;
    std::string label;
    std::string parameter;
    double value = 0.0;
    int replications = 0;
    double mean_tau = 0.0;
    double std_tau = 0.0;
    double min_tau = 0.0;
    double max_tau = 0.0;
    double mean_unsafe = 0.0;
    double std_unsafe = 0.0;
    double max_unsafe = 0.0;
    double mean_unsafe_total = 0.0;
    double correct_exact = 0.0;
    double correct_eps = 0.0;
    int truncated = 0;
    Vector gamma_bar_fe;
    Vector gamma_bar_final;
    double min_gamma2_fe = 0.0;
    double max_gamma2_fe = 0.0;
};

/// Statistics over `records`, folded in replication order.
AggregateRow aggregate(std::span<const RunRecord> records, const Instance& instance, double epsilon);

void write_aggregate_csv(std::ostream& out, std::span<const AggregateRow> rows);

struct Table1Row {
    std::string algorithm;
    std::string forced_exploration;
    double mean_tau = 0.0;
    double unsafe_pct = 0.0;
};

void write_table1_csv(std::ostream& out, std::span<const Table1Row> rows);

struct PlotSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> mean;
    std::vector<double> lo;
    std::vector<double> hi;
};

/// Line plot with a min/max band per series.
std::string line_plot_svg(const std::string& title, const std::string& x_label,
                          const std::string& y_label, std::span<const PlotSeries> series);

std::string version_string();

/// Config echo, seeds, version and the optional bounds report.
std::string manifest_json(const ExperimentConfig& config, const std::string& command,
                          const std::optional<ComplexityReport>& bounds = std::nullopt);

}  // namespace safebai
