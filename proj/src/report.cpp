#include "safebai/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "json.hpp"

#ifndef SAFEBAI_VERSION
#define SAFEBAI_VERSION "unknown"
#endif

namespace safebai {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string short_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string joined(const Vector& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + num(v[i]);
    return s;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

void write_run_csv(std::ostream& out, const RunRecord& record) {
    out << "round,phase,arm,coefficient,reward,safety,violated,b_stat\n";
    for (const Pull& p : record.pulls) {
        out << p.round << ',' << (p.phase == Phase::forced_exploration ? "FE" : "BAI") << ','
            << p.arm + 1 << ',' << num(p.coefficient) << ',' << num(p.reward) << ','
            << (p.safety ? num(*p.safety) : "") << ',' << (p.violated ? 1 : 0) << ','
            << (p.b_stat ? num(*p.b_stat) : "") << '\n';
    }
}

std::string run_csv(const RunRecord& record) {
    std::ostringstream os;
    write_run_csv(os, record);
    return os.str();
}

AggregateRow aggregate(std::span<const RunRecord> records, const Instance& instance, double epsilon) {
    AggregateRow row;
    row.replications = static_cast<int>(records.size());
    if (records.empty()) return row;
    const BestArm best = best_safe_arm(instance);
    const std::size_t k_arms = instance.num_arms();

    std::vector<double> tau, unsafe, unsafe_total;
    row.gamma_bar_fe.assign(k_arms, 0.0);
    row.gamma_bar_final.assign(k_arms, 0.0);
    row.min_gamma2_fe = std::numeric_limits<double>::infinity();
    row.max_gamma2_fe = -std::numeric_limits<double>::infinity();
    int exact = 0;
    int eps_ok = 0;
    for (const RunRecord& r : records) {
        tau.push_back(static_cast<double>(r.tau));
        unsafe.push_back(r.unsafe_fraction);
        unsafe_total.push_back(r.unsafe_fraction_total);
        if (r.status == RunStatus::truncated) ++row.truncated;
        if (r.recommended.arm == best.arm) ++exact;
        const double got =
            r.recommended.coefficient * dot(instance.arms[r.recommended.arm], instance.theta_star);
        if (best.value - got <= epsilon * (1.0 + 1e-9)) ++eps_ok;
        for (std::size_t k = 0; k < k_arms; ++k) {
            row.gamma_bar_fe[k] += r.fe_profile.gamma_bar[k];
            row.gamma_bar_final[k] += r.final_profile.gamma_bar[k];
        }
        if (k_arms > 1) {
            row.min_gamma2_fe = std::min(row.min_gamma2_fe, r.fe_profile.gamma_bar[1]);
            row.max_gamma2_fe = std::max(row.max_gamma2_fe, r.fe_profile.gamma_bar[1]);
        }
    }
    const double n = static_cast<double>(records.size());
    for (std::size_t k = 0; k < k_arms; ++k) {
        row.gamma_bar_fe[k] /= n;
        row.gamma_bar_final[k] /= n;
    }
    row.mean_tau = mean_of(tau);
    row.std_tau = std_of(tau);
    row.min_tau = *std::min_element(tau.begin(), tau.end());
    row.max_tau = *std::max_element(tau.begin(), tau.end());
    row.mean_unsafe = mean_of(unsafe);
    row.std_unsafe = std_of(unsafe);
    row.max_unsafe = *std::max_element(unsafe.begin(), unsafe.end());
    row.mean_unsafe_total = mean_of(unsafe_total);
    row.correct_exact = exact / n;
    row.correct_eps = eps_ok / n;
    return row;
}

void write_aggregate_csv(std::ostream& out, std::span<const AggregateRow> rows) {
    out << "fingerprint,label,parameter,value,replications,mean_tau,std_tau,min_tau,max_tau,"
           "mean_unsafe,std_unsafe,max_unsafe,mean_unsafe_total,correct_exact,correct_eps,"
           "truncated,gamma_bar_fe,gamma_bar_final\n";
    for (const AggregateRow& r : rows) {
        out << r.fingerprint << ',' << r.label << ',' << r.parameter << ',' << num(r.value) << ','
            << r.replications << ',' << num(r.mean_tau) << ',' << num(r.std_tau) << ','
            << num(r.min_tau) << ',' << num(r.max_tau) << ',' << num(r.mean_unsafe) << ','
            << num(r.std_unsafe) << ',' << num(r.max_unsafe) << ',' << num(r.mean_unsafe_total)
            << ',' << num(r.correct_exact) << ',' << num(r.correct_eps) << ',' << r.truncated
            << ',' << joined(r.gamma_bar_fe) << ',' << joined(r.gamma_bar_final) << '\n';
    }
}

void write_table1_csv(std::ostream& out, std::span<const Table1Row> rows) {
    out << "algorithm,forced_exploration,mean_tau,unsafe_pct\n";
    for (const Table1Row& r : rows) {
        out << r.algorithm << ',' << r.forced_exploration << ',' << num(r.mean_tau) << ','
            << num(r.unsafe_pct) << '\n';
    }
}

std::string line_plot_svg(const std::string& title, const std::string& x_label,
                          const std::string& y_label, std::span<const PlotSeries> series) {
    constexpr double width = 640, height = 420;
    constexpr double left = 70, right = 20, top = 40, bottom = 60;
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
    double y0 = x0, y1 = -x0;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min({y0, s.lo[i], s.mean[i]});
            y1 = std::max({y1, s.hi[i], s.mean[i]});
        }
    }
    if (!(x1 > x0)) { x0 -= 1.0; x1 += 1.0; }
    if (!(y1 > y0)) { y0 -= 1.0; y1 += 1.0; }
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * (width - left - right); };
    auto py = [&](double y) { return height - bottom - (y - y0) / (y1 - y0) * (height - top - bottom); };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
       << escape_xml(title) << "</text>\n";
    os << "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\"" << width - right
       << "\" y2=\"" << height - bottom << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
       << height - bottom << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double xv = x0 + (x1 - x0) * i / 4.0;
        const double yv = y0 + (y1 - y0) * i / 4.0;
        os << "<line x1=\"" << px(xv) << "\" y1=\"" << height - bottom << "\" x2=\"" << px(xv)
           << "\" y2=\"" << height - bottom + 5 << "\" stroke=\"black\"/>"
           << "<text x=\"" << px(xv) << "\" y=\"" << height - bottom + 18
           << "\" text-anchor=\"middle\">" << short_num(xv) << "</text>\n";
        os << "<line x1=\"" << left - 5 << "\" y1=\"" << py(yv) << "\" x2=\"" << left << "\" y2=\""
           << py(yv) << "\" stroke=\"black\"/>"
           << "<text x=\"" << left - 8 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">"
           << short_num(yv) << "</text>\n";
    }
    os << "<text x=\"" << (left + width - right) / 2 << "\" y=\"" << height - 15
       << "\" text-anchor=\"middle\">" << escape_xml(x_label) << "</text>\n";
    os << "<text transform=\"translate(18," << (top + height - bottom) / 2
       << ") rotate(-90)\" text-anchor=\"middle\">" << escape_xml(y_label) << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const auto& ser = series[s];
        const char* color = colors[s % 5];
        os << "<polygon fill=\"" << color << "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"";
        for (std::size_t i = 0; i < ser.x.size(); ++i) os << px(ser.x[i]) << ',' << py(ser.hi[i]) << ' ';
        for (std::size_t i = ser.x.size(); i-- > 0;) os << px(ser.x[i]) << ',' << py(ser.lo[i]) << ' ';
        os << "\"/>\n";
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < ser.x.size(); ++i) os << px(ser.x[i]) << ',' << py(ser.mean[i]) << ' ';
        os << "\"/>\n";
        os << "<text x=\"" << width - right - 10 << "\" y=\"" << top + 16 * (s + 1)
           << "\" text-anchor=\"end\" fill=\"" << color << "\">" << escape_xml(ser.name) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string version_string() { return SAFEBAI_VERSION; }

std::string manifest_json(const ExperimentConfig& config, const std::string& command,
                          const std::optional<ComplexityReport>& bounds) {
    nlohmann::json j;
    j["command"] = command;
    j["version"] = version_string();
    j["fingerprint"] = fingerprint(config);
    j["config"] = nlohmann::json::parse(to_json(config));
    j["master_seed"] = config.master_seed;
    nlohmann::json seeds = nlohmann::json::array();
    for (int r = 0; r < config.replications; ++r) {
        seeds.push_back({{"replication", r + 1}, {"substream", {config.master_seed, r}}});
    }
    j["replications"] = seeds;
    if (bounds) j["bounds"] = nlohmann::json::parse(to_json(*bounds));
    return j.dump(2);
}

}  // namespace safebai
