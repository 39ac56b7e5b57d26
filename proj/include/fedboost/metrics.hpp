#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Per-aggregation counters, convergence detection, and the mode-vs-mode
// comparison report (training time, communication overhead, convergence
// rounds, accuracy).

namespace fedboost {

struct MetricsRecord {
    std::int64_t aggregation_index = 0;
    double virtual_time = 0.0;
    std::int64_t cumulative_uploads = 0;
    std::int64_t cumulative_broadcasts = 0;
    std::int64_t cumulative_bytes = 0;
    double validation_error = 0.0;
    double training_error = 0.0;  // on the union of client shards
    int current_interval = 1;

    bool operator==(const MetricsRecord&) const = default;
};

struct ConvergenceParams {
    double target_error = 0.10;
    double plateau_tol = 1e-4;
    int window = 5;
};

// First record index whose validation error reaches the target, or the end
// of the first run of `window` consecutive small error deltas; none if the
// trace never settles. Record positions equal aggregation indices.
inline std::optional<std::size_t> detect_convergence(const std::vector<MetricsRecord>& records,
                                                     double target_error, double plateau_tol,
                                                     int window) {
    if (window < 1) throw std::invalid_argument("detect_convergence: window must be >= 1");
    int flat_run = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i].validation_error <= target_error) return i;
        if (i > 0) {
            const double delta = records[i].validation_error - records[i - 1].validation_error;
            flat_run = std::abs(delta) < plateau_tol ? flat_run + 1 : 0;
            if (flat_run >= window) return i;
        }
    }
    return std::nullopt;
}

inline std::optional<std::size_t> detect_convergence(const std::vector<MetricsRecord>& records,
                                                     const ConvergenceParams& params) {
    return detect_convergence(records, params.target_error, params.plateau_tol, params.window);
}

// One mode's totals, read at its convergence record when it converged, else
// at its final record.
struct ModeSummary {
    bool converged = false;
    std::int64_t convergence_aggregation = 0;  // meaningful only when converged
    double virtual_time = 0.0;
    std::int64_t uploads = 0;
    std::int64_t broadcasts = 0;
    std::int64_t bytes = 0;
    double validation_error = 0.0;
    double accuracy_pct = 0.0;  // 100 * (1 - validation_error)
};

// Relative deltas candidate-vs-baseline; each reduction is
// 100 * (baseline - candidate) / baseline at the two convergence points.
struct ComparisonReport {
    bool comparable = false;  // both runs converged
    ModeSummary baseline;
    ModeSummary candidate;
    double training_time_reduction_pct = std::numeric_limits<double>::quiet_NaN();
    double comm_overhead_reduction_pct = std::numeric_limits<double>::quiet_NaN();
    double convergence_rounds_reduction_pct = std::numeric_limits<double>::quiet_NaN();
    double accuracy_delta_pp = std::numeric_limits<double>::quiet_NaN();  // >0: candidate better
};

inline ModeSummary summarize_mode(const std::vector<MetricsRecord>& records,
                                  const ConvergenceParams& params) {
    if (records.empty()) throw std::invalid_argument("summarize_mode: empty trace");
    ModeSummary out;
    const std::optional<std::size_t> conv = detect_convergence(records, params);
    out.converged = conv.has_value();
    const MetricsRecord& at = records[conv.value_or(records.size() - 1)];
    out.convergence_aggregation = at.aggregation_index;
    out.virtual_time = at.virtual_time;
    out.uploads = at.cumulative_uploads;
    out.broadcasts = at.cumulative_broadcasts;
    out.bytes = at.cumulative_bytes;
    out.validation_error = at.validation_error;
    out.accuracy_pct = 100.0 * (1.0 - at.validation_error);
    return out;
}

inline double reduction_pct(double baseline, double candidate) {
    if (baseline == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return 100.0 * (baseline - candidate) / baseline;
}

inline ComparisonReport compare_modes(const std::vector<MetricsRecord>& candidate,
                                      const std::vector<MetricsRecord>& baseline,
                                      const ConvergenceParams& params) {
    ComparisonReport report;
    report.baseline = summarize_mode(baseline, params);
    report.candidate = summarize_mode(candidate, params);
    report.comparable = report.baseline.converged && report.candidate.converged;
    if (report.comparable) {
        report.training_time_reduction_pct =
            reduction_pct(report.baseline.virtual_time, report.candidate.virtual_time);
        report.comm_overhead_reduction_pct =
            reduction_pct(static_cast<double>(report.baseline.bytes),
                          static_cast<double>(report.candidate.bytes));
        report.convergence_rounds_reduction_pct =
            reduction_pct(static_cast<double>(report.baseline.convergence_aggregation),
                          static_cast<double>(report.candidate.convergence_aggregation));
        report.accuracy_delta_pp = report.candidate.accuracy_pct - report.baseline.accuracy_pct;
    }
    return report;
}

namespace detail {

inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt_fixed(double v, int decimals) {
    if (std::isnan(v)) return "n/a";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    if (!content.empty() && std::fwrite(content.data(), 1, content.size(), f) != content.size()) {
        std::fclose(f);
        throw std::runtime_error("write failed for " + path);
    }
    if (std::fclose(f) != 0) throw std::runtime_error("write failed for " + path);
}

}  // namespace detail

inline constexpr const char* kTraceCsvHeader = "agg,vtime,uploads,broadcasts,bytes,val_err,train_err,interval";

inline void export_trace_csv(const std::vector<MetricsRecord>& records, const std::string& path) {
    std::string out(kTraceCsvHeader);
    out += '\n';
    for (const MetricsRecord& r : records) {
        out += std::to_string(r.aggregation_index);
        out += ',';
        out += detail::fmt_double(r.virtual_time);
        out += ',';
        out += std::to_string(r.cumulative_uploads);
        out += ',';
        out += std::to_string(r.cumulative_broadcasts);
        out += ',';
        out += std::to_string(r.cumulative_bytes);
        out += ',';
        out += detail::fmt_double(r.validation_error);
        out += ',';
        out += detail::fmt_double(r.training_error);
        out += ',';
        out += std::to_string(r.current_interval);
        out += '\n';
    }
    detail::write_text_file(path, out);
}

// Inverse of export_trace_csv; used to check the round-trip property.
inline std::vector<MetricsRecord> parse_trace_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("parse_trace_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != kTraceCsvHeader)
        throw std::runtime_error("parse_trace_csv: " + path + ": bad header");
    std::vector<MetricsRecord> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        MetricsRecord r;
        char* cur = line.data();
        auto take_int = [&](std::int64_t& v) {
            char* end = nullptr;
            v = std::strtoll(cur, &end, 10);
            if (end == cur) throw std::runtime_error("parse_trace_csv: bad row at line " +
                                                     std::to_string(line_no));
            cur = *end == ',' ? end + 1 : end;
        };
        auto take_double = [&](double& v) {
            char* end = nullptr;
            v = std::strtod(cur, &end);
            if (end == cur) throw std::runtime_error("parse_trace_csv: bad row at line " +
                                                     std::to_string(line_no));
            cur = *end == ',' ? end + 1 : end;
        };
        std::int64_t interval = 0;
        take_int(r.aggregation_index);
        take_double(r.virtual_time);
        take_int(r.cumulative_uploads);
        take_int(r.cumulative_broadcasts);
        take_int(r.cumulative_bytes);
        take_double(r.validation_error);
        take_double(r.training_error);
        take_int(interval);
        r.current_interval = static_cast<int>(interval);
        records.push_back(r);
    }
    return records;
}

inline constexpr const char* kReportCsvHeader =
    "comparable,"
    "baseline_converged,candidate_converged,"
    "baseline_convergence_agg,candidate_convergence_agg,convergence_rounds_reduction_pct,"
    "baseline_vtime,candidate_vtime,training_time_reduction_pct,"
    "baseline_bytes,candidate_bytes,comm_overhead_reduction_pct,"
    "baseline_uploads,candidate_uploads,"
    "baseline_accuracy_pct,candidate_accuracy_pct,accuracy_delta_pp";

inline void export_report_csv(const ComparisonReport& report, const std::string& path) {
    auto opt_num = [&](double v) { return std::isnan(v) ? std::string() : detail::fmt_double(v); };
    std::string out(kReportCsvHeader);
    out += '\n';
    out += report.comparable ? "true" : "false";
    out += ',';
    out += report.baseline.converged ? "true" : "false";
    out += ',';
    out += report.candidate.converged ? "true" : "false";
    out += ',';
    out += std::to_string(report.baseline.convergence_aggregation);
    out += ',';
    out += std::to_string(report.candidate.convergence_aggregation);
    out += ',';
    out += opt_num(report.convergence_rounds_reduction_pct);
    out += ',';
    out += detail::fmt_double(report.baseline.virtual_time);
    out += ',';
    out += detail::fmt_double(report.candidate.virtual_time);
    out += ',';
    out += opt_num(report.training_time_reduction_pct);
    out += ',';
    out += std::to_string(report.baseline.bytes);
    out += ',';
    out += std::to_string(report.candidate.bytes);
    out += ',';
    out += opt_num(report.comm_overhead_reduction_pct);
    out += ',';
    out += std::to_string(report.baseline.uploads);
    out += ',';
    out += std::to_string(report.candidate.uploads);
    out += ',';
    out += detail::fmt_double(report.baseline.accuracy_pct);
    out += ',';
    out += detail::fmt_double(report.candidate.accuracy_pct);
    out += ',';
    out += opt_num(report.accuracy_delta_pp);
    out += '\n';
    detail::write_text_file(path, out);
}

inline std::string render_report_text(const ComparisonReport& report,
                                      const std::string& baseline_name,
                                      const std::string& candidate_name) {
    auto row = [](const std::string& label, const std::string& b, const std::string& c) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%-26s %14s %14s\n", label.c_str(), b.c_str(), c.c_str());
        return std::string(buf);
    };
    const ModeSummary& b = report.baseline;
    const ModeSummary& c = report.candidate;
    std::string out;
    out += row("", baseline_name, candidate_name);
    out += row("converged", b.converged ? "yes" : "no", c.converged ? "yes" : "no");
    out += row("convergence aggregation",
               b.converged ? std::to_string(b.convergence_aggregation) : "n/a",
               c.converged ? std::to_string(c.convergence_aggregation) : "n/a");
    out += row("virtual time (s)", detail::fmt_fixed(b.virtual_time, 2),
               detail::fmt_fixed(c.virtual_time, 2));
    out += row("uploads", std::to_string(b.uploads), std::to_string(c.uploads));
    out += row("broadcasts", std::to_string(b.broadcasts), std::to_string(c.broadcasts));
    out += row("bytes", std::to_string(b.bytes), std::to_string(c.bytes));
    out += row("accuracy (%)", detail::fmt_fixed(b.accuracy_pct, 2),
               detail::fmt_fixed(c.accuracy_pct, 2));
    out += '\n';
    if (report.comparable) {
        out += "training time reduction:      " +
               detail::fmt_fixed(report.training_time_reduction_pct, 2) + " %\n";
        out += "comm overhead reduction:      " +
               detail::fmt_fixed(report.comm_overhead_reduction_pct, 2) + " %\n";
        out += "convergence rounds reduction: " +
               detail::fmt_fixed(report.convergence_rounds_reduction_pct, 2) + " %\n";
        out += "accuracy delta:               " + detail::fmt_fixed(report.accuracy_delta_pp, 2) +
               " pp\n";
    } else {
        const char* why = !report.baseline.converged && !report.candidate.converged
                              ? "neither run converged"
                          : !report.baseline.converged ? "the baseline run did not converge"
                                                       : "the candidate run did not converge";
        out += std::string("non-comparable: ") + why + "\n";
    }
    return out;
}

inline void export_report_text(const ComparisonReport& report, const std::string& path,
                               const std::string& baseline_name,
                               const std::string& candidate_name) {
    detail::write_text_file(path, render_report_text(report, baseline_name, candidate_name));
}

}  // namespace fedboost
