#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "config.hpp"
#include "metrics.hpp"
#include "sim.hpp"

// Experiment orchestration: run the configured mode plus the synchronous
// reference, write the trace/report files, and drive multi-variant
// multi-seed sweeps with a mean/min/max summary.

namespace fedboost {

struct ExperimentResult {
    ExperimentConfig config;
    SimTrace candidate;                      // the configured mode
    std::optional<SimTrace> baseline;        // synchronous reference run
    std::optional<ComparisonReport> report;  // absent when mode == synchronous
};

inline ExperimentResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    ExperimentResult result;
    result.config = config;
    result.candidate = run_simulation(config);
    if (config.mode != Mode::synchronous) {
        result.baseline = run_with_mode(config, Mode::synchronous);
        result.report =
            compare_modes(result.candidate.records, result.baseline->records, config.convergence);
    }
    return result;
}

inline const char* candidate_trace_filename(Mode mode) {
    switch (mode) {
        case Mode::synchronous: return "trace_baseline.csv";
        case Mode::async_fixed: return "trace_fixed.csv";
        case Mode::async_adaptive: return "trace_adaptive.csv";
    }
    return "trace.csv";
}

// Writes config.toml, the candidate trace, and (for non-synchronous modes)
// the baseline trace plus report.csv/report.txt into `dir`.
inline void write_experiment_outputs(const ExperimentResult& result,
                                     const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    detail::write_text_file((dir / "config.toml").string(), render_config(result.config));
    export_trace_csv(result.candidate.records,
                     (dir / candidate_trace_filename(result.config.mode)).string());
    if (result.baseline) {
        export_trace_csv(result.baseline->records, (dir / "trace_baseline.csv").string());
        export_report_csv(*result.report, (dir / "report.csv").string());
        export_report_text(*result.report, (dir / "report.txt").string(), "synchronous",
                           mode_name(result.config.mode));
    }
}

// ---- Sweeps ----------------------------------------------------------------

struct SweepSpec {
    std::vector<std::pair<std::string, ExperimentConfig>> variants;  // (label, base config)
    std::vector<std::uint64_t> seeds;  // applied to experiment.seed; explicit stage seeds win
};

struct SweepRun {
    std::string label;
    std::uint64_t seed = 0;
    std::filesystem::path dir;
    ExperimentResult result;
};

struct Stat {
    std::size_t n = 0;
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;

    void add(double v) {
        min = n == 0 ? v : std::min(min, v);
        max = n == 0 ? v : std::max(max, v);
        mean += (v - mean) / static_cast<double>(++n);
    }
};

struct SweepSummaryRow {
    std::string label;
    std::size_t seeds = 0;
    std::size_t comparable = 0;  // runs where both modes converged
    Stat training_time_reduction_pct;
    Stat comm_overhead_reduction_pct;
    Stat convergence_rounds_reduction_pct;
    Stat accuracy_delta_pp;
};

struct SweepResult {
    std::vector<SweepRun> runs;            // variant-major, seed-minor order
    std::vector<SweepSummaryRow> summary;  // one row per variant
    bool nested = false;  // true when runs were written to <label>/seed_<s>/ subdirs
};

namespace detail {

// Runs fn(0..n-1) on a bounded worker pool; the first exception (by job
// index) is rethrown after all workers finish.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const std::size_t workers =
        std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) {
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (std::thread& t : pool) t.join();
    for (const std::exception_ptr& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace detail

inline std::vector<SweepSummaryRow> summarize_sweep(
    const std::vector<SweepRun>& runs, const std::vector<std::string>& label_order) {
    std::vector<SweepSummaryRow> rows;
    for (const std::string& label : label_order) {
        SweepSummaryRow row;
        row.label = label;
        for (const SweepRun& run : runs) {
            if (run.label != label) continue;
            ++row.seeds;
            if (!run.result.report || !run.result.report->comparable) continue;
            ++row.comparable;
            const ComparisonReport& r = *run.result.report;
            row.training_time_reduction_pct.add(r.training_time_reduction_pct);
            row.comm_overhead_reduction_pct.add(r.comm_overhead_reduction_pct);
            row.convergence_rounds_reduction_pct.add(r.convergence_rounds_reduction_pct);
            row.accuracy_delta_pp.add(r.accuracy_delta_pp);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline constexpr const char* kSummaryCsvHeader =
    "label,seeds,comparable,"
    "training_time_reduction_pct_mean,training_time_reduction_pct_min,training_time_reduction_pct_max,"
    "comm_overhead_reduction_pct_mean,comm_overhead_reduction_pct_min,comm_overhead_reduction_pct_max,"
    "convergence_rounds_reduction_pct_mean,convergence_rounds_reduction_pct_min,convergence_rounds_reduction_pct_max,"
    "accuracy_delta_pp_mean,accuracy_delta_pp_min,accuracy_delta_pp_max";

inline void export_sweep_summary_csv(const std::vector<SweepSummaryRow>& rows,
                                     const std::string& path) {
    auto stat_cols = [](const Stat& s) {
        if (s.n == 0) return std::string(",,");
        return detail::fmt_double(s.mean) + "," + detail::fmt_double(s.min) + "," +
               detail::fmt_double(s.max);
    };
    std::string out(kSummaryCsvHeader);
    out += '\n';
    for (const SweepSummaryRow& row : rows) {
        out += row.label;
        out += ',';
        out += std::to_string(row.seeds);
        out += ',';
        out += std::to_string(row.comparable);
        out += ',';
        out += stat_cols(row.training_time_reduction_pct);
        out += ',';
        out += stat_cols(row.comm_overhead_reduction_pct);
        out += ',';
        out += stat_cols(row.convergence_rounds_reduction_pct);
        out += ',';
        out += stat_cols(row.accuracy_delta_pp);
        out += '\n';
    }
    detail::write_text_file(path, out);
}

inline std::string render_sweep_summary_text(const std::vector<SweepSummaryRow>& rows) {
    auto stat_line = [](const char* name, const Stat& s, const char* unit) {
        if (s.n == 0) return std::string("  ") + name + " n/a (no comparable runs)\n";
        char buf[160];
        std::snprintf(buf, sizeof buf, "  %-30s %8.2f %s (min %.2f, max %.2f)\n", name, s.mean,
                      unit, s.min, s.max);
        return std::string(buf);
    };
    std::string out;
    for (const SweepSummaryRow& row : rows) {
        char head[128];
        std::snprintf(head, sizeof head, "%s: %zu seed%s, %zu comparable\n", row.label.c_str(),
                      row.seeds, row.seeds == 1 ? "" : "s", row.comparable);
        out += head;
        out += stat_line("training time reduction:", row.training_time_reduction_pct, "%");
        out += stat_line("comm overhead reduction:", row.comm_overhead_reduction_pct, "%");
        out += stat_line("convergence rounds reduction:", row.convergence_rounds_reduction_pct,
                         "%");
        out += stat_line("accuracy delta:", row.accuracy_delta_pp, "pp");
        out += '\n';
    }
    return out;
}

// Runs every (variant, seed) pair. A single pair writes flat into out_root;
// anything larger writes <label>/seed_<s>/ subdirectories plus
// summary.csv/summary.txt at the root.
inline SweepResult run_sweep(const SweepSpec& spec, const std::filesystem::path& out_root) {
    SweepResult sweep;
    sweep.nested = spec.variants.size() * spec.seeds.size() > 1;

    std::vector<std::string> label_order;
    for (const auto& [label, base] : spec.variants) {
        base.validate();  // fail before any work or output
        label_order.push_back(label);
        for (const std::uint64_t seed : spec.seeds) {
            SweepRun run;
            run.label = label;
            run.seed = seed;
            run.dir = sweep.nested
                          ? out_root / label / ("seed_" + std::to_string(seed))
                          : out_root;
            run.result.config = base;
            run.result.config.seed = seed;
            sweep.runs.push_back(std::move(run));
        }
    }

    detail::parallel_for(sweep.runs.size(), [&](std::size_t i) {
        SweepRun& run = sweep.runs[i];
        run.result = run_experiment(run.result.config);
        write_experiment_outputs(run.result, run.dir);
    });

    sweep.summary = summarize_sweep(sweep.runs, label_order);
    if (sweep.nested) {
        std::filesystem::create_directories(out_root);
        export_sweep_summary_csv(sweep.summary, (out_root / "summary.csv").string());
        detail::write_text_file((out_root / "summary.txt").string(),
                                render_sweep_summary_text(sweep.summary));
    }
    return sweep;
}

}  // namespace fedboost
