#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <string>

#include "fedboost/experiment.hpp"

using namespace fedboost;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "fedboost_experiment_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), {});
}

// Relative path -> file bytes, for whole-tree comparisons.
std::map<std::string, std::string> tree_bytes(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& entry : fs::recursive_directory_iterator(root))
        if (entry.is_regular_file())
            out[fs::relative(entry.path(), root).string()] = slurp(entry.path());
    return out;
}

ExperimentConfig quick_config() {
    ExperimentConfig c;
    c.samples = 240;
    c.clients = 2;
    c.seed = 3;
    c.max_aggregations = 8;
    c.stop_on_convergence = false;
    c.convergence.target_error = 0.0;  // unreachable target...
    c.convergence.window = 1000;       // ...and no plateau inside 9 records
    return c;
}

}  // namespace

TEST_CASE("a synchronous experiment has no baseline or report") {
    ExperimentConfig config = quick_config();
    config.mode = Mode::synchronous;
    const ExperimentResult result = run_experiment(config);
    CHECK_FALSE(result.baseline.has_value());
    CHECK_FALSE(result.report.has_value());
    CHECK(result.candidate.records.size() == 9);  // record 0 + 8 aggregations
}

TEST_CASE("asynchronous experiments carry the synchronous reference") {
    ExperimentConfig config = quick_config();
    config.mode = Mode::async_adaptive;
    const ExperimentResult result = run_experiment(config);
    REQUIRE(result.baseline.has_value());
    REQUIRE(result.report.has_value());
    CHECK(result.baseline->records.size() == 9);
    // Neither run converged (target 0), so no deltas exist.
    CHECK_FALSE(result.report->comparable);

    // With a reachable target the report becomes comparable.
    ExperimentConfig reachable = quick_config();
    reachable.convergence.target_error = 1.0;  // record 0 converges instantly
    reachable.stop_on_convergence = true;
    const ExperimentResult r2 = run_experiment(reachable);
    REQUIRE(r2.report.has_value());
    CHECK(r2.report->comparable);
}

TEST_CASE("experiment outputs land in the requested directory") {
    ExperimentConfig config = quick_config();
    config.mode = Mode::async_adaptive;
    const ExperimentResult result = run_experiment(config);
    const fs::path dir = fresh_dir("outputs");
    write_experiment_outputs(result, dir);

    CHECK(fs::exists(dir / "config.toml"));
    CHECK(fs::exists(dir / "trace_adaptive.csv"));
    CHECK(fs::exists(dir / "trace_baseline.csv"));
    CHECK(fs::exists(dir / "report.csv"));
    CHECK(fs::exists(dir / "report.txt"));

    // The config dump is parseable and reproduces the effective settings.
    const ExperimentConfig back = parse_config((dir / "config.toml").string());
    CHECK(render_config(back) == render_config(result.config));
    CHECK(back.seed == 3);

    // The trace files parse back to the in-memory records.
    CHECK(parse_trace_csv((dir / "trace_adaptive.csv").string()) == result.candidate.records);
    CHECK(parse_trace_csv((dir / "trace_baseline.csv").string()) == result.baseline->records);

    CHECK(slurp(dir / "report.txt").find("synchronous") != std::string::npos);
    CHECK(slurp(dir / "report.txt").find("async_adaptive") != std::string::npos);

    // Synchronous runs write only the baseline trace and the config.
    ExperimentConfig sync_config = quick_config();
    sync_config.mode = Mode::synchronous;
    const fs::path sync_dir = fresh_dir("outputs_sync");
    write_experiment_outputs(run_experiment(sync_config), sync_dir);
    CHECK(fs::exists(sync_dir / "trace_baseline.csv"));
    CHECK(fs::exists(sync_dir / "config.toml"));
    CHECK_FALSE(fs::exists(sync_dir / "report.csv"));
    CHECK_FALSE(fs::exists(sync_dir / "report.txt"));
}

TEST_CASE("identical runs write byte-identical output trees") {
    ExperimentConfig config = quick_config();
    config.mode = Mode::async_fixed;
    const fs::path a = fresh_dir("repeat_a");
    const fs::path b = fresh_dir("repeat_b");
    write_experiment_outputs(run_experiment(config), a);
    write_experiment_outputs(run_experiment(config), b);
    CHECK(tree_bytes(a) == tree_bytes(b));
}

TEST_CASE("running statistics track mean, min, and max") {
    Stat s;
    s.add(3.0);
    s.add(1.0);
    s.add(2.0);
    CHECK(s.n == 3);
    CHECK(s.mean == 2.0);
    CHECK(s.min == 1.0);
    CHECK(s.max == 3.0);
}

TEST_CASE("sweep summaries skip non-comparable runs") {
    SweepRun good;
    good.label = "v";
    good.result.report = ComparisonReport{};
    good.result.report->comparable = true;
    good.result.report->training_time_reduction_pct = 10.0;
    good.result.report->comm_overhead_reduction_pct = 20.0;
    good.result.report->convergence_rounds_reduction_pct = 30.0;
    good.result.report->accuracy_delta_pp = -0.5;

    SweepRun bad = good;
    bad.result.report->comparable = false;

    SweepRun reportless;
    reportless.label = "v";

    const auto rows = summarize_sweep({good, bad, reportless}, {"v", "missing"});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].label == "v");
    CHECK(rows[0].seeds == 3);
    CHECK(rows[0].comparable == 1);
    CHECK(rows[0].training_time_reduction_pct.mean == 10.0);
    CHECK(rows[0].accuracy_delta_pp.n == 1);
    CHECK(rows[1].seeds == 0);

    // CSV export leaves the empty variant's stat cells blank.
    const fs::path dir = fresh_dir("summary_csv");
    export_sweep_summary_csv(rows, (dir / "summary.csv").string());
    const std::string text = slurp(dir / "summary.csv");
    CHECK(text.find("v,3,1,10,") != std::string::npos);
    CHECK(text.find("missing,0,0,,,") != std::string::npos);

    const std::string rendered = render_sweep_summary_text(rows);
    CHECK(rendered.find("v: 3 seeds, 1 comparable") != std::string::npos);
    CHECK(rendered.find("no comparable runs") != std::string::npos);
}

TEST_CASE("a multi-seed sweep nests directories and writes summaries") {
    ExperimentConfig base = quick_config();
    base.mode = Mode::async_adaptive;
    base.convergence.target_error = 1.0;  // instantly comparable
    base.stop_on_convergence = true;

    SweepSpec spec;
    spec.variants = {{"demo", base}};
    spec.seeds = {4, 5};
    const fs::path root = fresh_dir("sweep_nested");
    const SweepResult sweep = run_sweep(spec, root);

    CHECK(sweep.nested);
    REQUIRE(sweep.runs.size() == 2);
    CHECK(sweep.runs[0].seed == 4);
    CHECK(sweep.runs[1].seed == 5);
    CHECK(fs::exists(root / "demo" / "seed_4" / "config.toml"));
    CHECK(fs::exists(root / "demo" / "seed_5" / "trace_adaptive.csv"));
    CHECK(fs::exists(root / "summary.csv"));
    CHECK(fs::exists(root / "summary.txt"));

    // Each run's config dump pins its own seed.
    const ExperimentConfig c4 = parse_config((root / "demo" / "seed_4" / "config.toml").string());
    const ExperimentConfig c5 = parse_config((root / "demo" / "seed_5" / "config.toml").string());
    CHECK(c4.seed == 4);
    CHECK(c5.seed == 5);

    REQUIRE(sweep.summary.size() == 1);
    CHECK(sweep.summary[0].seeds == 2);
    CHECK(sweep.summary[0].comparable == 2);

    // A single (variant, seed) pair writes flat, with no summary files.
    SweepSpec single;
    single.variants = {{"solo", base}};
    single.seeds = {9};
    const fs::path flat = fresh_dir("sweep_flat");
    const SweepResult one = run_sweep(single, flat);
    CHECK_FALSE(one.nested);
    CHECK(fs::exists(flat / "config.toml"));
    CHECK_FALSE(fs::exists(flat / "summary.csv"));
    CHECK_FALSE(fs::exists(flat / "solo"));
}
