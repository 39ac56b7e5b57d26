// Acceptance suite: one self-contained check per advertised guarantee, each
// printing a single [PASS]/[FAIL] line with its wall-clock budget enforced.
// Exit code is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "fedboost/fedboost.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace fedboost;

namespace {

struct Criterion {
    const char* name;
    double budget_seconds;
    bool (*run)(std::string& detail);
};

bool rel_close(double a, double b, double rel_tol) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) <= rel_tol * scale;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// ---- 1. classical equivalence ----------------------------------------------
//
// One client, interval 1, no decay, no latency, no dropout: ten federated
// aggregations must replay single-machine boosting exactly — identical stumps,
// errors and confidences within 1e-12 relative, per-round distributions
// within 1e-12 relative.
bool classical_equivalence(std::string& detail) {
    ExperimentConfig config;
    config.mode = Mode::async_fixed;
    config.samples = 200;
    config.seed = 42;
    config.clients = 1;
    config.initial_interval = 1;
    config.lambda = 0.0;
    config.compute_time_min = config.compute_time_max = 1.0;
    config.link_latency_min = config.link_latency_max = 0.0;
    config.dropout_min = config.dropout_max = 0.0;
    config.max_aggregations = 10;
    config.stop_on_convergence = false;
    config.convergence.target_error = 0.0;
    config.record_distributions = true;

    const SimTrace trace = run_simulation(config);
    const SimSetup setup = prepare_simulation(config);
    if (setup.clients.size() != 1 || !(setup.clients[0].shard == setup.train_pool)) {
        detail = "single-client shard is not the whole training pool";
        return false;
    }

    const std::vector<oracles::ClassicalRound> reference =
        oracles::classical_adaboost(setup.train_pool, 10, config.eps_floor);
    if (reference.size() != 10) {
        detail = "reference boosting stopped early (round error reached 0.5 at round " +
                 std::to_string(reference.size() + 1) + ")";
        return false;
    }
    if (trace.learners.size() != 10 || trace.dist_snapshots.size() != 10) {
        detail = "expected 10 aggregated learners and 10 distribution snapshots, got " +
                 std::to_string(trace.learners.size()) + " and " +
                 std::to_string(trace.dist_snapshots.size());
        return false;
    }

    for (std::size_t t = 0; t < 10; ++t) {
        const BufferedLearner& learner = trace.learners[t].learner;
        const oracles::ClassicalRound& ref = reference[t];
        if (learner.stump.feature_index != ref.stump.feature ||
            learner.stump.threshold != ref.stump.threshold ||
            learner.stump.polarity != ref.stump.polarity) {
            detail = "round " + std::to_string(t + 1) + ": stump mismatch";
            return false;
        }
        if (!rel_close(learner.raw_epsilon, ref.raw_epsilon, 1e-12)) {
            detail = "round " + std::to_string(t + 1) + ": epsilon " + fmt(learner.raw_epsilon) +
                     " vs " + fmt(ref.raw_epsilon);
            return false;
        }
        if (!rel_close(learner.alpha, ref.alpha, 1e-12)) {
            detail = "round " + std::to_string(t + 1) + ": alpha " + fmt(learner.alpha) + " vs " +
                     fmt(ref.alpha);
            return false;
        }
        if (trace.learners[t].tau != 0 ||
            trace.learners[t].effective_weight != learner.alpha) {
            detail = "round " + std::to_string(t + 1) + ": unexpected staleness decay";
            return false;
        }
        const DistributionVector& dist = trace.dist_snapshots[t].dist;
        for (std::size_t i = 0; i < dist.size(); ++i) {
            if (!rel_close(dist[i], ref.dist_after[i], 1e-12)) {
                detail = "round " + std::to_string(t + 1) + ": dist[" + std::to_string(i) +
                         "] " + fmt(dist[i]) + " vs " + fmt(ref.dist_after[i]);
                return false;
            }
        }
    }
    detail = "10 rounds bit-matched stumps; eps/alpha/dist within 1e-12 rel";
    return true;
}

// ---- 2. reweighting invariants under fuzz -----------------------------------
//
// 10,000 randomized update_distribution calls: the output is nonnegative and
// sums to 1 within 1e-9, across dataset sizes, alphas (including extremes),
// and skewed input distributions.
bool reweighting_fuzz(std::string& detail) {
    rng::SplitMix64 g(20260817);
    const double alphas[] = {0.0,  1e-6, 0.1,  1.0,   3.0,  6.9,
                             -1.0, 25.0, -25.0, 300.0, -300.0};
    std::size_t calls = 0;
    double worst_sum_gap = 0.0;
    for (int rep = 0; rep < 10000; ++rep) {
        const std::size_t n = 2 + g.next() % 63;
        Dataset d;
        d.dimension = 1 + g.next() % 3;
        for (std::size_t i = 0; i < n; ++i) {
            Sample s;
            for (std::size_t j = 0; j < d.dimension; ++j)
                s.features.push_back(g.next_in(-4.0, 4.0));
            s.label = g.next_double() < 0.5 ? -1 : 1;
            d.samples.push_back(std::move(s));
        }
        DistributionVector dist(n);
        double sum = 0.0;
        for (double& w : dist) {
            w = std::pow(g.next_double(), 4.0) + 1e-9;  // heavily skewed weights
            sum += w;
        }
        for (double& w : dist) w /= sum;

        const Stump stump{g.next() % d.dimension, g.next_in(-4.0, 4.0),
                          g.next() % 2 ? 1 : -1};
        const double alpha = alphas[g.next() % (sizeof alphas / sizeof alphas[0])];
        const DistributionUpdate up = update_distribution(dist, stump, alpha, d);
        ++calls;

        double out_sum = 0.0;
        for (double w : up.dist) {
            if (!(w >= 0.0) || !std::isfinite(w)) {
                detail = "negative or non-finite weight after call " + std::to_string(calls);
                return false;
            }
            out_sum += w;
        }
        worst_sum_gap = std::max(worst_sum_gap, std::abs(out_sum - 1.0));
        if (std::abs(out_sum - 1.0) > 1e-9) {
            detail = "normalization drift " + fmt(std::abs(out_sum - 1.0)) + " after call " +
                     std::to_string(calls);
            return false;
        }
        if (!(up.z > 0.0) || !std::isfinite(up.z)) {
            detail = "degenerate normalization factor after call " + std::to_string(calls);
            return false;
        }
    }
    detail = std::to_string(calls) + " calls; worst |sum-1| = " + fmt(worst_sum_gap);
    return true;
}

// ---- 3. staleness decay grid -------------------------------------------------
//
// decayed_weight over lambda x tau x alpha matches an independent long-double
// reference within 1e-12 relative and decays strictly monotonically in tau.
bool decay_grid(std::string& detail) {
    const double lambdas[] = {0.0, 0.05, 0.1, 0.5};
    const double alphas[] = {0.0, 0.1, 1.0, 3.0};
    std::size_t checked = 0;
    for (double lambda : lambdas) {
        for (double alpha : alphas) {
            double prev = std::numeric_limits<double>::infinity();
            for (std::uint64_t tau = 0; tau <= 20; ++tau) {
                const double got = decayed_weight(alpha, tau, lambda);
                const long double ref =
                    static_cast<long double>(alpha) *
                    std::exp(-static_cast<long double>(lambda) * static_cast<long double>(tau));
                if (!rel_close(got, static_cast<double>(ref), 1e-12)) {
                    detail = "lambda=" + fmt(lambda) + " tau=" + std::to_string(tau) +
                             " alpha=" + fmt(alpha) + ": " + fmt(got) + " vs " +
                             fmt(static_cast<double>(ref));
                    return false;
                }
                if (alpha > 0.0 && lambda > 0.0 && !(got < prev)) {
                    detail = "decay not strictly monotone at lambda=" + fmt(lambda) +
                             " tau=" + std::to_string(tau) + " alpha=" + fmt(alpha);
                    return false;
                }
                if (alpha > 0.0 && lambda > 0.0) prev = got;
                ++checked;
            }
        }
    }
    detail = std::to_string(checked) + " grid points within 1e-12 rel, strict decay";
    return true;
}

// ---- 4. interval controller -----------------------------------------------
//
// The four documented control examples plus a 1000-step fuzz against an
// independent reference, staying inside [i_min, i_max] throughout.
bool controller_examples(std::string& detail) {
    const SchedulerParams p;  // defaults: theta 0 / 0.005, +1 / -2, [1, 16]
    struct Example {
        int interval;
        double last, eps;
        int expected;
    };
    const Example examples[] = {
        {4, 0.20, 0.19, 5},   // improvement grows
        {4, 0.20, 0.21, 2},   // regression shrinks by 2
        {4, 0.20, 0.203, 4},  // dead zone holds
        {16, 0.20, 0.10, 16}, // clamp at the ceiling
    };
    for (const Example& ex : examples) {
        SchedulerState state;
        state.interval = ex.interval;
        state.last_error = ex.last;
        const SchedulerState next = next_interval(state, p, ex.eps);
        if (next.interval != ex.expected) {
            detail = "example I=" + std::to_string(ex.interval) + " last=" + fmt(ex.last) +
                     " eps=" + fmt(ex.eps) + ": got " + std::to_string(next.interval) +
                     ", expected " + std::to_string(ex.expected);
            return false;
        }
    }

    // First evaluation only primes the memory.
    SchedulerState s = next_interval(SchedulerState{}, p, 0.37);
    if (s.interval != 1 || !s.last_error || *s.last_error != 0.37) {
        detail = "first evaluation moved the interval or lost the error";
        return false;
    }

    SchedulerParams fuzz_params;
    fuzz_params.theta1 = -0.003;
    fuzz_params.theta2 = 0.002;
    fuzz_params.step_up = 2;
    fuzz_params.step_down = 3;
    fuzz_params.i_min = 2;
    fuzz_params.i_max = 11;
    rng::SplitMix64 g(31415);
    double last = 0.5;
    s = SchedulerState{5, last};
    for (int step = 0; step < 1000; ++step) {
        const double eps = g.next_double();
        // independent reference
        int expected = s.interval;
        const double delta = eps - last;
        if (delta < fuzz_params.theta1) expected += fuzz_params.step_up;
        else if (delta > fuzz_params.theta2) expected = std::max(1, expected - fuzz_params.step_down);
        expected = std::clamp(expected, fuzz_params.i_min, fuzz_params.i_max);

        s = next_interval(s, fuzz_params, eps);
        if (s.interval != expected) {
            detail = "fuzz step " + std::to_string(step) + ": got " +
                     std::to_string(s.interval) + ", expected " + std::to_string(expected);
            return false;
        }
        if (s.interval < fuzz_params.i_min || s.interval > fuzz_params.i_max) {
            detail = "fuzz step " + std::to_string(step) + ": interval out of bounds";
            return false;
        }
        last = eps;
    }
    detail = "4 examples + 1000 fuzz steps matched the reference";
    return true;
}

// ---- 5. headline comparison on the default workload --------------------------
//
// Default configuration (2000 samples, 5 heterogeneous clients, Dirichlet 0.5,
// dropout 0.1, lambda 0.1, target error 0.10), seeds 1-5: against the
// synchronous baseline the adaptive mode must cut communicated bytes by >= 20%
// and training time by >= 10% on average while staying within 1.5 accuracy
// percentage points. Per-seed misses are flagged; the means decide.
bool headline_comparison(std::string& detail) {
    std::vector<ExperimentResult> results(5);
    fedboost::detail::parallel_for(5, [&](std::size_t i) {
        ExperimentConfig config;  // the documented defaults, adaptive mode
        config.seed = static_cast<std::uint64_t>(i + 1);
        results[i] = run_experiment(config);
    });

    Stat bytes_red, time_red, acc_delta;
    std::string flags;
    for (std::size_t i = 0; i < results.size(); ++i) {
        const std::uint64_t seed = i + 1;
        if (!results[i].report || !results[i].report->comparable) {
            detail = "seed " + std::to_string(seed) + " is non-comparable (a run missed the "
                     "0.10 validation-error target)";
            return false;
        }
        const ComparisonReport& r = *results[i].report;
        bytes_red.add(r.comm_overhead_reduction_pct);
        time_red.add(r.training_time_reduction_pct);
        acc_delta.add(r.accuracy_delta_pp);
        if (r.comm_overhead_reduction_pct < 20.0)
            flags += " [seed " + std::to_string(seed) + ": bytes " +
                     fmt(r.comm_overhead_reduction_pct) + "%]";
        if (r.training_time_reduction_pct < 10.0)
            flags += " [seed " + std::to_string(seed) + ": time " +
                     fmt(r.training_time_reduction_pct) + "%]";
        if (std::abs(r.accuracy_delta_pp) > 1.5)
            flags += " [seed " + std::to_string(seed) + ": acc " + fmt(r.accuracy_delta_pp) +
                     "pp]";
    }

    detail = "mean byte reduction " + fmt(bytes_red.mean) + "%, mean time reduction " +
             fmt(time_red.mean) + "%, mean acc delta " + fmt(acc_delta.mean) + "pp";
    if (!flags.empty()) detail += "; per-seed flags:" + flags;
    bool ok = true;
    if (bytes_red.mean < 20.0) {
        detail += "; FAILED: mean byte reduction below 20%";
        ok = false;
    }
    if (time_red.mean < 10.0) {
        detail += "; FAILED: mean training-time reduction below 10%";
        ok = false;
    }
    if (std::abs(acc_delta.mean) > 1.5) {
        detail += "; FAILED: mean accuracy delta outside +/-1.5pp";
        ok = false;
    }
    return ok;
}

// ---- 6. mode equivalence under synchrony-equivalent settings -----------------
//
// With zero decay, zero latency, zero dropout, equal compute, and interval 1,
// the asynchronous pipeline must produce exactly the synchronous ensemble as
// a multiset of (stump, alpha) over equal per-client training budgets.
bool mode_equivalence(std::string& detail) {
    ExperimentConfig config;
    config.samples = 300;
    config.seed = 11;
    config.clients = 3;
    config.lambda = 0.0;
    config.initial_interval = 1;
    config.compute_time_min = config.compute_time_max = 1.0;
    config.link_latency_min = config.link_latency_max = 0.0;
    config.dropout_min = config.dropout_max = 0.0;
    config.stop_on_convergence = false;
    config.convergence.target_error = 0.0;

    ExperimentConfig async_cfg = config;
    async_cfg.mode = Mode::async_fixed;
    async_cfg.max_aggregations = 24;  // 8 rounds for each of the 3 clients

    ExperimentConfig sync_cfg = config;
    sync_cfg.mode = Mode::synchronous;
    sync_cfg.max_aggregations = 8;

    const SimTrace async_trace = run_simulation(async_cfg);
    const SimTrace sync_trace = run_simulation(sync_cfg);

    if (async_trace.dropped_rounds != 0 || sync_trace.dropped_rounds != 0) {
        detail = "unexpected dropped rounds in a zero-dropout run";
        return false;
    }
    if (async_trace.discarded_learners != 0 || sync_trace.discarded_learners != 0) {
        detail = "a learner was discarded; the budgets are no longer aligned";
        return false;
    }
    if (async_trace.learners.size() != 24 || sync_trace.learners.size() != 24) {
        detail = "expected 24 learners per mode, got " +
                 std::to_string(async_trace.learners.size()) + " and " +
                 std::to_string(sync_trace.learners.size());
        return false;
    }

    using Key = std::tuple<std::size_t, double, int, double>;  // stump fields + alpha
    std::multiset<Key> a, b;
    for (const AcceptedLearnerLog& log : async_trace.learners)
        a.insert({log.learner.stump.feature_index, log.learner.stump.threshold,
                  log.learner.stump.polarity, log.learner.alpha});
    for (const AcceptedLearnerLog& log : sync_trace.learners)
        b.insert({log.learner.stump.feature_index, log.learner.stump.threshold,
                  log.learner.stump.polarity, log.learner.alpha});
    if (!(a == b)) {
        detail = "the (stump, alpha) multisets differ";
        return false;
    }
    detail = "24 learners per mode; (stump, alpha) multisets identical bit for bit";
    return true;
}

// ---- 7. determinism of full experiment outputs --------------------------------
//
// Re-running a preset writes a byte-identical output directory, for two
// different presets.
bool output_determinism(std::string& detail) {
    const fs::path root = fs::temp_directory_path() / "fedboost_acceptance_determinism";
    fs::remove_all(root);

    auto tree_bytes = [](const fs::path& dir) {
        std::map<std::string, std::string> out;
        for (const auto& entry : fs::recursive_directory_iterator(dir)) {
            if (!entry.is_regular_file()) continue;
            std::ifstream in(entry.path(), std::ios::binary);
            out[fs::relative(entry.path(), dir).string()] =
                std::string(std::istreambuf_iterator<char>(in), {});
        }
        return out;
    };

    for (const char* name : {"edge_vision", "healthcare"}) {
        const ExperimentConfig config = preset(name);
        const fs::path a = root / name / "a";
        const fs::path b = root / name / "b";
        write_experiment_outputs(run_experiment(config), a);
        write_experiment_outputs(run_experiment(config), b);
        const auto bytes_a = tree_bytes(a);
        const auto bytes_b = tree_bytes(b);
        if (bytes_a.empty() || bytes_a != bytes_b) {
            detail = std::string("preset ") + name + ": repeated runs differ";
            return false;
        }
    }
    detail = "edge_vision and healthcare reruns byte-identical (config, traces, reports)";
    return true;
}

// ---- 8. upload economy on slow links ------------------------------------------
//
// On the consensus-network preset the adaptive controller must converge using
// a lower upload rate (uploads per virtual hour at its convergence point)
// than the fixed interval-1 pipeline.
bool upload_economy(std::string& detail) {
    ExperimentConfig adaptive_cfg = preset("blockchain");
    adaptive_cfg.mode = Mode::async_adaptive;
    ExperimentConfig fixed_cfg = adaptive_cfg;
    fixed_cfg.mode = Mode::async_fixed;
    fixed_cfg.initial_interval = 1;

    const SimTrace adaptive = run_simulation(adaptive_cfg);
    const SimTrace fixed = run_simulation(fixed_cfg);
    if (!adaptive.converged_at) {
        detail = "the adaptive run did not converge";
        return false;
    }
    if (!fixed.converged_at) {
        detail = "the fixed-interval run did not converge";
        return false;
    }
    const MetricsRecord& ra = adaptive.records[*adaptive.converged_at];
    const MetricsRecord& rf = fixed.records[*fixed.converged_at];
    if (ra.virtual_time <= 0.0 || rf.virtual_time <= 0.0) {
        detail = "degenerate virtual times at convergence";
        return false;
    }
    const double rate_adaptive =
        3600.0 * static_cast<double>(ra.cumulative_uploads) / ra.virtual_time;
    const double rate_fixed =
        3600.0 * static_cast<double>(rf.cumulative_uploads) / rf.virtual_time;
    detail = "uploads/hour at convergence: adaptive " + fmt(rate_adaptive) + " vs fixed " +
             fmt(rate_fixed);
    if (!(rate_adaptive < rate_fixed)) {
        detail += "; FAILED: adaptive is not cheaper";
        return false;
    }
    return true;
}

}  // namespace

int main() {
    const Criterion criteria[] = {
        {"classical equivalence (1 client, interval 1)", 1.0, classical_equivalence},
        {"reweighting invariants under 10k-call fuzz", 5.0, reweighting_fuzz},
        {"staleness decay grid vs long-double reference", 1.0, decay_grid},
        {"interval controller examples + 1000-step fuzz", 1.0, controller_examples},
        {"default-workload comparison, seeds 1-5", 60.0, headline_comparison},
        {"sync/async ensemble equivalence", 5.0, mode_equivalence},
        {"byte-identical rerun outputs, two presets", 30.0, output_determinism},
        {"upload economy on the slow-link preset", 30.0, upload_economy},
    };

    int failures = 0;
    int index = 0;
    for (const Criterion& criterion : criteria) {
        ++index;
        std::string detail;
        bool ok = false;
        const auto start = std::chrono::steady_clock::now();
        try {
            ok = criterion.run(detail);
        } catch (const std::exception& e) {
            ok = false;
            detail = std::string("exception: ") + e.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (ok && elapsed > criterion.budget_seconds) {
            ok = false;
            detail += "; exceeded the " + fmt(criterion.budget_seconds) + "s budget";
        }
        std::printf("[%s] %d. %s (%.2fs)%s%s\n", ok ? "PASS" : "FAIL", index, criterion.name,
                    elapsed, detail.empty() ? "" : " - ", detail.c_str());
        failures += ok ? 0 : 1;
    }
    if (failures == 0)
        std::printf("all %d acceptance criteria passed\n",
                    static_cast<int>(sizeof criteria / sizeof criteria[0]));
    else
        std::printf("%d acceptance criterion(s) failed\n", failures);
    return failures;
}
