// fedboost command-line runner.
//
//   fedboost run --preset edge_vision --seed 42 --out results/
//   fedboost run --config my.toml --seeds 1..5
//   fedboost run --preset all --seeds 1..5
//   fedboost validate --config my.toml
//   fedboost preset-list
//
// Exit codes: 0 success, 1 config error, 2 runtime error, 3 a run failed to
// converge while --require-convergence was set.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fedboost/fedboost.hpp"

namespace fs = std::filesystem;

namespace {

// "7" -> {7}; "1..5" -> {1,2,3,4,5}; "3,9,12" -> {3,9,12}
std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    auto parse_one = [](const std::string& s) -> std::uint64_t {
        std::size_t used = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(s, &used);
        } catch (const std::exception&) {
            throw fedboost::ConfigError("--seeds: cannot parse '" + s + "' as a seed");
        }
        if (used != s.size())
            throw fedboost::ConfigError("--seeds: cannot parse '" + s + "' as a seed");
        return static_cast<std::uint64_t>(v);
    };

    std::vector<std::uint64_t> seeds;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        const std::string part = text.substr(pos, comma - pos);
        if (part.empty()) throw fedboost::ConfigError("--seeds: empty element in '" + text + "'");
        const std::size_t dots = part.find("..");
        if (dots == std::string::npos) {
            seeds.push_back(parse_one(part));
        } else {
            const std::uint64_t lo = parse_one(part.substr(0, dots));
            const std::uint64_t hi = parse_one(part.substr(dots + 2));
            if (hi < lo)
                throw fedboost::ConfigError("--seeds: range '" + part + "' is reversed");
            if (hi - lo >= 4096)
                throw fedboost::ConfigError("--seeds: range '" + part + "' spans more than 4096 seeds");
            for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
        }
        pos = comma + 1;
        if (comma == text.size()) break;
    }
    if (seeds.empty()) throw fedboost::ConfigError("--seeds: no seeds given");
    return seeds;
}

std::string config_key_reference() {
    std::string out = "Config keys (strict schema; unknown keys are rejected):\n";
    std::string section;
    for (const fedboost::ConfigKeySpec& spec : fedboost::config_schema()) {
        if (section != spec.section) {
            section = spec.section;
            out += "\n  [" + section + "]\n";
        }
        out += "    ";
        out += spec.key;
        out += "  —  ";
        out += spec.doc;
        out += '\n';
    }
    return out;
}

fs::path default_out_dir() {
    if (const char* env = std::getenv("FEDBOOST_OUT"); env && *env) return fs::path(env);
    return fs::path("out");
}

struct RunOptions {
    std::string config_path;
    std::string preset_name;
    std::string mode_override;
    std::string seeds_text;
    std::optional<std::uint64_t> seed;
    fs::path out_dir = default_out_dir();
    bool require_convergence = false;
};

// Builds the (label, config) variants from --config / --preset.
std::vector<std::pair<std::string, fedboost::ExperimentConfig>> build_variants(
    const RunOptions& opt) {
    std::vector<std::pair<std::string, fedboost::ExperimentConfig>> variants;
    if (!opt.config_path.empty()) {
        fedboost::ExperimentConfig config = fedboost::parse_config(opt.config_path);
        std::string label = fs::path(opt.config_path).stem().string();
        if (label.empty()) label = "config";
        variants.emplace_back(label, std::move(config));
    } else if (opt.preset_name == "all") {
        for (const std::string& name : fedboost::preset_names())
            variants.emplace_back(name, fedboost::preset(name));
    } else {
        variants.emplace_back(opt.preset_name, fedboost::preset(opt.preset_name));
    }
    if (!opt.mode_override.empty()) {
        const fedboost::Mode mode = fedboost::parse_mode(opt.mode_override);
        for (auto& [label, config] : variants) config.mode = mode;
    }
    return variants;
}

int do_run(const RunOptions& opt) {
    fedboost::SweepSpec spec;
    spec.variants = build_variants(opt);
    if (!opt.seeds_text.empty())
        spec.seeds = parse_seed_list(opt.seeds_text);
    else if (opt.seed)
        spec.seeds = {*opt.seed};
    else
        spec.seeds = {spec.variants.front().second.seed};

    const fedboost::SweepResult sweep = fedboost::run_sweep(spec, opt.out_dir);

    if (sweep.nested) {
        std::printf("%zu runs written under %s\n\n", sweep.runs.size(),
                    opt.out_dir.string().c_str());
        std::fputs(fedboost::render_sweep_summary_text(sweep.summary).c_str(), stdout);
    } else {
        const fedboost::SweepRun& run = sweep.runs.front();
        std::printf("outputs written to %s\n\n", run.dir.string().c_str());
        if (run.result.report) {
            std::fputs(fedboost::render_report_text(*run.result.report, "synchronous",
                                                    fedboost::mode_name(run.result.config.mode))
                           .c_str(),
                       stdout);
        } else {
            const fedboost::SimTrace& trace = run.result.candidate;
            const fedboost::MetricsRecord& last = trace.records.back();
            std::printf("synchronous run: %zu aggregations, %.2f s virtual time, "
                        "validation error %.4f\n",
                        trace.records.size() - 1, last.virtual_time, last.validation_error);
            if (trace.converged_at)
                std::printf("converged at aggregation %lld\n",
                            static_cast<long long>(
                                trace.records[*trace.converged_at].aggregation_index));
            else
                std::printf("did not converge within the stop limits\n");
        }
    }

    if (opt.require_convergence) {
        bool all_converged = true;
        for (const fedboost::SweepRun& run : sweep.runs) {
            std::string missing;
            if (!run.result.candidate.converged_at)
                missing = fedboost::mode_name(run.result.config.mode);
            else if (run.result.baseline && !run.result.baseline->converged_at)
                missing = "synchronous baseline";
            if (!missing.empty()) {
                all_converged = false;
                std::fprintf(stderr, "non-convergence: %s seed %llu (%s run)\n",
                             run.label.c_str(), static_cast<unsigned long long>(run.seed),
                             missing.c_str());
            }
        }
        if (!all_converged) return 3;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Asynchronous federated boosting simulator"};
    app.require_subcommand(1);
    app.footer(config_key_reference());

    RunOptions opt;

    CLI::App* run = app.add_subcommand("run", "Run one or more experiments and write traces");
    CLI::Option* cfg_opt =
        run->add_option("--config", opt.config_path, "Config file (strict schema)")
            ->check(CLI::ExistingFile);
    CLI::Option* preset_opt =
        run->add_option("--preset", opt.preset_name,
                        "Preset name (see preset-list), or 'all' for every preset");
    cfg_opt->excludes(preset_opt);
    preset_opt->excludes(cfg_opt);
    run->add_option("--seed", opt.seed, "Single seed (overrides the config's seed)");
    run->add_option("--seeds", opt.seeds_text,
                    "Seed list: 'A..B' inclusive range and/or comma list, e.g. 1..5 or 3,9");
    run->add_option("--out", opt.out_dir,
                    "Output directory (default: $FEDBOOST_OUT or ./out)");
    run->add_option("--mode", opt.mode_override,
                    "Override mode: synchronous | async_fixed | async_adaptive");
    run->add_flag("--require-convergence", opt.require_convergence,
                  "Exit 3 if any run fails to converge");

    std::string validate_path;
    CLI::App* validate =
        app.add_subcommand("validate", "Parse and validate a config, print the filled-in form");
    validate->add_option("--config", validate_path, "Config file to validate")
        ->required()
        ->check(CLI::ExistingFile);

    CLI::App* preset_list = app.add_subcommand("preset-list", "List the built-in presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // help text, exit 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints the message + usage hint
        return 1;     // any flag misuse is a config error
    }

    try {
        if (run->parsed()) {
            if (opt.config_path.empty() && opt.preset_name.empty())
                throw fedboost::ConfigError("run: pass --config FILE or --preset NAME");
            return do_run(opt);
        }
        if (validate->parsed()) {
            const fedboost::ExperimentConfig config = fedboost::parse_config(validate_path);
            std::fputs(fedboost::render_config(config).c_str(), stdout);
            std::fprintf(stderr, "%s: valid\n", validate_path.c_str());
            return 0;
        }
        if (preset_list->parsed()) {
            std::fputs(fedboost::preset_summary().c_str(), stdout);
            return 0;
        }
    } catch (const fedboost::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
