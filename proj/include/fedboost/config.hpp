#pragma once

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "metrics.hpp"
#include "scheduler.hpp"

// Experiment configuration: a strict INI/TOML-style key-value file with
// typed keys, full default fill, unknown-key rejection, and the five named
// domain presets. The same key registry drives parsing, validation
// messages, --help text, and the effective-config dump written next to
// results.

namespace fedboost {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Mode { synchronous, async_fixed, async_adaptive };

inline const char* mode_name(Mode mode) {
    switch (mode) {
        case Mode::synchronous: return "synchronous";
        case Mode::async_fixed: return "async_fixed";
        case Mode::async_adaptive: return "async_adaptive";
    }
    return "?";
}

inline Mode parse_mode(const std::string& name) {
    if (name == "synchronous") return Mode::synchronous;
    if (name == "async_fixed") return Mode::async_fixed;
    if (name == "async_adaptive") return Mode::async_adaptive;
    throw ConfigError("unknown mode '" + name +
                      "' (expected synchronous, async_fixed, or async_adaptive)");
}

struct ExperimentConfig {
    // [experiment]
    Mode mode = Mode::async_adaptive;
    std::uint64_t seed = 42;  // master seed; stage seeds default to it

    // [data]
    std::size_t samples = 2000;
    std::size_t dimension = 2;
    double sigma = 0.8;
    double positive_fraction = 0.5;
    std::optional<std::uint64_t> data_seed;

    // [partition]
    std::size_t clients = 5;
    double concentration = 0.5;
    std::optional<std::uint64_t> partition_seed;

    // [validation]
    double validation_fraction = 0.2;

    // [clients] heterogeneity ranges, drawn per client at setup
    double compute_time_min = 0.5;
    double compute_time_max = 2.0;
    double link_latency_min = 0.1;
    double link_latency_max = 1.0;
    double dropout_min = 0.1;
    double dropout_max = 0.1;
    std::optional<std::uint64_t> heterogeneity_seed;

    // [algorithm]
    double lambda = 0.1;
    double eps_floor = 1e-6;
    int initial_interval = 1;  // also the constant interval in async_fixed

    // [scheduler]
    SchedulerParams scheduler;

    // [stop]
    std::int64_t max_aggregations = 400;
    double max_virtual_time = 1e6;
    bool stop_on_convergence = true;

    // [convergence]
    ConvergenceParams convergence;

    // Test hook, not a config-file key: snapshot every accepted client
    // distribution into the trace.
    bool record_distributions = false;

    std::uint64_t effective_data_seed() const { return data_seed.value_or(seed); }
    std::uint64_t effective_partition_seed() const { return partition_seed.value_or(seed); }
    std::uint64_t effective_heterogeneity_seed() const {
        return heterogeneity_seed.value_or(seed);
    }

    void validate() const;
};

namespace detail {

struct TomlValue {
    enum class Kind { integer, real, boolean, string };
    Kind kind = Kind::integer;
    std::int64_t i = 0;
    double d = 0.0;
    bool b = false;
    std::string s;
};

inline std::int64_t as_integer(const TomlValue& v, const std::string& where) {
    if (v.kind != TomlValue::Kind::integer)
        throw ConfigError(where + ": expected an integer");
    return v.i;
}

inline std::uint64_t as_unsigned(const TomlValue& v, const std::string& where) {
    const std::int64_t i = as_integer(v, where);
    if (i < 0) throw ConfigError(where + ": expected a nonnegative integer");
    return static_cast<std::uint64_t>(i);
}

inline double as_real(const TomlValue& v, const std::string& where) {
    if (v.kind == TomlValue::Kind::integer) return static_cast<double>(v.i);
    if (v.kind != TomlValue::Kind::real) throw ConfigError(where + ": expected a number");
    return v.d;
}

inline bool as_bool(const TomlValue& v, const std::string& where) {
    if (v.kind != TomlValue::Kind::boolean)
        throw ConfigError(where + ": expected true or false");
    return v.b;
}

inline std::string as_string(const TomlValue& v, const std::string& where) {
    if (v.kind != TomlValue::Kind::string)
        throw ConfigError(where + ": expected a quoted string");
    return v.s;
}

}  // namespace detail

// One registry row per config key: how to parse it into the config, how to
// render the effective value back out, and the doc line shown by --help.
struct ConfigKeySpec {
    const char* section;
    const char* key;
    const char* doc;
    std::function<void(ExperimentConfig&, const detail::TomlValue&, const std::string&)> apply;
    std::function<std::string(const ExperimentConfig&)> render;
};

inline const std::vector<ConfigKeySpec>& config_schema() {
    using detail::TomlValue;
    using detail::as_bool;
    using detail::as_integer;
    using detail::as_real;
    using detail::as_string;
    using detail::as_unsigned;
    auto u64 = [](std::uint64_t v) { return std::to_string(v); };
    static const std::vector<ConfigKeySpec> schema = {
        {"experiment", "mode",
         "string: synchronous | async_fixed | async_adaptive (default \"async_adaptive\") — candidate training mode; non-synchronous runs also execute the synchronous baseline for the comparison report",
         [](ExperimentConfig& c, const TomlValue& v, const std::string& w) {
             c.mode = parse_mode(as_string(v, w));
         },
         [](const ExperimentConfig& c) { return std::string("\"") + mode_name(c.mode) + "\""; }},
        {"experiment", "seed",
         "integer >= 0 (default 42) — master seed; data/partition/clients seeds default to it",
         [](ExperimentConfig& c, const TomlValue& v, const std::string& w) {
             c.seed = as_unsigned(v, w);
         },
         [u64](const ExperimentConfig& c) { return u64(c.seed); }},

        {"data", "samples", "integer >= 2 (default 2000) — generated dataset size",
         [](ExperimentConfig& c, const TomlValue& v, const std::string& w) {
             c.samples = static_cast<std::size_t>(as_unsigned(v, w));
         },
         [u64](const ExperimentConfig& c) { return u64(c.samples); }},
        {"data", "dimension", "integer >= 1 (default 2) — feature dimension",
         [](ExperimentConfig& c, const TomlValue& v, const std::string& w) {
             c.dimension = static_cast<std::size_t>(as_unsigned(v, w));
         },
         [u64](const ExperimentConfig& c) { return u64(c.dimension); }},
        {"data", "sigma", "real > 0 (default 0.8) — per-coordinate Gaussian spread",
         [](ExperimentConfig& c, const TomlValue& v, const std::string& w) {
             c.sigma = as_real(v, w);
         },
         [](const ExperimentConfig& c) { return detail::fmt_double(c.sigma); }},
        {"data", "positive_fraction",
         "real in (0,1) (default 0.5) — class balance; 0.2 means a 1:4 positive:negative ratio",
         [](ExperimentConfig& c, const TomlValue& v, const std::string& w) {
             c.positive_fraction = as_real(v, w);
         },
         [](const ExperimentConfig& c) { return detail::fmt_double(c.positive_fraction); }},
        {"data", "seed", "integer >= 0 (default: experiment.seed) — dataset generation seed",
         [](ExperimentConfig& c, const TomlValue& v, const std::string& w) {
             c.data_seed = as_unsigned(v, w);
         },
         [u64](const ExperimentConfig& c) { return u64(c.effective_data_seed()); }},

        {"partition", "clients", "integer >= 1 (default 5) — number of federated clients",
         [](ExperimentConfig& c, const TomlValue& v, const std::string& w) {
             c.clients = static_cast<std::size_t>(as_unsigned(v, w));
         },
         [u64](const ExperimentConfig& c) { return u64(c.clients); }},
        {"partition", "concentration",
         "real > 0 (default 0.5) — Dirichlet concentration; smaller = more label skew",
         [](ExperimentConfig& c, const TomlValue& v, const std::string& w) {
             c.concentration = as_real(v, w);
         },
         [](const ExperimentConfig& c) { return detail::fmt_double(c.concentration); }},
        {"partition", "seed", "integer >= 0 (default: experiment.seed) — shard assignment seed",
         [](ExperimentConfig& c, const TomlValue& v, const std::string& w) {
             c.partition_seed = as_unsigned(v, w);
         },
         [u64](const ExperimentConfig& c) { return u64(c.effective_partition_seed()); }},

        {"validation", "fraction",
         "real in (0,1) (default 0.2) — share of each label held out as the server validation set; must keep at least one sample of each label",
         [](ExperimentConfig& c, const TomlValue& v, const std::string& w) {
             c.validation_fraction = as_real(v, w);
         },
         [](const ExperimentConfig& c) { return detail::fmt_double(c.validation_fraction); }},

        {"clients", "compute_time_min",
         "real > 0 (default 0.5) — fastest per-round compute time, seconds",
         [](ExperimentConfig& c, const TomlValue& v, const std::string& w) {
             c.compute_time_min = as_real(v, w);
         },
         [](const ExperimentConfig& c) { return detail::fmt_double(c.compute_time_min); }},
        {"clients", "compute_time_max",
         "real >= compute_time_min (default 2.0) — slowest per-round compute time, seconds",
         [](ExperimentConfig& c, const TomlValue& v, const std::string& w) {
             c.compute_time_max = as_real(v, w);
         },
         [](const ExperimentConfig& c) { return detail::fmt_double(c.compute_time_max); }},
        {"clients", "link_latency_min",
         "real >= 0 (default 0.1) — lowest one-way link latency, seconds",
         [](ExperimentConfig& c, const TomlValue& v, const std::string& w) {
             c.link_latency_min = as_real(v, w);
         },
         [](const ExperimentConfig& c) { return detail::fmt_double(c.link_latency_min); }},
        {"clients", "link_latency_max",
         "real >= link_latency_min (default 1.0) — highest one-way link latency, seconds",
         [](ExperimentConfig& c, const TomlValue& v, const std::string& w) {
             c.link_latency_max = as_real(v, w);
         },
         [](const ExperimentConfig& c) { return detail::fmt_double(c.link_latency_max); }},
        {"clients", "dropout_min", "real in [0,1) (default 0.1) — lowest per-round dropout probability",
         [](ExperimentConfig& c, const TomlValue& v, const std::string& w) {
             c.dropout_min = as_real(v, w);
         },
         [](const ExperimentConfig& c) { return detail::fmt_double(c.dropout_min); }},
        {"clients", "dropout_max", "real in [0,1) (default 0.1) — highest per-round dropout probability",
         [](ExperimentConfig& c, const TomlValue& v, const std::string& w) {
             c.dropout_max = as_real(v, w);
         },
         [](const ExperimentConfig& c) { return detail::fmt_double(c.dropout_max); }},
        {"clients", "seed",
         "integer >= 0 (default: experiment.seed) — heterogeneity and dropout seed",
         [](ExperimentConfig& c, const TomlValue& v, const std::string& w) {
             c.heterogeneity_seed = as_unsigned(v, w);
         },
         [u64](const ExperimentConfig& c) { return u64(c.effective_heterogeneity_seed()); }},

        {"algorithm", "lambda",
         "real >= 0 (default 0.1) — staleness decay constant for effective weights",
         [](ExperimentConfig& c, const TomlValue& v, const std::string& w) {
             c.lambda = as_real(v, w);
         },
         [](const ExperimentConfig& c) { return detail::fmt_double(c.lambda); }},
        {"algorithm", "eps_floor",
         "real in (0,0.5) (default 1e-06) — error clamp keeping learner weights finite",
         [](ExperimentConfig& c, const TomlValue& v, const std::string& w) {
             c.eps_floor = as_real(v, w);
         },
         [](const ExperimentConfig& c) { return detail::fmt_double(c.eps_floor); }},
        {"algorithm", "initial_interval",
         "integer >= 1 (default 1) — starting interval; the constant interval in async_fixed",
         [](ExperimentConfig& c, const TomlValue& v, const std::string& w) {
             c.initial_interval = static_cast<int>(as_unsigned(v, w));
         },
         [](const ExperimentConfig& c) { return std::to_string(c.initial_interval); }},

        {"scheduler", "theta1",
         "real (default 0.0) — grow the interval when the error delta is below this",
         [](ExperimentConfig& c, const TomlValue& v, const std::string& w) {
             c.scheduler.theta1 = as_real(v, w);
         },
         [](const ExperimentConfig& c) { return detail::fmt_double(c.scheduler.theta1); }},
        {"scheduler", "theta2",
         "real >= theta1 (default 0.005) — shrink the interval when the error delta exceeds this",
         [](ExperimentConfig& c, const TomlValue& v, const std::string& w) {
             c.scheduler.theta2 = as_real(v, w);
         },
         [](const ExperimentConfig& c) { return detail::fmt_double(c.scheduler.theta2); }},
        {"scheduler", "step_up", "integer >= 1 (default 1) — interval growth step",
         [](ExperimentConfig& c, const TomlValue& v, const std::string& w) {
             c.scheduler.step_up = static_cast<int>(as_unsigned(v, w));
         },
         [](const ExperimentConfig& c) { return std::to_string(c.scheduler.step_up); }},
        {"scheduler", "step_down", "integer >= 1 (default 2) — interval shrink step",
         [](ExperimentConfig& c, const TomlValue& v, const std::string& w) {
             c.scheduler.step_down = static_cast<int>(as_unsigned(v, w));
         },
         [](const ExperimentConfig& c) { return std::to_string(c.scheduler.step_down); }},
        {"scheduler", "interval_min", "integer >= 1 (default 1) — lower interval bound",
         [](ExperimentConfig& c, const TomlValue& v, const std::string& w) {
             c.scheduler.i_min = static_cast<int>(as_unsigned(v, w));
         },
         [](const ExperimentConfig& c) { return std::to_string(c.scheduler.i_min); }},
        {"scheduler", "interval_max", "integer >= interval_min (default 16) — upper interval bound",
         [](ExperimentConfig& c, const TomlValue& v, const std::string& w) {
             c.scheduler.i_max = static_cast<int>(as_unsigned(v, w));
         },
         [](const ExperimentConfig& c) { return std::to_string(c.scheduler.i_max); }},

        {"stop", "max_aggregations",
         "integer >= 0 (default 400) — hard cap on server aggregations",
         [](ExperimentConfig& c, const TomlValue& v, const std::string& w) {
             c.max_aggregations = as_integer(v, w);
             if (c.max_aggregations < 0) throw ConfigError(w + ": expected a nonnegative integer");
         },
         [](const ExperimentConfig& c) { return std::to_string(c.max_aggregations); }},
        {"stop", "max_virtual_time",
         "real > 0 (default 1e+06) — hard cap on simulated seconds",
         [](ExperimentConfig& c, const TomlValue& v, const std::string& w) {
             c.max_virtual_time = as_real(v, w);
         },
         [](const ExperimentConfig& c) { return detail::fmt_double(c.max_virtual_time); }},
        {"stop", "on_convergence",
         "bool (default true) — stop as soon as the convergence criterion is met",
         [](ExperimentConfig& c, const TomlValue& v, const std::string& w) {
             c.stop_on_convergence = as_bool(v, w);
         },
         [](const ExperimentConfig& c) { return c.stop_on_convergence ? "true" : "false"; }},

        {"convergence", "target_error",
         "real in [0,1] (default 0.1) — validation error that counts as converged",
         [](ExperimentConfig& c, const TomlValue& v, const std::string& w) {
             c.convergence.target_error = as_real(v, w);
         },
         [](const ExperimentConfig& c) { return detail::fmt_double(c.convergence.target_error); }},
        {"convergence", "plateau_tol",
         "real > 0 (default 0.0001) — error-delta size treated as flat",
         [](ExperimentConfig& c, const TomlValue& v, const std::string& w) {
             c.convergence.plateau_tol = as_real(v, w);
         },
         [](const ExperimentConfig& c) { return detail::fmt_double(c.convergence.plateau_tol); }},
        {"convergence", "window",
         "integer >= 1 (default 5) — consecutive flat records that count as a plateau",
         [](ExperimentConfig& c, const TomlValue& v, const std::string& w) {
             c.convergence.window = static_cast<int>(as_unsigned(v, w));
         },
         [](const ExperimentConfig& c) { return std::to_string(c.convergence.window); }},
    };
    return schema;
}

inline void ExperimentConfig::validate() const {
    auto fail = [](const std::string& key, const std::string& why) {
        throw ConfigError(key + ": " + why);
    };
    if (samples < 2) fail("data.samples", "must be >= 2");
    if (dimension < 1) fail("data.dimension", "must be >= 1");
    if (!(sigma > 0.0)) fail("data.sigma", "must be positive");
    if (!(positive_fraction > 0.0 && positive_fraction < 1.0))
        fail("data.positive_fraction", "must be strictly inside (0, 1)");
    if (clients < 1) fail("partition.clients", "must be >= 1");
    if (!(concentration > 0.0)) fail("partition.concentration", "must be positive");
    if (!(validation_fraction >= 0.0 && validation_fraction < 1.0))
        fail("validation.fraction", "must be in [0, 1)");

    // Enough training data of each label for every shard to be repairable.
    auto n_pos = static_cast<std::size_t>(
        std::llround(positive_fraction * static_cast<double>(samples)));
    n_pos = std::clamp<std::size_t>(n_pos, 1, samples - 1);
    const std::size_t n_neg = samples - n_pos;
    const auto held_pos =
        static_cast<std::size_t>(std::floor(validation_fraction * static_cast<double>(n_pos)));
    const auto held_neg =
        static_cast<std::size_t>(std::floor(validation_fraction * static_cast<double>(n_neg)));
    if (clients > std::min(n_pos - held_pos, n_neg - held_neg))
        fail("partition.clients",
             "exceeds the post-validation training samples of the rarer label");
    if (held_pos == 0 || held_neg == 0)
        fail("validation.fraction", "holds out zero samples of one label");

    if (!(compute_time_min > 0.0)) fail("clients.compute_time_min", "must be positive");
    if (compute_time_max < compute_time_min)
        fail("clients.compute_time_max", "must be >= compute_time_min");
    if (link_latency_min < 0.0) fail("clients.link_latency_min", "must be >= 0");
    if (link_latency_max < link_latency_min)
        fail("clients.link_latency_max", "must be >= link_latency_min");
    if (!(dropout_min >= 0.0 && dropout_min < 1.0)) fail("clients.dropout_min", "must be in [0, 1)");
    if (!(dropout_max >= dropout_min && dropout_max < 1.0))
        fail("clients.dropout_max", "must be in [dropout_min, 1)");

    if (!(lambda >= 0.0)) fail("algorithm.lambda", "must be >= 0");
    if (!(eps_floor > 0.0 && eps_floor < 0.5)) fail("algorithm.eps_floor", "must be in (0, 0.5)");
    if (initial_interval < 1) fail("algorithm.initial_interval", "must be >= 1");

    if (!(scheduler.theta1 <= scheduler.theta2))
        fail("scheduler.theta1", "must be <= scheduler.theta2");
    if (scheduler.step_up < 1) fail("scheduler.step_up", "must be >= 1");
    if (scheduler.step_down < 1) fail("scheduler.step_down", "must be >= 1");
    if (scheduler.i_min < 1 || scheduler.i_min > scheduler.i_max)
        fail("scheduler.interval_min", "need 1 <= interval_min <= interval_max");
    if (mode == Mode::async_adaptive &&
        (initial_interval < scheduler.i_min || initial_interval > scheduler.i_max))
        fail("algorithm.initial_interval", "must lie within [interval_min, interval_max]");

    if (!(max_virtual_time > 0.0)) fail("stop.max_virtual_time", "must be positive");
    if (!(convergence.target_error >= 0.0 && convergence.target_error <= 1.0))
        fail("convergence.target_error", "must be in [0, 1]");
    if (!(convergence.plateau_tol > 0.0)) fail("convergence.plateau_tol", "must be positive");
    if (convergence.window < 1) fail("convergence.window", "must be >= 1");
}

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return s.substr(begin, end - begin);
}

inline TomlValue parse_value(const std::string& raw, const std::string& where) {
    TomlValue v;
    if (raw.empty()) throw ConfigError(where + ": missing value");
    if (raw.front() == '"') {
        if (raw.size() < 2 || raw.back() != '"' ||
            raw.find('"', 1) != raw.size() - 1)
            throw ConfigError(where + ": malformed string literal");
        v.kind = TomlValue::Kind::string;
        v.s = raw.substr(1, raw.size() - 2);
        return v;
    }
    if (raw == "true" || raw == "false") {
        v.kind = TomlValue::Kind::boolean;
        v.b = raw == "true";
        return v;
    }
    const bool looks_integral = raw.find_first_of(".eE") == std::string::npos;
    const char* begin = raw.c_str();
    char* end = nullptr;
    if (looks_integral) {
        errno = 0;
        const long long i = std::strtoll(begin, &end, 10);
        if (end == begin + raw.size() && errno == 0) {
            v.kind = TomlValue::Kind::integer;
            v.i = i;
            return v;
        }
    }
    const double d = std::strtod(begin, &end);
    if (end != begin + raw.size() || !std::isfinite(d))
        throw ConfigError(where + ": cannot parse value '" + raw + "'");
    v.kind = TomlValue::Kind::real;
    v.d = d;
    return v;
}

// Strips a trailing comment (a '#' outside any string literal).
inline std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_string = !in_string;
        if (line[i] == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

}  // namespace detail

// Parses and fully validates a config file on top of the built-in defaults.
inline ExperimentConfig parse_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path);

    ExperimentConfig config;
    std::vector<bool> seen(config_schema().size(), false);
    std::string section;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string text = detail::trim(detail::strip_comment(line));
        if (text.empty()) continue;
        const std::string where = path + " line " + std::to_string(line_no);

        if (text.front() == '[') {
            if (text.back() != ']') throw ConfigError(where + ": malformed section header");
            section = detail::trim(text.substr(1, text.size() - 2));
            bool known = false;
            for (const ConfigKeySpec& spec : config_schema())
                known = known || section == spec.section;
            if (!known) throw ConfigError(where + ": unknown section [" + section + "]");
            continue;
        }

        const std::size_t eq = text.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where + ": expected 'key = value' or '[section]'");
        const std::string key = detail::trim(text.substr(0, eq));
        const std::string raw_value = detail::trim(text.substr(eq + 1));
        if (section.empty())
            throw ConfigError(where + ": key '" + key + "' appears before any [section]");
        if (key.empty()) throw ConfigError(where + ": empty key");

        const std::vector<ConfigKeySpec>& schema = config_schema();
        std::size_t idx = schema.size();
        for (std::size_t k = 0; k < schema.size(); ++k) {
            if (section == schema[k].section && key == schema[k].key) {
                idx = k;
                break;
            }
        }
        if (idx == schema.size())
            throw ConfigError(where + ": unknown key " + section + "." + key);
        if (seen[idx])
            throw ConfigError(where + ": duplicate key " + section + "." + key);
        seen[idx] = true;

        const std::string key_where = where + " (" + section + "." + key + ")";
        schema[idx].apply(config, detail::parse_value(raw_value, key_where), key_where);
    }
    config.validate();
    return config;
}

// Effective configuration as a parseable file, every key explicit.
inline std::string render_config(const ExperimentConfig& config) {
    std::string out;
    std::string section;
    for (const ConfigKeySpec& spec : config_schema()) {
        if (section != spec.section) {
            if (!out.empty()) out += '\n';
            section = spec.section;
            out += '[';
            out += section;
            out += "]\n";
        }
        out += spec.key;
        out += " = ";
        out += spec.render(config);
        out += '\n';
    }
    return out;
}

// ---- Domain presets -------------------------------------------------------
//
// Each preset is a qualitative stressor profile, not a reproduction of any
// real deployment: numbers are artifact choices.

inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {"edge_vision", "blockchain", "mobile", "iot",
                                                   "healthcare"};
    return names;
}

inline ExperimentConfig preset(const std::string& name) {
    ExperimentConfig c;  // defaults, async_adaptive
    if (name == "edge_vision") {
        // Moderate link latency, moderate dropout, a small fleet of cameras.
        c.clients = 8;
        c.link_latency_min = 0.1;
        c.link_latency_max = 0.5;
        c.dropout_min = 0.10;
        c.dropout_max = 0.20;
    } else if (name == "blockchain") {
        // Consensus-dominated links: one-way latency 10x edge_vision. Harder
        // task (wider clusters, balanced shards) so runs last long enough for
        // the upload economics of slow links to matter.
        c.clients = 5;
        c.samples = 3000;
        c.sigma = 1.0;
        c.concentration = 1.0;
        c.link_latency_min = 1.0;
        c.link_latency_max = 5.0;
        c.dropout_min = 0.05;
        c.dropout_max = 0.05;
    } else if (name == "mobile") {
        // Many personal devices, frequent dropouts, quick links.
        c.clients = 20;
        c.samples = 4000;
        c.compute_time_min = 0.3;
        c.compute_time_max = 1.5;
        c.link_latency_min = 0.05;
        c.link_latency_max = 0.30;
        c.dropout_min = 0.25;
        c.dropout_max = 0.40;
    } else if (name == "iot") {
        // Small shards and intermittent participation (wide dropout spread).
        c.clients = 16;
        c.samples = 1600;
        c.compute_time_min = 0.2;
        c.compute_time_max = 1.0;
        c.link_latency_min = 0.05;
        c.link_latency_max = 0.40;
        c.dropout_min = 0.10;
        c.dropout_max = 0.50;
    } else if (name == "healthcare") {
        // Few institutions, large shards, 1:4 label imbalance.
        c.clients = 4;
        c.samples = 4000;
        c.positive_fraction = 0.2;
        c.concentration = 1.0;
        c.link_latency_min = 0.1;
        c.link_latency_max = 0.3;
        c.dropout_min = 0.02;
        c.dropout_max = 0.05;
    } else {
        std::string valid;
        for (const std::string& n : preset_names()) valid += (valid.empty() ? "" : ", ") + n;
        throw ConfigError("unknown preset '" + name + "' (valid: " + valid + ")");
    }
    c.validate();
    return c;
}

inline std::string preset_summary() {
    auto fmt_range = [](double lo, double hi) {
        return detail::fmt_fixed(lo, 2) + "-" + detail::fmt_fixed(hi, 2);
    };
    std::string out;
    char buf[200];
    std::snprintf(buf, sizeof buf, "%-12s %7s %8s %9s %13s %11s %9s\n", "preset", "clients",
                  "samples", "pos_frac", "link_lat_s", "dropout", "lambda");
    out += buf;
    for (const std::string& name : preset_names()) {
        const ExperimentConfig c = preset(name);
        std::snprintf(buf, sizeof buf, "%-12s %7zu %8zu %9s %13s %11s %9s\n", name.c_str(),
                      c.clients, c.samples, detail::fmt_fixed(c.positive_fraction, 2).c_str(),
                      fmt_range(c.link_latency_min, c.link_latency_max).c_str(),
                      fmt_range(c.dropout_min, c.dropout_max).c_str(),
                      detail::fmt_fixed(c.lambda, 2).c_str());
        out += buf;
    }
    return out;
}

}  // namespace fedboost
