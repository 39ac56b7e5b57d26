#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rng.hpp"

// Synthetic datasets, non-IID partitioning, and the on-disk CSV format.
//
// CSV schema: header `f0,...,f{d-1},label`, comma separated, no quoting,
// doubles at 17 significant digits (lossless round trip for finite values).

namespace fedboost {

struct Sample {
    std::vector<double> features;
    int label = 1;  // -1 or +1

    bool operator==(const Sample&) const = default;
};

struct Dataset {
    std::size_t dimension = 0;
    std::vector<Sample> samples;  // order is significant: indices are stable ids

    std::size_t size() const noexcept { return samples.size(); }
    bool operator==(const Dataset&) const = default;
};

namespace data {

// Two spherical Gaussian blobs: positives centered at (+1,...,+1), negatives
// at (-1,...,-1), sigma per coordinate. All positive samples first, then all
// negatives; draws come from the `data` stream in that order.
inline Dataset generate_gaussians(std::size_t n, std::size_t dimension, double sigma,
                                  double positive_fraction, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("generate_gaussians: n must be >= 2");
    if (dimension == 0) throw std::invalid_argument("generate_gaussians: dimension must be positive");
    if (!(sigma > 0.0)) throw std::invalid_argument("generate_gaussians: sigma must be positive");
    if (!(positive_fraction > 0.0 && positive_fraction < 1.0))
        throw std::invalid_argument("generate_gaussians: positive_fraction must be in (0,1)");

    auto n_pos = static_cast<std::size_t>(
        std::llround(positive_fraction * static_cast<double>(n)));
    n_pos = std::clamp<std::size_t>(n_pos, 1, n - 1);

    rng::GaussianSource gauss(rng::stream_seed(seed, rng::Stream::data));
    Dataset out;
    out.dimension = dimension;
    out.samples.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int label = i < n_pos ? 1 : -1;
        const double center = label > 0 ? 1.0 : -1.0;
        Sample s;
        s.label = label;
        s.features.reserve(dimension);
        for (std::size_t j = 0; j < dimension; ++j)
            s.features.push_back(center + sigma * gauss.next());
        out.samples.push_back(std::move(s));
    }
    return out;
}

inline Dataset generate_gaussians(std::size_t n, std::size_t dimension, double sigma,
                                  std::uint64_t seed) {
    if (n % 2 != 0) throw std::invalid_argument("generate_gaussians: n must be even");
    return generate_gaussians(n, dimension, sigma, 0.5, seed);
}

// Label-skewed shards: per-label client proportions drawn from a symmetric
// Dirichlet (k gamma draws, normalized; positives first, then negatives),
// then one categorical draw per sample in dataset order. If some shard
// misses a label, the whole assignment is redrawn (up to 8 tries); the last
// attempt is then repaired by moving samples out of the largest shards.
// Shards keep dataset order internally.
inline std::vector<Dataset> partition_dirichlet(const Dataset& dataset, std::size_t clients,
                                                double concentration, std::uint64_t seed) {
    if (clients == 0) throw std::invalid_argument("partition_dirichlet: clients must be >= 1");
    if (!(concentration > 0.0))
        throw std::invalid_argument("partition_dirichlet: concentration must be positive");

    std::size_t n_pos = 0;
    std::size_t n_neg = 0;
    for (const Sample& s : dataset.samples) (s.label > 0 ? n_pos : n_neg)++;
    if (n_pos == 0 || n_neg == 0)
        throw std::invalid_argument("partition_dirichlet: dataset must contain both labels");
    if (clients > std::min(n_pos, n_neg))
        throw std::invalid_argument(
            "partition_dirichlet: more clients than samples of the rarer label");

    rng::GaussianSource src(rng::stream_seed(seed, rng::Stream::partition));
    const std::size_t n = dataset.size();
    std::vector<std::size_t> shard_of(n, 0);

    // counts[shard][label > 0] for the current assignment
    std::vector<std::size_t> count_pos(clients), count_neg(clients);

    auto draw_proportions = [&] {
        std::vector<double> p(clients);
        double sum = 0.0;
        for (std::size_t s = 0; s < clients; ++s) {
            p[s] = rng::sample_gamma(src, concentration);
            sum += p[s];
        }
        for (double& v : p) v /= sum;
        return p;
    };

    auto assign_once = [&] {
        const std::vector<double> p_pos = draw_proportions();
        const std::vector<double> p_neg = draw_proportions();
        std::fill(count_pos.begin(), count_pos.end(), 0);
        std::fill(count_neg.begin(), count_neg.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            const std::vector<double>& p = dataset.samples[i].label > 0 ? p_pos : p_neg;
            const double u = src.uniform_source().next_double();
            double cum = 0.0;
            std::size_t shard = clients - 1;
            for (std::size_t s = 0; s < clients; ++s) {
                cum += p[s];
                if (u < cum) {
                    shard = s;
                    break;
                }
            }
            shard_of[i] = shard;
            (dataset.samples[i].label > 0 ? count_pos : count_neg)[shard]++;
        }
    };

    auto all_covered = [&] {
        for (std::size_t s = 0; s < clients; ++s)
            if (count_pos[s] == 0 || count_neg[s] == 0) return false;
        return true;
    };

    assign_once();
    for (int retry = 1; retry < 8 && !all_covered(); ++retry) assign_once();

    if (!all_covered()) {
        // Greedy repair: fill each deficient (shard, label) slot by moving the
        // highest-index sample of that label out of the biggest donor shard
        // (a donor keeps at least one sample of the label; ties on size go to
        // the lower shard id).
        auto repair_one = [&](std::size_t needy, int label) {
            std::vector<std::size_t>& count = label > 0 ? count_pos : count_neg;
            std::size_t donor = clients;
            std::size_t donor_size = 0;
            for (std::size_t s = 0; s < clients; ++s) {
                if (count[s] < 2) continue;
                const std::size_t total = count_pos[s] + count_neg[s];
                if (donor == clients || total > donor_size) {
                    donor = s;
                    donor_size = total;
                }
            }
            if (donor == clients)
                throw std::runtime_error("partition_dirichlet: shard repair impossible");
            for (std::size_t i = n; i-- > 0;) {
                if (shard_of[i] == donor && dataset.samples[i].label == label) {
                    shard_of[i] = needy;
                    count[donor]--;
                    count[needy]++;
                    return;
                }
            }
            throw std::runtime_error("partition_dirichlet: shard repair impossible");
        };
        for (std::size_t s = 0; s < clients; ++s) {
            while (count_pos[s] == 0) repair_one(s, 1);
            while (count_neg[s] == 0) repair_one(s, -1);
        }
    }

    std::vector<Dataset> shards(clients);
    for (Dataset& d : shards) d.dimension = dataset.dimension;
    for (std::size_t i = 0; i < n; ++i) shards[shard_of[i]].samples.push_back(dataset.samples[i]);
    return shards;
}

// Disjoint server-held validation split: from each label, the first
// floor(fraction * label_count) samples (in dataset order) become validation
// data; the remainder is the training pool handed to the partitioner.
struct ValidationSplit {
    Dataset train;
    Dataset validation;
};

inline ValidationSplit split_validation(const Dataset& dataset, double fraction) {
    if (!(fraction >= 0.0 && fraction < 1.0))
        throw std::invalid_argument("split_validation: fraction must be in [0,1)");
    std::size_t n_pos = 0;
    std::size_t n_neg = 0;
    for (const Sample& s : dataset.samples) (s.label > 0 ? n_pos : n_neg)++;
    const auto take_pos =
        static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n_pos)));
    const auto take_neg =
        static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n_neg)));

    ValidationSplit out;
    out.train.dimension = out.validation.dimension = dataset.dimension;
    std::size_t seen_pos = 0;
    std::size_t seen_neg = 0;
    for (const Sample& s : dataset.samples) {
        std::size_t& seen = s.label > 0 ? seen_pos : seen_neg;
        const std::size_t take = s.label > 0 ? take_pos : take_neg;
        (seen < take ? out.validation : out.train).samples.push_back(s);
        ++seen;
    }
    return out;
}

inline void write_csv(const Dataset& dataset, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("write_csv: cannot open " + path);
    for (std::size_t j = 0; j < dataset.dimension; ++j) std::fprintf(f, "f%zu,", j);
    std::fputs("label\n", f);
    char buf[64];
    for (const Sample& s : dataset.samples) {
        for (double v : s.features) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            std::fputs(buf, f);
            std::fputc(',', f);
        }
        std::fprintf(f, "%d\n", s.label);
    }
    if (std::fclose(f) != 0) throw std::runtime_error("write_csv: write failed for " + path);
}

namespace detail {

inline std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

[[noreturn]] inline void parse_fail(const std::string& path, std::size_t line_no,
                                    const std::string& what) {
    throw std::runtime_error("read_csv: " + path + " line " + std::to_string(line_no) + ": " +
                             what);
}

}  // namespace detail

inline Dataset read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_csv: cannot open " + path);

    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&](std::string& out) {
        if (!std::getline(in, out)) return false;
        if (!out.empty() && out.back() == '\r') out.pop_back();
        ++line_no;
        return true;
    };

    if (!next_line(line) || line.empty()) throw std::runtime_error("read_csv: " + path + ": no samples");

    const std::vector<std::string> header = detail::split_fields(line);
    if (header.size() < 2 || header.back() != "label")
        detail::parse_fail(path, line_no, "expected header f0,...,label");
    const std::size_t dim = header.size() - 1;
    for (std::size_t j = 0; j < dim; ++j)
        if (header[j] != "f" + std::to_string(j))
            detail::parse_fail(path, line_no, "bad header column '" + header[j] + "'");

    Dataset out;
    out.dimension = dim;
    while (next_line(line)) {
        if (line.empty()) {
            if (in.eof()) break;  // tolerate one trailing newline
            detail::parse_fail(path, line_no, "empty row");
        }
        const std::vector<std::string> fields = detail::split_fields(line);
        if (fields.size() != dim + 1)
            detail::parse_fail(path, line_no,
                               "expected " + std::to_string(dim + 1) + " columns, got " +
                                   std::to_string(fields.size()));
        Sample s;
        s.features.reserve(dim);
        for (std::size_t j = 0; j < dim; ++j) {
            const std::string& tok = fields[j];
            char* end = nullptr;
            const double v = std::strtod(tok.c_str(), &end);
            if (tok.empty() || end != tok.c_str() + tok.size() || !std::isfinite(v))
                detail::parse_fail(path, line_no, "bad number '" + tok + "'");
            s.features.push_back(v);
        }
        const std::string& lab = fields[dim];
        if (lab == "1" || lab == "+1")
            s.label = 1;
        else if (lab == "-1")
            s.label = -1;
        else
            detail::parse_fail(path, line_no, "label must be -1 or +1, got '" + lab + "'");
        out.samples.push_back(std::move(s));
    }
    if (out.samples.empty()) throw std::runtime_error("read_csv: " + path + ": no samples");
    return out;
}

}  // namespace data
}  // namespace fedboost
