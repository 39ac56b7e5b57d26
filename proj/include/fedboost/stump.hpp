#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "data.hpp"

// Decision stumps: the weak-learner family. A stump predicts `polarity` when
// the selected feature is strictly greater than the threshold, else
// `-polarity`.

namespace fedboost {

struct Stump {
    std::size_t feature_index = 0;
    double threshold = 0.0;
    int polarity = 1;  // -1 or +1

    bool operator==(const Stump&) const = default;
};

// Per-sample weights D(i); nonnegative, summing to 1 within 1e-9.
using DistributionVector = std::vector<double>;

inline DistributionVector uniform_distribution(std::size_t n) {
    if (n == 0) throw std::invalid_argument("uniform_distribution: n must be positive");
    return DistributionVector(n, 1.0 / static_cast<double>(n));
}

inline void validate_distribution(const DistributionVector& dist, std::size_t n) {
    if (dist.size() != n)
        throw std::invalid_argument("distribution length does not match dataset size");
    double sum = 0.0;
    for (double w : dist) {
        if (!(w >= 0.0)) throw std::invalid_argument("distribution weight is negative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("distribution does not sum to 1");
}

inline int predict(const Stump& stump, const std::vector<double>& features) {
    if (stump.feature_index >= features.size())
        throw std::invalid_argument("predict: feature dimension mismatch");
    return features[stump.feature_index] > stump.threshold ? stump.polarity : -stump.polarity;
}

inline double weighted_error(const Stump& stump, const Dataset& dataset,
                             const DistributionVector& dist) {
    validate_distribution(dist, dataset.size());
    double err = 0.0;
    for (std::size_t i = 0; i < dataset.size(); ++i)
        if (predict(stump, dataset.samples[i].features) != dataset.samples[i].label)
            err += dist[i];
    return err;
}

struct StumpFit {
    Stump stump;
    double error = 0.0;
};

// Exhaustive search over the canonical candidate set: for every feature, the
// midpoints between consecutive distinct sorted values plus one sentinel
// below the minimum and one above the maximum (so the two constant
// classifiers are always candidates), for both polarities. Ties break by
// (lower feature index, lower threshold, polarity +1 first).
//
// Candidate errors are accumulated sample-by-sample in index order — the
// same summation order as weighted_error — so the returned error is
// bit-identical to re-evaluating the winning stump.
inline StumpFit train_stump(const Dataset& dataset, const DistributionVector& dist) {
    if (dataset.samples.empty()) throw std::invalid_argument("train_stump: empty dataset");
    validate_distribution(dist, dataset.size());

    const std::size_t n = dataset.size();
    StumpFit best{Stump{}, std::numeric_limits<double>::infinity()};
    std::vector<double> distinct;
    distinct.reserve(n);
    std::vector<double> thresholds;
    thresholds.reserve(n + 1);

    for (std::size_t j = 0; j < dataset.dimension; ++j) {
        distinct.clear();
        for (const Sample& s : dataset.samples) distinct.push_back(s.features[j]);
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

        thresholds.clear();
        thresholds.push_back(distinct.front() - 1.0);
        for (std::size_t v = 1; v < distinct.size(); ++v)
            thresholds.push_back(std::midpoint(distinct[v - 1], distinct[v]));
        thresholds.push_back(distinct.back() + 1.0);

        for (double t : thresholds) {
            double err_pos = 0.0;  // polarity +1
            double err_neg = 0.0;  // polarity -1
            for (std::size_t i = 0; i < n; ++i) {
                const bool above = dataset.samples[i].features[j] > t;
                const bool label_pos = dataset.samples[i].label > 0;
                if (above == label_pos)
                    err_neg += dist[i];  // polarity -1 predicts the wrong sign here
                else
                    err_pos += dist[i];
            }
            if (err_pos < best.error) best = {{j, t, 1}, err_pos};
            if (err_neg < best.error) best = {{j, t, -1}, err_neg};
        }
    }
    return best;
}

}  // namespace fedboost
