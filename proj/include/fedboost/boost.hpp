#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "data.hpp"
#include "stump.hpp"

// Boosting mathematics: learner confidence weights, staleness decay,
// distribution reweighting, and weighted-vote ensembles.

namespace fedboost {

constexpr double kDefaultEpsFloor = 1e-6;

// AdaBoost confidence alpha = 0.5 * ln((1 - eps) / eps), with eps clamped
// into [eps_floor, 1 - eps_floor] so perfect learners get a finite weight.
inline double learner_weight(double epsilon, double eps_floor = kDefaultEpsFloor) {
    if (!(eps_floor > 0.0 && eps_floor < 0.5))
        throw std::invalid_argument("learner_weight: eps_floor must be in (0, 0.5)");
    if (!(epsilon >= 0.0 && epsilon <= 1.0))
        throw std::invalid_argument("learner_weight: epsilon must be in [0, 1]");
    // Mirror the upper half onto the lower: 1 - epsilon is exact for
    // epsilon >= 0.5 (Sterbenz), which makes the weight exactly antisymmetric
    // around 0.5 and keeps 1 - e below free of cancellation.
    if (epsilon > 0.5) return -learner_weight(1.0 - epsilon, eps_floor);
    const double e = std::max(epsilon, eps_floor);
    return 0.5 * std::log((1.0 - e) / e);
}

// Staleness-decayed effective weight alpha * exp(-lambda * tau).
inline double decayed_weight(double alpha, std::uint64_t tau, double lambda) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("decayed_weight: lambda must be >= 0");
    return alpha * std::exp(-lambda * static_cast<double>(tau));
}

// One weak hypothesis as held in a client buffer: the stump with its clamped
// error, confidence, and provenance. raw_epsilon keeps the unclamped
// training error for traces.
struct BufferedLearner {
    Stump stump;
    double epsilon = 0.5;  // clamped into (0, 1)
    double raw_epsilon = 0.5;
    double alpha = 0.0;  // learner_weight(epsilon)
    int client_id = 0;
    std::uint64_t snapshot_round = 0;  // server aggregation count at last sync
    std::uint64_t local_seq = 0;       // position in the client's training order
};

struct EnsembleMember {
    BufferedLearner learner;
    std::uint64_t tau = 0;           // staleness in server aggregations
    double effective_weight = 0.0;   // alpha * exp(-lambda * tau)
};

// Ordered weighted-vote ensemble; member order is aggregation order, then
// client id, then local sequence — deterministic by construction.
struct Ensemble {
    std::vector<EnsembleMember> members;
    double lambda = 0.0;
};

struct DistributionUpdate {
    DistributionVector dist;
    double z = 0.0;  // the normalization factor
};

// D'(i) = D(i) * exp(-alpha_eff * y_i * h(x_i)) / Z. The largest exponent is
// subtracted before exponentiation so extreme alphas cannot overflow; Z is
// reported on the original scale.
inline DistributionUpdate update_distribution(const DistributionVector& dist, const Stump& stump,
                                              double alpha_eff, const Dataset& dataset) {
    validate_distribution(dist, dataset.size());
    const std::size_t n = dataset.size();

    std::vector<double> exponent(n);
    double max_exp = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double agree =
            static_cast<double>(dataset.samples[i].label * predict(stump, dataset.samples[i].features));
        exponent[i] = -alpha_eff * agree;
        max_exp = std::max(max_exp, exponent[i]);
    }

    DistributionUpdate out;
    out.dist.resize(n);
    double z_shifted = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        out.dist[i] = dist[i] * std::exp(exponent[i] - max_exp);
        z_shifted += out.dist[i];
    }
    if (!(z_shifted > 0.0) || !std::isfinite(z_shifted))
        throw std::runtime_error("update_distribution: normalization factor is degenerate");
    for (double& w : out.dist) w /= z_shifted;
    out.z = z_shifted * std::exp(max_exp);
    return out;
}

// Weighted-vote margin; sign(0) is defined as +1.
inline double ensemble_margin(const Ensemble& ensemble, const std::vector<double>& features) {
    double margin = 0.0;
    for (const EnsembleMember& m : ensemble.members)
        margin += m.effective_weight * static_cast<double>(predict(m.learner.stump, features));
    return margin;
}

inline int ensemble_predict(const Ensemble& ensemble, const std::vector<double>& features) {
    return ensemble_margin(ensemble, features) < 0.0 ? -1 : 1;
}

inline double ensemble_error(const Ensemble& ensemble, const Dataset& dataset) {
    if (dataset.samples.empty()) throw std::invalid_argument("ensemble_error: empty dataset");
    std::size_t wrong = 0;
    for (const Sample& s : dataset.samples)
        if (ensemble_predict(ensemble, s.features) != s.label) ++wrong;
    return static_cast<double>(wrong) / static_cast<double>(dataset.size());
}

// Incrementally maintained per-sample margins over a fixed dataset. Members
// added in ensemble order produce bit-identical margins to ensemble_margin,
// so error() equals ensemble_error without re-scanning the whole ensemble.
class MarginAccumulator {
public:
    explicit MarginAccumulator(const Dataset& dataset)
        : dataset_(&dataset), margins_(dataset.size(), 0.0) {}

    void add(const EnsembleMember& member) {
        for (std::size_t i = 0; i < margins_.size(); ++i)
            margins_[i] += member.effective_weight *
                           static_cast<double>(predict(member.learner.stump,
                                                       dataset_->samples[i].features));
    }

    double error() const {
        std::size_t wrong = 0;
        for (std::size_t i = 0; i < margins_.size(); ++i) {
            const int pred = margins_[i] < 0.0 ? -1 : 1;
            if (pred != dataset_->samples[i].label) ++wrong;
        }
        return static_cast<double>(wrong) / static_cast<double>(margins_.size());
    }

private:
    const Dataset* dataset_;
    std::vector<double> margins_;
};

}  // namespace fedboost
