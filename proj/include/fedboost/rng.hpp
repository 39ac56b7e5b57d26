#pragma once

#include <cmath>
#include <cstdint>

// Deterministic random number generation for the whole toolkit.
//
// Everything below is specified tightly enough that an independent
// implementation can reproduce the byte-identical draw sequence:
//
//   * Generator: SplitMix64 (Steele/Lea/Flood). state += 0x9e3779b97f4a7c15;
//     output is the xor-shift/multiply finalizer of the new state.
//   * Uniform doubles in [0,1): top 53 bits of one output, (x >> 11) * 2^-53.
//   * Normals: Box-Muller on a pair of uniforms, u1 mapped into (0,1] as
//     ((x >> 11) + 1) * 2^-53. The cos branch is returned first, the sin
//     branch is cached and returned on the next call.
//   * Gamma(shape, 1): Marsaglia-Tsang squeeze (rejection; consumes a
//     variable number of normal/uniform draws). shape < 1 uses the
//     boost-by-one identity G(a) = G(a+1) * U^(1/a).
//   * Stream discipline: every purpose draws from its own stream. A stream
//     seed is derived as sm(base_seed ^ sm(stream_id + 1)) where sm(x) is
//     one SplitMix64 step applied to state x. Purpose ids: data=0,
//     partition=1, latency=2, dropout=3. Per-client substreams derive a
//     second time with the client id.

namespace fedboost::rng {

class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    constexpr std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0,1), 53-bit resolution.
    double next_double() noexcept {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // Uniform in [lo, hi).
    double next_in(double lo, double hi) noexcept {
        return lo + next_double() * (hi - lo);
    }

private:
    std::uint64_t state_;
};

enum class Stream : std::uint64_t {
    data = 0,
    partition = 1,
    latency = 2,
    dropout = 3,
};

inline constexpr std::uint64_t mix_step(std::uint64_t x) noexcept {
    return SplitMix64(x).next();
}

inline constexpr std::uint64_t stream_seed(std::uint64_t base_seed, Stream stream) noexcept {
    return mix_step(base_seed ^ mix_step(static_cast<std::uint64_t>(stream) + 1));
}

// Per-client substream of a purpose stream.
inline constexpr std::uint64_t substream_seed(std::uint64_t base_seed, Stream stream,
                                              std::uint64_t index) noexcept {
    return mix_step(stream_seed(base_seed, stream) ^ mix_step(index + 1));
}

// Standard normal source. Box-Muller, pair-cached across calls.
class GaussianSource {
public:
    explicit GaussianSource(std::uint64_t seed) noexcept : rng_(seed) {}

    double next() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = static_cast<double>((rng_.next() >> 11) + 1) * 0x1.0p-53;  // (0,1]
        const double u2 = rng_.next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    SplitMix64& uniform_source() noexcept { return rng_; }

private:
    SplitMix64 rng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Gamma(shape, 1) via Marsaglia-Tsang. Draws normals and uniforms from the
// same underlying stream as `gauss`.
inline double sample_gamma(GaussianSource& gauss, double shape) {
    if (shape < 1.0) {
        const double g = sample_gamma(gauss, shape + 1.0);
        double u = gauss.uniform_source().next_double();
        if (u <= 0.0) u = 0x1.0p-53;
        return g * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = gauss.next();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = gauss.uniform_source().next_double();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

}  // namespace fedboost::rng
