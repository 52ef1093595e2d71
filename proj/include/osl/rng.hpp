#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace osl {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to decorrelate derived seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Named sub-streams so that, e.g., the training and validation sets drawn
/// from one master seed never share state.
enum class Stream : std::uint64_t {
    train_data = 1,
    validation_data = 2,
    init = 3,
    shuffle = 4,
    evaluation = 5,
};

constexpr std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::uint64_t index = 0) {
    return mix64(mix64(master ^ mix64(static_cast<std::uint64_t>(stream))) + index);
}

/// Independent generator for one work item (sample, trial, ...).
inline Rng make_rng(std::uint64_t master, Stream stream, std::uint64_t index = 0) {
    return Rng{derive_seed(master, stream, index)};
}

/// Circularly symmetric complex Gaussian with E|z|^2 = variance.
inline std::complex<double> complex_gaussian(Rng& rng, double variance = 1.0) {
    std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
    const double re = normal(rng);
    const double im = normal(rng);
    return {re, im};
}

}  // namespace osl
