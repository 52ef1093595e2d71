#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "osl/config.hpp"
#include "osl/waveform.hpp"

namespace osl {

/// One labelled observation window.
struct TrainingSample {
    std::vector<float> y;   // 2M interleaved Re/Im
    int label_index = 0;    // class in [0, N_u)
    int true_to = 0;        // timing offset in [0, N)
    float snr_db = 0.0f;

    bool operator==(const TrainingSample&) const = default;
};

/// Channel family used to synthesize training data: exponential PDPs over
/// delays 0..tau_relax with a decay exponent drawn per sample.
struct TrainingChannel {
    double eta_min = 0.01;
    double eta_max = 0.5;
    double snr_min_db = -4.0;
    double snr_max_db = 10.0;

    void validate() const;
    bool operator==(const TrainingChannel&) const = default;
};

struct Dataset {
    OfdmConfig cfg;
    TrainingChannel channel;
    std::uint64_t seed = 0;
    std::vector<TrainingSample> samples;

    std::size_t size() const { return samples.size(); }
    bool operator==(const Dataset&) const = default;
};

/// [Re r_0, Im r_0, ..., Re r_{M-1}, Im r_{M-1}].
std::vector<double> vectorize(std::span<const cdouble> window, const OfdmConfig& cfg);

/// Unchecked interleave for any length.
std::vector<double> interleave(std::span<const cdouble> window);

/// Inverse of interleave.
ComplexVec deinterleave(std::span<const double> y);

/// ceil(tau + (L_c + tau_relax)/2). Throws UsageError for tau outside
/// [0, N-1] and ConfigError if the class would overflow N_u.
int make_label(int timing_offset, const OfdmConfig& cfg);

/// Draws `count` samples. Sample i depends only on (seed, stream, i), so the
/// output is identical for any thread count.
Dataset generate_dataset(const OfdmConfig& cfg, const TrainingChannel& channel, std::size_t count, std::uint64_t seed,
                         unsigned threads = 0, bool validation_stream = false);

/// Binary container ("OSL1") plus a `<path>.json` manifest.
void write_dataset(const Dataset& ds, const std::filesystem::path& path);

/// Reads a container. When `expected` is given the header dimensions must
/// match it. Throws FormatError on any inconsistency.
Dataset read_dataset(const std::filesystem::path& path, const std::optional<OfdmConfig>& expected = std::nullopt);

}  // namespace osl
