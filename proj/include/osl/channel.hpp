#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "osl/config.hpp"
#include "osl/rng.hpp"
#include "osl/waveform.hpp"

namespace osl {

/// Integer-delay power delay profile. Delays ascend from 0, powers sum to 1.
struct PdpProfile {
    std::vector<int> delays;
    std::vector<double> powers;

    int max_delay() const { return delays.empty() ? 0 : delays.back(); }
    std::size_t size() const { return delays.size(); }

    /// Throws ConfigError when the profile invariants do not hold.
    void validate() const;
};

/// Per-trial channel state applied by apply_channel.
struct ChannelRealization {
    ComplexVec taps;      // one gain per PdpProfile delay
    int timing_offset = 0;
    double cfo = 0.0;     // fraction of subcarrier spacing
    double snr_db = 0.0;
};

enum class TdlProfile { A, B, C };

TdlProfile parse_tdl_profile(std::string_view name);
std::string_view to_string(TdlProfile profile);

/// powers[p] proportional to exp(-eta * p) over delays 0..num_taps-1.
PdpProfile exp_pdp(int num_taps, double eta);

/// Directory holding the shipped TDL tables: $OSL_DATA_DIR/tdl when set,
/// otherwise the directory recorded at build time.
std::filesystem::path default_tdl_dir();

/// One row of a TDL table.
struct TdlRow {
    double normalized_delay;
    double power_db;
};

/// Reads a `normalized_delay power_db` table; '#' starts a comment.
std::vector<TdlRow> read_tdl_table(const std::filesystem::path& file);

/// Quantizes a TDL table to integer sample delays with the largest delay
/// at tau_p. Taps landing on the same sample are merged in linear power.
PdpProfile quantize_tdl(const std::vector<TdlRow>& rows, int tau_p);

/// Loads and quantizes one of the shipped profiles.
PdpProfile tdl_pdp(TdlProfile profile, int tau_p, const std::filesystem::path& table_dir = default_tdl_dir());

/// h_p = sqrt(powers[p]) * g_p, g_p ~ CN(0, 1).
ComplexVec realize_channel(const PdpProfile& pdp, Rng& rng);

/// Noiseless part of the observation window: the M samples where the
/// training symbol's first-path CP start lands at index `timing_offset`.
ComplexVec propagate(const TxFrame& frame, const PdpProfile& pdp, const ChannelRealization& ch, const OfdmConfig& cfg);

/// Adds CN(0, sigma_d2 * 10^(-snr_db/10)) noise in place.
void add_awgn(ComplexVec& window, double snr_db, const OfdmConfig& cfg, Rng& rng);

/// propagate followed by add_awgn.
ComplexVec apply_channel(const TxFrame& frame, const PdpProfile& pdp, const ChannelRealization& ch,
                         const OfdmConfig& cfg, Rng& rng);

}  // namespace osl
