#include "osl/channel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "osl/errors.hpp"

#ifndef OSL_DEFAULT_DATA_DIR
#define OSL_DEFAULT_DATA_DIR "data"
#endif

namespace osl {

void PdpProfile::validate() const {
    if (delays.empty() || delays.size() != powers.size()) throw ConfigError("PDP: delays and powers must be non-empty and aligned");
    if (delays.front() != 0) throw ConfigError("PDP: first delay must be 0");
    double sum = 0.0;
    for (std::size_t i = 0; i < delays.size(); ++i) {
        if (i > 0 && delays[i] <= delays[i - 1]) throw ConfigError("PDP: delays must be strictly increasing");
        if (!(powers[i] > 0.0)) throw ConfigError("PDP: tap powers must be positive");
        sum += powers[i];
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("PDP: powers must sum to 1");
}

TdlProfile parse_tdl_profile(std::string_view name) {
    if (name == "A" || name == "a" || name == "tdl_a" || name == "TDL-A") return TdlProfile::A;
    if (name == "B" || name == "b" || name == "tdl_b" || name == "TDL-B") return TdlProfile::B;
    if (name == "C" || name == "c" || name == "tdl_c" || name == "TDL-C") return TdlProfile::C;
    throw ConfigError("unknown TDL profile '" + std::string(name) + "'");
}

std::string_view to_string(TdlProfile profile) {
    switch (profile) {
        case TdlProfile::A: return "tdl_a";
        case TdlProfile::B: return "tdl_b";
        case TdlProfile::C: return "tdl_c";
    }
    return "?";
}

PdpProfile exp_pdp(int num_taps, double eta) {
    if (num_taps < 1) throw ConfigError("exp_pdp: need at least one tap");
    if (!(eta > 0.0)) throw ConfigError("exp_pdp: decay exponent must be positive");
    PdpProfile pdp;
    pdp.delays.resize(num_taps);
    pdp.powers.resize(num_taps);
    double sum = 0.0;
    for (int p = 0; p < num_taps; ++p) {
        pdp.delays[p] = p;
        pdp.powers[p] = std::exp(-eta * p);
        sum += pdp.powers[p];
    }
    for (auto& w : pdp.powers) w /= sum;
    return pdp;
}

std::filesystem::path default_tdl_dir() {
    if (const char* env = std::getenv("OSL_DATA_DIR"); env && *env) return std::filesystem::path(env) / "tdl";
    return std::filesystem::path(OSL_DEFAULT_DATA_DIR) / "tdl";
}

std::vector<TdlRow> read_tdl_table(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open TDL table " + file.string());
    std::vector<TdlRow> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        TdlRow row{};
        if (!(fields >> row.normalized_delay)) continue;
        if (!(fields >> row.power_db)) {
            throw FormatError(file.string() + ":" + std::to_string(line_no) + ": expected 'normalized_delay power_db'");
        }
        rows.push_back(row);
    }
    if (rows.empty()) throw FormatError(file.string() + ": no taps");
    return rows;
}

PdpProfile quantize_tdl(const std::vector<TdlRow>& rows, int tau_p) {
    if (rows.empty()) throw ConfigError("quantize_tdl: empty table");
    if (tau_p < 1) throw ConfigError("quantize_tdl: tau_P must be positive");
    const auto [lo, hi] = std::minmax_element(rows.begin(), rows.end(), [](const TdlRow& a, const TdlRow& b) {
        return a.normalized_delay < b.normalized_delay;
    });
    const double first = lo->normalized_delay;
    const double span = hi->normalized_delay - first;
    if (!(span > 0.0)) throw ConfigError("quantize_tdl: table needs at least two distinct delays");

    std::map<int, double> merged;
    for (const auto& row : rows) {
        const int d = static_cast<int>(std::lround((row.normalized_delay - first) / span * tau_p));
        merged[d] += std::pow(10.0, row.power_db / 10.0);
    }
    PdpProfile pdp;
    double sum = 0.0;
    for (const auto& [d, w] : merged) sum += w;
    for (const auto& [d, w] : merged) {
        pdp.delays.push_back(d);
        pdp.powers.push_back(w / sum);
    }
    return pdp;
}

PdpProfile tdl_pdp(TdlProfile profile, int tau_p, const std::filesystem::path& table_dir) {
    const auto file = table_dir / (std::string(to_string(profile)) + ".txt");
    return quantize_tdl(read_tdl_table(file), tau_p);
}

ComplexVec realize_channel(const PdpProfile& pdp, Rng& rng) {
    ComplexVec taps(pdp.size());
    for (std::size_t p = 0; p < pdp.size(); ++p) taps[p] = std::sqrt(pdp.powers[p]) * complex_gaussian(rng);
    return taps;
}

ComplexVec propagate(const TxFrame& frame, const PdpProfile& pdp, const ChannelRealization& ch, const OfdmConfig& cfg) {
    const int n = cfg.n_subcarriers;
    if (ch.timing_offset < 0 || ch.timing_offset > n - 1) {
        throw UsageError("timing offset " + std::to_string(ch.timing_offset) + " outside [0, N-1]");
    }
    if (ch.taps.size() != pdp.size()) throw DimensionError("channel taps do not match the PDP");
    const int m = cfg.window_length();
    const int stream_len = static_cast<int>(frame.samples.size());
    // window index w maps to stream index w - timing_offset + train_start
    const int origin = frame.train_start - ch.timing_offset;

    ComplexVec window(m, cdouble{});
    for (std::size_t p = 0; p < pdp.size(); ++p) {
        const cdouble h = ch.taps[p];
        const int shift = origin - pdp.delays[p];
        const int w_lo = std::max(0, -shift);
        const int w_hi = std::min(m, stream_len - shift);
        for (int w = w_lo; w < w_hi; ++w) window[w] += h * frame.samples[w + shift];
    }
    if (ch.cfo != 0.0) {
        for (int w = 0; w < m; ++w) {
            window[w] *= std::polar(1.0, 2.0 * std::numbers::pi * ch.cfo * (w - ch.timing_offset) / n);
        }
    }
    return window;
}

void add_awgn(ComplexVec& window, double snr_db, const OfdmConfig& cfg, Rng& rng) {
    const double noise_power = cfg.sigma_d2 * std::pow(10.0, -snr_db / 10.0);
    for (auto& v : window) v += complex_gaussian(rng, noise_power);
}

ComplexVec apply_channel(const TxFrame& frame, const PdpProfile& pdp, const ChannelRealization& ch,
                         const OfdmConfig& cfg, Rng& rng) {
    ComplexVec window = propagate(frame, pdp, ch, cfg);
    add_awgn(window, ch.snr_db, cfg, rng);
    return window;
}

}  // namespace osl
