#include "osl/dataset.hpp"

#include <fstream>
#include <limits>

#include "json.hpp"
#include "osl/binary_io.hpp"
#include "osl/channel.hpp"
#include "osl/errors.hpp"
#include "osl/json_config.hpp"
#include "osl/parallel.hpp"
#include "osl/rng.hpp"

namespace osl {
namespace {

constexpr std::string_view kMagic = "OSL1";
constexpr std::uint32_t kVersion = 1;

TrainingSample draw_sample(const OfdmConfig& cfg, const TrainingChannel& channel, Rng& rng) {
    const int n = cfg.n_subcarriers;
    std::uniform_int_distribution<int> offset_dist(0, n - 1);
    std::uniform_real_distribution<double> eta_dist(channel.eta_min, channel.eta_max);
    std::uniform_real_distribution<double> snr_dist(channel.snr_min_db, channel.snr_max_db);

    ChannelRealization ch;
    ch.timing_offset = offset_dist(rng);
    const double eta = eta_dist(rng);
    ch.snr_db = snr_dist(rng);
    if (cfg.cfo_max > 0.0) ch.cfo = std::uniform_real_distribution<double>(-cfg.cfo_max, cfg.cfo_max)(rng);

    const PdpProfile pdp = exp_pdp(cfg.tau_relax() + 1, eta);
    const TxFrame frame = build_frame(cfg, rng);
    ch.taps = realize_channel(pdp, rng);
    const ComplexVec window = apply_channel(frame, pdp, ch, cfg, rng);

    TrainingSample sample;
    const auto y = vectorize(window, cfg);
    sample.y.assign(y.begin(), y.end());
    sample.label_index = make_label(ch.timing_offset, cfg);
    sample.true_to = ch.timing_offset;
    sample.snr_db = static_cast<float>(ch.snr_db);
    return sample;
}

std::filesystem::path manifest_path(const std::filesystem::path& path) {
    auto p = path;
    p += ".json";
    return p;
}

}  // namespace

void TrainingChannel::validate() const {
    if (!(eta_min > 0.0 && eta_max >= eta_min)) throw ConfigError("decay exponent range must satisfy 0 < min <= max");
    if (!(snr_max_db >= snr_min_db)) throw ConfigError("SNR range must satisfy min <= max");
}

std::vector<double> interleave(std::span<const cdouble> window) {
    std::vector<double> y(2 * window.size());
    for (std::size_t i = 0; i < window.size(); ++i) {
        y[2 * i] = window[i].real();
        y[2 * i + 1] = window[i].imag();
    }
    return y;
}

ComplexVec deinterleave(std::span<const double> y) {
    if (y.size() % 2 != 0) throw DimensionError("deinterleave: odd length");
    ComplexVec r(y.size() / 2);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = {y[2 * i], y[2 * i + 1]};
    return r;
}

std::vector<double> vectorize(std::span<const cdouble> window, const OfdmConfig& cfg) {
    if (static_cast<int>(window.size()) != cfg.window_length()) {
        throw DimensionError("vectorize: expected " + std::to_string(cfg.window_length()) + " samples, got " +
                             std::to_string(window.size()));
    }
    return interleave(window);
}

int make_label(int timing_offset, const OfdmConfig& cfg) {
    if (timing_offset < 0 || timing_offset > cfg.n_subcarriers - 1) {
        throw UsageError("timing offset " + std::to_string(timing_offset) + " outside [0, N-1]");
    }
    const int label = timing_offset + cfg.label_offset();
    if (label >= cfg.symbol_length()) {
        throw ConfigError("label " + std::to_string(label) + " overflows N_u=" + std::to_string(cfg.symbol_length()));
    }
    return label;
}

Dataset generate_dataset(const OfdmConfig& cfg, const TrainingChannel& channel, std::size_t count, std::uint64_t seed,
                         unsigned threads, bool validation_stream) {
    cfg.validate();
    channel.validate();
    if (count < 1) throw ConfigError("dataset needs at least one sample");
    Dataset ds;
    ds.cfg = cfg;
    ds.channel = channel;
    ds.seed = seed;
    ds.samples.resize(count);
    const Stream stream = validation_stream ? Stream::validation_data : Stream::train_data;
    parallel_for(count, threads, [&](std::size_t i) {
        Rng rng = make_rng(seed, stream, i);
        ds.samples[i] = draw_sample(cfg, channel, rng);
    });
    return ds;
}

void write_dataset(const Dataset& ds, const std::filesystem::path& path) {
    const OfdmConfig& cfg = ds.cfg;
    const std::size_t y_len = 2 * static_cast<std::size_t>(cfg.window_length());
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
        io::Writer w(out);
        w.put_bytes(kMagic);
        w.put<std::uint32_t>(kVersion);
        w.put<std::uint32_t>(cfg.n_subcarriers);
        w.put<std::uint32_t>(cfg.cp_length);
        w.put<std::uint32_t>(cfg.tau_relax());
        w.put<std::uint64_t>(ds.samples.size());
        for (const auto& s : ds.samples) {
            if (s.y.size() != y_len) throw DimensionError("write_dataset: sample length does not match cfg");
            w.put_all<float>(s.y);
            w.put<std::uint16_t>(static_cast<std::uint16_t>(s.label_index));
            w.put<std::uint16_t>(static_cast<std::uint16_t>(s.true_to));
            w.put<float>(s.snr_db);
        }
        if (!w.ok()) throw std::runtime_error("write failed for " + path.string());
    }

    nlohmann::ordered_json manifest;
    manifest["format"] = "OSL1";
    manifest["version"] = kVersion;
    manifest["count"] = ds.samples.size();
    manifest["seed"] = ds.seed;
    manifest["channel_family"] = "exp_pdp_relaxed";
    manifest["cfg"] = to_json(cfg);
    manifest["channel"] = to_json(ds.channel);
    std::ofstream mout(manifest_path(path), std::ios::trunc);
    if (!mout) throw std::runtime_error("cannot write manifest for " + path.string());
    mout << manifest.dump(2) << '\n';
}

Dataset read_dataset(const std::filesystem::path& path, const std::optional<OfdmConfig>& expected) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open dataset " + path.string());
    io::Reader r(in, path.string());
    if (r.get_bytes(4) != kMagic) throw FormatError(path.string() + ": bad magic, not an OSL1 dataset");
    if (const auto v = r.get<std::uint32_t>(); v != kVersion) {
        throw FormatError(path.string() + ": unsupported dataset version " + std::to_string(v));
    }
    const auto n = static_cast<int>(r.get<std::uint32_t>());
    const auto cp = static_cast<int>(r.get<std::uint32_t>());
    const auto tau_relax = static_cast<int>(r.get<std::uint32_t>());
    const auto count = r.get<std::uint64_t>();

    Dataset ds;
    if (const auto mpath = manifest_path(path); std::filesystem::exists(mpath)) {
        std::ifstream min(mpath);
        try {
            const auto manifest = nlohmann::json::parse(min);
            ds.cfg = ofdm_config_from_json(manifest.at("cfg"));
            ds.channel = training_channel_from_json(manifest.at("channel"));
            ds.seed = manifest.at("seed").get<std::uint64_t>();
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(mpath.string() + ": " + e.what());
        }
    } else {
        // without a manifest only the dimensions that matter for labels are known
        ds.cfg.n_subcarriers = n;
        ds.cfg.cp_length = cp;
        ds.cfg.tau_p = tau_relax;
        ds.cfg.relaxed = false;
    }
    if (ds.cfg.n_subcarriers != n || ds.cfg.cp_length != cp || ds.cfg.tau_relax() != tau_relax) {
        throw FormatError(path.string() + ": header dimensions disagree with manifest");
    }
    try {
        ds.cfg.validate();
    } catch (const ConfigError& e) {
        throw FormatError(path.string() + ": invalid header: " + e.what());
    }
    if (expected && (expected->n_subcarriers != n || expected->cp_length != cp || expected->tau_relax() != tau_relax)) {
        throw FormatError(path.string() + ": dimensions N=" + std::to_string(n) + " L_c=" + std::to_string(cp) +
                          " tau_relax=" + std::to_string(tau_relax) + " do not match the configuration");
    }

    const std::size_t y_len = 2 * static_cast<std::size_t>(ds.cfg.window_length());
    const std::size_t record_bytes = y_len * 4 + 2 + 2 + 4;
    const auto file_bytes = std::filesystem::file_size(path);
    const std::size_t header_bytes = 4 + 4 * 4 + 8;
    if (count > (std::numeric_limits<std::size_t>::max() - header_bytes) / record_bytes ||
        file_bytes != header_bytes + count * record_bytes) {
        throw FormatError(path.string() + ": size does not match " + std::to_string(count) + " records");
    }
    ds.samples.resize(count);
    for (auto& s : ds.samples) {
        s.y.resize(y_len);
        r.get_all<float>(s.y);
        s.label_index = r.get<std::uint16_t>();
        s.true_to = r.get<std::uint16_t>();
        s.snr_db = r.get<float>();
        if (s.true_to >= n || s.label_index != s.true_to + ds.cfg.label_offset()) {
            throw FormatError(path.string() + ": record label inconsistent with header");
        }
    }
    return ds;
}

}  // namespace osl
