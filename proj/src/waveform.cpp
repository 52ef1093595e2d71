#include "osl/waveform.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <string>

#include "osl/errors.hpp"

namespace osl {
namespace {

struct PlanDeleter {
    void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

// Planning is not thread-safe in FFTW; execution of a finished plan on
// caller-owned buffers is.
fftw_plan inverse_plan(int n) {
    static std::mutex mutex;
    static std::map<int, Plan> plans;
    std::lock_guard lock(mutex);
    auto it = plans.find(n);
    if (it == plans.end()) {
        std::vector<fftw_complex> in(n), out(n);
        fftw_plan p = fftw_plan_dft_1d(n, in.data(), out.data(), FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
        it = plans.emplace(n, Plan{p}).first;
    }
    return it->second.get();
}

ComplexVec scaled_symbol(std::span<const cdouble> spectrum, const OfdmConfig& cfg) {
    ComplexVec s = ofdm_modulate(spectrum);
    // unit-modulus subcarriers give E|s_n|^2 = 1/N
    const double gain = std::sqrt(static_cast<double>(cfg.n_subcarriers) * cfg.sigma_d2);
    for (auto& v : s) v *= gain;
    return add_cp(s, cfg.cp_length);
}

ComplexVec random_qpsk(int n, Rng& rng) {
    std::uniform_int_distribution<int> bit(0, 1);
    const double a = std::numbers::sqrt2 / 2.0;
    ComplexVec d(n);
    for (auto& v : d) {
        const int b0 = bit(rng);
        const int b1 = bit(rng);
        v = {b0 ? a : -a, b1 ? a : -a};
    }
    return d;
}

}  // namespace

ComplexVec zc_sequence(int length, int root) {
    if (length < 2 || length % 2 != 0) throw ConfigError("Zadoff-Chu length must be even, got " + std::to_string(length));
    if (std::gcd(root, length) != 1) {
        throw ConfigError("Zadoff-Chu root " + std::to_string(root) + " is not coprime with " + std::to_string(length));
    }
    ComplexVec d(length);
    for (int k = 0; k < length; ++k) {
        // reduce root*k^2 modulo 2N before scaling to keep the phase argument small
        const long long q = (static_cast<long long>(root) * k * k) % (2LL * length);
        d[k] = std::polar(1.0, -std::numbers::pi * static_cast<double>(q) / length);
    }
    return d;
}

ComplexVec ofdm_modulate(std::span<const cdouble> spectrum) {
    const int n = static_cast<int>(spectrum.size());
    if (n == 0) throw DimensionError("ofdm_modulate: empty spectrum");
    ComplexVec out(n);
    // std::complex<double> is layout-compatible with fftw_complex
    auto* in_ptr = reinterpret_cast<fftw_complex*>(const_cast<cdouble*>(spectrum.data()));
    auto* out_ptr = reinterpret_cast<fftw_complex*>(out.data());
    fftw_execute_dft(inverse_plan(n), in_ptr, out_ptr);
    const double scale = 1.0 / n;
    for (auto& v : out) v *= scale;
    return out;
}

ComplexVec add_cp(std::span<const cdouble> symbol, int cp_length) {
    const int n = static_cast<int>(symbol.size());
    if (cp_length < 0 || cp_length >= n) {
        throw ConfigError("cyclic prefix length " + std::to_string(cp_length) + " must lie in [0, " + std::to_string(n) + ")");
    }
    ComplexVec out;
    out.reserve(n + cp_length);
    out.insert(out.end(), symbol.end() - cp_length, symbol.end());
    out.insert(out.end(), symbol.begin(), symbol.end());
    return out;
}

ComplexVec training_replica(const OfdmConfig& cfg) {
    const ComplexVec zc = zc_sequence(cfg.n_subcarriers, cfg.zc_root);
    return scaled_symbol(zc, cfg);
}

TxFrame build_frame(const OfdmConfig& cfg, Rng& rng) {
    cfg.validate();
    const ComplexVec before = scaled_symbol(random_qpsk(cfg.n_subcarriers, rng), cfg);
    const ComplexVec after = scaled_symbol(random_qpsk(cfg.n_subcarriers, rng), cfg);
    const ComplexVec train = training_replica(cfg);

    TxFrame frame;
    frame.samples.reserve(3 * cfg.symbol_length());
    frame.samples.insert(frame.samples.end(), before.begin(), before.end());
    frame.train_start = static_cast<int>(frame.samples.size());
    frame.samples.insert(frame.samples.end(), train.begin(), train.end());
    frame.samples.insert(frame.samples.end(), after.begin(), after.end());
    return frame;
}

}  // namespace osl
