#pragma once

#include <cstddef>

namespace osl {

/// Frame geometry shared by every module. All lengths are in samples,
/// all delays in sample periods.
///
/// The derived quantities (N_u, M, delay fluctuation, relaxed delay, label
/// offset, correctness window) are computed on demand so a config can never
/// hold stale derived values.
struct OfdmConfig {
    int n_subcarriers = 128;   // N
    int cp_length = 32;        // L_c
    int zc_root = 25;
    int tau_p = 22;            // nominal maximum propagation delay
    bool relaxed = true;       // train with tau_relax = tau_p + delta_tau
    double sigma_d2 = 1.0;     // transmit power, SNR = sigma_d2 / sigma_n2
    double cfo_max = 0.0;      // CFO drawn from U(-cfo_max, cfo_max) when > 0

    int symbol_length() const { return n_subcarriers + cp_length; }            // N_u
    int window_length() const { return symbol_length() + n_subcarriers; }      // M

    /// ceil((L_c - tau_P) / 2) when relaxed, otherwise 0.
    int delta_tau() const;
    int tau_relax() const { return tau_p + delta_tau(); }

    /// ceil((L_c + tau_relax) / 2): shift between a timing offset and its class.
    int label_offset() const;

    /// Width of the ISI-free acceptance window, L_c - tau_relax.
    int window_tolerance() const { return cp_length - tau_relax(); }

    /// Throws ConfigError when any invariant is violated.
    void validate() const;

    /// Default geometry scaled to a different subcarrier count: L_c = N/4,
    /// tau_P scaled proportionally from 22 at N = 128.
    static OfdmConfig scaled(int n_subcarriers, int cp_length, bool relaxed = true);

    bool operator==(const OfdmConfig&) const = default;
};

/// Ceiling of a / b for b > 0 and any sign of a.
constexpr int ceil_div(int a, int b) { return a >= 0 ? (a + b - 1) / b : -((-a) / b); }

}  // namespace osl
