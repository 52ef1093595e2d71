#include "osl/config.hpp"

#include <numeric>
#include <string>

#include "osl/errors.hpp"

namespace osl {

int OfdmConfig::delta_tau() const { return relaxed ? ceil_div(cp_length - tau_p, 2) : 0; }

int OfdmConfig::label_offset() const { return ceil_div(cp_length + tau_relax(), 2); }

void OfdmConfig::validate() const {
    const int n = n_subcarriers;
    if (n < 16 || (n & (n - 1)) != 0) {
        throw ConfigError("subcarrier count must be a power of two >= 16, got " + std::to_string(n));
    }
    if (cp_length < 1 || cp_length >= n) {
        throw ConfigError("cyclic prefix length must lie in [1, N), got " + std::to_string(cp_length));
    }
    if (std::gcd(zc_root, n) != 1) {
        throw ConfigError("Zadoff-Chu root " + std::to_string(zc_root) + " is not coprime with N=" +
                          std::to_string(n));
    }
    if (tau_p < 0) throw ConfigError("tau_P must be non-negative");
    if (tau_relax() >= cp_length) {
        throw ConfigError("relaxed delay " + std::to_string(tau_relax()) +
                          " must stay below the cyclic prefix length " + std::to_string(cp_length));
    }
    if (!(sigma_d2 > 0.0)) throw ConfigError("transmit power must be positive");
    if (!(cfo_max >= 0.0 && cfo_max < 0.5)) throw ConfigError("cfo_max must lie in [0, 0.5)");
}

OfdmConfig OfdmConfig::scaled(int n_subcarriers, int cp_length, bool relaxed) {
    OfdmConfig cfg;
    cfg.n_subcarriers = n_subcarriers;
    cfg.cp_length = cp_length;
    // floor keeps tau_relax < L_c down to L_c = 4
    cfg.tau_p = (22 * cp_length) / 32;
    cfg.relaxed = relaxed;
    return cfg;
}

}  // namespace osl
