#pragma once

#include <complex>
#include <span>
#include <vector>

#include "osl/config.hpp"
#include "osl/rng.hpp"

namespace osl {

using cdouble = std::complex<double>;
using ComplexVec = std::vector<cdouble>;

/// Transmit stream around one training symbol.
struct TxFrame {
    ComplexVec samples;  // [CP+data | CP+training | CP+data], each N_u long
    int train_start = 0; // first CP sample of the training symbol
};

/// d_k = exp(-j*pi*root*k^2/N), the even-length Zadoff-Chu sequence.
/// Throws ConfigError if root and N are not coprime or N is odd.
ComplexVec zc_sequence(int length, int root);

/// s_n = (1/N) sum_k d_k exp(j*2*pi*k*n/N).
ComplexVec ofdm_modulate(std::span<const cdouble> spectrum);

/// Prepends the last cp_length samples. Throws ConfigError if cp_length >= N.
ComplexVec add_cp(std::span<const cdouble> symbol, int cp_length);

/// Time-domain training symbol with its prefix (N_u samples), scaled so
/// that every sample has power sigma_d2. This is the receiver's replica.
ComplexVec training_replica(const OfdmConfig& cfg);

/// Three-symbol transmit stream with the training symbol in the middle.
/// Data symbols carry unit-power QPSK drawn from rng.
TxFrame build_frame(const OfdmConfig& cfg, Rng& rng);

}  // namespace osl
