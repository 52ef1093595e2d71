#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "osl/config.hpp"
#include "osl/waveform.hpp"

namespace osl {

/// Matched filter against the known CP+training replica:
/// c_j = sum_m r_{j+m} conj(replica_m) for j in [0, len(r) - len(replica)),
/// returns argmax |c_j| (lowest index on ties).
int cross_corr_ts(std::span<const cdouble> window, std::span<const cdouble> replica);

/// CP auto-correlation metric |A_j|^2 / (E_j E'_j) with
/// A_j = sum_{m<L_c} r_{j+m} conj(r_{j+m+N}), E_j and E'_j the energies of the
/// two halves, maximized over j in [0, N-1].
int auto_corr_ts(std::span<const cdouble> window, const OfdmConfig& cfg);

/// Per-position metric behind auto_corr_ts, exposed for inspection.
std::vector<double> auto_corr_metric(std::span<const cdouble> window, const OfdmConfig& cfg);

struct OmpConfig {
    int num_iterations = 3;
    double gain_floor = 0.3;  // atoms below gain_floor * max|gain| do not count as first path
    int search_min = 0;
    int search_max = -1;      // inclusive; -1 means N_u - 1

    void validate() const;
};

/// Known training waveform shifted to every candidate delay inside the
/// M-sample window, each column scaled to unit norm.
class OmpDictionary {
public:
    OmpDictionary(const OfdmConfig& cfg, const OmpConfig& ocfg);

    const Eigen::MatrixXcd& atoms() const { return atoms_; }
    int delay(Eigen::Index column) const { return first_delay_ + static_cast<int>(column); }
    int window_length() const { return static_cast<int>(atoms_.rows()); }

private:
    Eigen::MatrixXcd atoms_;
    int first_delay_ = 0;
};

struct OmpTrace {
    std::vector<int> support;             // selected delays, selection order
    std::vector<cdouble> gains;           // least-squares gains on the final support
    std::vector<double> residual_energy;  // before the first and after every iteration
    int estimate = 0;
};

/// Orthogonal matching pursuit followed by first-path selection: the
/// smallest delay whose gain survives the gain floor.
OmpTrace omp_trace(std::span<const cdouble> window, const OmpDictionary& dict, const OmpConfig& ocfg);

int omp_ts(std::span<const cdouble> window, const OmpDictionary& dict, const OmpConfig& ocfg);

}  // namespace osl
