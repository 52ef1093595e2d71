#include "osl/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "osl/errors.hpp"

namespace osl {

int cross_corr_ts(std::span<const cdouble> window, std::span<const cdouble> replica) {
    if (replica.empty() || window.size() <= replica.size()) {
        throw DimensionError("cross_corr_ts: window must be longer than the replica");
    }
    const std::size_t lags = window.size() - replica.size();
    int best = 0;
    double best_mag = -1.0;
    for (std::size_t j = 0; j < lags; ++j) {
        cdouble acc{};
        for (std::size_t m = 0; m < replica.size(); ++m) acc += window[j + m] * std::conj(replica[m]);
        const double mag = std::norm(acc);
        if (mag > best_mag) {
            best_mag = mag;
            best = static_cast<int>(j);
        }
    }
    return best;
}

std::vector<double> auto_corr_metric(std::span<const cdouble> window, const OfdmConfig& cfg) {
    const int n = cfg.n_subcarriers;
    const int cp = cfg.cp_length;
    if (static_cast<int>(window.size()) < n - 1 + cp + n) throw DimensionError("auto_corr_ts: window too short");
    std::vector<double> metric(n);
    for (int j = 0; j < n; ++j) {
        cdouble a{};
        double e_early = 0.0;
        double e_late = 0.0;
        for (int m = 0; m < cp; ++m) {
            const cdouble early = window[j + m];
            const cdouble late = window[j + m + n];
            a += early * std::conj(late);
            e_early += std::norm(early);
            e_late += std::norm(late);
        }
        // normalized by both halves so the metric never exceeds 1
        const double denom = e_early * e_late;
        metric[j] = denom > 0.0 ? std::norm(a) / denom : 0.0;
    }
    return metric;
}

int auto_corr_ts(std::span<const cdouble> window, const OfdmConfig& cfg) {
    const auto metric = auto_corr_metric(window, cfg);
    return static_cast<int>(std::max_element(metric.begin(), metric.end()) - metric.begin());
}

void OmpConfig::validate() const {
    if (num_iterations < 1) throw ConfigError("OMP needs at least one iteration");
    if (!(gain_floor >= 0.0 && gain_floor < 1.0)) throw ConfigError("OMP gain floor must lie in [0, 1)");
    if (search_min < 0) throw ConfigError("OMP search window must start at a non-negative delay");
    if (search_max >= 0 && search_max < search_min) throw ConfigError("OMP search window is empty");
}

OmpDictionary::OmpDictionary(const OfdmConfig& cfg, const OmpConfig& ocfg) {
    cfg.validate();
    ocfg.validate();
    const int m = cfg.window_length();
    const int last = ocfg.search_max < 0 ? cfg.symbol_length() - 1 : ocfg.search_max;
    if (last >= m) throw ConfigError("OMP search window exceeds the observation window");
    const ComplexVec replica = training_replica(cfg);
    first_delay_ = ocfg.search_min;
    atoms_ = Eigen::MatrixXcd::Zero(m, last - first_delay_ + 1);
    for (int d = first_delay_; d <= last; ++d) {
        auto col = atoms_.col(d - first_delay_);
        const int len = std::min<int>(static_cast<int>(replica.size()), m - d);
        for (int k = 0; k < len; ++k) col[d + k] = replica[k];
        col.normalize();
    }
}

OmpTrace omp_trace(std::span<const cdouble> window, const OmpDictionary& dict, const OmpConfig& ocfg) {
    ocfg.validate();
    const auto& atoms = dict.atoms();
    if (static_cast<int>(window.size()) != dict.window_length()) throw DimensionError("omp_ts: window length mismatch");
    const Eigen::Map<const Eigen::VectorXcd> r(window.data(), static_cast<Eigen::Index>(window.size()));

    OmpTrace trace;
    std::vector<Eigen::Index> columns;
    std::vector<bool> used(static_cast<std::size_t>(atoms.cols()), false);
    Eigen::VectorXcd residual = r;
    Eigen::VectorXcd gains;
    trace.residual_energy.push_back(residual.squaredNorm());

    for (int it = 0; it < ocfg.num_iterations; ++it) {
        const Eigen::VectorXd corr = (atoms.adjoint() * residual).cwiseAbs2();
        Eigen::Index pick = -1;
        double best = -1.0;
        for (Eigen::Index c = 0; c < corr.size(); ++c) {
            if (!used[c] && corr[c] > best) {
                best = corr[c];
                pick = c;
            }
        }
        if (pick < 0) break;  // dictionary exhausted
        used[pick] = true;
        columns.push_back(pick);

        Eigen::MatrixXcd sub(atoms.rows(), static_cast<Eigen::Index>(columns.size()));
        for (std::size_t k = 0; k < columns.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = atoms.col(columns[k]);
        Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(sub);
        if (qr.rank() < sub.cols()) {
            // linearly dependent atom: drop it and keep the previous fit
            columns.pop_back();
        } else {
            gains = qr.solve(r);
            residual = r - sub * gains;
        }
        trace.residual_energy.push_back(residual.squaredNorm());
    }

    double peak = 0.0;
    for (Eigen::Index k = 0; k < gains.size(); ++k) peak = std::max(peak, std::abs(gains[k]));
    trace.estimate = columns.empty() ? dict.delay(0) : dict.delay(columns.front());
    bool found = false;
    for (std::size_t k = 0; k < columns.size(); ++k) {
        const int d = dict.delay(columns[k]);
        trace.support.push_back(d);
        trace.gains.push_back(gains[static_cast<Eigen::Index>(k)]);
        if (std::abs(gains[static_cast<Eigen::Index>(k)]) >= ocfg.gain_floor * peak && (!found || d < trace.estimate)) {
            trace.estimate = d;
            found = true;
        }
    }
    return trace;
}

int omp_ts(std::span<const cdouble> window, const OmpDictionary& dict, const OmpConfig& ocfg) {
    return omp_trace(window, dict, ocfg).estimate;
}

}  // namespace osl
