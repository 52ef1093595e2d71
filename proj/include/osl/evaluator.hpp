#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "osl/baselines.hpp"
#include "osl/channel.hpp"
#include "osl/config.hpp"
#include "osl/network.hpp"
#include "osl/waveform.hpp"

namespace osl {

/// argmax_j p_j - label_offset, lowest index on ties.
int estimate_to(std::span<const double> probs, const OfdmConfig& cfg);
int estimate_to(const Eigen::VectorXd& probs, const OfdmConfig& cfg);

/// 0 when 0 <= tau_true - tau_hat <= L_c - tau_relax, otherwise 1.
int timing_error(int tau_hat, int tau_true, const OfdmConfig& cfg);

/// Test channel for Monte Carlo trials.
struct Scenario {
    enum class Family { exponential, tdl, single_path, two_path };

    std::string tag;
    Family family = Family::exponential;
    int num_taps = 23;              // exponential
    double eta = 1.0 / 23.0;        // exponential
    TdlProfile tdl = TdlProfile::A;
    int tau_p = 22;                 // tdl: largest quantized delay
    int two_path_gap = 3;           // two_path: second path delay
    double first_path_power = 0.4;  // two_path
    bool noiseless = false;
    std::filesystem::path tdl_dir = default_tdl_dir();

    /// Exponential profile with P = tau_p + 1 taps and eta = 1/P.
    static Scenario exponential(int tau_p);
    static Scenario tdl_profile(TdlProfile profile, int tau_p);
    static Scenario single_path(bool noiseless);
    /// Two fixed-magnitude paths (powers first_path_power and the rest) with
    /// random phases; the first path is the weaker one.
    static Scenario two_path(bool noiseless);
    /// Preset by name: exp_22, exp_27, tdl_a, tdl_b, tdl_c, single_path,
    /// noiseless_single_path, two_path, noiseless_two_path.
    static Scenario preset(std::string_view name);

    PdpProfile pdp() const;
    ComplexVec draw_taps(const PdpProfile& pdp, Rng& rng) const;
};

/// One simulated observation window.
struct Trial {
    ComplexVec window;
    int true_to = 0;
    double snr_db = 0.0;
};

/// Draws timing offset, CFO, frame, channel and noise in that order.
Trial draw_trial(const Scenario& scenario, const PdpProfile& pdp, const OfdmConfig& cfg, double snr_db, Rng& rng);

/// A synchronizer under test. Must be callable concurrently.
struct Estimator {
    std::string name;
    std::function<int(const Trial&)> estimate;
};

/// Builds a named estimator: cnn, fcnn (both need model_path), cross_corr,
/// auto_corr, omp. Throws UsageError for unknown names or a missing model.
Estimator make_estimator(std::string_view method, const OfdmConfig& cfg,
                         const std::optional<std::filesystem::path>& model_path = std::nullopt,
                         const OmpConfig& ocfg = {});

/// Estimator around an in-memory network; de-offsets the argmax.
Estimator network_estimator(NetworkParams params);

struct EvalRow {
    double snr_db = 0.0;
    long trials = 0;
    long errors = 0;
    double error_prob = 0.0;
};

struct EvalReport {
    std::string method;
    std::string channel;
    OfdmConfig cfg;
    std::uint64_t seed = 0;
    std::vector<EvalRow> rows;
};

/// For each SNR runs `trials` independent draws and counts timing errors.
/// Trial k at SNR index s uses its own generator, so the result is
/// independent of the worker count and identical across methods.
EvalReport monte_carlo(const Estimator& estimator, const Scenario& scenario, const OfdmConfig& cfg,
                       std::span<const double> snr_list, long trials, std::uint64_t seed, unsigned threads = 0);

/// CSV header: method,channel,snr_db,trials,errors,error_prob
void write_report_csv(std::span<const EvalReport> reports, std::ostream& os);
void write_report_sidecar(std::span<const EvalReport> reports, const Scenario& scenario,
                          const std::filesystem::path& path);

// ---- complexity (complex multiplications) ----

struct ConvCmTerm {
    long long positions, kernel, filters, in_channels;
};
struct DenseCmTerm {
    long long outputs, inputs;
};

/// CS: P*N*N_u + sum_{p=1..P} (3p*N_u + p^3 + p^2*N_u).
long long cm_compressed_sensing(long long n, long long nu, long long paths);
/// ELM: (3/2)N + 4(N_u - 1) + 16 N_u^2.
long long cm_elm(long long n, long long nu);
/// Network: (sum over conv N_l K_l C_l C_{l-1} + sum over dense N_l N_{l-1}) / 4,
/// rounded up to a whole multiplication.
long long cm_network(std::span<const ConvCmTerm> conv, std::span<const DenseCmTerm> dense);
long long cm_cnn(const OfdmConfig& cfg);
long long cm_fcnn(const OfdmConfig& cfg, const std::vector<int>& hidden_sizes);

/// Dispatches on cs, elm, proposed (alias cnn), fcnn. Throws UsageError for
/// anything else.
long long count_cm(std::string_view method, const OfdmConfig& cfg, int paths,
                   const std::vector<int>& fcnn_hidden = kDefaultFcnnHidden);

/// Median per-window wall time of an estimator over prepared trials.
double median_inference_seconds(const Estimator& estimator, std::span<const Trial> trials, int repeats = 1);

/// Named experiment grid: fig2a (exp 22 and 27), fig2b (N sweep),
/// fig2c (L_c sweep), fig2d (TDL-A/B/C).
struct SweepPoint {
    std::string label;
    OfdmConfig cfg;
    Scenario scenario;
};
std::vector<SweepPoint> sweep_preset(std::string_view name);

}  // namespace osl
