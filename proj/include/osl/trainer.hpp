#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "osl/dataset.hpp"
#include "osl/network.hpp"

namespace osl {

struct TrainConfig {
    double alpha = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps_hat = 1e-8;
    int batch_size = 128;
    int max_epochs = 100;
    int patience = 15;  // epochs without R_err improvement before stopping; 0 disables
    std::uint64_t seed = 0;
    unsigned threads = 0;

    void validate() const;
    bool operator==(const TrainConfig&) const = default;
};

/// First/second moment estimates congruent with the parameters.
struct AdamState {
    Gradients m;
    Gradients v;
    long step = 0;

    static AdamState for_params(const NetworkParams& params);
};

/// One bias-corrected Adam update; increments state.step before use.
void adam_step(NetworkParams& params, const Gradients& grads, AdamState& state, const TrainConfig& tcfg);

/// Fraction of samples whose de-offset argmax falls outside the ISI-free
/// window. Throws UsageError on an empty set.
double epoch_error_rate(const NetworkParams& params, const Dataset& valset, unsigned threads = 0);

struct EpochLog {
    int epoch = 0;
    double mean_loss = 0.0;
    double val_r_err = 0.0;
    double elapsed_sec = 0.0;
};

struct TrainResult {
    NetworkParams best;
    int best_epoch = 0;
    double best_r_err = 1.0;
    std::vector<EpochLog> log;
};

using EpochCallback = std::function<void(const EpochLog&)>;

/// Mini-batch Adam on mean cross-entropy. After every epoch R_err is
/// measured on valset and the parameters with the lowest value are kept.
/// Throws DivergenceError on a non-finite loss.
TrainResult train(const NetworkParams& initial, const Dataset& trainset, const Dataset& valset, const TrainConfig& tcfg,
                  const EpochCallback& on_epoch = {});

/// Mean loss and gradient over a set of samples, summed in a fixed order.
double batch_gradients(const NetworkParams& params, const Dataset& ds, std::span<const std::size_t> indices,
                       Gradients& grads, unsigned threads = 0);

/// CSV with header `epoch,mean_loss,val_R_err,elapsed_sec`.
void write_train_log(const std::vector<EpochLog>& log, std::ostream& os);

}  // namespace osl
