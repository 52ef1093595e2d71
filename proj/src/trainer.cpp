#include "osl/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>

#include "osl/errors.hpp"
#include "osl/evaluator.hpp"
#include "osl/parallel.hpp"
#include "osl/rng.hpp"

namespace osl {
namespace {

// Samples per gradient chunk. Chunks are reduced in index order, so results
// do not depend on the worker count.
constexpr std::size_t kChunk = 8;

void add_into(Gradients& dst, const Gradients& src) {
    for (std::size_t i = 0; i < dst.size(); ++i) {
        auto& d = dst[i].values;
        const auto& s = src[i].values;
        for (std::size_t j = 0; j < d.size(); ++j) d[j] += s[j];
    }
}

}  // namespace

void TrainConfig::validate() const {
    if (!(alpha > 0.0)) throw ConfigError("Adam step size must be positive");
    if (!(beta1 > 0.0 && beta1 < 1.0 && beta2 > 0.0 && beta2 < 1.0)) throw ConfigError("Adam decays must lie in (0, 1)");
    if (!(eps_hat > 0.0)) throw ConfigError("Adam epsilon must be positive");
    if (batch_size < 1) throw ConfigError("batch size must be at least 1");
    if (max_epochs < 1) throw ConfigError("need at least one epoch");
    if (patience < 0) throw ConfigError("patience must be non-negative");
}

AdamState AdamState::for_params(const NetworkParams& params) {
    return AdamState{zero_gradients(params), zero_gradients(params), 0};
}

void adam_step(NetworkParams& params, const Gradients& grads, AdamState& state, const TrainConfig& tcfg) {
    if (grads.size() != params.tensors.size() || state.m.size() != params.tensors.size() ||
        state.v.size() != params.tensors.size()) {
        throw DimensionError("Adam: gradient/moment tensors do not match parameters");
    }
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double correct1 = 1.0 - std::pow(tcfg.beta1, t);
    const double correct2 = 1.0 - std::pow(tcfg.beta2, t);
    for (std::size_t i = 0; i < params.tensors.size(); ++i) {
        auto& theta = params.tensors[i].values;
        const auto& g = grads[i].values;
        auto& m = state.m[i].values;
        auto& v = state.v[i].values;
        if (g.size() != theta.size() || m.size() != theta.size() || v.size() != theta.size()) {
            throw DimensionError("Adam: shape mismatch in tensor " + params.tensors[i].name);
        }
        for (std::size_t j = 0; j < theta.size(); ++j) {
            m[j] = tcfg.beta1 * m[j] + (1.0 - tcfg.beta1) * g[j];
            v[j] = tcfg.beta2 * v[j] + (1.0 - tcfg.beta2) * g[j] * g[j];
            const double m_hat = m[j] / correct1;
            const double v_hat = v[j] / correct2;
            theta[j] -= tcfg.alpha * m_hat / (std::sqrt(v_hat) + tcfg.eps_hat);
        }
    }
}

double epoch_error_rate(const NetworkParams& params, const Dataset& valset, unsigned threads) {
    if (valset.samples.empty()) throw UsageError("R_err needs a non-empty validation set");
    const std::size_t n = valset.samples.size();
    const std::size_t chunks = (n + 63) / 64;
    std::vector<int> errors(chunks, 0);
    parallel_for(chunks, threads, [&](std::size_t c) {
        ForwardCache cache;
        std::vector<double> y;
        const std::size_t end = std::min(n, (c + 1) * 64);
        for (std::size_t i = c * 64; i < end; ++i) {
            const auto& s = valset.samples[i];
            y.assign(s.y.begin(), s.y.end());
            const auto& probs = forward(params, y, cache);
            const int tau_hat = estimate_to(probs, params.cfg);
            errors[c] += timing_error(tau_hat, s.true_to, params.cfg);
        }
    });
    return static_cast<double>(std::accumulate(errors.begin(), errors.end(), 0)) / static_cast<double>(n);
}

double batch_gradients(const NetworkParams& params, const Dataset& ds, std::span<const std::size_t> indices,
                       Gradients& grads, unsigned threads) {
    if (indices.empty()) throw UsageError("empty batch");
    const std::size_t chunks = (indices.size() + kChunk - 1) / kChunk;
    std::vector<Gradients> partial(chunks, zero_gradients(params));
    std::vector<double> losses(indices.size(), 0.0);
    parallel_for(chunks, threads, [&](std::size_t c) {
        ForwardCache cache;
        std::vector<double> y;
        const std::size_t end = std::min(indices.size(), (c + 1) * kChunk);
        for (std::size_t k = c * kChunk; k < end; ++k) {
            const auto& s = ds.samples.at(indices[k]);
            y.assign(s.y.begin(), s.y.end());
            forward(params, y, cache);
            losses[k] = accumulate_gradients(params, cache, s.label_index, partial[c]);
        }
    });
    grads = std::move(partial[0]);
    for (std::size_t c = 1; c < chunks; ++c) add_into(grads, partial[c]);
    const double scale = 1.0 / static_cast<double>(indices.size());
    for (auto& t : grads) {
        for (auto& v : t.values) v *= scale;
    }
    return std::accumulate(losses.begin(), losses.end(), 0.0) * scale;
}

TrainResult train(const NetworkParams& initial, const Dataset& trainset, const Dataset& valset, const TrainConfig& tcfg,
                  const EpochCallback& on_epoch) {
    tcfg.validate();
    if (trainset.samples.empty()) throw UsageError("training set is empty");
    const OfdmConfig& cfg = initial.cfg;
    const auto compatible = [&](const Dataset& ds) {
        return ds.cfg.n_subcarriers == cfg.n_subcarriers && ds.cfg.cp_length == cfg.cp_length &&
               ds.cfg.tau_relax() == cfg.tau_relax();
    };
    if (!compatible(trainset) || !compatible(valset)) {
        throw DimensionError("dataset dimensions do not match the network configuration");
    }

    TrainResult result;
    result.best = initial;
    NetworkParams params = initial;
    AdamState adam = AdamState::for_params(params);
    Rng shuffle_rng = make_rng(tcfg.seed, Stream::shuffle);

    std::vector<std::size_t> order(trainset.samples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Gradients grads;
    const auto start = std::chrono::steady_clock::now();
    int stale = 0;

    for (int epoch = 1; epoch <= tcfg.max_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        double loss_sum = 0.0;
        for (std::size_t b = 0; b < order.size(); b += static_cast<std::size_t>(tcfg.batch_size)) {
            const std::size_t len = std::min(order.size() - b, static_cast<std::size_t>(tcfg.batch_size));
            const std::span<const std::size_t> batch(order.data() + b, len);
            const double loss = batch_gradients(params, trainset, batch, grads, tcfg.threads);
            if (!std::isfinite(loss)) {
                throw DivergenceError("non-finite training loss at epoch " + std::to_string(epoch) + ", step " +
                                      std::to_string(adam.step + 1));
            }
            loss_sum += loss * static_cast<double>(len);
            adam_step(params, grads, adam, tcfg);
        }

        EpochLog row;
        row.epoch = epoch;
        row.mean_loss = loss_sum / static_cast<double>(order.size());
        row.val_r_err = epoch_error_rate(params, valset, tcfg.threads);
        row.elapsed_sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        result.log.push_back(row);
        if (on_epoch) on_epoch(row);

        if (epoch == 1 || row.val_r_err < result.best_r_err) {
            result.best = params;
            result.best_r_err = row.val_r_err;
            result.best_epoch = epoch;
            stale = 0;
        } else if (tcfg.patience > 0 && ++stale >= tcfg.patience) {
            break;
        }
    }
    return result;
}

void write_train_log(const std::vector<EpochLog>& log, std::ostream& os) {
    os << "epoch,mean_loss,val_R_err,elapsed_sec\n";
    for (const auto& row : log) {
        os << row.epoch << ',' << row.mean_loss << ',' << row.val_r_err << ',' << row.elapsed_sec << '\n';
    }
}

}  // namespace osl
