#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "osl/config.hpp"

namespace osl {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class GraphKind : std::uint32_t { cnn = 0, fcnn = 1 };

std::string_view to_string(GraphKind kind);
GraphKind parse_graph_kind(std::string_view name);

/// Named dense tensor, row-major.
struct Tensor {
    std::string name;
    std::vector<int> shape;
    std::vector<double> values;

    bool operator==(const Tensor&) const = default;
};

/// Weights of either graph. Conv weights are [filters, kernel, in_channels],
/// dense weights are [out, in].
struct NetworkParams {
    GraphKind kind = GraphKind::cnn;
    OfdmConfig cfg;
    std::vector<int> hidden_sizes;  // fcnn only
    std::vector<Tensor> tensors;

    const Tensor& tensor(std::string_view name) const;
    std::size_t parameter_count() const;
    bool operator==(const NetworkParams&) const = default;
};

/// One tensor per NetworkParams tensor, same shapes.
using Gradients = std::vector<Tensor>;

Gradients zero_gradients(const NetworkParams& params);

/// Geometry of one 1-D convolution layer.
struct ConvSpec {
    int kernel = 0;
    int in_channels = 0;
    int filters = 0;
    int stride = 1;
    int pad_left = 0;
    int pad_right = 0;
    int in_length = 0;

    int out_length() const { return (in_length + pad_left + pad_right - kernel) / stride + 1; }
};

/// Layer geometry of the timing-synchronizer CNN, derived from cfg only.
struct CnnGeometry {
    ConvSpec conv[3];
    int pooled_length = 0;  // floor(N_u / 2)
    int flatten_dim = 0;    // 2 * floor(N_u / 2)
    int hidden = 0;         // N_u
    int classes = 0;        // N_u

    static CnnGeometry from(const OfdmConfig& cfg);
};

/// Default FCNN hidden widths, sized to match the CNN's multiplication count.
inline const std::vector<int> kDefaultFcnnHidden{256, 192, 160, 128};

/// Glorot-uniform weights, zero biases; a pure function of (cfg, seed).
NetworkParams init_params(const OfdmConfig& cfg, std::uint64_t seed);

/// Fully connected baseline 2M -> hidden... -> N_u with tanh hidden units.
NetworkParams build_fcnn_baseline(const OfdmConfig& cfg, const std::vector<int>& hidden_sizes, std::uint64_t seed);

/// Activations kept for the backward pass. Reusing one cache across calls
/// avoids reallocations.
struct ForwardCache {
    GraphKind kind = GraphKind::cnn;
    bool valid = false;
    std::vector<double> input;
    // convolution stages: zero-padded input, pre-activation, post-ReLU
    std::vector<std::vector<double>> conv_in;
    std::vector<RowMatrix> conv_pre;
    std::vector<RowMatrix> conv_out;
    RowMatrix pooled;
    // dense stages: input, pre-activation, post-activation
    std::vector<Eigen::VectorXd> dense_in;
    std::vector<Eigen::VectorXd> dense_pre;
    Eigen::VectorXd logits;
    Eigen::VectorXd probs;

    /// Output sizes of every stage after the input, for shape inspection:
    /// conv layers as (length, channels), then pooling, flatten, dense layers.
    std::vector<std::pair<int, int>> stage_shapes() const;
};

/// Runs the graph on y (length 2M) and fills cache; returns the class
/// probabilities. Throws DimensionError on a wrong input length.
const Eigen::VectorXd& forward(const NetworkParams& params, std::span<const double> y, ForwardCache& cache);
ForwardCache forward(const NetworkParams& params, std::span<const double> y);

/// Adds d(loss)/d(param) for loss = -log p_target into grads and returns the
/// loss. Throws UsageError without a valid cache.
double accumulate_gradients(const NetworkParams& params, ForwardCache& cache, int target, Gradients& grads);

std::pair<Gradients, double> backward(const NetworkParams& params, ForwardCache& cache, int target);

/// Model container ("OSLM"), f32 payload.
void save_params(const NetworkParams& params, const std::filesystem::path& path);

/// Throws FormatError on a malformed file, or when the graph kind or the
/// frame dimensions differ from the expected ones.
NetworkParams load_params(const std::filesystem::path& path, std::optional<GraphKind> expected_kind = std::nullopt,
                          const std::optional<OfdmConfig>& expected_cfg = std::nullopt);

}  // namespace osl
