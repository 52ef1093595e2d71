#include "osl/network.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include "osl/binary_io.hpp"
#include "osl/errors.hpp"
#include "osl/rng.hpp"

namespace osl {
namespace {

using ConstRowMap = Eigen::Map<const RowMatrix>;
using RowMap = Eigen::Map<RowMatrix>;
using Im2Col = Eigen::Map<const RowMatrix, 0, Eigen::OuterStride<>>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;
using VecMap = Eigen::Map<Eigen::VectorXd>;

constexpr std::string_view kModelMagic = "OSLM";
constexpr std::uint32_t kModelVersion = 1;

// Row i of the view is the receptive field of output position i; rows
// overlap in memory, which is fine for a read-only operand.
Im2Col im2col(const std::vector<double>& padded, const ConvSpec& s) {
    return Im2Col(padded.data(), s.out_length(), static_cast<Eigen::Index>(s.kernel) * s.in_channels,
                  Eigen::OuterStride<>(static_cast<Eigen::Index>(s.stride) * s.in_channels));
}

Tensor make_tensor(std::string name, std::vector<int> shape) {
    std::size_t n = 1;
    for (int d : shape) n *= static_cast<std::size_t>(d);
    return Tensor{std::move(name), std::move(shape), std::vector<double>(n, 0.0)};
}

void glorot_fill(Tensor& t, int fan_in, int fan_out, Rng& rng) {
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (auto& v : t.values) v = dist(rng);
}

std::vector<int> fcnn_layer_sizes(const OfdmConfig& cfg, const std::vector<int>& hidden) {
    std::vector<int> sizes{2 * cfg.window_length()};
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(cfg.symbol_length());
    return sizes;
}

// Tensors (without values) that a graph of this kind/cfg must contain.
std::vector<Tensor> expected_layout(GraphKind kind, const OfdmConfig& cfg, const std::vector<int>& hidden) {
    std::vector<Tensor> tensors;
    if (kind == GraphKind::cnn) {
        const auto g = CnnGeometry::from(cfg);
        for (int l = 0; l < 3; ++l) {
            const auto& c = g.conv[l];
            const std::string prefix = "conv" + std::to_string(l + 1);
            tensors.push_back(make_tensor(prefix + ".weight", {c.filters, c.kernel, c.in_channels}));
            tensors.push_back(make_tensor(prefix + ".bias", {c.filters}));
        }
        tensors.push_back(make_tensor("dense1.weight", {g.hidden, g.flatten_dim}));
        tensors.push_back(make_tensor("dense1.bias", {g.hidden}));
        tensors.push_back(make_tensor("dense2.weight", {g.classes, g.hidden}));
        tensors.push_back(make_tensor("dense2.bias", {g.classes}));
    } else {
        const auto sizes = fcnn_layer_sizes(cfg, hidden);
        for (std::size_t l = 1; l < sizes.size(); ++l) {
            const std::string prefix = "fc" + std::to_string(l);
            tensors.push_back(make_tensor(prefix + ".weight", {sizes[l], sizes[l - 1]}));
            tensors.push_back(make_tensor(prefix + ".bias", {sizes[l]}));
        }
    }
    return tensors;
}

void check_input(const NetworkParams& params, std::span<const double> y) {
    if (static_cast<int>(y.size()) != 2 * params.cfg.window_length()) {
        throw DimensionError("network input must have length 2M=" + std::to_string(2 * params.cfg.window_length()) +
                             ", got " + std::to_string(y.size()));
    }
}

void conv_forward(const ConvSpec& s, const Tensor& w, const Tensor& b, const std::vector<double>& padded,
                  RowMatrix& pre, RowMatrix& out) {
    const ConstRowMap weights(w.values.data(), s.filters, static_cast<Eigen::Index>(s.kernel) * s.in_channels);
    pre.resize(s.out_length(), s.filters);
    pre.noalias() = im2col(padded, s) * weights.transpose();
    pre.rowwise() += Eigen::Map<const Eigen::RowVectorXd>(b.values.data(), s.filters);
    out = pre.cwiseMax(0.0);
}

// Zero-pads a (length x channels) map along the length axis.
void pad_into(const RowMatrix& map, const ConvSpec& s, std::vector<double>& padded) {
    padded.assign(static_cast<std::size_t>(s.in_length + s.pad_left + s.pad_right) * s.in_channels, 0.0);
    std::copy(map.data(), map.data() + map.size(), padded.begin() + static_cast<std::ptrdiff_t>(s.pad_left) * s.in_channels);
}

// Accumulates weight/bias gradients; when d_in is non-null also returns the
// gradient w.r.t. the unpadded layer input.
void conv_backward(const ConvSpec& s, const Tensor& w, const std::vector<double>& padded, const RowMatrix& d_pre,
                   Tensor& gw, Tensor& gb, RowMatrix* d_in) {
    const Eigen::Index cols = static_cast<Eigen::Index>(s.kernel) * s.in_channels;
    RowMap grad_w(gw.values.data(), s.filters, cols);
    grad_w.noalias() += d_pre.transpose() * im2col(padded, s);
    Eigen::Map<Eigen::RowVectorXd>(gb.values.data(), s.filters) += d_pre.colwise().sum();
    if (d_in == nullptr) return;

    const ConstRowMap weights(w.values.data(), s.filters, cols);
    const RowMatrix d_cols = d_pre * weights;
    std::vector<double> d_padded(padded.size(), 0.0);
    const std::size_t step = static_cast<std::size_t>(s.stride) * s.in_channels;
    for (Eigen::Index i = 0; i < d_cols.rows(); ++i) {
        double* dst = d_padded.data() + i * step;
        const double* src = d_cols.data() + i * cols;
        for (Eigen::Index j = 0; j < cols; ++j) dst[j] += src[j];
    }
    d_in->resize(s.in_length, s.in_channels);
    std::copy_n(d_padded.begin() + static_cast<std::ptrdiff_t>(s.pad_left) * s.in_channels, d_in->size(), d_in->data());
}

void softmax_into(const Eigen::VectorXd& logits, Eigen::VectorXd& probs) {
    const double peak = logits.maxCoeff();
    probs = (logits.array() - peak).exp().matrix();
    probs /= probs.sum();
}

double cross_entropy(const Eigen::VectorXd& logits, int target) {
    const double peak = logits.maxCoeff();
    const double lse = peak + std::log((logits.array() - peak).exp().sum());
    return lse - logits[target];
}

const Eigen::VectorXd& forward_cnn(const NetworkParams& params, std::span<const double> y, ForwardCache& c) {
    const auto g = CnnGeometry::from(params.cfg);
    const auto& t = params.tensors;
    c.conv_in.resize(3);
    c.conv_pre.resize(3);
    c.conv_out.resize(3);
    c.conv_in[0].assign(y.begin(), y.end());
    for (int l = 0; l < 3; ++l) {
        if (l > 0) pad_into(c.conv_out[l - 1], g.conv[l], c.conv_in[l]);
        conv_forward(g.conv[l], t[2 * l], t[2 * l + 1], c.conv_in[l], c.conv_pre[l], c.conv_out[l]);
    }
    const RowMatrix& last = c.conv_out[2];
    const int channels = g.conv[2].filters;
    c.pooled.resize(g.pooled_length, channels);
    for (int i = 0; i < g.pooled_length; ++i) c.pooled.row(i) = 0.5 * (last.row(2 * i) + last.row(2 * i + 1));

    c.dense_in.resize(2);
    c.dense_pre.resize(2);
    // position-major flatten is the row-major storage order of `pooled`
    c.dense_in[0] = Eigen::Map<const Eigen::VectorXd>(c.pooled.data(), c.pooled.size());
    for (int d = 0; d < 2; ++d) {
        const Tensor& w = t[6 + 2 * d];
        const Tensor& b = t[7 + 2 * d];
        const ConstRowMap weights(w.values.data(), w.shape[0], w.shape[1]);
        c.dense_pre[d].noalias() = weights * c.dense_in[d];
        c.dense_pre[d] += ConstVecMap(b.values.data(), w.shape[0]);
        if (d == 0) c.dense_in.at(1) = c.dense_pre[0].array().tanh().matrix();
    }
    c.logits = c.dense_pre[1];
    softmax_into(c.logits, c.probs);
    return c.probs;
}

const Eigen::VectorXd& forward_fcnn(const NetworkParams& params, std::span<const double> y, ForwardCache& c) {
    const std::size_t layers = params.tensors.size() / 2;
    c.conv_in.clear();
    c.conv_pre.clear();
    c.conv_out.clear();
    c.dense_in.resize(layers);
    c.dense_pre.resize(layers);
    c.dense_in[0] = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
    for (std::size_t l = 0; l < layers; ++l) {
        const Tensor& w = params.tensors[2 * l];
        const Tensor& b = params.tensors[2 * l + 1];
        const ConstRowMap weights(w.values.data(), w.shape[0], w.shape[1]);
        c.dense_pre[l].noalias() = weights * c.dense_in[l];
        c.dense_pre[l] += ConstVecMap(b.values.data(), w.shape[0]);
        if (l + 1 < layers) c.dense_in[l + 1] = c.dense_pre[l].array().tanh().matrix();
    }
    c.logits = c.dense_pre[layers - 1];
    softmax_into(c.logits, c.probs);
    return c.probs;
}

// Backpropagates through the dense stack from the output; returns the
// gradient w.r.t. the first dense layer's input.
Eigen::VectorXd dense_backward(const NetworkParams& params, const ForwardCache& c, std::size_t first_tensor, int target,
                               Gradients& grads) {
    const std::size_t layers = c.dense_pre.size();
    Eigen::VectorXd delta = c.probs;
    delta[target] -= 1.0;
    for (std::size_t k = layers; k-- > 0;) {
        const Tensor& w = params.tensors[first_tensor + 2 * k];
        RowMap grad_w(grads[first_tensor + 2 * k].values.data(), w.shape[0], w.shape[1]);
        grad_w.noalias() += delta * c.dense_in[k].transpose();
        VecMap(grads[first_tensor + 2 * k + 1].values.data(), w.shape[0]) += delta;
        const ConstRowMap weights(w.values.data(), w.shape[0], w.shape[1]);
        Eigen::VectorXd d_in = weights.transpose() * delta;
        if (k > 0) {
            // inputs of inner dense layers are tanh outputs
            delta = d_in.array() * (1.0 - c.dense_in[k].array().square());
        } else {
            return d_in;
        }
    }
    return {};
}

double backward_cnn(const NetworkParams& params, ForwardCache& c, int target, Gradients& grads) {
    const auto g = CnnGeometry::from(params.cfg);
    const Eigen::VectorXd d_flat = dense_backward(params, c, 6, target, grads);

    const int channels = g.conv[2].filters;
    RowMatrix d_out = RowMatrix::Zero(g.conv[2].out_length(), channels);
    for (int i = 0; i < g.pooled_length; ++i) {
        for (int ch = 0; ch < channels; ++ch) {
            const double v = 0.5 * d_flat[i * channels + ch];
            d_out(2 * i, ch) = v;
            d_out(2 * i + 1, ch) = v;
        }
    }
    RowMatrix d_in;
    for (int l = 2; l >= 0; --l) {
        const RowMatrix d_pre = d_out.cwiseProduct((c.conv_pre[l].array() > 0.0).cast<double>().matrix());
        conv_backward(g.conv[l], params.tensors[2 * l], c.conv_in[l], d_pre, grads[2 * l], grads[2 * l + 1],
                      l > 0 ? &d_in : nullptr);
        if (l > 0) d_out.swap(d_in);
    }
    return cross_entropy(c.logits, target);
}

}  // namespace

std::string_view to_string(GraphKind kind) { return kind == GraphKind::cnn ? "cnn" : "fcnn"; }

GraphKind parse_graph_kind(std::string_view name) {
    if (name == "cnn") return GraphKind::cnn;
    if (name == "fcnn" || name == "dnn") return GraphKind::fcnn;
    throw ConfigError("unknown graph kind '" + std::string(name) + "' (expected cnn or fcnn)");
}

const Tensor& NetworkParams::tensor(std::string_view name) const {
    for (const auto& t : tensors) {
        if (t.name == name) return t;
    }
    throw UsageError("no tensor named " + std::string(name));
}

std::size_t NetworkParams::parameter_count() const {
    std::size_t n = 0;
    for (const auto& t : tensors) n += t.values.size();
    return n;
}

Gradients zero_gradients(const NetworkParams& params) {
    Gradients g = params.tensors;
    for (auto& t : g) std::fill(t.values.begin(), t.values.end(), 0.0);
    return g;
}

CnnGeometry CnnGeometry::from(const OfdmConfig& cfg) {
    const int n = cfg.n_subcarriers;
    const int nu = cfg.symbol_length();
    const int small_kernel = ceil_div(cfg.cp_length, 2) + 1;
    const int same_left = (small_kernel - 1) / 2;
    const int same_right = small_kernel - 1 - same_left;

    CnnGeometry g;
    g.conv[0] = ConvSpec{2 * n + 1, 1, 4, 2, 0, 0, 2 * cfg.window_length()};
    g.conv[1] = ConvSpec{small_kernel, 4, 4, 1, same_left, same_right, g.conv[0].out_length()};
    g.conv[2] = ConvSpec{small_kernel, 4, 2, 1, same_left, same_right, g.conv[1].out_length()};
    g.pooled_length = g.conv[2].out_length() / 2;
    g.flatten_dim = g.pooled_length * g.conv[2].filters;
    g.hidden = nu;
    g.classes = nu;
    if (g.conv[0].out_length() != nu) throw ConfigError("first convolution does not produce N_u positions");
    return g;
}

NetworkParams init_params(const OfdmConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    NetworkParams p;
    p.kind = GraphKind::cnn;
    p.cfg = cfg;
    p.tensors = expected_layout(GraphKind::cnn, cfg, {});
    Rng rng = make_rng(seed, Stream::init);
    for (std::size_t i = 0; i < p.tensors.size(); i += 2) {
        Tensor& w = p.tensors[i];
        if (w.shape.size() == 3) {
            glorot_fill(w, w.shape[1] * w.shape[2], w.shape[1] * w.shape[0], rng);
        } else {
            glorot_fill(w, w.shape[1], w.shape[0], rng);
        }
    }
    return p;
}

NetworkParams build_fcnn_baseline(const OfdmConfig& cfg, const std::vector<int>& hidden_sizes, std::uint64_t seed) {
    cfg.validate();
    if (hidden_sizes.empty()) throw ConfigError("FCNN baseline needs at least one hidden layer");
    for (int h : hidden_sizes) {
        if (h < 1) throw ConfigError("FCNN hidden sizes must be positive");
    }
    NetworkParams p;
    p.kind = GraphKind::fcnn;
    p.cfg = cfg;
    p.hidden_sizes = hidden_sizes;
    p.tensors = expected_layout(GraphKind::fcnn, cfg, hidden_sizes);
    Rng rng = make_rng(seed, Stream::init);
    for (std::size_t i = 0; i < p.tensors.size(); i += 2) {
        Tensor& w = p.tensors[i];
        glorot_fill(w, w.shape[1], w.shape[0], rng);
    }
    return p;
}

std::vector<std::pair<int, int>> ForwardCache::stage_shapes() const {
    std::vector<std::pair<int, int>> shapes;
    for (const auto& m : conv_out) shapes.emplace_back(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
    if (kind == GraphKind::cnn) {
        shapes.emplace_back(static_cast<int>(pooled.rows()), static_cast<int>(pooled.cols()));
        shapes.emplace_back(static_cast<int>(pooled.size()), 1);
    }
    for (const auto& z : dense_pre) shapes.emplace_back(static_cast<int>(z.size()), 1);
    return shapes;
}

const Eigen::VectorXd& forward(const NetworkParams& params, std::span<const double> y, ForwardCache& cache) {
    check_input(params, y);
    cache.kind = params.kind;
    cache.valid = false;
    cache.input.assign(y.begin(), y.end());
    const auto& probs = params.kind == GraphKind::cnn ? forward_cnn(params, y, cache) : forward_fcnn(params, y, cache);
    cache.valid = true;
    return probs;
}

ForwardCache forward(const NetworkParams& params, std::span<const double> y) {
    ForwardCache cache;
    forward(params, y, cache);
    return cache;
}

double accumulate_gradients(const NetworkParams& params, ForwardCache& cache, int target, Gradients& grads) {
    if (!cache.valid || cache.kind != params.kind) throw UsageError("backward called without a matching forward pass");
    if (target < 0 || target >= cache.probs.size()) throw UsageError("target class out of range");
    if (grads.size() != params.tensors.size()) throw DimensionError("gradient buffer does not match parameters");
    if (params.kind == GraphKind::cnn) return backward_cnn(params, cache, target, grads);
    dense_backward(params, cache, 0, target, grads);
    return cross_entropy(cache.logits, target);
}

std::pair<Gradients, double> backward(const NetworkParams& params, ForwardCache& cache, int target) {
    Gradients grads = zero_gradients(params);
    const double loss = accumulate_gradients(params, cache, target, grads);
    return {std::move(grads), loss};
}

void save_params(const NetworkParams& params, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    io::Writer w(out);
    w.put_bytes(kModelMagic);
    w.put<std::uint32_t>(kModelVersion);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(params.kind));
    const auto& cfg = params.cfg;
    w.put<std::uint32_t>(cfg.n_subcarriers);
    w.put<std::uint32_t>(cfg.cp_length);
    w.put<std::uint32_t>(cfg.zc_root);
    w.put<std::uint32_t>(cfg.tau_p);
    w.put<std::uint32_t>(cfg.relaxed ? 1 : 0);
    w.put<double>(cfg.sigma_d2);
    w.put<double>(cfg.cfo_max);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(params.hidden_sizes.size()));
    for (int h : params.hidden_sizes) w.put<std::uint32_t>(h);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(params.tensors.size()));
    for (const auto& t : params.tensors) {
        w.put<std::uint32_t>(static_cast<std::uint32_t>(t.name.size()));
        w.put_bytes(t.name);
        w.put<std::uint32_t>(static_cast<std::uint32_t>(t.shape.size()));
        for (int d : t.shape) w.put<std::uint32_t>(d);
        for (double v : t.values) w.put<float>(static_cast<float>(v));
    }
    if (!w.ok()) throw std::runtime_error("write failed for " + path.string());
}

NetworkParams load_params(const std::filesystem::path& path, std::optional<GraphKind> expected_kind,
                          const std::optional<OfdmConfig>& expected_cfg) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open model " + path.string());
    io::Reader r(in, path.string());
    if (r.get_bytes(4) != kModelMagic) throw FormatError(path.string() + ": bad magic, not an OSLM model");
    if (const auto v = r.get<std::uint32_t>(); v != kModelVersion) {
        throw FormatError(path.string() + ": unsupported model version " + std::to_string(v));
    }
    NetworkParams p;
    const auto kind = r.get<std::uint32_t>();
    if (kind > 1) throw FormatError(path.string() + ": unknown graph kind tag");
    p.kind = static_cast<GraphKind>(kind);
    if (expected_kind && *expected_kind != p.kind) {
        throw FormatError(path.string() + ": holds a " + std::string(to_string(p.kind)) + " graph, expected " +
                          std::string(to_string(*expected_kind)));
    }
    auto& cfg = p.cfg;
    cfg.n_subcarriers = static_cast<int>(r.get<std::uint32_t>());
    cfg.cp_length = static_cast<int>(r.get<std::uint32_t>());
    cfg.zc_root = static_cast<int>(r.get<std::uint32_t>());
    cfg.tau_p = static_cast<int>(r.get<std::uint32_t>());
    cfg.relaxed = r.get<std::uint32_t>() != 0;
    cfg.sigma_d2 = r.get<double>();
    cfg.cfo_max = r.get<double>();
    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        throw FormatError(path.string() + ": invalid configuration block: " + e.what());
    }
    if (expected_cfg && (expected_cfg->n_subcarriers != cfg.n_subcarriers || expected_cfg->cp_length != cfg.cp_length ||
                         expected_cfg->zc_root != cfg.zc_root || expected_cfg->tau_relax() != cfg.tau_relax())) {
        throw FormatError(path.string() + ": model configuration does not match the runtime configuration");
    }
    const auto hidden_count = r.get<std::uint32_t>();
    if (hidden_count > 64) throw FormatError(path.string() + ": implausible hidden layer count");
    for (std::uint32_t i = 0; i < hidden_count; ++i) p.hidden_sizes.push_back(static_cast<int>(r.get<std::uint32_t>()));
    if (p.kind == GraphKind::fcnn && p.hidden_sizes.empty()) throw FormatError(path.string() + ": fcnn without hidden layers");

    p.tensors = expected_layout(p.kind, cfg, p.hidden_sizes);
    if (r.get<std::uint32_t>() != p.tensors.size()) throw FormatError(path.string() + ": unexpected tensor count");
    for (auto& t : p.tensors) {
        const auto name_len = r.get<std::uint32_t>();
        if (name_len > 256 || r.get_bytes(name_len) != t.name) throw FormatError(path.string() + ": expected tensor " + t.name);
        const auto ndim = r.get<std::uint32_t>();
        if (ndim != t.shape.size()) throw FormatError(path.string() + ": rank mismatch for " + t.name);
        for (int d : t.shape) {
            if (r.get<std::uint32_t>() != static_cast<std::uint32_t>(d)) throw FormatError(path.string() + ": shape mismatch for " + t.name);
        }
        for (auto& v : t.values) v = r.get<float>();
    }
    if (!r.at_end()) throw FormatError(path.string() + ": trailing bytes after tensor table");
    return p;
}

}  // namespace osl
