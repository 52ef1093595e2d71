#include <cmath>
#include <fstream>

#include "doctest.h"
#include "helpers.hpp"
#include "osl/errors.hpp"
#include "osl/network.hpp"
#include "osl/rng.hpp"

using namespace osl;

namespace {

OfdmConfig tiny_cfg() { return OfdmConfig::scaled(16, 4); }

std::vector<double> random_input(const OfdmConfig& cfg, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> y(2 * cfg.window_length());
    for (auto& v : y) v = normal(rng);
    return y;
}

void randomize_biases(NetworkParams& p, std::uint64_t seed) {
    Rng rng(seed);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    for (auto& t : p.tensors) {
        if (t.name.ends_with(".bias")) {
            for (auto& v : t.values) v = u(rng);
        }
    }
}

double loss_at(const NetworkParams& p, const std::vector<double>& y, int target) {
    const auto cache = forward(p, y);
    return -std::log(cache.probs[target]);
}

// Central differences on every parameter, compared tensor by tensor.
void check_gradients(NetworkParams params, const std::vector<double>& y, int target) {
    ForwardCache cache;
    forward(params, y, cache);
    const auto [grads, loss] = backward(params, cache, target);
    CHECK(loss == doctest::Approx(loss_at(params, y, target)).epsilon(1e-12));
    const double h = 1e-4;
    for (std::size_t t = 0; t < params.tensors.size(); ++t) {
        double diff2 = 0.0;
        double ref2 = 0.0;
        for (std::size_t i = 0; i < params.tensors[t].values.size(); ++i) {
            double& w = params.tensors[t].values[i];
            const double saved = w;
            w = saved + h;
            const double up = loss_at(params, y, target);
            w = saved - h;
            const double down = loss_at(params, y, target);
            w = saved;
            const double fd = (up - down) / (2.0 * h);
            const double an = grads[t].values[i];
            diff2 += (fd - an) * (fd - an);
            ref2 += std::max(fd * fd, an * an);
        }
        INFO("tensor ", params.tensors[t].name);
        CHECK(std::sqrt(diff2) <= 1e-4 * std::max(std::sqrt(ref2), 1e-8));
    }
}

}  // namespace

TEST_SUITE("network") {

TEST_CASE("layer shapes for the default configuration") {
    OfdmConfig cfg;
    const auto p = init_params(cfg, 1);
    CHECK(p.tensor("conv1.weight").shape == std::vector<int>{4, 257, 1});
    CHECK(p.tensor("conv2.weight").shape == std::vector<int>{4, 17, 4});
    CHECK(p.tensor("conv3.weight").shape == std::vector<int>{2, 17, 4});
    CHECK(p.tensor("dense1.weight").shape == std::vector<int>{160, 160});
    CHECK(p.tensor("dense2.weight").shape == std::vector<int>{160, 160});

    const auto cache = forward(p, random_input(cfg, 3));
    const std::vector<std::pair<int, int>> expected{{160, 4}, {160, 4}, {160, 2}, {80, 2}, {160, 1}, {160, 1}, {160, 1}};
    CHECK(cache.stage_shapes() == expected);
    CHECK(cache.probs.size() == 160);
}

TEST_CASE("shapes follow the configuration") {
    for (auto [n, cp] : {std::pair{64, 16}, std::pair{256, 64}, std::pair{128, 16}, std::pair{128, 64}}) {
        const auto cfg = OfdmConfig::scaled(n, cp);
        const auto g = CnnGeometry::from(cfg);
        CHECK(g.conv[0].kernel == 2 * n + 1);
        CHECK(g.conv[1].kernel == (cp + 1) / 2 + 1);
        CHECK(g.conv[0].out_length() == n + cp);
        CHECK(g.conv[1].out_length() == n + cp);
        CHECK(g.pooled_length == (n + cp) / 2);
        const auto p = init_params(cfg, 0);
        const auto cache = forward(p, random_input(cfg, 1));
        CHECK(cache.probs.size() == n + cp);
    }
}

TEST_CASE("initialization") {
    OfdmConfig cfg;
    const auto a = init_params(cfg, 5);
    const auto b = init_params(cfg, 5);
    const auto c = init_params(cfg, 6);
    CHECK(a == b);
    CHECK(!(a == c));
    for (const auto& t : a.tensors) {
        if (t.name.ends_with(".bias")) {
            for (double v : t.values) CHECK(v == 0.0);
        }
    }
    // Glorot bound for conv1: sqrt(6 / (fan_in + fan_out)), fans 257*1 and 257*4
    const double bound = std::sqrt(6.0 / (257.0 + 257.0 * 4.0));
    for (double v : a.tensor("conv1.weight").values) CHECK(std::abs(v) <= bound);
}

TEST_CASE("all-zero parameters give a uniform output") {
    OfdmConfig cfg;
    auto p = init_params(cfg, 1);
    for (auto& t : p.tensors) std::fill(t.values.begin(), t.values.end(), 0.0);
    const auto cache = forward(p, random_input(cfg, 2));
    for (Eigen::Index j = 0; j < cache.probs.size(); ++j) CHECK(cache.probs[j] == doctest::Approx(1.0 / 160.0));
}

TEST_CASE("outputs are probability vectors and forward is deterministic") {
    OfdmConfig cfg;
    const auto cnn = init_params(cfg, 9);
    const auto fcnn = build_fcnn_baseline(cfg, kDefaultFcnnHidden, 9);
    for (std::uint64_t s = 0; s < 20; ++s) {
        auto y = random_input(cfg, s);
        for (auto& v : y) v *= static_cast<double>(s + 1);  // include large inputs
        for (const auto* p : {&cnn, &fcnn}) {
            const auto c1 = forward(*p, y);
            const auto c2 = forward(*p, y);
            CHECK(c1.probs.minCoeff() >= 0.0);
            CHECK(std::abs(c1.probs.sum() - 1.0) < 1e-6);
            CHECK(c1.probs == c2.probs);
        }
    }
}

TEST_CASE("wrong input length") {
    OfdmConfig cfg;
    const auto p = init_params(cfg, 1);
    std::vector<double> y(100, 0.0);
    CHECK_THROWS_AS(forward(p, y), DimensionError);
}

TEST_CASE("cnn gradients match finite differences") {
    const auto cfg = tiny_cfg();
    auto p = init_params(cfg, 4);
    randomize_biases(p, 4);
    check_gradients(p, random_input(cfg, 10), 7);
    check_gradients(p, random_input(cfg, 11), 0);
}

TEST_CASE("fcnn gradients match finite differences") {
    const auto cfg = tiny_cfg();
    auto p = build_fcnn_baseline(cfg, {12, 10}, 4);
    randomize_biases(p, 5);
    check_gradients(p, random_input(cfg, 12), 3);
}

TEST_CASE("output-layer gradient is p minus the one-hot target") {
    const auto cfg = tiny_cfg();
    const auto p = init_params(cfg, 2);
    ForwardCache cache;
    forward(p, random_input(cfg, 1), cache);
    const Eigen::VectorXd probs = cache.probs;
    const auto [grads, loss] = backward(p, cache, 5);
    const auto& db = grads.back();
    REQUIRE(db.name == "dense2.bias");
    for (Eigen::Index j = 0; j < probs.size(); ++j) {
        CHECK(db.values[j] == doctest::Approx(probs[j] - (j == 5 ? 1.0 : 0.0)).epsilon(1e-12));
    }
    CHECK(loss == doctest::Approx(-std::log(probs[5])));
}

TEST_CASE("zero input gives zero first-layer weight gradients") {
    const auto cfg = tiny_cfg();
    auto p = init_params(cfg, 3);
    randomize_biases(p, 8);
    std::vector<double> y(2 * cfg.window_length(), 0.0);
    ForwardCache cache;
    forward(p, y, cache);
    const auto [grads, loss] = backward(p, cache, 2);
    double weight_norm = 0.0;
    double bias_norm = 0.0;
    for (double v : grads[0].values) weight_norm += v * v;
    for (double v : grads[1].values) bias_norm += v * v;
    CHECK(grads[0].name == "conv1.weight");
    CHECK(weight_norm == 0.0);
    CHECK(bias_norm > 0.0);
}

TEST_CASE("backward needs a forward cache") {
    const auto cfg = tiny_cfg();
    const auto p = init_params(cfg, 3);
    ForwardCache empty;
    CHECK_THROWS_AS(backward(p, empty, 0), UsageError);
}

TEST_CASE("fcnn baseline structure") {
    OfdmConfig cfg;
    const auto p = build_fcnn_baseline(cfg, kDefaultFcnnHidden, 1);
    CHECK(p.kind == GraphKind::fcnn);
    CHECK(p.tensors.size() == 10u);  // four hidden layers plus the output layer
    CHECK(p.tensor("fc1.weight").shape == std::vector<int>{256, 576});
    CHECK(p.tensors.back().shape == std::vector<int>{160});
    CHECK_THROWS_AS(build_fcnn_baseline(cfg, {}, 1), ConfigError);
}

TEST_CASE("model file round trip") {
    test::TempDir dir;
    OfdmConfig cfg;
    const auto p = init_params(cfg, 12);
    const auto path = dir / "m.bin";
    save_params(p, path);
    const auto back = load_params(path, GraphKind::cnn, cfg);
    REQUIRE(back.tensors.size() == p.tensors.size());
    for (std::size_t t = 0; t < p.tensors.size(); ++t) {
        CHECK(back.tensors[t].name == p.tensors[t].name);
        CHECK(back.tensors[t].shape == p.tensors[t].shape);
        for (std::size_t i = 0; i < p.tensors[t].values.size(); ++i) {
            CHECK(back.tensors[t].values[i] == static_cast<double>(static_cast<float>(p.tensors[t].values[i])));
        }
    }
    // f32 payload: a second save is byte-identical
    const auto again = dir / "m2.bin";
    save_params(back, again);
    std::ifstream f1(path, std::ios::binary), f2(again, std::ios::binary);
    const std::string b1((std::istreambuf_iterator<char>(f1)), {}), b2((std::istreambuf_iterator<char>(f2)), {});
    CHECK(b1 == b2);
    CHECK(load_params(again) == back);
}

TEST_CASE("model file mismatches raise format errors") {
    test::TempDir dir;
    OfdmConfig cfg;
    const auto fcnn_path = dir / "f.bin";
    save_params(build_fcnn_baseline(cfg, {32, 16}, 1), fcnn_path);
    CHECK_THROWS_AS(load_params(fcnn_path, GraphKind::cnn), FormatError);
    CHECK(load_params(fcnn_path, GraphKind::fcnn).hidden_sizes == std::vector<int>{32, 16});

    const auto cnn_path = dir / "c.bin";
    save_params(init_params(cfg, 1), cnn_path);
    CHECK_THROWS_AS(load_params(cnn_path, GraphKind::cnn, OfdmConfig::scaled(64, 16)), FormatError);

    std::filesystem::resize_file(cnn_path, std::filesystem::file_size(cnn_path) - 1);
    CHECK_THROWS_AS(load_params(cnn_path), FormatError);
    {
        std::ofstream junk(dir / "junk.bin", std::ios::binary);
        junk << "not a model";
    }
    CHECK_THROWS_AS(load_params(dir / "junk.bin"), FormatError);
    CHECK_THROWS_AS(load_params(dir / "absent.bin"), FormatError);
}

}
