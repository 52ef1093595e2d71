#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "doctest.h"
#include "osl/channel.hpp"
#include "osl/errors.hpp"
#include "osl/rng.hpp"

using namespace osl;

namespace {

double sum(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

// Straightforward re-derivation of the TDL quantization rule.
std::map<int, double> brute_force_quantize(const std::vector<TdlRow>& rows, int tau_p) {
    double max_delay = 0.0;
    for (const auto& r : rows) max_delay = std::max(max_delay, r.normalized_delay);
    std::map<int, double> taps;
    for (const auto& r : rows) {
        const int d = static_cast<int>(std::lround(r.normalized_delay / max_delay * tau_p));
        taps[d] += std::pow(10.0, r.power_db / 10.0);
    }
    double total = 0.0;
    for (const auto& [d, p] : taps) total += p;
    for (auto& [d, p] : taps) p /= total;
    return taps;
}

ChannelRealization one_tap(int to, double cfo = 0.0) {
    ChannelRealization ch;
    ch.taps = {cdouble(1.0)};
    ch.timing_offset = to;
    ch.cfo = cfo;
    return ch;
}

}  // namespace

TEST_SUITE("channel") {

TEST_CASE("exponential profile") {
    const auto single = exp_pdp(1, 0.3);
    CHECK(single.delays == std::vector<int>{0});
    CHECK(single.powers[0] == doctest::Approx(1.0));

    const auto three = exp_pdp(3, 1.0);
    const double z = 1.0 + std::exp(-1.0) + std::exp(-2.0);
    CHECK(three.delays == std::vector<int>{0, 1, 2});
    CHECK(three.powers[0] == doctest::Approx(1.0 / z));
    CHECK(three.powers[1] == doctest::Approx(std::exp(-1.0) / z));
    CHECK(three.powers[2] == doctest::Approx(std::exp(-2.0) / z));

    const auto test_profile = exp_pdp(23, 1.0 / 23.0);
    CHECK(test_profile.size() == 23u);
    CHECK(std::abs(sum(test_profile.powers) - 1.0) < 1e-9);
    CHECK_NOTHROW(test_profile.validate());

    CHECK_THROWS_AS(exp_pdp(3, 0.0), ConfigError);
    CHECK_THROWS_AS(exp_pdp(3, -1.0), ConfigError);
    CHECK_THROWS_AS(exp_pdp(0, 1.0), ConfigError);
}

TEST_CASE("profiles from random parameters satisfy the invariants") {
    Rng rng(17);
    std::uniform_int_distribution<int> taps(1, 40);
    std::uniform_real_distribution<double> eta(0.001, 3.0);
    for (int i = 0; i < 200; ++i) {
        const auto pdp = exp_pdp(taps(rng), eta(rng));
        CHECK_NOTHROW(pdp.validate());
        CHECK(pdp.delays.front() == 0);
        CHECK(std::is_sorted(pdp.delays.begin(), pdp.delays.end()));
    }
}

TEST_CASE("TDL profiles are quantized to the requested maximum delay") {
    const std::pair<TdlProfile, int> cases[] = {{TdlProfile::A, 22}, {TdlProfile::B, 22}, {TdlProfile::C, 23}};
    for (auto [profile, tau] : cases) {
        const auto pdp = tdl_pdp(profile, tau);
        CHECK(pdp.max_delay() == tau);
        CHECK(pdp.delays.front() == 0);
        CHECK(std::abs(sum(pdp.powers) - 1.0) < 1e-9);
        CHECK_NOTHROW(pdp.validate());
    }
}

TEST_CASE("TDL quantizer agrees with a brute-force quantizer") {
    for (auto profile : {TdlProfile::A, TdlProfile::B, TdlProfile::C}) {
        const auto rows = read_tdl_table(default_tdl_dir() / (std::string(to_string(profile)) + ".txt"));
        for (int tau : {5, 11, 22, 23, 40}) {
            const auto pdp = quantize_tdl(rows, tau);
            const auto oracle = brute_force_quantize(rows, tau);
            REQUIRE(pdp.size() == oracle.size());
            CHECK(pdp.size() <= rows.size());
            std::size_t i = 0;
            for (const auto& [d, p] : oracle) {
                CHECK(pdp.delays[i] == d);
                CHECK(pdp.powers[i] == doctest::Approx(p).epsilon(1e-12));
                ++i;
            }
        }
    }
}

TEST_CASE("TDL table rows") {
    CHECK(read_tdl_table(default_tdl_dir() / "tdl_a.txt").size() == 23u);
    CHECK(read_tdl_table(default_tdl_dir() / "tdl_b.txt").size() == 23u);
    CHECK(read_tdl_table(default_tdl_dir() / "tdl_c.txt").size() == 24u);
    CHECK_THROWS_AS(parse_tdl_profile("tdl_z"), ConfigError);
    CHECK(parse_tdl_profile("tdl_b") == TdlProfile::B);
}

TEST_CASE("tap gains have the profile's second moments") {
    const auto pdp = exp_pdp(4, 0.7);
    Rng rng(2024);
    std::vector<double> acc(pdp.size(), 0.0);
    const int draws = 100000;
    for (int k = 0; k < draws; ++k) {
        const auto h = realize_channel(pdp, rng);
        for (std::size_t p = 0; p < h.size(); ++p) acc[p] += std::norm(h[p]);
    }
    for (std::size_t p = 0; p < pdp.size(); ++p) {
        CHECK(std::abs(acc[p] / draws - pdp.powers[p]) / pdp.powers[p] < 0.05);
    }
}

TEST_CASE("tap gains are reproducible for a fixed seed") {
    const auto pdp = exp_pdp(8, 0.2);
    Rng a(99), b(99);
    CHECK(realize_channel(pdp, a) == realize_channel(pdp, b));
}

TEST_CASE("identity channel reproduces the transmit stream") {
    OfdmConfig cfg;
    Rng rng(1);
    const auto frame = build_frame(cfg, rng);
    const auto window = propagate(frame, exp_pdp(1, 1.0), one_tap(0), cfg);
    REQUIRE(window.size() == 288u);
    for (int w = 0; w < 288; ++w) CHECK(window[w] == frame.samples[frame.train_start + w]);

    // the training CP start lands at index to
    const auto shifted = propagate(frame, exp_pdp(1, 1.0), one_tap(40), cfg);
    CHECK(shifted[40] == frame.samples[frame.train_start]);
}

TEST_CASE("two-tap channel matches a direct convolution") {
    OfdmConfig cfg;
    Rng rng(8);
    const auto frame = build_frame(cfg, rng);
    PdpProfile pdp{{0, 5}, {0.3, 0.7}};
    ChannelRealization ch;
    ch.taps = {cdouble(0.4, -0.2), cdouble(-0.1, 0.8)};
    for (int to : {0, 17, 127}) {
        ch.timing_offset = to;
        const auto window = propagate(frame, pdp, ch, cfg);
        for (int n = 0; n < cfg.window_length(); ++n) {
            cdouble expected{};
            for (std::size_t p = 0; p < pdp.size(); ++p) {
                const int idx = frame.train_start + n - to - pdp.delays[p];
                if (idx >= 0 && idx < static_cast<int>(frame.samples.size())) expected += ch.taps[p] * frame.samples[idx];
            }
            CHECK(std::abs(window[n] - expected) < 1e-9);
        }
    }
}

TEST_CASE("carrier frequency offset only rotates samples") {
    OfdmConfig cfg;
    Rng rng(4);
    const auto frame = build_frame(cfg, rng);
    const PdpProfile pdp{{0, 3}, {0.5, 0.5}};
    ChannelRealization ch;
    ch.taps = {cdouble(0.7, 0.1), cdouble(0.2, -0.5)};
    ch.timing_offset = 33;
    const auto plain = propagate(frame, pdp, ch, cfg);
    ch.cfo = 0.23;
    const auto rotated = propagate(frame, pdp, ch, cfg);
    for (int n = 0; n < cfg.window_length(); ++n) {
        CHECK(std::abs(rotated[n]) == doctest::Approx(std::abs(plain[n])).epsilon(1e-12));
        const auto phase = std::polar(1.0, 2.0 * std::numbers::pi * 0.23 * (n - 33) / 128.0);
        CHECK(std::abs(rotated[n] - plain[n] * phase) < 1e-12);
    }
}

TEST_CASE("measured SNR matches the requested SNR") {
    OfdmConfig cfg;
    const auto pdp = exp_pdp(23, 1.0 / 23.0);
    for (double snr : {-4.0, 3.0, 10.0}) {
        Rng rng(static_cast<std::uint64_t>(snr + 100));
        double signal = 0.0;
        double noise = 0.0;
        for (int k = 0; k < 10000; ++k) {
            const auto frame = build_frame(cfg, rng);
            ChannelRealization ch;
            ch.taps = realize_channel(pdp, rng);
            ch.timing_offset = std::uniform_int_distribution<int>(0, 127)(rng);
            const auto clean = propagate(frame, pdp, ch, cfg);
            auto noisy = clean;
            add_awgn(noisy, snr, cfg, rng);
            for (std::size_t n = 0; n < clean.size(); ++n) {
                signal += std::norm(clean[n]);
                noise += std::norm(noisy[n] - clean[n]);
            }
        }
        CHECK(std::abs(10.0 * std::log10(signal / noise) - snr) < 0.2);
    }
}

TEST_CASE("channel is linear in the transmit stream") {
    OfdmConfig cfg;
    Rng rng(12);
    const auto a = build_frame(cfg, rng);
    const auto b = build_frame(cfg, rng);
    TxFrame mix = a;
    const cdouble alpha(0.3, -1.2), beta(2.0, 0.5);
    for (std::size_t i = 0; i < mix.samples.size(); ++i) mix.samples[i] = alpha * a.samples[i] + beta * b.samples[i];
    const auto pdp = exp_pdp(6, 0.4);
    ChannelRealization ch;
    ch.taps = realize_channel(pdp, rng);
    ch.timing_offset = 71;
    ch.cfo = 0.1;
    const auto ra = propagate(a, pdp, ch, cfg);
    const auto rb = propagate(b, pdp, ch, cfg);
    const auto rm = propagate(mix, pdp, ch, cfg);
    for (std::size_t n = 0; n < rm.size(); ++n) CHECK(std::abs(rm[n] - (alpha * ra[n] + beta * rb[n])) < 1e-9);

}

TEST_CASE("timing offset outside the window is rejected") {
    OfdmConfig cfg;
    Rng rng(1);
    const auto frame = build_frame(cfg, rng);
    CHECK_THROWS_AS(propagate(frame, exp_pdp(1, 1.0), one_tap(-1), cfg), UsageError);
    CHECK_THROWS_AS(propagate(frame, exp_pdp(1, 1.0), one_tap(128), cfg), UsageError);
    ChannelRealization wrong = one_tap(0);
    wrong.taps.push_back(1.0);
    CHECK_THROWS_AS(propagate(frame, exp_pdp(1, 1.0), wrong, cfg), DimensionError);
}

}
