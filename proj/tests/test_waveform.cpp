#include <cmath>
#include <numbers>

#include "doctest.h"
#include "helpers.hpp"
#include "osl/errors.hpp"
#include "osl/rng.hpp"
#include "osl/waveform.hpp"

using namespace osl;

TEST_SUITE("waveform") {

TEST_CASE("zadoff-chu sequence has unit modulus") {
    for (int n : {16, 64, 128, 256}) {
        const auto d = zc_sequence(n, n == 16 ? 3 : 25);
        REQUIRE(d.size() == static_cast<std::size_t>(n));
        for (const auto& v : d) CHECK(std::abs(v) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("zadoff-chu closed form for a small case") {
    const auto d = zc_sequence(8, 3);
    CHECK(d[0].real() == doctest::Approx(1.0));
    // k = 2: exp(-j*pi*3*4/8)
    const auto expected = std::polar(1.0, -std::numbers::pi * 12.0 / 8.0);
    CHECK(d[2].real() == doctest::Approx(expected.real()).epsilon(1e-12));
    CHECK(d[2].imag() == doctest::Approx(expected.imag()).epsilon(1e-12));
    for (int k = 0; k < 8; ++k) {
        const auto e = std::polar(1.0, -std::numbers::pi * 3.0 * k * k / 8.0);
        CHECK(std::abs(d[k] - e) < 1e-12);
    }
}

TEST_CASE("zadoff-chu rejects a root sharing a factor with N") {
    CHECK_THROWS_AS(zc_sequence(128, 2), ConfigError);
    CHECK_THROWS_AS(zc_sequence(8, 4), ConfigError);
}

TEST_CASE("ofdm_modulate matches a direct inverse DFT") {
    Rng rng(11);
    for (int n : {8, 16, 128}) {
        ComplexVec d(n);
        for (auto& v : d) v = complex_gaussian(rng);
        const auto fast = ofdm_modulate(d);
        const auto slow = test::naive_idft(d);
        REQUIRE(fast.size() == slow.size());
        for (int t = 0; t < n; ++t) CHECK(std::abs(fast[t] - slow[t]) < 1e-12);
    }
}

TEST_CASE("ofdm_modulate of a unit impulse at bin 0 is flat") {
    ComplexVec d(16, cdouble{});
    d[0] = 1.0;
    for (const auto& v : ofdm_modulate(d)) CHECK(std::abs(v - cdouble(1.0 / 16.0)) < 1e-15);
}

TEST_CASE("add_cp prepends the symbol tail") {
    ComplexVec s(16);
    for (int i = 0; i < 16; ++i) s[i] = cdouble(i, -i);
    const auto out = add_cp(s, 4);
    REQUIRE(out.size() == 20u);
    for (int i = 0; i < 4; ++i) CHECK(out[i] == s[12 + i]);
    for (int i = 0; i < 16; ++i) CHECK(out[4 + i] == s[i]);

    CHECK(add_cp(s, 0).size() == 16u);
    CHECK_THROWS_AS(add_cp(s, 16), ConfigError);
    CHECK_THROWS_AS(add_cp(s, -1), ConfigError);
}

TEST_CASE("training replica is CP-periodic with per-sample power sigma_d2") {
    OfdmConfig cfg;
    cfg.sigma_d2 = 2.5;
    const auto r = training_replica(cfg);
    REQUIRE(r.size() == 160u);
    for (int i = 0; i < cfg.cp_length; ++i) CHECK(std::abs(r[i] - r[i + cfg.n_subcarriers]) < 1e-12);
    double power = 0.0;
    for (const auto& v : r) power += std::norm(v);
    CHECK(power / r.size() == doctest::Approx(2.5).epsilon(1e-9));
}

TEST_CASE("frame layout and determinism") {
    OfdmConfig cfg;
    Rng a(5), b(5), c(6);
    const auto fa = build_frame(cfg, a);
    const auto fb = build_frame(cfg, b);
    const auto fc = build_frame(cfg, c);
    CHECK(fa.samples.size() == 480u);
    CHECK(fa.train_start == 160);
    CHECK(fa.samples == fb.samples);
    CHECK(fa.samples != fc.samples);

    const auto replica = training_replica(cfg);
    for (int i = 0; i < 160; ++i) CHECK(fa.samples[160 + i] == replica[i]);
    // data symbols carry their own cyclic prefix
    for (int i = 0; i < 32; ++i) {
        CHECK(std::abs(fa.samples[i] - fa.samples[i + 128]) < 1e-12);
        CHECK(std::abs(fa.samples[320 + i] - fa.samples[320 + i + 128]) < 1e-12);
    }
}

TEST_CASE("data symbols have unit average power") {
    OfdmConfig cfg;
    Rng rng(3);
    double power = 0.0;
    long count = 0;
    for (int k = 0; k < 200; ++k) {
        const auto f = build_frame(cfg, rng);
        for (int i = 0; i < 160; ++i) {
            power += std::norm(f.samples[i]) + std::norm(f.samples[320 + i]);
            count += 2;
        }
    }
    CHECK(power / count == doctest::Approx(1.0).epsilon(0.02));
}

}
