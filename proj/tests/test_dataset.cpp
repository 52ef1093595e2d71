#include <cmath>
#include <fstream>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "json.hpp"
#include "osl/dataset.hpp"
#include "osl/errors.hpp"

using namespace osl;

TEST_SUITE("dataset") {

TEST_CASE("vectorize interleaves real and imaginary parts") {
    OfdmConfig cfg;
    const std::vector<cdouble> one{cdouble(1.0, 2.0)};
    CHECK(interleave(one) == std::vector<double>{1.0, 2.0});

    ComplexVec r(cfg.window_length());
    for (int i = 0; i < cfg.window_length(); ++i) r[i] = cdouble(i * 0.5, 0.0);
    const auto y = vectorize(r, cfg);
    REQUIRE(y.size() == 576u);
    for (int i = 0; i < cfg.window_length(); ++i) {
        CHECK(y[2 * i] == r[i].real());
        CHECK(y[2 * i + 1] == 0.0);
    }
    CHECK(deinterleave(y) == r);
    CHECK_THROWS_AS(vectorize(one, cfg), DimensionError);
}

TEST_CASE("labels shift the timing offset by the ceiling of the half-sum") {
    OfdmConfig cfg;
    CHECK(cfg.tau_relax() == 27);
    CHECK(make_label(0, cfg) == 30);
    CHECK(make_label(5, cfg) == 35);
    CHECK(make_label(127, cfg) == 157);
    for (int t = 1; t < 128; ++t) CHECK(make_label(t, cfg) - make_label(t - 1, cfg) == 1);

    OfdmConfig strict;
    strict.relaxed = false;  // tau_relax = 22: ceil(27) = 27
    CHECK(make_label(0, strict) == 27);

    CHECK_THROWS_AS(make_label(-1, cfg), UsageError);
    CHECK_THROWS_AS(make_label(128, cfg), UsageError);
}

TEST_CASE("generation is reproducible and independent of the thread count") {
    OfdmConfig cfg;
    const auto a = generate_dataset(cfg, {}, 64, 7, 1);
    const auto b = generate_dataset(cfg, {}, 64, 7, 4);
    const auto c = generate_dataset(cfg, {}, 64, 8, 1);
    CHECK(a == b);
    CHECK(!(a == c));
    const auto single = generate_dataset(cfg, {}, 1, 7, 1);
    CHECK(single.samples[0] == a.samples[0]);
    const auto val = generate_dataset(cfg, {}, 64, 7, 1, true);
    CHECK(!(val.samples[0] == a.samples[0]));
}

TEST_CASE("generated samples satisfy the label and range invariants") {
    OfdmConfig cfg;
    TrainingChannel ch;
    const auto ds = generate_dataset(cfg, ch, 2000, 3);
    for (const auto& s : ds.samples) {
        CHECK(s.y.size() == 576u);
        CHECK(s.label_index == make_label(s.true_to, cfg));
        CHECK(s.label_index >= 30);
        CHECK(s.label_index <= 157);
        CHECK(s.snr_db >= -4.0f);
        CHECK(s.snr_db <= 10.0f);
        bool finite = true;
        for (float v : s.y) finite = finite && std::isfinite(v);
        CHECK(finite);
    }
}

TEST_CASE("timing offsets are uniform") {
    OfdmConfig cfg;
    const std::size_t count = 100000;
    const auto ds = generate_dataset(cfg, {}, count, 21);
    std::vector<double> hist(128, 0.0);
    for (const auto& s : ds.samples) hist[s.true_to] += 1.0;
    const double expected = static_cast<double>(count) / 128.0;
    double chi2 = 0.0;
    for (double h : hist) chi2 += (h - expected) * (h - expected) / expected;
    // 99th percentile of chi-square with 127 degrees of freedom
    CHECK(chi2 < 166.99);
}

TEST_CASE("invalid generation parameters") {
    OfdmConfig cfg;
    TrainingChannel ch;
    ch.snr_min_db = 5.0;
    ch.snr_max_db = 1.0;
    CHECK_THROWS_AS(generate_dataset(cfg, ch, 10, 0), ConfigError);
    CHECK_THROWS_AS(generate_dataset(cfg, {}, 0, 0), ConfigError);
    TrainingChannel eta;
    eta.eta_min = 0.0;
    CHECK_THROWS_AS(generate_dataset(cfg, eta, 10, 0), ConfigError);
}

TEST_CASE("dataset file round trip") {
    test::TempDir dir;
    OfdmConfig cfg;
    const auto ds = generate_dataset(cfg, {}, 50, 4);
    const auto path = dir / "train.bin";
    write_dataset(ds, path);

    // fixed layout: 28-byte header, then 2M floats + 2 + 2 + 4 bytes per record
    CHECK(std::filesystem::file_size(path) == 28u + 50u * (576u * 4u + 8u));
    std::ifstream raw(path, std::ios::binary);
    char magic[4];
    raw.read(magic, 4);
    CHECK(std::string(magic, 4) == "OSL1");
    std::uint32_t header[4];
    raw.read(reinterpret_cast<char*>(header), sizeof header);
    CHECK(header[0] == 1u);
    CHECK(header[1] == 128u);
    CHECK(header[2] == 32u);
    CHECK(header[3] == 27u);

    const auto back = read_dataset(path, cfg);
    CHECK(back == ds);

    std::ifstream manifest(path.string() + ".json");
    const auto j = nlohmann::json::parse(manifest);
    CHECK(j.at("count") == 50);
    CHECK(j.at("seed") == 4);
}

TEST_CASE("malformed dataset files raise format errors") {
    test::TempDir dir;
    OfdmConfig cfg;
    const auto ds = generate_dataset(cfg, {}, 5, 4);
    const auto path = dir / "d.bin";
    write_dataset(ds, path);

    SUBCASE("truncated") {
        std::filesystem::resize_file(path, std::filesystem::file_size(path) - 3);
        CHECK_THROWS_AS(read_dataset(path), FormatError);
    }
    SUBCASE("bad magic") {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(0);
        f.write("XXXX", 4);
        f.close();
        CHECK_THROWS_AS(read_dataset(path), FormatError);
    }
    SUBCASE("bad version") {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        const std::uint32_t v = 9;
        f.seekp(4);
        f.write(reinterpret_cast<const char*>(&v), 4);
        f.close();
        CHECK_THROWS_AS(read_dataset(path), FormatError);
    }
    SUBCASE("dimension mismatch") {
        CHECK_THROWS_AS(read_dataset(path, OfdmConfig::scaled(64, 16)), FormatError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(read_dataset(dir / "absent.bin"), FormatError);
    }
}

}
