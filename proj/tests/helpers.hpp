#pragma once

#include <complex>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "osl/waveform.hpp"

namespace osl::test {

/// Direct O(N^2) inverse DFT with the same 1/N scaling as ofdm_modulate.
inline ComplexVec naive_idft(const ComplexVec& d) {
    const auto n = static_cast<int>(d.size());
    ComplexVec s(d.size());
    for (int t = 0; t < n; ++t) {
        std::complex<long double> acc{};
        for (int k = 0; k < n; ++k) {
            const long double phase = 2.0L * 3.14159265358979323846264338327950288L * k * t / n;
            acc += std::complex<long double>(d[k].real(), d[k].imag()) *
                   std::complex<long double>(std::cos(phase), std::sin(phase));
        }
        s[t] = {static_cast<double>(acc.real() / n), static_cast<double>(acc.imag() / n)};
    }
    return s;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("osl_test_" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace osl::test
