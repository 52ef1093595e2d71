#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "osl/baselines.hpp"
#include "osl/config.hpp"
#include "osl/dataset.hpp"
#include "osl/json_config.hpp"
#include "osl/trainer.hpp"

namespace osl::cli {

/// Exit codes of the osl executable.
enum ExitCode : int { kOk = 0, kUsage = 2, kRuntime = 3 };

/// Everything a subcommand needs, resolved from defaults, then the JSON
/// config file, then command-line flags.
struct RunConfig {
    OfdmConfig ofdm;
    TrainingChannel channel;
    TrainConfig train;
    OmpConfig omp;
    std::string graph = "cnn";
    std::vector<int> fcnn_hidden = kDefaultFcnnHidden;
    std::size_t n_samples = 100000;
    double val_fraction = 0.1;
    std::string dataset_path;
    std::string val_dataset_path;
    std::string model_path;
    std::string output_path;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::string scenario = "exp_22";
    std::vector<double> snr_db{-4, -2, 0, 2, 4, 6, 8, 10};
    long trials = 10000;

    void validate() const;
};

nlohmann::ordered_json to_json(const RunConfig& rc);

/// Overlays a config document onto rc. Unknown keys raise ConfigError.
void apply_config_json(const nlohmann::json& j, RunConfig& rc);

/// Parses "a:step:b" ranges or comma-separated lists of SNR values.
std::vector<double> parse_snr_list(const std::string& text);

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace osl::cli
