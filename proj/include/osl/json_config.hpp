#pragma once

#include "json.hpp"
#include "osl/config.hpp"
#include "osl/dataset.hpp"
#include "osl/evaluator.hpp"
#include "osl/trainer.hpp"

namespace osl {

// JSON views of the configuration records. Readers take missing keys from
// the built-in defaults and reject unknown keys.

nlohmann::ordered_json to_json(const OfdmConfig& cfg);
OfdmConfig ofdm_config_from_json(const nlohmann::json& j, OfdmConfig base = {});

nlohmann::ordered_json to_json(const TrainingChannel& ch);
TrainingChannel training_channel_from_json(const nlohmann::json& j, TrainingChannel base = {});

nlohmann::ordered_json to_json(const TrainConfig& tcfg);
TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig base = {});

nlohmann::ordered_json to_json(const OmpConfig& ocfg);
OmpConfig omp_config_from_json(const nlohmann::json& j, OmpConfig base = {});

nlohmann::ordered_json to_json(const Scenario& scenario);

}  // namespace osl
