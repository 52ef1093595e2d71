#include "osl/json_config.hpp"

#include <initializer_list>
#include <string>

#include "osl/errors.hpp"

namespace osl {
namespace {

void reject_unknown(const nlohmann::json& j, std::string_view block, std::initializer_list<std::string_view> known) {
    if (!j.is_object()) throw ConfigError(std::string(block) + ": expected a JSON object");
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (auto k : known) ok = ok || key == k;
        if (!ok) throw ConfigError(std::string(block) + ": unknown key '" + key + "'");
    }
}

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

}  // namespace

nlohmann::ordered_json to_json(const OfdmConfig& cfg) {
    nlohmann::ordered_json j;
    j["N"] = cfg.n_subcarriers;
    j["L_c"] = cfg.cp_length;
    j["zc_root"] = cfg.zc_root;
    j["tau_P"] = cfg.tau_p;
    j["relaxed"] = cfg.relaxed;
    j["sigma_d2"] = cfg.sigma_d2;
    j["cfo_max"] = cfg.cfo_max;
    // derived values, informational only
    j["N_u"] = cfg.symbol_length();
    j["M"] = cfg.window_length();
    j["delta_tau"] = cfg.delta_tau();
    j["tau_relax"] = cfg.tau_relax();
    j["label_offset"] = cfg.label_offset();
    return j;
}

OfdmConfig ofdm_config_from_json(const nlohmann::json& j, OfdmConfig base) {
    reject_unknown(j, "ofdm",
                   {"N", "L_c", "zc_root", "tau_P", "relaxed", "sigma_d2", "cfo_max", "N_u", "M", "delta_tau",
                    "tau_relax", "label_offset"});
    const bool cp_given = j.contains("L_c");
    read(j, "N", base.n_subcarriers);
    if (!cp_given && j.contains("N")) base.cp_length = base.n_subcarriers / 4;
    read(j, "L_c", base.cp_length);
    // a new geometry without an explicit tau_P gets the proportionally scaled one
    if (j.contains("N") || cp_given) base.tau_p = OfdmConfig::scaled(base.n_subcarriers, base.cp_length).tau_p;
    read(j, "zc_root", base.zc_root);
    read(j, "tau_P", base.tau_p);
    read(j, "relaxed", base.relaxed);
    read(j, "sigma_d2", base.sigma_d2);
    read(j, "cfo_max", base.cfo_max);
    return base;
}

nlohmann::ordered_json to_json(const TrainingChannel& ch) {
    return {{"eta_min", ch.eta_min}, {"eta_max", ch.eta_max}, {"snr_min_db", ch.snr_min_db}, {"snr_max_db", ch.snr_max_db}};
}

TrainingChannel training_channel_from_json(const nlohmann::json& j, TrainingChannel base) {
    reject_unknown(j, "channel", {"eta_min", "eta_max", "snr_min_db", "snr_max_db"});
    read(j, "eta_min", base.eta_min);
    read(j, "eta_max", base.eta_max);
    read(j, "snr_min_db", base.snr_min_db);
    read(j, "snr_max_db", base.snr_max_db);
    return base;
}

nlohmann::ordered_json to_json(const TrainConfig& t) {
    return {{"alpha", t.alpha},           {"beta1", t.beta1},           {"beta2", t.beta2},
            {"eps_hat", t.eps_hat},       {"batch_size", t.batch_size}, {"max_epochs", t.max_epochs},
            {"patience", t.patience},     {"seed", t.seed}};
}

TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig base) {
    reject_unknown(j, "train", {"alpha", "beta1", "beta2", "eps_hat", "batch_size", "max_epochs", "patience", "seed"});
    read(j, "alpha", base.alpha);
    read(j, "beta1", base.beta1);
    read(j, "beta2", base.beta2);
    read(j, "eps_hat", base.eps_hat);
    read(j, "batch_size", base.batch_size);
    read(j, "max_epochs", base.max_epochs);
    read(j, "patience", base.patience);
    read(j, "seed", base.seed);
    return base;
}

nlohmann::ordered_json to_json(const OmpConfig& o) {
    return {{"num_iterations", o.num_iterations},
            {"gain_floor", o.gain_floor},
            {"search_min", o.search_min},
            {"search_max", o.search_max}};
}

OmpConfig omp_config_from_json(const nlohmann::json& j, OmpConfig base) {
    reject_unknown(j, "omp", {"num_iterations", "gain_floor", "search_min", "search_max"});
    read(j, "num_iterations", base.num_iterations);
    read(j, "gain_floor", base.gain_floor);
    read(j, "search_min", base.search_min);
    read(j, "search_max", base.search_max);
    return base;
}

nlohmann::ordered_json to_json(const Scenario& s) {
    nlohmann::ordered_json j;
    j["tag"] = s.tag;
    switch (s.family) {
        case Scenario::Family::exponential:
            j["family"] = "exponential";
            j["num_taps"] = s.num_taps;
            j["eta"] = s.eta;
            break;
        case Scenario::Family::tdl:
            j["family"] = "tdl";
            j["profile"] = std::string(to_string(s.tdl));
            j["tau_P"] = s.tau_p;
            break;
        case Scenario::Family::single_path: j["family"] = "single_path"; break;
        case Scenario::Family::two_path:
            j["family"] = "two_path";
            j["gap"] = s.two_path_gap;
            j["first_path_power"] = s.first_path_power;
            break;
    }
    j["noiseless"] = s.noiseless;
    return j;
}

}  // namespace osl
