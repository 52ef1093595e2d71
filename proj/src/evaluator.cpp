#include "osl/evaluator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <memory>
#include <numbers>
#include <numeric>
#include <ostream>

#include "json.hpp"
#include "osl/dataset.hpp"
#include "osl/errors.hpp"
#include "osl/json_config.hpp"
#include "osl/parallel.hpp"

namespace osl {

int estimate_to(std::span<const double> probs, const OfdmConfig& cfg) {
    if (probs.empty()) throw DimensionError("estimate_to: empty probability vector");
    const auto best = std::max_element(probs.begin(), probs.end());
    return static_cast<int>(best - probs.begin()) - cfg.label_offset();
}

int estimate_to(const Eigen::VectorXd& probs, const OfdmConfig& cfg) {
    return estimate_to(std::span<const double>(probs.data(), static_cast<std::size_t>(probs.size())), cfg);
}

int timing_error(int tau_hat, int tau_true, const OfdmConfig& cfg) {
    const int lead = tau_true - tau_hat;
    return (lead >= 0 && lead <= cfg.window_tolerance()) ? 0 : 1;
}

Scenario Scenario::exponential(int tau_p) {
    Scenario s;
    s.family = Family::exponential;
    s.num_taps = tau_p + 1;
    s.eta = 1.0 / s.num_taps;
    s.tau_p = tau_p;
    s.tag = "exp_" + std::to_string(tau_p);
    return s;
}

Scenario Scenario::tdl_profile(TdlProfile profile, int tau_p) {
    Scenario s;
    s.family = Family::tdl;
    s.tdl = profile;
    s.tau_p = tau_p;
    s.tag = std::string(to_string(profile));
    return s;
}

Scenario Scenario::single_path(bool noiseless) {
    Scenario s;
    s.family = Family::single_path;
    s.num_taps = 1;
    s.tau_p = 0;
    s.noiseless = noiseless;
    s.tag = noiseless ? "noiseless_single_path" : "single_path";
    return s;
}

Scenario Scenario::two_path(bool noiseless) {
    Scenario s;
    s.family = Family::two_path;
    s.num_taps = 2;
    s.tau_p = s.two_path_gap;
    s.noiseless = noiseless;
    s.tag = noiseless ? "noiseless_two_path" : "two_path";
    return s;
}

Scenario Scenario::preset(std::string_view name) {
    if (name == "exp_22" || name == "fig2a") return exponential(22);
    if (name == "exp_27") return exponential(27);
    if (name == "tdl_a") return tdl_profile(TdlProfile::A, 22);
    if (name == "tdl_b") return tdl_profile(TdlProfile::B, 22);
    if (name == "tdl_c") return tdl_profile(TdlProfile::C, 23);
    if (name == "single_path") return single_path(false);
    if (name == "noiseless_single_path") return single_path(true);
    if (name == "two_path") return two_path(false);
    if (name == "noiseless_two_path") return two_path(true);
    if (name.starts_with("exp_")) {
        try {
            return exponential(std::stoi(std::string(name.substr(4))));
        } catch (const std::exception&) {
        }
    }
    throw ConfigError("unknown scenario '" + std::string(name) + "'");
}

PdpProfile Scenario::pdp() const {
    switch (family) {
        case Family::exponential: return exp_pdp(num_taps, eta);
        case Family::tdl: return tdl_pdp(tdl, tau_p, tdl_dir);
        case Family::single_path: return PdpProfile{{0}, {1.0}};
        case Family::two_path: return PdpProfile{{0, two_path_gap}, {first_path_power, 1.0 - first_path_power}};
    }
    throw ConfigError("bad scenario family");
}

ComplexVec Scenario::draw_taps(const PdpProfile& profile, Rng& rng) const {
    if (family != Family::two_path) return realize_channel(profile, rng);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    ComplexVec taps(profile.size());
    for (std::size_t p = 0; p < taps.size(); ++p) taps[p] = std::polar(std::sqrt(profile.powers[p]), phase(rng));
    return taps;
}

Trial draw_trial(const Scenario& scenario, const PdpProfile& pdp, const OfdmConfig& cfg, double snr_db, Rng& rng) {
    ChannelRealization ch;
    ch.timing_offset = std::uniform_int_distribution<int>(0, cfg.n_subcarriers - 1)(rng);
    if (cfg.cfo_max > 0.0) ch.cfo = std::uniform_real_distribution<double>(-cfg.cfo_max, cfg.cfo_max)(rng);
    ch.snr_db = snr_db;
    const TxFrame frame = build_frame(cfg, rng);
    ch.taps = scenario.draw_taps(pdp, rng);
    Trial trial;
    trial.window = propagate(frame, pdp, ch, cfg);
    if (!scenario.noiseless) add_awgn(trial.window, snr_db, cfg, rng);
    trial.true_to = ch.timing_offset;
    trial.snr_db = snr_db;
    return trial;
}

Estimator network_estimator(NetworkParams params) {
    auto shared = std::make_shared<const NetworkParams>(std::move(params));
    const std::string name(to_string(shared->kind));
    return Estimator{name, [shared](const Trial& t) {
                         ForwardCache cache;
                         const auto y = interleave(t.window);
                         return estimate_to(forward(*shared, y, cache), shared->cfg);
                     }};
}

Estimator make_estimator(std::string_view method, const OfdmConfig& cfg,
                         const std::optional<std::filesystem::path>& model_path, const OmpConfig& ocfg) {
    if (method == "cnn" || method == "fcnn") {
        if (!model_path || model_path->empty()) {
            throw UsageError("method " + std::string(method) + " needs a model file");
        }
        if (!std::filesystem::exists(*model_path)) throw UsageError("model file " + model_path->string() + " not found");
        return network_estimator(load_params(*model_path, parse_graph_kind(method), cfg));
    }
    if (method == "cross_corr") {
        auto replica = std::make_shared<const ComplexVec>(training_replica(cfg));
        return Estimator{"cross_corr", [replica](const Trial& t) { return cross_corr_ts(t.window, *replica); }};
    }
    if (method == "auto_corr") {
        return Estimator{"auto_corr", [cfg](const Trial& t) { return auto_corr_ts(t.window, cfg); }};
    }
    if (method == "omp") {
        auto dict = std::make_shared<const OmpDictionary>(cfg, ocfg);
        return Estimator{"omp", [dict, ocfg](const Trial& t) { return omp_ts(t.window, *dict, ocfg); }};
    }
    throw UsageError("unknown method '" + std::string(method) + "'");
}

EvalReport monte_carlo(const Estimator& estimator, const Scenario& scenario, const OfdmConfig& cfg,
                       std::span<const double> snr_list, long trials, std::uint64_t seed, unsigned threads) {
    cfg.validate();
    if (trials < 1) throw UsageError("monte_carlo needs at least one trial");
    const PdpProfile pdp = scenario.pdp();
    EvalReport report;
    report.method = estimator.name;
    report.channel = scenario.tag;
    report.cfg = cfg;
    report.seed = seed;
    constexpr long kBlock = 64;
    const auto blocks = static_cast<std::size_t>((trials + kBlock - 1) / kBlock);
    for (std::size_t s = 0; s < snr_list.size(); ++s) {
        std::vector<long> errors(blocks, 0);
        parallel_for(blocks, threads, [&](std::size_t b) {
            const long end = std::min(trials, static_cast<long>(b + 1) * kBlock);
            for (long k = static_cast<long>(b) * kBlock; k < end; ++k) {
                Rng rng = make_rng(seed, Stream::evaluation, (static_cast<std::uint64_t>(s) << 32) | static_cast<std::uint64_t>(k));
                const Trial trial = draw_trial(scenario, pdp, cfg, snr_list[s], rng);
                errors[b] += timing_error(estimator.estimate(trial), trial.true_to, cfg);
            }
        });
        EvalRow row;
        row.snr_db = snr_list[s];
        row.trials = trials;
        row.errors = std::accumulate(errors.begin(), errors.end(), 0L);
        row.error_prob = static_cast<double>(row.errors) / static_cast<double>(trials);
        report.rows.push_back(row);
    }
    return report;
}

void write_report_csv(std::span<const EvalReport> reports, std::ostream& os) {
    os << "method,channel,snr_db,trials,errors,error_prob\n";
    for (const auto& rep : reports) {
        for (const auto& row : rep.rows) {
            os << rep.method << ',' << rep.channel << ',' << row.snr_db << ',' << row.trials << ',' << row.errors << ','
               << row.error_prob << '\n';
        }
    }
}

void write_report_sidecar(std::span<const EvalReport> reports, const Scenario& scenario,
                          const std::filesystem::path& path) {
    nlohmann::ordered_json j;
    if (!reports.empty()) {
        j["seed"] = reports.front().seed;
        j["cfg"] = to_json(reports.front().cfg);
    }
    j["scenario"] = to_json(scenario);
    j["reports"] = nlohmann::ordered_json::array();
    for (const auto& rep : reports) {
        nlohmann::ordered_json r;
        r["method"] = rep.method;
        r["channel"] = rep.channel;
        r["seed"] = rep.seed;
        r["cfg"] = to_json(rep.cfg);
        j["reports"].push_back(r);
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

long long cm_compressed_sensing(long long n, long long nu, long long paths) {
    long long total = paths * n * nu;
    for (long long p = 1; p <= paths; ++p) total += 3 * p * nu + p * p * p + p * p * nu;
    return total;
}

long long cm_elm(long long n, long long nu) {
    // (3/2)N is exact for the even N used here; odd N rounds up
    return (3 * n + 1) / 2 + 4 * (nu - 1) + 16 * nu * nu;
}

long long cm_network(std::span<const ConvCmTerm> conv, std::span<const DenseCmTerm> dense) {
    long long real_mults = 0;
    for (const auto& c : conv) real_mults += c.positions * c.kernel * c.filters * c.in_channels;
    for (const auto& d : dense) real_mults += d.outputs * d.inputs;
    return (real_mults + 3) / 4;
}

long long cm_cnn(const OfdmConfig& cfg) {
    const auto g = CnnGeometry::from(cfg);
    std::vector<ConvCmTerm> conv;
    for (const auto& c : g.conv) conv.push_back({c.out_length(), c.kernel, c.filters, c.in_channels});
    const std::vector<DenseCmTerm> dense{{g.hidden, g.flatten_dim}, {g.classes, g.hidden}};
    return cm_network(conv, dense);
}

long long cm_fcnn(const OfdmConfig& cfg, const std::vector<int>& hidden_sizes) {
    std::vector<long long> sizes{2LL * cfg.window_length()};
    sizes.insert(sizes.end(), hidden_sizes.begin(), hidden_sizes.end());
    sizes.push_back(cfg.symbol_length());
    std::vector<DenseCmTerm> dense;
    for (std::size_t l = 1; l < sizes.size(); ++l) dense.push_back({sizes[l], sizes[l - 1]});
    return cm_network({}, dense);
}

long long count_cm(std::string_view method, const OfdmConfig& cfg, int paths, const std::vector<int>& fcnn_hidden) {
    if (method == "cs") return cm_compressed_sensing(cfg.n_subcarriers, cfg.symbol_length(), paths);
    if (method == "elm") return cm_elm(cfg.n_subcarriers, cfg.symbol_length());
    if (method == "proposed" || method == "cnn") return cm_cnn(cfg);
    if (method == "fcnn" || method == "dnn") return cm_fcnn(cfg, fcnn_hidden);
    throw UsageError("unknown complexity method '" + std::string(method) + "' (expected cs, elm, proposed, fcnn)");
}

double median_inference_seconds(const Estimator& estimator, std::span<const Trial> trials, int repeats) {
    if (trials.empty()) throw UsageError("median_inference_seconds: no trials");
    std::vector<double> times;
    times.reserve(trials.size());
    volatile int sink = 0;
    for (const auto& t : trials) {
        const auto start = std::chrono::steady_clock::now();
        for (int r = 0; r < repeats; ++r) sink = sink + estimator.estimate(t);
        times.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / repeats);
    }
    auto mid = times.begin() + static_cast<std::ptrdiff_t>(times.size() / 2);
    std::nth_element(times.begin(), mid, times.end());
    return *mid;
}

std::vector<SweepPoint> sweep_preset(std::string_view name) {
    std::vector<SweepPoint> points;
    const OfdmConfig base;
    if (name == "fig2a") {
        points.push_back({"tau_p=22", base, Scenario::exponential(22)});
        points.push_back({"tau_p=27", base, Scenario::exponential(27)});
    } else if (name == "fig2b") {
        for (int n : {64, 128, 256}) {
            const auto cfg = OfdmConfig::scaled(n, n / 4);
            points.push_back({"N=" + std::to_string(n), cfg, Scenario::exponential(cfg.tau_p)});
        }
    } else if (name == "fig2c") {
        for (int cp : {16, 32, 64}) {
            const auto cfg = OfdmConfig::scaled(128, cp);
            points.push_back({"L_c=" + std::to_string(cp), cfg, Scenario::exponential(cfg.tau_p)});
        }
    } else if (name == "fig2d") {
        points.push_back({"TDL-A", base, Scenario::tdl_profile(TdlProfile::A, 22)});
        points.push_back({"TDL-B", base, Scenario::tdl_profile(TdlProfile::B, 22)});
        points.push_back({"TDL-C", base, Scenario::tdl_profile(TdlProfile::C, 23)});
    } else {
        throw ConfigError("unknown sweep preset '" + std::string(name) + "' (expected fig2a, fig2b, fig2c, fig2d)");
    }
    return points;
}

}  // namespace osl
