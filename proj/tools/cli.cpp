#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "osl/errors.hpp"
#include "osl/evaluator.hpp"
#include "osl/network.hpp"

namespace osl::cli {
namespace fs = std::filesystem;

namespace {

void write_json_file(const fs::path& path, const nlohmann::ordered_json& j) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

fs::path sibling(const fs::path& path, const std::string& suffix) {
    auto p = path;
    p += suffix;
    return p;
}

void require_writable(const std::string& path, const char* what) {
    if (path.empty()) throw ConfigError(std::string(what) + " path is required");
    const fs::path parent = fs::path(path).parent_path();
    if (!parent.empty() && !fs::is_directory(parent)) {
        throw ConfigError(std::string(what) + " directory " + parent.string() + " does not exist");
    }
    std::ofstream probe(path, std::ios::app);
    if (!probe) throw ConfigError(std::string(what) + " path " + path + " is not writable");
}

/// Flags shared by several subcommands; only flags the user actually passed
/// override the config.
struct CommonFlags {
    std::string config;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    int n = 128;
    int cp = 32;
    int tau_p = 22;
    int zc_root = 25;
    bool no_relax = false;
    double cfo_max = 0.0;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* threads_opt = nullptr;
    CLI::Option* n_opt = nullptr;
    CLI::Option* cp_opt = nullptr;
    CLI::Option* tau_opt = nullptr;
    CLI::Option* root_opt = nullptr;
    CLI::Option* cfo_opt = nullptr;

    void attach(CLI::App* app) {
        app->add_option("--config", config, "JSON run configuration file")->check(CLI::ExistingFile);
        seed_opt = app->add_option("--seed", seed, "master seed (fallback: $OSL_SEED, then 0)");
        threads_opt = app->add_option("--threads", threads, "worker threads (0 = all cores)");
        n_opt = app->add_option("--N", n, "subcarrier count N (L_c follows as N/4 and tau_P scales with L_c unless given)");
        cp_opt = app->add_option("--L_c", cp, "cyclic prefix length L_c");
        tau_opt = app->add_option("--tau-P", tau_p, "nominal maximum propagation delay in samples (default 22, or floor(22*L_c/32) when N or L_c is given)");
        root_opt = app->add_option("--zc-root", zc_root, "Zadoff-Chu root index");
        app->add_flag("--no-relax", no_relax, "disable the relaxed delay restriction (tau_relax = tau_P)");
        cfo_opt = app->add_option("--cfo-max", cfo_max, "draw CFO from U(-cfo_max, cfo_max), fraction of subcarrier spacing");
    }

    RunConfig resolve() const {
        RunConfig rc;
        bool seed_from_config = false;
        if (!config.empty()) {
            std::ifstream in(config);
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(in);
            } catch (const nlohmann::json::exception& e) {
                throw ConfigError(config + ": " + e.what());
            }
            apply_config_json(j, rc);
            seed_from_config = j.contains("seed");
        }
        if (seed_opt->count() > 0) {
            rc.seed = seed;
        } else if (!seed_from_config) {
            if (const char* env = std::getenv("OSL_SEED"); env && *env) {
                try {
                    rc.seed = std::stoull(env);
                } catch (const std::exception&) {
                    throw ConfigError(std::string("OSL_SEED is not an unsigned integer: ") + env);
                }
            }
        }
        if (threads_opt->count() > 0) rc.threads = threads;
        if (n_opt->count() > 0) {
            rc.ofdm.n_subcarriers = n;
            if (cp_opt->count() == 0) rc.ofdm.cp_length = n / 4;
        }
        if (cp_opt->count() > 0) rc.ofdm.cp_length = cp;
        if (n_opt->count() > 0 || cp_opt->count() > 0) {
            rc.ofdm.tau_p = OfdmConfig::scaled(rc.ofdm.n_subcarriers, rc.ofdm.cp_length).tau_p;
        }
        if (tau_opt->count() > 0) rc.ofdm.tau_p = tau_p;
        if (root_opt->count() > 0) rc.ofdm.zc_root = zc_root;
        if (no_relax) rc.ofdm.relaxed = false;
        if (cfo_opt->count() > 0) rc.ofdm.cfo_max = cfo_max;
        rc.train.seed = rc.seed;
        rc.train.threads = rc.threads;
        return rc;
    }
};

std::size_t validation_count(const RunConfig& rc, std::size_t train_count) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(rc.val_fraction * static_cast<double>(train_count))));
}

void print_label_summary(const Dataset& ds, std::ostream& out) {
    int lo = ds.cfg.symbol_length();
    int hi = -1;
    for (const auto& s : ds.samples) {
        lo = std::min(lo, s.label_index);
        hi = std::max(hi, s.label_index);
    }
    out << "samples " << ds.size() << "\nlabel_min " << lo << "\nlabel_max " << hi << '\n';
}

TrainResult train_model(const RunConfig& rc, const Dataset& trainset, const Dataset& valset, std::ostream& err) {
    const auto kind = parse_graph_kind(rc.graph);
    const NetworkParams initial = kind == GraphKind::cnn ? init_params(rc.ofdm, rc.seed)
                                                         : build_fcnn_baseline(rc.ofdm, rc.fcnn_hidden, rc.seed);
    return train(initial, trainset, valset, rc.train, [&](const EpochLog& row) {
        std::ostringstream elapsed;
        elapsed << std::fixed << std::setprecision(1) << row.elapsed_sec;
        err << "epoch " << row.epoch << " loss " << row.mean_loss << " val_R_err " << row.val_r_err << " ("
            << elapsed.str() << " s)" << std::endl;
    });
}

int cmd_gen_data(const RunConfig& rc, std::ostream& out, std::ostream& err) {
    require_writable(rc.dataset_path, "dataset");
    err << "generating " << rc.n_samples << " samples" << std::endl;
    const Dataset ds = generate_dataset(rc.ofdm, rc.channel, rc.n_samples, rc.seed, rc.threads);
    write_dataset(ds, rc.dataset_path);
    write_json_file(sibling(rc.dataset_path, ".run.json"), to_json(rc));
    print_label_summary(ds, out);
    return kOk;
}

int cmd_train(const RunConfig& rc, std::ostream& out, std::ostream& err) {
    require_writable(rc.model_path, "model");
    Dataset trainset;
    if (!rc.dataset_path.empty()) {
        trainset = read_dataset(rc.dataset_path, rc.ofdm);
    } else {
        err << "generating " << rc.n_samples << " training samples" << std::endl;
        trainset = generate_dataset(rc.ofdm, rc.channel, rc.n_samples, rc.seed, rc.threads);
    }
    Dataset valset;
    if (!rc.val_dataset_path.empty()) {
        valset = read_dataset(rc.val_dataset_path, rc.ofdm);
    } else {
        valset = generate_dataset(trainset.cfg, trainset.channel, validation_count(rc, trainset.size()), trainset.seed,
                                  rc.threads, true);
    }
    const TrainResult result = train_model(rc, trainset, valset, err);
    NetworkParams best = result.best;
    best.cfg = rc.ofdm;
    save_params(best, rc.model_path);

    const std::string log_path = rc.output_path.empty() ? rc.model_path + ".log.csv" : rc.output_path;
    std::ofstream log(log_path, std::ios::trunc);
    if (!log) throw std::runtime_error("cannot write " + log_path);
    write_train_log(result.log, log);

    auto run_json = to_json(rc);
    run_json["result"] = {{"best_epoch", result.best_epoch},
                          {"best_val_R_err", result.best_r_err},
                          {"epochs_run", result.log.size()},
                          {"train_samples", trainset.size()},
                          {"val_samples", valset.size()}};
    write_json_file(sibling(rc.model_path, ".run.json"), run_json);
    out << "model " << rc.model_path << "\nbest_epoch " << result.best_epoch << "\nbest_val_R_err " << result.best_r_err
        << "\nepochs " << result.log.size() << '\n';
    return kOk;
}

std::optional<fs::path> model_for(const RunConfig& rc) {
    if (rc.model_path.empty()) return std::nullopt;
    return fs::path(rc.model_path);
}

void emit_reports(const RunConfig& rc, std::span<const EvalReport> reports, const Scenario& scenario, std::ostream& out) {
    if (rc.output_path.empty()) {
        write_report_csv(reports, out);
        return;
    }
    std::ofstream csv(rc.output_path, std::ios::trunc);
    if (!csv) throw std::runtime_error("cannot write " + rc.output_path);
    write_report_csv(reports, csv);
    write_report_sidecar(reports, scenario, sibling(rc.output_path, ".json"));
    write_json_file(sibling(rc.output_path, ".run.json"), to_json(rc));
    out << "report " << rc.output_path << '\n';
}

int cmd_eval(const RunConfig& rc, const std::string& method, std::ostream& out, std::ostream& err) {
    if (!rc.output_path.empty()) require_writable(rc.output_path, "output");
    const Estimator est = make_estimator(method, rc.ofdm, model_for(rc), rc.omp);
    const Scenario scenario = Scenario::preset(rc.scenario);
    err << "evaluating " << method << " on " << scenario.tag << " (" << rc.trials << " trials per SNR)" << std::endl;
    const EvalReport report = monte_carlo(est, scenario, rc.ofdm, rc.snr_db, rc.trials, rc.seed, rc.threads);
    emit_reports(rc, std::span(&report, 1), scenario, out);
    return kOk;
}

int cmd_sweep(const RunConfig& rc, const std::string& preset, std::vector<std::string> methods, std::size_t train_samples,
              std::ostream& out, std::ostream& err) {
    if (!rc.output_path.empty()) require_writable(rc.output_path, "output");
    const auto points = sweep_preset(preset);
    std::vector<EvalReport> reports;
    for (const auto& point : points) {
        OfdmConfig cfg = point.cfg;
        cfg.relaxed = rc.ofdm.relaxed;
        cfg.zc_root = rc.ofdm.zc_root;
        cfg.cfo_max = rc.ofdm.cfo_max;
        for (const auto& method : methods) {
            std::optional<Estimator> est;
            if (method == "cnn" || method == "fcnn") {
                if (train_samples > 0) {
                    RunConfig local = rc;
                    local.ofdm = cfg;
                    local.graph = method;
                    err << "[" << point.label << "] training " << method << " on " << train_samples << " samples" << std::endl;
                    const Dataset tr = generate_dataset(cfg, rc.channel, train_samples, rc.seed, rc.threads);
                    const Dataset va = generate_dataset(cfg, rc.channel, validation_count(rc, train_samples), rc.seed,
                                                        rc.threads, true);
                    est = network_estimator(train_model(local, tr, va, err).best);
                } else if (!rc.model_path.empty()) {
                    try {
                        est = make_estimator(method, cfg, model_for(rc), rc.omp);
                    } catch (const FormatError& e) {
                        err << "[" << point.label << "] skipping " << method << ": " << e.what() << std::endl;
                        continue;
                    }
                } else {
                    err << "[" << point.label << "] skipping " << method << ": no --model and no --train-samples" << std::endl;
                    continue;
                }
            } else {
                est = make_estimator(method, cfg, std::nullopt, rc.omp);
            }
            err << "[" << point.label << "] evaluating " << method << std::endl;
            EvalReport rep = monte_carlo(*est, point.scenario, cfg, rc.snr_db, rc.trials, rc.seed, rc.threads);
            rep.channel = point.scenario.tag + "@" + point.label;
            reports.push_back(std::move(rep));
        }
    }
    emit_reports(rc, reports, points.front().scenario, out);
    return kOk;
}

int cmd_complexity(const RunConfig& rc, int paths, const std::vector<std::string>& methods, std::ostream& out) {
    rc.ofdm.validate();
    out << "method,N,L_c,N_u,P,cm\n";
    for (const auto& m : methods) {
        const long long cm = count_cm(m, rc.ofdm, paths, rc.fcnn_hidden);
        out << m << ',' << rc.ofdm.n_subcarriers << ',' << rc.ofdm.cp_length << ',' << rc.ofdm.symbol_length() << ','
            << paths << ',' << cm << '\n';
    }
    return kOk;
}

}  // namespace

void RunConfig::validate() const {
    ofdm.validate();
    channel.validate();
    train.validate();
    omp.validate();
    parse_graph_kind(graph);
    if (n_samples < 1) throw ConfigError("n_samples must be at least 1");
    if (!(val_fraction > 0.0 && val_fraction <= 1.0)) throw ConfigError("val_fraction must lie in (0, 1]");
    if (trials < 1) throw ConfigError("trials must be at least 1");
    if (snr_db.empty()) throw ConfigError("SNR list is empty");
}

nlohmann::ordered_json to_json(const RunConfig& rc) {
    nlohmann::ordered_json j;
    j["ofdm"] = osl::to_json(rc.ofdm);
    j["channel"] = osl::to_json(rc.channel);
    j["train"] = osl::to_json(rc.train);
    j["omp"] = osl::to_json(rc.omp);
    j["graph"] = rc.graph;
    j["fcnn_hidden"] = rc.fcnn_hidden;
    j["n_samples"] = rc.n_samples;
    j["val_fraction"] = rc.val_fraction;
    j["paths"] = {{"dataset", rc.dataset_path},
                  {"val_dataset", rc.val_dataset_path},
                  {"model", rc.model_path},
                  {"output", rc.output_path}};
    j["seed"] = rc.seed;
    j["threads"] = rc.threads;
    j["eval"] = {{"scenario", rc.scenario}, {"snr_db", rc.snr_db}, {"trials", rc.trials}};
    return j;
}

void apply_config_json(const nlohmann::json& j, RunConfig& rc) {
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "ofdm") {
                rc.ofdm = ofdm_config_from_json(value, rc.ofdm);
            } else if (key == "channel") {
                rc.channel = training_channel_from_json(value, rc.channel);
            } else if (key == "train") {
                rc.train = train_config_from_json(value, rc.train);
            } else if (key == "omp") {
                rc.omp = omp_config_from_json(value, rc.omp);
            } else if (key == "graph") {
                rc.graph = value.get<std::string>();
            } else if (key == "fcnn_hidden") {
                rc.fcnn_hidden = value.get<std::vector<int>>();
            } else if (key == "n_samples") {
                rc.n_samples = value.get<std::size_t>();
            } else if (key == "val_fraction") {
                rc.val_fraction = value.get<double>();
            } else if (key == "seed") {
                rc.seed = value.get<std::uint64_t>();
            } else if (key == "threads") {
                rc.threads = value.get<unsigned>();
            } else if (key == "paths") {
                rc.dataset_path = value.value("dataset", rc.dataset_path);
                rc.val_dataset_path = value.value("val_dataset", rc.val_dataset_path);
                rc.model_path = value.value("model", rc.model_path);
                rc.output_path = value.value("output", rc.output_path);
            } else if (key == "eval") {
                rc.scenario = value.value("scenario", rc.scenario);
                rc.snr_db = value.value("snr_db", rc.snr_db);
                rc.trials = value.value("trials", rc.trials);
            } else {
                throw ConfigError("config: unknown key '" + key + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

std::vector<double> parse_snr_list(const std::string& text) {
    std::vector<double> out;
    try {
        if (text.find(':') != std::string::npos) {
            std::vector<double> parts;
            std::stringstream ss(text);
            std::string item;
            while (std::getline(ss, item, ':')) parts.push_back(std::stod(item));
            if (parts.size() != 3 || !(parts[1] > 0.0) || parts[2] < parts[0]) {
                throw ConfigError("SNR range must be start:step:stop with a positive step");
            }
            const auto count = static_cast<int>(std::floor((parts[2] - parts[0]) / parts[1] + 1e-9));
            for (int i = 0; i <= count; ++i) out.push_back(parts[0] + i * parts[1]);
        } else {
            std::stringstream ss(text);
            std::string item;
            while (std::getline(ss, item, ',')) {
                if (!item.empty()) out.push_back(std::stod(item));
            }
        }
    } catch (const std::invalid_argument&) {
        throw ConfigError("cannot parse SNR list '" + text + "'");
    } catch (const std::out_of_range&) {
        throw ConfigError("cannot parse SNR list '" + text + "'");
    }
    if (out.empty()) throw ConfigError("SNR list is empty");
    return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Lightweight 1-D CNN timing synchronization for OFDM: data generation, training, evaluation"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "show help for every subcommand");

    // gen-data
    CommonFlags gen_common;
    std::size_t gen_samples = 0;
    std::string gen_out;
    double snr_min = 0, snr_max = 0, eta_min = 0, eta_max = 0;
    auto* gen = app.add_subcommand("gen-data", "generate a labelled training dataset");
    gen_common.attach(gen);
    auto* gen_samples_opt = gen->add_option("--n-samples", gen_samples, "number of samples (default 100000)");
    auto* gen_out_opt = gen->add_option("--out,-o", gen_out, "dataset file (manifest goes to <out>.json)");
    auto* snr_min_opt = gen->add_option("--snr-min", snr_min, "lowest training SNR in dB (default -4)");
    auto* snr_max_opt = gen->add_option("--snr-max", snr_max, "highest training SNR in dB (default 10)");
    auto* eta_min_opt = gen->add_option("--eta-min", eta_min, "lowest PDP decay exponent (default 0.01)");
    auto* eta_max_opt = gen->add_option("--eta-max", eta_max, "highest PDP decay exponent (default 0.5)");

    // train
    CommonFlags train_common;
    std::string train_data, train_val, train_model_path, train_log, train_graph;
    std::size_t train_samples = 0;
    int epochs = 0, batch = 0, patience = 0;
    double alpha = 0;
    auto* tr = app.add_subcommand("train", "train the CNN (or the FCNN baseline) with Adam");
    train_common.attach(tr);
    auto* tr_data_opt = tr->add_option("--data", train_data, "training dataset file (generated on the fly when absent)");
    auto* tr_val_opt = tr->add_option("--val-data", train_val, "validation dataset file (default: fresh 10% split)");
    auto* tr_samples_opt = tr->add_option("--n-samples", train_samples, "samples to generate when --data is absent");
    auto* tr_model_opt = tr->add_option("--model,-m", train_model_path, "output model file");
    auto* tr_log_opt = tr->add_option("--log", train_log, "training log CSV (default <model>.log.csv)");
    auto* tr_graph_opt = tr->add_option("--graph", train_graph, "cnn or fcnn (default cnn)")->check(CLI::IsMember({"cnn", "fcnn"}));
    auto* tr_epochs_opt = tr->add_option("--epochs", epochs, "maximum epochs (default 100)");
    auto* tr_batch_opt = tr->add_option("--batch-size", batch, "mini-batch size (default 128)");
    auto* tr_alpha_opt = tr->add_option("--alpha", alpha, "Adam step size (default 0.001)");
    auto* tr_pat_opt = tr->add_option("--patience", patience, "early-stop patience in epochs, 0 disables (default 15)");

    // eval
    CommonFlags eval_common;
    std::string eval_method, eval_model, eval_scenario, eval_snr, eval_out;
    long eval_trials = 0;
    int omp_iters = 0;
    auto* ev = app.add_subcommand("eval", "Monte Carlo error probability of one method");
    eval_common.attach(ev);
    ev->add_option("--method", eval_method, "cnn, fcnn, cross_corr, auto_corr or omp")->required();
    auto* ev_model_opt = ev->add_option("--model,-m", eval_model, "model file for cnn/fcnn");
    auto* ev_scen_opt = ev->add_option("--scenario", eval_scenario,
                                       "exp_22, exp_27, exp_<tau>, tdl_a, tdl_b, tdl_c, single_path, noiseless_single_path, "
                                       "two_path, noiseless_two_path (default exp_22)");
    auto* ev_snr_opt = ev->add_option("--snr", eval_snr, "SNR list: start:step:stop or comma list (default -4:2:10)");
    auto* ev_trials_opt = ev->add_option("--trials", eval_trials, "trials per SNR point (default 10000)");
    auto* ev_out_opt = ev->add_option("--out,-o", eval_out, "CSV report (stdout when absent; sidecar <out>.json)");
    auto* ev_omp_opt = ev->add_option("--omp-iterations", omp_iters, "OMP iteration count (default 3)");

    // sweep
    CommonFlags sweep_common;
    std::string sweep_preset_name, sweep_model, sweep_snr, sweep_out;
    std::vector<std::string> sweep_methods{"cross_corr", "auto_corr", "omp", "cnn"};
    long sweep_trials = 0;
    std::size_t sweep_train = 0;
    int sweep_epochs = 0;
    auto* sw = app.add_subcommand("sweep", "run a figure preset over several methods");
    sweep_common.attach(sw);
    sw->add_option("--preset", sweep_preset_name, "fig2a, fig2b, fig2c or fig2d")->required()->check(
        CLI::IsMember({"fig2a", "fig2b", "fig2c", "fig2d"}));
    sw->add_option("--methods", sweep_methods, "methods to run (default cross_corr auto_corr omp cnn)");
    auto* sw_model_opt = sw->add_option("--model,-m", sweep_model, "model used for points whose configuration matches");
    sw->add_option("--train-samples", sweep_train, "train a network per configuration with this many samples");
    auto* sw_epochs_opt = sw->add_option("--epochs", sweep_epochs, "epochs for --train-samples (default 100)");
    auto* sw_snr_opt = sw->add_option("--snr", sweep_snr, "SNR list (default -4:2:10)");
    auto* sw_trials_opt = sw->add_option("--trials", sweep_trials, "trials per SNR point (default 10000)");
    auto* sw_out_opt = sw->add_option("--out,-o", sweep_out, "CSV report (stdout when absent)");

    // complexity
    CommonFlags cm_common;
    int paths = 28;
    std::vector<std::string> cm_methods{"cs", "elm", "proposed", "fcnn"};
    auto* cm = app.add_subcommand("complexity", "complex-multiplication counts per method");
    cm_common.attach(cm);
    cm->add_option("--P", paths, "resolvable paths for the CS count (default 28)")->check(CLI::PositiveNumber);
    cm->add_option("--method", cm_methods, "subset of cs, elm, proposed, fcnn");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (gen->parsed()) {
            RunConfig rc = gen_common.resolve();
            if (gen_samples_opt->count()) rc.n_samples = gen_samples;
            if (gen_out_opt->count()) rc.dataset_path = gen_out;
            if (snr_min_opt->count()) rc.channel.snr_min_db = snr_min;
            if (snr_max_opt->count()) rc.channel.snr_max_db = snr_max;
            if (eta_min_opt->count()) rc.channel.eta_min = eta_min;
            if (eta_max_opt->count()) rc.channel.eta_max = eta_max;
            rc.validate();
            return cmd_gen_data(rc, out, err);
        }
        if (tr->parsed()) {
            RunConfig rc = train_common.resolve();
            if (tr_data_opt->count()) rc.dataset_path = train_data;
            if (tr_val_opt->count()) rc.val_dataset_path = train_val;
            if (tr_samples_opt->count()) rc.n_samples = train_samples;
            if (tr_model_opt->count()) rc.model_path = train_model_path;
            if (tr_log_opt->count()) rc.output_path = train_log;
            if (tr_graph_opt->count()) rc.graph = train_graph;
            if (tr_epochs_opt->count()) rc.train.max_epochs = epochs;
            if (tr_batch_opt->count()) rc.train.batch_size = batch;
            if (tr_alpha_opt->count()) rc.train.alpha = alpha;
            if (tr_pat_opt->count()) rc.train.patience = patience;
            rc.validate();
            return cmd_train(rc, out, err);
        }
        if (ev->parsed()) {
            RunConfig rc = eval_common.resolve();
            if (ev_model_opt->count()) rc.model_path = eval_model;
            if (ev_scen_opt->count()) rc.scenario = eval_scenario;
            if (ev_snr_opt->count()) rc.snr_db = parse_snr_list(eval_snr);
            if (ev_trials_opt->count()) rc.trials = eval_trials;
            if (ev_out_opt->count()) rc.output_path = eval_out;
            if (ev_omp_opt->count()) rc.omp.num_iterations = omp_iters;
            rc.validate();
            return cmd_eval(rc, eval_method, out, err);
        }
        if (sw->parsed()) {
            RunConfig rc = sweep_common.resolve();
            if (sw_model_opt->count()) rc.model_path = sweep_model;
            if (sw_epochs_opt->count()) rc.train.max_epochs = sweep_epochs;
            if (sw_snr_opt->count()) rc.snr_db = parse_snr_list(sweep_snr);
            if (sw_trials_opt->count()) rc.trials = sweep_trials;
            if (sw_out_opt->count()) rc.output_path = sweep_out;
            rc.validate();
            return cmd_sweep(rc, sweep_preset_name, sweep_methods, sweep_train, out, err);
        }
        if (cm->parsed()) {
            RunConfig rc = cm_common.resolve();
            rc.validate();
            return cmd_complexity(rc, paths, cm_methods, out);
        }
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntime;
    }
    return kUsage;
}

}  // namespace osl::cli
