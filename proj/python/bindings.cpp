#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "osl/baselines.hpp"
#include "osl/channel.hpp"
#include "osl/config.hpp"
#include "osl/dataset.hpp"
#include "osl/errors.hpp"
#include "osl/evaluator.hpp"
#include "osl/network.hpp"
#include "osl/trainer.hpp"
#include "osl/waveform.hpp"

namespace py = pybind11;
using namespace osl;

namespace {

py::array_t<std::complex<double>> to_array(const ComplexVec& v) {
    py::array_t<std::complex<double>> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

ComplexVec to_vec(const py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>& a) {
    return ComplexVec(a.data(), a.data() + a.size());
}

std::vector<double> to_real(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    return std::vector<double>(a.data(), a.data() + a.size());
}

}  // namespace

PYBIND11_MODULE(_oslsync, m) {
    m.doc() = "OFDM timing synchronization: waveform, channel, CNN and baselines";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
    py::register_exception<FormatError>(m, "FormatError", PyExc_RuntimeError);
    py::register_exception<UsageError>(m, "UsageError", PyExc_RuntimeError);

    py::class_<OfdmConfig>(m, "OfdmConfig")
        .def(py::init<>())
        .def_readwrite("n_subcarriers", &OfdmConfig::n_subcarriers)
        .def_readwrite("cp_length", &OfdmConfig::cp_length)
        .def_readwrite("zc_root", &OfdmConfig::zc_root)
        .def_readwrite("tau_p", &OfdmConfig::tau_p)
        .def_readwrite("relaxed", &OfdmConfig::relaxed)
        .def_readwrite("sigma_d2", &OfdmConfig::sigma_d2)
        .def_readwrite("cfo_max", &OfdmConfig::cfo_max)
        .def_property_readonly("symbol_length", &OfdmConfig::symbol_length)
        .def_property_readonly("window_length", &OfdmConfig::window_length)
        .def_property_readonly("delta_tau", &OfdmConfig::delta_tau)
        .def_property_readonly("tau_relax", &OfdmConfig::tau_relax)
        .def_property_readonly("label_offset", &OfdmConfig::label_offset)
        .def("validate", &OfdmConfig::validate)
        .def_static("scaled", &OfdmConfig::scaled, py::arg("n_subcarriers"), py::arg("cp_length"), py::arg("relaxed") = true)
        .def("__eq__", [](const OfdmConfig& a, const OfdmConfig& b) { return a == b; });

    m.def("zc_sequence", [](int n, int root) { return to_array(zc_sequence(n, root)); }, py::arg("length"), py::arg("root"));
    m.def("ofdm_modulate", [](const py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>& d) {
        const auto v = to_vec(d);
        return to_array(ofdm_modulate(v));
    });
    m.def("add_cp", [](const py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>& s, int cp) {
        const auto v = to_vec(s);
        return to_array(add_cp(v, cp));
    });
    m.def("training_replica", [](const OfdmConfig& cfg) { return to_array(training_replica(cfg)); });

    py::class_<PdpProfile>(m, "PdpProfile")
        .def_readonly("delays", &PdpProfile::delays)
        .def_readonly("powers", &PdpProfile::powers);
    m.def("exp_pdp", &exp_pdp, py::arg("num_taps"), py::arg("eta"));
    m.def("tdl_pdp", [](const std::string& name, int tau_p) { return tdl_pdp(parse_tdl_profile(name), tau_p); },
          py::arg("profile"), py::arg("tau_p"));

    m.def("make_label", &make_label, py::arg("timing_offset"), py::arg("cfg"));
    m.def("estimate_to",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& p, const OfdmConfig& cfg) {
              const auto v = to_real(p);
              return estimate_to(std::span<const double>(v), cfg);
          });
    m.def("timing_error", &timing_error, py::arg("tau_hat"), py::arg("tau_true"), py::arg("cfg"));
    m.def("count_cm", &count_cm, py::arg("method"), py::arg("cfg"), py::arg("paths") = 28,
          py::arg("hidden_sizes") = kDefaultFcnnHidden);

    m.def("cross_corr_ts", [](const py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>& r,
                              const OfdmConfig& cfg) {
        const auto v = to_vec(r);
        const auto replica = training_replica(cfg);
        return cross_corr_ts(v, replica);
    });
    m.def("auto_corr_ts", [](const py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>& r,
                             const OfdmConfig& cfg) {
        const auto v = to_vec(r);
        return auto_corr_ts(v, cfg);
    });

    m.def(
        "generate_dataset",
        [](const OfdmConfig& cfg, std::size_t count, std::uint64_t seed) {
            const Dataset ds = generate_dataset(cfg, TrainingChannel{}, count, seed, 0);
            const auto width = static_cast<py::ssize_t>(2 * cfg.window_length());
            py::array_t<float> y({static_cast<py::ssize_t>(count), width});
            py::array_t<int> labels(static_cast<py::ssize_t>(count));
            py::array_t<int> offsets(static_cast<py::ssize_t>(count));
            for (std::size_t i = 0; i < count; ++i) {
                std::copy(ds.samples[i].y.begin(), ds.samples[i].y.end(), y.mutable_data() + i * width);
                labels.mutable_data()[i] = ds.samples[i].label_index;
                offsets.mutable_data()[i] = ds.samples[i].true_to;
            }
            return py::make_tuple(y, labels, offsets);
        },
        py::arg("cfg"), py::arg("count"), py::arg("seed") = 0, "returns (y, label_index, true_to) arrays");

    py::class_<NetworkParams>(m, "Network")
        .def_static("init", &init_params, py::arg("cfg"), py::arg("seed") = 0)
        .def_static("fcnn", &build_fcnn_baseline, py::arg("cfg"), py::arg("hidden_sizes") = kDefaultFcnnHidden,
                    py::arg("seed") = 0)
        .def_static("load", [](const std::filesystem::path& path) { return load_params(path); })
        .def("save", [](const NetworkParams& p, const std::filesystem::path& path) { save_params(p, path); })
        .def_property_readonly("parameter_count", &NetworkParams::parameter_count)
        .def_property_readonly("kind", [](const NetworkParams& p) { return std::string(to_string(p.kind)); })
        .def_readonly("cfg", &NetworkParams::cfg)
        .def("forward", [](const NetworkParams& p, const py::array_t<double, py::array::c_style | py::array::forcecast>& y) {
            const auto v = to_real(y);
            const auto cache = forward(p, v);
            return std::vector<double>(cache.probs.begin(), cache.probs.end());
        });

    m.def(
        "evaluate",
        [](const std::string& method, const std::string& scenario, const std::vector<double>& snr_db, long trials,
           std::uint64_t seed, std::optional<std::filesystem::path> model, const OfdmConfig& cfg) {
            const Estimator est = make_estimator(method, cfg, model, OmpConfig{});
            const EvalReport rep = monte_carlo(est, Scenario::preset(scenario), cfg, snr_db, trials, seed, 0);
            std::vector<std::pair<double, double>> out;
            for (const auto& row : rep.rows) out.emplace_back(row.snr_db, row.error_prob);
            return out;
        },
        py::arg("method"), py::arg("scenario"), py::arg("snr_db"), py::arg("trials"), py::arg("seed") = 0,
        py::arg("model") = std::nullopt, py::arg("cfg") = OfdmConfig{}, "returns [(snr_db, error_prob), ...]");
}
