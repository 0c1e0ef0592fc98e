#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "loadgen/cvae/checkpoint.hpp"
#include "loadgen/cvae/generator.hpp"
#include "loadgen/cvae/model.hpp"
#include "loadgen/cvae/trainer.hpp"
#include "loadgen/data/conditions.hpp"
#include "loadgen/data/dataset_file.hpp"
#include "loadgen/data/profiles.hpp"
#include "loadgen/errors.hpp"
#include "loadgen/eval/autoencoder.hpp"
#include "loadgen/eval/energy.hpp"
#include "loadgen/eval/kmeans.hpp"
#include "loadgen/eval/ks.hpp"
#include "loadgen/pipeline/commands.hpp"
#include "loadgen/pipeline/run_config.hpp"
#include "loadgen/random.hpp"

namespace py = pybind11;
using namespace loadgen;
using nn::Matrix;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const Array& a) {
    if (a.ndim() == 1) {
        return Matrix::from_values(static_cast<std::size_t>(a.shape(0)), 1,
                                   std::span(a.data(), static_cast<std::size_t>(a.size())));
    }
    if (a.ndim() != 2) throw ShapeError("expected a 1-d or 2-d array");
    return Matrix::from_values(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)),
                               std::span(a.data(), static_cast<std::size_t>(a.size())));
}

py::array_t<double> to_numpy(const Matrix& m) {
    py::array_t<double> out({m.rows(), m.cols()});
    std::copy(m.values().begin(), m.values().end(), out.mutable_data());
    return out;
}

py::array_t<double> to_numpy(std::span<const double> v) {
    py::array_t<double> out(v.size());
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

std::string dump(const nlohmann::json& j) { return j.dump(); }

cvae::CvaeConfig config_from(const py::dict& d, cvae::CvaeConfig base) {
    const std::string text = py::module_::import("json").attr("dumps")(d).cast<std::string>();
    return cvae::config_from_json(nlohmann::json::parse(text), base);
}

py::dict config_dict(const cvae::CvaeConfig& c) {
    return py::module_::import("json").attr("loads")(dump(cvae::config_to_json(c)));
}

py::list history_list(const std::vector<cvae::EpochLosses>& h) {
    py::list out;
    for (const auto& e : h) {
        py::dict d;
        d["epoch"] = e.epoch;
        d["train_beta_kl"] = e.train_beta_kl;
        d["train_recon"] = e.train_recon;
        d["test_beta_kl"] = e.test_beta_kl;
        d["test_recon"] = e.test_recon;
        out.append(d);
    }
    return out;
}

pipeline::RunConfig run_config(const std::string& config_json) {
    if (config_json.empty()) return {};
    return pipeline::run_config_from_json(nlohmann::json::parse(config_json));
}

}  // namespace

PYBIND11_MODULE(_loadgen, m) {
    m.doc() = "Conditional VAE for daily load profiles";

    py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
    py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);

    m.def("derive_seed", [](std::uint64_t master, const std::string& role) { return derive_seed(master, role); });
    m.def("month_condition", [](double month) {
        const auto e = data::month_condition(month);
        return py::make_tuple(e.sin, e.cos);
    });
    m.def("make_condition", [](double month, double rank) { return data::make_condition(month, rank).as_array(); });
    m.def("energy_to_power", [](double kwh) { return data::energy_to_power(kwh); });

    py::class_<cvae::Cvae>(m, "Cvae")
        .def(py::init([](const py::dict& cfg, bool desk) {
                 return cvae::Cvae::initialize(config_from(cfg, desk ? cvae::CvaeConfig::desk() : cvae::CvaeConfig{}));
             }),
             py::arg("config") = py::dict(), py::arg("desk") = false)
        .def_property_readonly("config", [](const cvae::Cvae& c) { return config_dict(c.config()); })
        .def_property_readonly("parameter_count", &cvae::Cvae::parameter_count)
        .def("encode",
             [](const cvae::Cvae& c, const Array& x, const Array& cond) {
                 const auto q = c.encode(to_matrix(x), to_matrix(cond));
                 return py::make_tuple(to_numpy(q.mean), to_numpy(q.log_var));
             })
        .def("decode",
             [](const cvae::Cvae& c, const Array& z, const Array& cond) {
                 const auto p = c.decode(to_matrix(z), to_matrix(cond));
                 return py::make_tuple(to_numpy(p.mean), to_numpy(p.log_var));
             })
        .def(
            "generate",
            [](const cvae::Cvae& c, const Array& cond, bool noise, std::uint64_t seed) {
                return to_numpy(cvae::generate(c, to_matrix(cond), noise, seed));
            },
            py::arg("conditions"), py::arg("noise") = true, py::arg("seed") = 0)
        .def(
            "loss",
            [](const cvae::Cvae& c, const Array& x, const Array& cond, const Array& eps) {
                const auto l = cvae::loss_and_gradients(c, to_matrix(x), to_matrix(cond), to_matrix(eps), nullptr);
                return py::make_tuple(l.kl, l.recon, l.total);
            },
            "(kl, recon, total) for fixed epsilon draws")
        .def("__eq__", [](const cvae::Cvae& a, const cvae::Cvae& b) { return a == b; });

    m.def(
        "train",
        [](const Array& x_train, const Array& c_train, const Array& x_test, const Array& c_test, const py::dict& cfg,
           bool desk) {
            const auto xtr = to_matrix(x_train), ctr = to_matrix(c_train);
            const auto xte = to_matrix(x_test), cte = to_matrix(c_test);
            const auto config = config_from(cfg, desk ? cvae::CvaeConfig::desk() : cvae::CvaeConfig{});
            auto r = [&] {
                py::gil_scoped_release release;
                return cvae::train({xtr, ctr}, {xte, cte}, config);
            }();
            return py::make_tuple(std::move(r.model), history_list(r.history));
        },
        py::arg("x_train"), py::arg("c_train"), py::arg("x_test"), py::arg("c_test"), py::arg("config") = py::dict(),
        py::arg("desk") = true);

    m.def(
        "save_checkpoint",
        [](const cvae::Cvae& model, const std::filesystem::path& path, double scale_kw) {
            cvae::save_checkpoint({model, scale_kw, {}}, path);
        },
        py::arg("model"), py::arg("path"), py::arg("scale_kw") = 100.0);
    m.def("load_checkpoint", [](const std::filesystem::path& path) {
        auto ck = cvae::load_checkpoint(path);
        return py::make_tuple(std::move(ck.model), ck.scale_kw, history_list(ck.history));
    });

    m.def("read_dataset", [](const std::filesystem::path& path) {
        const auto ds = data::read_dataset(path);
        py::dict d;
        d["metadata"] = py::module_::import("json").attr("loads")(dump(ds.metadata));
        d["values"] = to_numpy(ds.values);
        d["conditions"] = to_numpy(ds.conditions);
        py::array_t<std::int32_t> date(ds.size());
        py::array_t<std::uint32_t> user(ds.size());
        py::array_t<std::uint8_t> split(ds.size());
        for (std::size_t i = 0; i < ds.size(); ++i) {
            date.mutable_at(i) = ds.date[i];
            user.mutable_at(i) = ds.user_index[i];
            split.mutable_at(i) = static_cast<std::uint8_t>(ds.split[i]);
        }
        d["date"] = date;
        d["user_index"] = user;
        d["split"] = split;
        return d;
    });

    m.def("ks_statistic", [](const Array& a, const Array& b) {
        return eval::ks_statistic(std::span(a.data(), static_cast<std::size_t>(a.size())),
                                  std::span(b.data(), static_cast<std::size_t>(b.size())));
    });
    m.def("ks_per_dimension", [](const Array& a, const Array& b) {
        return to_numpy(eval::ks_per_dimension(to_matrix(a), to_matrix(b)).statistic);
    });
    m.def("energy_distance_full",
          [](const Array& a, const Array& b) { return eval::energy_distance_full(to_matrix(a), to_matrix(b)); });
    m.def(
        "energy_distance",
        [](const Array& a, const Array& b, std::size_t subsample, std::size_t repeats, std::uint64_t seed) {
            const auto r = eval::energy_distance(to_matrix(a), to_matrix(b), subsample, repeats, seed);
            return py::make_tuple(r.estimate, r.standard_error);
        },
        py::arg("a"), py::arg("b"), py::arg("subsample") = 512, py::arg("repeats") = 20, py::arg("seed") = 0);
    m.def(
        "kmeans_fit",
        [](const Array& x, std::size_t k, std::uint64_t seed, std::size_t max_iterations) {
            const auto r = eval::kmeans_fit(to_matrix(x), k, seed, max_iterations);
            return py::make_tuple(to_numpy(r.centroids), r.assignment, r.iterations);
        },
        py::arg("x"), py::arg("k") = 8, py::arg("seed") = 0, py::arg("max_iterations") = 300);
    m.def(
        "ae_recon_errors",
        [](const Array& train, const Array& x, std::size_t epochs, std::uint64_t seed) {
            eval::AeConfig cfg = eval::AeConfig::mirroring(cvae::CvaeConfig::desk());
            cfg.epochs = epochs;
            cfg.batch_size = 256;
            cfg.learning_rate = 1e-3;
            cfg.seed = seed;
            const auto ae = eval::train_reference_ae(to_matrix(train), cfg);
            return to_numpy(eval::ae_recon_errors(ae, to_matrix(x)));
        },
        "Trains a desk-width reference autoencoder on `train` and scores `x`.", py::arg("train"), py::arg("x"),
        py::arg("epochs") = 5, py::arg("seed") = 0);

    m.def(
        "run_command",
        [](const std::string& command, const std::string& config_json, const std::string& mode, bool noise) {
            const auto cfg = run_config(config_json);
            std::ostringstream log;
            py::gil_scoped_release release;
            if (command == "simulate") pipeline::cmd_simulate(cfg, log);
            else if (command == "prep") pipeline::cmd_prep(cfg, log);
            else if (command == "train") pipeline::cmd_train(cfg, log);
            else if (command == "generate") pipeline::cmd_generate(cfg, pipeline::parse_generate_mode(mode, noise), log);
            else if (command == "evaluate") pipeline::cmd_evaluate(cfg, log);
            else throw DataError("unknown command '" + command + "'");
            return log.str();
        },
        "Runs one pipeline command with a JSON run configuration and returns its log.", py::arg("command"),
        py::arg("config_json") = "", py::arg("mode") = "match-training", py::arg("noise") = true);
}
