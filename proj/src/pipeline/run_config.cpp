#include "loadgen/pipeline/run_config.hpp"

#include <fstream>

#include "loadgen/cvae/checkpoint.hpp"
#include "loadgen/errors.hpp"
#include "loadgen/random.hpp"

namespace loadgen::pipeline {

using nlohmann::json;

std::uint64_t RunConfig::sub_seed(std::string_view role) const { return derive_seed(seed, role); }

std::filesystem::path RunConfig::resolve(const std::filesystem::path& p) const {
    return p.is_absolute() ? p : out_dir / p;
}

void RunConfig::validate() const {
    simulator.validate();
    model.validate();
    if (!(prep.max_intensity_kw > 0.0)) throw DataError("prep.max_intensity_kw must be positive");
    if (!(prep.scale_kw > 0.0)) throw DataError("prep.scale_kw must be positive");
    if (!(prep.max_malformed_fraction >= 0.0 && prep.max_malformed_fraction <= 1.0))
        throw DataError("prep.max_malformed_fraction must lie in [0, 1]");
    if (eval.energy_subsample < 2) throw DataError("evaluation.energy_subsample must be at least 2");
    if (eval.energy_repeats < 1) throw DataError("evaluation.energy_repeats must be at least 1");
    if (eval.clusters < 1) throw DataError("evaluation.clusters must be at least 1");
    if (eval.cdf_points < 2) throw DataError("evaluation.cdf_points must be at least 2");
    if (eval.ae_batch < 1) throw DataError("evaluation.ae_batch must be at least 1");
    if (!(eval.ae_learning_rate > 0.0)) throw DataError("evaluation.ae_learning_rate must be positive");
}

json to_json(const RunConfig& c) {
    auto model = cvae::config_to_json(c.model);
    model.erase("seed");
    return json{
        {"seed", c.seed},
        {"out", c.out_dir.string()},
        {"paths",
         {{"raw_csv", c.paths.raw_csv.string()},
          {"prepared", c.paths.prepared.string()},
          {"checkpoint", c.paths.checkpoint.string()},
          {"loss_history", c.paths.loss_history.string()},
          {"generated_noisy", c.paths.generated_noisy.string()},
          {"generated_noisefree", c.paths.generated_noisefree.string()},
          {"report_dir", c.paths.report_dir.string()}}},
        {"simulator",
         {{"n_users", c.simulator.n_users},
          {"year", c.simulator.year},
          {"weeks", c.simulator.weeks},
          {"min_level_kw", c.simulator.min_level_kw},
          {"max_level_kw", c.simulator.max_level_kw}}},
        {"prep",
         {{"max_intensity_kw", c.prep.max_intensity_kw},
          {"scale_kw", c.prep.scale_kw},
          {"max_malformed_fraction", c.prep.max_malformed_fraction}}},
        {"model", model},
        {"evaluation",
         {{"energy_subsample", c.eval.energy_subsample},
          {"energy_repeats", c.eval.energy_repeats},
          {"clusters", c.eval.clusters},
          {"cdf_points", c.eval.cdf_points},
          {"ae_epochs", c.eval.ae_epochs},
          {"ae_batch", c.eval.ae_batch},
          {"ae_learning_rate", c.eval.ae_learning_rate},
          {"mean_profile_samples", c.eval.mean_profile_samples}}},
    };
}

namespace {

void require_object(const json& j, const std::string& what) {
    if (!j.is_object()) throw DataError("config: '" + what + "' must be an object");
}

[[noreturn]] void unknown(const std::string& section, const std::string& key) {
    throw DataError("config: unknown key '" + (section.empty() ? key : section + "." + key) + "'");
}

}  // namespace

RunConfig run_config_from_json(const json& j, RunConfig c) {
    require_object(j, "config");
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "seed") {
                c.seed = v.get<std::uint64_t>();
            } else if (key == "out") {
                c.out_dir = v.get<std::string>();
            } else if (key == "paths") {
                require_object(v, key);
                for (const auto& [k, p] : v.items()) {
                    const auto s = p.get<std::string>();
                    if (k == "raw_csv") c.paths.raw_csv = s;
                    else if (k == "prepared") c.paths.prepared = s;
                    else if (k == "checkpoint") c.paths.checkpoint = s;
                    else if (k == "loss_history") c.paths.loss_history = s;
                    else if (k == "generated_noisy") c.paths.generated_noisy = s;
                    else if (k == "generated_noisefree") c.paths.generated_noisefree = s;
                    else if (k == "report_dir") c.paths.report_dir = s;
                    else unknown(key, k);
                }
            } else if (key == "simulator") {
                require_object(v, key);
                for (const auto& [k, x] : v.items()) {
                    if (k == "n_users") c.simulator.n_users = x.get<std::size_t>();
                    else if (k == "year") c.simulator.year = x.get<int>();
                    else if (k == "weeks") c.simulator.weeks = x.get<std::size_t>();
                    else if (k == "min_level_kw") c.simulator.min_level_kw = x.get<double>();
                    else if (k == "max_level_kw") c.simulator.max_level_kw = x.get<double>();
                    else unknown(key, k);
                }
            } else if (key == "prep") {
                require_object(v, key);
                for (const auto& [k, x] : v.items()) {
                    if (k == "max_intensity_kw") c.prep.max_intensity_kw = x.get<double>();
                    else if (k == "scale_kw") c.prep.scale_kw = x.get<double>();
                    else if (k == "max_malformed_fraction") c.prep.max_malformed_fraction = x.get<double>();
                    else unknown(key, k);
                }
            } else if (key == "model") {
                require_object(v, key);
                if (v.contains("seed")) throw DataError("config: model.seed is derived from the master seed");
                try {
                    c.model = cvae::config_from_json(v, c.model);
                } catch (const FormatError& e) {
                    throw DataError(std::string("config: ") + e.what());
                }
            } else if (key == "evaluation") {
                require_object(v, key);
                for (const auto& [k, x] : v.items()) {
                    if (k == "energy_subsample") c.eval.energy_subsample = x.get<std::size_t>();
                    else if (k == "energy_repeats") c.eval.energy_repeats = x.get<std::size_t>();
                    else if (k == "clusters") c.eval.clusters = x.get<std::size_t>();
                    else if (k == "cdf_points") c.eval.cdf_points = x.get<std::size_t>();
                    else if (k == "ae_epochs") c.eval.ae_epochs = x.get<std::size_t>();
                    else if (k == "ae_batch") c.eval.ae_batch = x.get<std::size_t>();
                    else if (k == "ae_learning_rate") c.eval.ae_learning_rate = x.get<double>();
                    else if (k == "mean_profile_samples") c.eval.mean_profile_samples = x.get<std::size_t>();
                    else unknown(key, k);
                }
            } else {
                unknown("", key);
            }
        }
    } catch (const json::exception& e) {
        throw DataError(std::string("config: wrong value type: ") + e.what());
    }
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw DataError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return run_config_from_json(j);
}

}  // namespace loadgen::pipeline
