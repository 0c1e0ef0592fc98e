#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "loadgen/cvae/config.hpp"
#include "loadgen/data/simulator.hpp"

namespace loadgen::pipeline {

/// Artifact locations. Relative paths are taken relative to RunConfig::out_dir.
struct RunPaths {
    std::filesystem::path raw_csv = "raw.csv";
    std::filesystem::path prepared = "prepared.lgd";
    std::filesystem::path checkpoint = "checkpoint.json";
    std::filesystem::path loss_history = "loss_history.csv";
    std::filesystem::path generated_noisy = "gen_noisy.lgd";
    std::filesystem::path generated_noisefree = "gen_noisefree.lgd";
    std::filesystem::path report_dir = "report";
};

struct PrepSettings {
    double max_intensity_kw = 100.0;
    double scale_kw = 100.0;
    double max_malformed_fraction = 0.01;
};

struct EvalSettings {
    std::size_t energy_subsample = 512;
    std::size_t energy_repeats = 20;
    std::size_t clusters = 8;
    std::size_t cdf_points = 512;
    std::size_t ae_epochs = 20;
    std::size_t ae_batch = 256;
    double ae_learning_rate = 1e-3;
    std::size_t mean_profile_samples = 10;
};

/// One run of the whole pipeline. The defaults are the desk-scale setup; the simulator
/// and model seeds are not configured directly but derived from `seed`.
struct RunConfig {
    std::uint64_t seed = 0;
    std::filesystem::path out_dir = ".";
    RunPaths paths;
    data::SimulatorConfig simulator;
    PrepSettings prep;
    cvae::CvaeConfig model = cvae::CvaeConfig::desk();
    EvalSettings eval;

    /// derive_seed(seed, role), e.g. role "simulate", "split", "train", "generate/noisy".
    std::uint64_t sub_seed(std::string_view role) const;
    std::filesystem::path resolve(const std::filesystem::path& p) const;

    /// Throws DataError on invalid settings.
    void validate() const;
};

nlohmann::json to_json(const RunConfig& config);
/// Overlays `j` on `base`. Unknown keys are rejected with DataError.
RunConfig run_config_from_json(const nlohmann::json& j, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace loadgen::pipeline
