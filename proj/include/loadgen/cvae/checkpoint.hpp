#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "loadgen/cvae/config.hpp"
#include "loadgen/cvae/model.hpp"
#include "loadgen/cvae/trainer.hpp"

namespace loadgen::cvae {

inline constexpr int kCheckpointVersion = 1;
inline constexpr const char* kCheckpointFormat = "loadgen-cvae-checkpoint";

/// Trained model plus everything needed to reproduce and interpret it.
///
/// On disk this is a single JSON document:
///   format, version, config, scale_kw,
///   layers: [{name, in, out, activation, weights (row-major out x in), bias}] in the
///           canonical order of Cvae::layers(),
///   history: [{epoch, train_beta_kl, train_recon, test_beta_kl, test_recon}]
/// Doubles are written in shortest round-trip form, so save/load is bit-exact.
struct Checkpoint {
    Cvae model;
    double scale_kw = 100.0;
    std::vector<EpochLosses> history;
};

nlohmann::json config_to_json(const CvaeConfig& config);
/// Missing keys keep the values already in `base`.
CvaeConfig config_from_json(const nlohmann::json& j, CvaeConfig base = {});

std::string checkpoint_to_string(const Checkpoint& ckpt);
/// Throws FormatError on a foreign document or a version mismatch.
Checkpoint checkpoint_from_string(const std::string& text);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace loadgen::cvae
