#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "loadgen/cvae/trainer.hpp"
#include "loadgen/data/conditions.hpp"
#include "loadgen/pipeline/run_config.hpp"

namespace loadgen::pipeline {

struct SimulateResult {
    std::filesystem::path csv;
    std::size_t rows = 0;
    std::size_t users = 0;
};

/// Writes the synthetic meter CSV to paths.raw_csv.
SimulateResult cmd_simulate(const RunConfig& config, std::ostream& log);

struct PrepResult {
    std::filesystem::path file;
    std::size_t users_in = 0;
    std::size_t users_retained = 0;
    std::size_t users_removed = 0;   // above the intensity limit
    std::size_t users_excluded = 0;  // no non-zero day
    std::size_t train_profiles = 0;
    std::size_t test_profiles = 0;
    std::size_t dropped_incomplete = 0;
    std::size_t dropped_duplicate = 0;
    std::size_t malformed_rows = 0;
};

/// ingest -> local days -> intensity -> rank -> filter and scale -> week-block split.
/// Throws DataError when fewer than two users survive.
PrepResult cmd_prep(const RunConfig& config, std::ostream& log);

struct TrainOutcome {
    std::filesystem::path checkpoint;
    std::filesystem::path history_csv;
    std::vector<cvae::EpochLosses> history;
};

/// Trains on the prepared train split, scoring the test split after every epoch.
TrainOutcome cmd_train(const RunConfig& config, std::ostream& log);

enum class GenerateMode { MatchTraining, ClassSample };

struct GenerateRequest {
    GenerateMode mode = GenerateMode::MatchTraining;
    data::SizeClass size_class = data::SizeClass::Small;  // class-sample only
    bool noise = true;
};

/// "match-training" or "class-sample:<small|medium|large>". Throws DataError otherwise.
GenerateRequest parse_generate_mode(std::string_view mode, bool noise);
std::string mode_name(const GenerateRequest& request);

struct GenerateResult {
    std::filesystem::path file;
    std::size_t count = 0;
};

/// Match-training writes one profile per training profile (same conditions) to
/// paths.generated_noisy or paths.generated_noisefree. Class-sample keeps the training
/// months of one size class, redraws the ranks inside the class and writes
/// generated_<class>_<noisy|noisefree>.lgd next to the other artifacts. Noisy and
/// noise-free match-training runs share their latent draws.
GenerateResult cmd_generate(const RunConfig& config, const GenerateRequest& request, std::ostream& log);

/// Path cmd_generate writes for `request`.
std::filesystem::path generated_path(const RunConfig& config, const GenerateRequest& request);

struct EvaluateResult {
    std::filesystem::path report_dir;
    nlohmann::json summary;
};

/// Mean profiles, cluster comparison, grouped CDFs and the KS / energy / autoencoder
/// tests over train, test and both match-training generations. Writes summary.json,
/// CSV tables and SVG charts into paths.report_dir.
EvaluateResult cmd_evaluate(const RunConfig& config, std::ostream& log);

/// Months used for the interpolation check: two observed months and the midpoint.
inline constexpr double kInterpLower = 11.0;
inline constexpr double kInterpMid = 11.5;
inline constexpr double kInterpUpper = 12.0;

}  // namespace loadgen::pipeline
