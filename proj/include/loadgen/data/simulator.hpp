#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "loadgen/data/time.hpp"

namespace loadgen::data {

/// Synthetic smart-meter population written in the ingest CSV format.
///
/// Every user follows one archetype with a log-uniform size. Demand rises smoothly
/// towards early January and falls towards early July, so November to December is a
/// monotone increase; PV output follows the opposite cycle. Readings are multiplied by
/// per-day and per-slot lognormal-ish noise and quantized to integer kWh per interval.
struct SimulatorConfig {
    std::size_t n_users = 300;
    int year = 2020;
    /// Number of whole weeks starting at the first Monday of `year`; 0 simulates the
    /// calendar year from 1 January.
    std::size_t weeks = 52;
    std::uint64_t seed = 0;
    double min_level_kw = 6.0;
    double max_level_kw = 130.0;

    void validate() const;
};

enum class Archetype { Baseload, Commercial, SolarExporter, Intermittent };

std::string_view to_string(Archetype a) noexcept;

struct SimulatedUser {
    std::string id;
    Archetype archetype = Archetype::Baseload;
    double level_kw = 0.0;
};

struct SimulationSummary {
    std::size_t rows = 0;
    std::size_t users = 0;
    Date first_day{};
    Date last_day{};
    std::vector<SimulatedUser> population;
};

/// Local calendar dates covered by the configuration, [first, last].
std::pair<Date, Date> simulation_window(const SimulatorConfig& config);

SimulationSummary simulate_dataset(const SimulatorConfig& config, std::ostream& out);
SimulationSummary simulate_dataset(const SimulatorConfig& config, const std::filesystem::path& csv_path);

}  // namespace loadgen::data
