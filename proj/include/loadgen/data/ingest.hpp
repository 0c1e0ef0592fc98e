#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "loadgen/data/time.hpp"

namespace loadgen::data {

inline constexpr const char* kMeterCsvHeader = "user_id,timestamp_utc,energy_kwh";

/// One 15-minute meter reading. Negative energy is generation.
struct RawMeterRecord {
    std::uint32_t user = 0;  // index into MeterData::users
    UtcSeconds timestamp{};
    double energy_kwh = 0.0;

    bool operator==(const RawMeterRecord&) const = default;
};

struct MalformedRow {
    std::size_t line = 0;  // 1-based, header is line 1
    std::string reason;
};

struct MeterData {
    std::vector<std::string> users;  // sorted lexicographically
    std::vector<RawMeterRecord> records;  // stable-sorted by timestamp
    std::vector<MalformedRow> malformed;
    std::size_t data_rows = 0;
    std::uint64_t source_hash = 0;  // FNV-1a of the raw bytes
};

/// Reads the meter CSV. Throws DataError if the file cannot be read, the header is wrong,
/// or more than `max_malformed_fraction` of the data rows are malformed.
MeterData ingest_csv(const std::filesystem::path& path, double max_malformed_fraction = 0.01);
MeterData parse_meter_csv(std::istream& in, double max_malformed_fraction = 0.01);

}  // namespace loadgen::data
