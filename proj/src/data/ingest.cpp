#include "loadgen/data/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <unordered_map>

#include "loadgen/errors.hpp"
#include "loadgen/random.hpp"

namespace loadgen::data {

namespace {

std::string_view trim_cr(std::string_view s) {
    if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
    return s;
}

}  // namespace

MeterData parse_meter_csv(std::istream& in, double max_malformed_fraction) {
    MeterData out;
    std::string line;
    if (!std::getline(in, line)) throw DataError("meter CSV is empty (missing header)");
    out.source_hash = fnv1a64("\n", fnv1a64(line));
    if (trim_cr(line) != kMeterCsvHeader)
        throw DataError("meter CSV header must be '" + std::string(kMeterCsvHeader) + "'");

    std::unordered_map<std::string, std::uint32_t> index;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        out.source_hash = fnv1a64("\n", fnv1a64(line, out.source_hash));
        std::string_view row = trim_cr(line);
        if (row.empty()) continue;
        ++out.data_rows;
        auto bad = [&](const char* reason) { out.malformed.push_back({line_no, reason}); };

        const auto c1 = row.find(',');
        const auto c2 = c1 == std::string_view::npos ? c1 : row.find(',', c1 + 1);
        if (c2 == std::string_view::npos || row.find(',', c2 + 1) != std::string_view::npos) {
            bad("expected 3 fields");
            continue;
        }
        const auto user = row.substr(0, c1);
        const auto ts_text = row.substr(c1 + 1, c2 - c1 - 1);
        const auto energy_text = row.substr(c2 + 1);
        if (user.empty()) {
            bad("empty user id");
            continue;
        }
        const auto ts = parse_rfc3339(ts_text);
        if (!ts) {
            bad("invalid RFC 3339 timestamp");
            continue;
        }
        const auto secs = ts->time_since_epoch().count();
        if (secs % kSlotSeconds != 0) {
            bad("timestamp not aligned to a 15-minute boundary");
            continue;
        }
        double energy = 0.0;
        auto [ptr, ec] = std::from_chars(energy_text.data(), energy_text.data() + energy_text.size(), energy);
        if (ec != std::errc{} || ptr != energy_text.data() + energy_text.size() || !std::isfinite(energy)) {
            bad("invalid energy value");
            continue;
        }
        auto [it, inserted] = index.try_emplace(std::string(user), static_cast<std::uint32_t>(out.users.size()));
        if (inserted) out.users.push_back(it->first);
        out.records.push_back({it->second, *ts, energy});
    }

    if (out.data_rows > 0 &&
        static_cast<double>(out.malformed.size()) > max_malformed_fraction * static_cast<double>(out.data_rows)) {
        std::string first = out.malformed.front().reason + " at line " + std::to_string(out.malformed.front().line);
        throw DataError("meter CSV: " + std::to_string(out.malformed.size()) + " of " +
                        std::to_string(out.data_rows) + " rows malformed (first: " + first + ")");
    }

    // Renumber users in lexicographic order.
    std::vector<std::uint32_t> order(out.users.size());
    for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return out.users[a] < out.users[b]; });
    std::vector<std::uint32_t> remap(order.size());
    std::vector<std::string> sorted_users(order.size());
    for (std::uint32_t pos = 0; pos < order.size(); ++pos) {
        remap[order[pos]] = pos;
        sorted_users[pos] = std::move(out.users[order[pos]]);
    }
    out.users = std::move(sorted_users);
    for (auto& r : out.records) r.user = remap[r.user];

    std::stable_sort(out.records.begin(), out.records.end(),
                     [](const RawMeterRecord& a, const RawMeterRecord& b) { return a.timestamp < b.timestamp; });
    return out;
}

MeterData ingest_csv(const std::filesystem::path& path, double max_malformed_fraction) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read meter CSV " + path.string());
    return parse_meter_csv(in, max_malformed_fraction);
}

}  // namespace loadgen::data
