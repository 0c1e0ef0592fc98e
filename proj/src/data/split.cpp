#include "loadgen/data/split.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "loadgen/errors.hpp"
#include "loadgen/random.hpp"

namespace loadgen::data {

using namespace std::chrono;

std::string_view to_string(Split s) noexcept {
    switch (s) {
        case Split::Train: return "train";
        case Split::Test: return "test";
        case Split::Generated: return "generated";
    }
    return "?";
}

int SplitAssignment::block_of(Date d) const noexcept {
    const int offset = days_since_epoch(d) - days_since_epoch(anchor);
    return offset >= 0 ? offset / 7 : -1;
}

Split SplitAssignment::label_for(Date d) const noexcept {
    auto it = blocks.find(block_of(d));
    return it == blocks.end() ? Split::Train : it->second;
}

std::size_t SplitAssignment::test_block_count() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(blocks.begin(), blocks.end(), [](const auto& kv) { return kv.second == Split::Test; }));
}

SplitAssignment week_block_split(std::span<const DayProfile> days, std::uint64_t seed) {
    if (days.empty()) throw DataError("week_block_split: no days to split");
    const auto first = std::min_element(days.begin(), days.end(), [](const DayProfile& a, const DayProfile& b) {
        return sys_days{a.date} < sys_days{b.date};
    });

    SplitAssignment out;
    sys_days anchor{first->date};
    while (weekday{anchor} != Monday) anchor += std::chrono::days{1};
    out.anchor = Date{anchor};

    for (const auto& d : days) out.blocks.emplace(out.block_of(d.date), Split::Train);

    std::vector<int> ids;
    for (const auto& kv : out.blocks) ids.push_back(kv.first);
    Rng rng(seed);
    std::shuffle(ids.begin(), ids.end(), rng);
    std::size_t n_test = static_cast<std::size_t>(std::lround(static_cast<double>(ids.size()) / 5.0));
    if (ids.size() >= 2) n_test = std::max<std::size_t>(n_test, 1);
    for (std::size_t i = 0; i < n_test; ++i) out.blocks[ids[i]] = Split::Test;
    return out;
}

}  // namespace loadgen::data
