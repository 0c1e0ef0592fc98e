#include "loadgen/eval/mean_profiles.hpp"

#include <algorithm>
#include <cstdio>

#include "loadgen/errors.hpp"
#include "loadgen/random.hpp"

namespace loadgen::eval {

bool ProfileFilter::matches(const data::ConditionVector& c) const noexcept {
    return nearest_month(c) == month && data::size_class_of(c.rank) == size_class;
}

std::string ProfileFilter::name() const {
    char buf[8];
    std::snprintf(buf, sizeof buf, "m%02u-", month);
    return buf + std::string(data::to_string(size_class));
}

std::vector<MeanProfileEntry> mean_profile_compare(std::span<const SampleSet> sets, const ProfileFilter& filter,
                                                   std::uint64_t seed, std::size_t n_samples) {
    std::vector<MeanProfileEntry> out;
    for (std::size_t s = 0; s < sets.size(); ++s) {
        const auto& set = sets[s];
        if (set.conditions.size() != set.size())
            throw DataError("mean_profile_compare: set '" + set.label + "' lacks per-profile conditions");
        std::vector<std::size_t> rows;
        for (std::size_t r = 0; r < set.size(); ++r)
            if (filter.matches(set.conditions[r])) rows.push_back(r);
        if (rows.empty())
            throw DataError("mean_profile_compare: no '" + set.label + "' profile matches " + filter.name());

        MeanProfileEntry e;
        e.set = set.label;
        e.matched = rows.size();
        e.mean.assign(set.profiles.cols(), 0.0);
        for (auto r : rows) {
            auto p = set.profiles.row(r);
            for (std::size_t j = 0; j < p.size(); ++j) e.mean[j] += p[j];
        }
        for (double& v : e.mean) v /= static_cast<double>(rows.size());

        Rng rng(stream_seed(seed, s));
        const auto take = std::min(n_samples, rows.size());
        for (std::size_t i = 0; i < take; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, rows.size() - 1);
            std::swap(rows[i], rows[pick(rng)]);
        }
        e.sample_rows.assign(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(take));
        e.samples = nn::gather_rows(set.profiles, e.sample_rows);
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace loadgen::eval
