#include "loadgen/data/simulator.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>
#include <string>

#include "loadgen/data/ingest.hpp"
#include "loadgen/errors.hpp"
#include "loadgen/random.hpp"

namespace loadgen::data {

using namespace std::chrono;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// +1 around 5 January, -1 around early July.
double winter_factor(Date d) {
    const auto doy = (sys_days{d} - sys_days{d.year() / January / 1}).count();
    return std::cos(kTwoPi * (static_cast<double>(doy) - 4.0) / 365.25);
}

/// Smooth 0 -> 1 -> 0 window between `on` and `off` hours.
double window(double hour, double on, double off, double steepness = 2.5) {
    const double rise = 1.0 / (1.0 + std::exp(-steepness * (hour - on)));
    const double fall = 1.0 / (1.0 + std::exp(steepness * (hour - off)));
    return rise * fall;
}

UtcSeconds local_midnight_to_utc(Date d) {
    const auto local = sys_days{d};
    UtcSeconds guess = UtcSeconds{local} - hours{1};
    if (is_eu_summer_time(guess)) guess = UtcSeconds{local} - hours{2};
    return guess;
}

struct UserModel {
    SimulatedUser user;
    Rng rng;
    // Intermittent users: typical shift.
    double shift_start = 7.0;
    double shift_hours = 8.0;
};

UserModel make_user(std::size_t index, const SimulatorConfig& cfg) {
    UserModel m{{}, Rng(stream_seed(derive_seed(cfg.seed, "simulator/users"), index))};
    char id[16];
    std::snprintf(id, sizeof id, "U%04zu", index + 1);
    m.user.id = id;
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double a = u01(m.rng);
    m.user.archetype = a < 0.25   ? Archetype::Baseload
                       : a < 0.6  ? Archetype::Commercial
                       : a < 0.85 ? Archetype::SolarExporter
                                  : Archetype::Intermittent;
    m.user.level_kw = cfg.min_level_kw * std::pow(cfg.max_level_kw / cfg.min_level_kw, u01(m.rng));
    m.shift_start = 5.0 + 4.0 * u01(m.rng);
    m.shift_hours = 6.0 + 8.0 * u01(m.rng);
    return m;
}

/// Local-time power (kW) of one day, already quantized via integer kWh.
std::array<long long, kSlotsPerDay> simulate_day(UserModel& m, Date d) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double winter = winter_factor(d);
    const bool weekend = weekday{sys_days{d}}.iso_encoding() >= 6;
    const double level = m.user.level_kw * std::exp(0.1 * normal(m.rng));

    // Day-level draws come first so the stream layout does not depend on the archetype's slot loop.
    const double cloud = 0.25 + 0.75 * u01(m.rng);
    const bool active = u01(m.rng) < (weekend ? 0.25 : 0.8);
    const double start = m.shift_start + 1.5 * normal(m.rng);
    const double length = std::max(2.0, m.shift_hours + 2.0 * normal(m.rng));
    const double run_level = 0.7 + 0.3 * u01(m.rng);

    const double daylight = 12.25 - 4.25 * winter;  // ~8 h in winter, ~16.5 h in summer
    const double noon = 12.75 - 0.5 * winter;       // solar noon in local clock time

    std::array<long long, kSlotsPerDay> out{};
    for (int s = 0; s < kSlotsPerDay; ++s) {
        const double hour = (s + 0.5) / 4.0;
        double p = 0.0;
        switch (m.user.archetype) {
            case Archetype::Baseload:
                p = level * (1.0 + 0.15 * winter) * (0.9 + 0.1 * window(hour, 6.0, 22.0));
                break;
            case Archetype::Commercial: {
                const double open = weekend ? 0.15 : 1.0;
                p = level * (1.0 + 0.2 * winter) * (0.25 + 0.75 * open * window(hour, 7.5, 18.0));
                break;
            }
            case Archetype::SolarExporter: {
                const double consumption = 0.35 * level * (1.0 + 0.1 * winter) * (0.8 + 0.4 * window(hour, 7.0, 21.0));
                const double x = (hour - noon) / (0.5 * daylight);
                const double sun = std::abs(x) < 1.0 ? std::cos(0.5 * std::numbers::pi * x) : 0.0;
                const double pv = 1.3 * level * (0.7 - 0.3 * winter) * cloud * sun * sun;
                p = consumption - pv;
                break;
            }
            case Archetype::Intermittent: {
                const double standby = 0.08 * level;
                p = active ? standby + level * run_level * window(hour, start, start + length, 4.0) : standby;
                break;
            }
        }
        p *= 1.0 + 0.08 * normal(m.rng);
        out[static_cast<std::size_t>(s)] = std::llround(p / 4.0);
    }
    return out;
}

}  // namespace

void SimulatorConfig::validate() const {
    if (n_users < 2) throw DataError("simulator: n_users must be at least 2");
    if (year < 1996 || year > 2099) throw DataError("simulator: year must lie in [1996, 2099]");
    if (!(min_level_kw > 0.0 && max_level_kw >= min_level_kw))
        throw DataError("simulator: invalid user size range");
}

std::string_view to_string(Archetype a) noexcept {
    switch (a) {
        case Archetype::Baseload: return "baseload";
        case Archetype::Commercial: return "commercial";
        case Archetype::SolarExporter: return "solar-exporter";
        case Archetype::Intermittent: return "intermittent";
    }
    return "?";
}

std::pair<Date, Date> simulation_window(const SimulatorConfig& cfg) {
    const year y{cfg.year};
    if (cfg.weeks == 0) return {Date{y / January / 1}, Date{y / December / 31}};
    sys_days first{y / January / 1};
    while (weekday{first} != Monday) first += days{1};
    const sys_days last = first + days{static_cast<int>(7 * cfg.weeks) - 1};
    return {Date{first}, Date{last}};
}

SimulationSummary simulate_dataset(const SimulatorConfig& cfg, std::ostream& out) {
    cfg.validate();
    const auto [first, last] = simulation_window(cfg);
    const UtcSeconds t0 = local_midnight_to_utc(first);
    const UtcSeconds t1 = local_midnight_to_utc(Date{sys_days{last} + days{1}});

    std::vector<std::string> stamps;
    for (auto t = t0; t < t1; t += seconds{kSlotSeconds}) stamps.push_back(format_rfc3339(t));

    SimulationSummary summary;
    summary.first_day = first;
    summary.last_day = last;
    summary.users = cfg.n_users;

    out << kMeterCsvHeader << '\n';
    std::string buf;
    for (std::size_t u = 0; u < cfg.n_users; ++u) {
        auto model = make_user(u, cfg);
        Date current{};
        std::array<long long, kSlotsPerDay> day_values{};
        std::size_t k = 0;
        for (auto t = t0; t < t1; t += seconds{kSlotSeconds}, ++k) {
            const auto local = utc_to_local(t);
            const Date d = local_date(local);
            if (d != current) {
                current = d;
                day_values = simulate_day(model, d);
            }
            buf.clear();
            buf += model.user.id;
            buf += ',';
            buf += stamps[k];
            buf += ',';
            char num[24];
            auto [ptr, ec] = std::to_chars(num, num + sizeof num, day_values[static_cast<std::size_t>(slot_of_day(local))]);
            (void)ec;
            buf.append(num, ptr);
            buf += '\n';
            out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
            ++summary.rows;
        }
        summary.population.push_back(model.user);
    }
    return summary;
}

SimulationSummary simulate_dataset(const SimulatorConfig& cfg, const std::filesystem::path& csv_path) {
    cfg.validate();
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw DataError("cannot write " + csv_path.string());
    auto summary = simulate_dataset(cfg, out);
    out.flush();
    if (!out) throw DataError("failed writing " + csv_path.string());
    return summary;
}

}  // namespace loadgen::data
