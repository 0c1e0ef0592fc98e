#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "loadgen/data/conditions.hpp"
#include "loadgen/data/dataset_file.hpp"
#include "loadgen/data/ingest.hpp"
#include "loadgen/data/intensity.hpp"
#include "loadgen/data/profiles.hpp"
#include "loadgen/data/simulator.hpp"
#include "loadgen/data/split.hpp"
#include "loadgen/data/time.hpp"
#include "loadgen/errors.hpp"
#include "test_util.hpp"

using namespace loadgen;
using namespace loadgen::data;
using namespace std::chrono;

namespace {

UtcSeconds utc(const char* s) { return *parse_rfc3339(s); }

std::string local_string(const char* s) {
    const auto local = utc_to_local(utc(s));
    return format_rfc3339(UtcSeconds{local.time_since_epoch()});
}

/// CSV with `n` consecutive 15-minute readings per user starting at `start` (UTC).
std::string day_csv(const std::vector<std::string>& users, const char* start, int n, double kwh = 1.0) {
    std::ostringstream out;
    out << kMeterCsvHeader << '\n';
    for (int k = 0; k < n; ++k)
        for (const auto& u : users)
            out << u << ',' << format_rfc3339(utc(start) + seconds(k * kSlotSeconds)) << ',' << kwh << '\n';
    return out.str();
}

MeterData parse(const std::string& text, double max_frac = 0.01) {
    std::istringstream in(text);
    return parse_meter_csv(in, max_frac);
}

Date plus_days(Date d, int k) { return Date{sys_days(d) + std::chrono::days{k}}; }

DayProfile day_with(const std::string& user, Date date, double value) {
    DayProfile d{user, date, {}};
    d.values.fill(value);
    return d;
}

}  // namespace

TEST_CASE("utc_to_local examples") {
    CHECK(local_string("2020-01-15T12:00:00Z") == "2020-01-15T13:00:00Z");
    CHECK(local_string("2020-07-15T12:00:00Z") == "2020-07-15T14:00:00Z");
    CHECK(local_string("2020-03-29T01:00:00Z") == "2020-03-29T03:00:00Z");
    CHECK(local_string("2020-03-29T00:45:00Z") == "2020-03-29T01:45:00Z");
    CHECK(local_string("2020-10-25T00:45:00Z") == "2020-10-25T02:45:00Z");
    CHECK(local_string("2020-10-25T01:00:00Z") == "2020-10-25T02:00:00Z");
}

TEST_CASE("EU summer-time boundaries") {
    CHECK(format_rfc3339(eu_summer_time_start(2020)) == "2020-03-29T01:00:00Z");
    CHECK(format_rfc3339(eu_summer_time_end(2020)) == "2020-10-25T01:00:00Z");
    CHECK(format_rfc3339(eu_summer_time_start(2021)) == "2021-03-28T01:00:00Z");
    CHECK(format_rfc3339(eu_summer_time_end(2021)) == "2021-10-31T01:00:00Z");
    CHECK_FALSE(is_eu_summer_time(utc("2020-03-29T00:59:59Z")));
    CHECK(is_eu_summer_time(utc("2020-03-29T01:00:00Z")));
    CHECK_FALSE(is_eu_summer_time(utc("2020-10-25T01:00:00Z")));
}

TEST_CASE("RFC 3339 parsing") {
    CHECK(parse_rfc3339("2020-01-01T00:15:00+01:00") == utc("2019-12-31T23:15:00Z"));
    CHECK(parse_rfc3339("2020-01-01T00:15:00.000Z") == utc("2020-01-01T00:15:00Z"));
    CHECK_FALSE(parse_rfc3339("2020-01-01T00:15:00.5Z"));
    CHECK_FALSE(parse_rfc3339("2020-02-30T00:00:00Z"));
    CHECK_FALSE(parse_rfc3339("2020-01-01 00:00:00"));
    CHECK_FALSE(parse_rfc3339("2020-01-01T24:00:00Z"));
    CHECK(parse_date("2020-02-29"));
    CHECK_FALSE(parse_date("2021-02-29"));
    CHECK(date_from_days(days_since_epoch(*parse_date("2020-06-30"))) == *parse_date("2020-06-30"));
}

TEST_CASE("energy_to_power examples") {
    CHECK(energy_to_power(1.0) == 4.0);
    CHECK(energy_to_power(0.0) == 0.0);
    CHECK(energy_to_power(-2.0) == -8.0);
}

TEST_CASE("ingest: empty data section") {
    const auto m = parse(std::string(kMeterCsvHeader) + "\n");
    CHECK(m.records.empty());
    CHECK(m.users.empty());
}

TEST_CASE("ingest: four-row fixture is sorted by timestamp") {
    const std::string text = std::string(kMeterCsvHeader) +
                             "\n"
                             "B,2020-01-01T00:30:00Z,3\n"
                             "A,2020-01-01T00:00:00Z,1\n"
                             "A,2020-01-01T00:45:00Z,-2\n"
                             "B,2020-01-01T00:15:00Z,0\n";
    const auto m = parse(text);
    REQUIRE(m.records.size() == 4);
    CHECK(m.users == std::vector<std::string>{"A", "B"});
    CHECK(m.records[0].timestamp == utc("2020-01-01T00:00:00Z"));
    CHECK(m.records[1].timestamp == utc("2020-01-01T00:15:00Z"));
    CHECK(m.records[2].timestamp == utc("2020-01-01T00:30:00Z"));
    CHECK(m.records[3].energy_kwh == -2.0);
    CHECK(m.records[3].user == 0);
    CHECK(m.malformed.empty());
}

TEST_CASE("ingest: malformed rows are reported, too many abort") {
    std::string text = day_csv({"A"}, "2020-01-01T00:00:00Z", 200);
    text += "A,2020-01-02T03:07:00Z,1\n";
    const auto m = parse(text);
    REQUIRE(m.malformed.size() == 1);
    CHECK(m.malformed[0].line == 202);
    CHECK(m.records.size() == 200);

    std::string bad = day_csv({"A"}, "2020-01-01T00:00:00Z", 10);
    bad += "A,not-a-time,1\nA,2020-01-05T00:00:00Z,abc\n,2020-01-05T00:15:00Z,1\nA,2020-01-05T00:30:00Z\n";
    CHECK_THROWS_AS(parse(bad), DataError);
    const auto tolerant = parse(bad, 0.5);
    CHECK(tolerant.malformed.size() == 4);
    CHECK_THROWS_AS(parse("user,time,value\n"), DataError);
    CHECK_THROWS_AS(ingest_csv("/nonexistent/file.csv"), DataError);
}

TEST_CASE("assemble_days: complete, incomplete and interleaved days") {
    // Local midnight of 2020-01-10 is 23:00 UTC the day before.
    auto one = assemble_days(parse(day_csv({"A"}, "2020-01-09T23:00:00Z", 96, 2.0)));
    REQUIRE(one.days.size() == 1);
    CHECK(one.days[0].date == *parse_date("2020-01-10"));
    for (double v : one.days[0].values) CHECK(v == 8.0);

    auto short_day = assemble_days(parse(day_csv({"A"}, "2020-01-09T23:00:00Z", 95)));
    CHECK(short_day.days.empty());
    CHECK(short_day.dropped_incomplete == 1);

    auto two = assemble_days(parse(day_csv({"U2", "U1"}, "2020-01-09T23:00:00Z", 96)));
    REQUIRE(two.days.size() == 2);
    CHECK(two.days[0].user_id == "U1");
    CHECK(two.days[1].user_id == "U2");
}

TEST_CASE("assemble_days drops both DST transition days") {
    // Spring: 2020-03-29 local has 92 slots; autumn: 2020-10-25 local has 100.
    const auto spring = assemble_days(parse(day_csv({"A"}, "2020-03-28T23:00:00Z", 92)));
    CHECK(spring.days.empty());
    CHECK(spring.dropped_incomplete == 1);
    const auto autumn = assemble_days(parse(day_csv({"A"}, "2020-10-24T22:00:00Z", 100)));
    CHECK(autumn.days.empty());
    CHECK(autumn.dropped_duplicate == 1);
    // The summer day after the spring switch is complete again.
    const auto after = assemble_days(parse(day_csv({"A"}, "2020-03-29T22:00:00Z", 96)));
    REQUIRE(after.days.size() == 1);
    CHECK(after.days[0].date == *parse_date("2020-03-30"));
}

TEST_CASE("month_condition examples and invariants") {
    auto e = month_condition(12);
    CHECK(std::abs(e.sin) < 1e-12);
    CHECK(e.cos == doctest::Approx(1.0));
    e = month_condition(3);
    CHECK(e.sin == doctest::Approx(1.0));
    CHECK(std::abs(e.cos) < 1e-12);
    e = month_condition(11.5);
    CHECK(e.sin == doctest::Approx(std::sin(23 * std::numbers::pi / 12)));
    CHECK(e.sin == doctest::Approx(-0.2588).epsilon(1e-3));
    CHECK(e.cos == doctest::Approx(0.9659).epsilon(1e-3));
    for (double m = 0.25; m <= 12.0; m += 0.25) {
        const auto c = month_condition(m);
        CHECK(std::abs(c.sin * c.sin + c.cos * c.cos - 1.0) < 1e-9);
        CHECK(make_condition(m, 0.5).month() == doctest::Approx(m));
    }
    // Continuity across the wrap: m -> 0+ approaches m = 12.
    const auto near0 = month_condition(1e-9);
    CHECK(std::abs(near0.sin - month_condition(12).sin) < 1e-8);
    CHECK(std::abs(near0.cos - month_condition(12).cos) < 1e-8);
    CHECK_THROWS_AS(month_condition(0.0), DataError);
    CHECK_THROWS_AS(month_condition(12.5), DataError);
}

TEST_CASE("size classes") {
    CHECK(size_class_of(0.0) == SizeClass::Small);
    CHECK(size_class_of(0.3) == SizeClass::Small);
    CHECK(size_class_of(0.5) == SizeClass::Medium);
    CHECK(size_class_of(0.7) == SizeClass::Large);
    CHECK(size_class_from_string("large") == SizeClass::Large);
    CHECK_FALSE(size_class_from_string("huge"));
}

TEST_CASE("user_intensity examples") {
    std::vector<DayProfile> days;
    int k = 0;
    for (double v : {10, 20, 30, 40, 50, 60, 5}) days.push_back(day_with("A", plus_days(*parse_date("2020-01-01"), k++), v));
    CHECK(user_intensity(days) == doctest::Approx(40.0));

    CHECK(user_intensity(std::vector{day_with("A", *parse_date("2020-01-01"), 8.0)}) == doctest::Approx(8.0));

    auto spike = day_with("A", *parse_date("2020-01-01"), 0.0);
    spike.values[50] = 12.0;
    CHECK(daily_exchange(spike.values) == doctest::Approx(12.0));
    CHECK(user_intensity(std::vector{spike}) == doctest::Approx(12.0));

    auto negative = day_with("A", *parse_date("2020-01-01"), -4.0);
    CHECK(daily_exchange(negative.values) == doctest::Approx(4.0));
    CHECK_FALSE(user_intensity(std::vector{day_with("A", *parse_date("2020-01-01"), 0.0)}));
}

TEST_CASE("rank_intensity examples") {
    IntensityTable t{{{"A", 10, 0}, {"B", 30, 0}, {"C", 20, 0}}};
    rank_intensity(t);
    CHECK(t.find("A")->rank == 0.0);
    CHECK(t.find("B")->rank == 1.0);
    CHECK(t.find("C")->rank == 0.5);

    IntensityTable two{{{"P", 3, 0}, {"Q", 1, 0}}};
    rank_intensity(two);
    CHECK(two.find("Q")->rank == 0.0);
    CHECK(two.find("P")->rank == 1.0);

    IntensityTable tie{{{"Y", 5, 0}, {"X", 5, 0}}};
    rank_intensity(tie);
    CHECK(tie.find("X")->rank < tie.find("Y")->rank);

    IntensityTable one{{{"A", 1, 0}}};
    CHECK_THROWS_AS(rank_intensity(one), DataError);

    IntensityTable many;
    for (int i = 0; i < 9; ++i) many.users.push_back({"U" + std::to_string(i), double((i * 7) % 9), 0});
    rank_intensity(many);
    std::set<double> ranks;
    for (const auto& u : many.users) ranks.insert(u.rank);
    std::set<double> expected;
    for (int i = 0; i < 9; ++i) expected.insert(i / 8.0);
    CHECK(ranks == expected);
}

TEST_CASE("filter_and_scale examples") {
    const auto d0 = *parse_date("2020-02-03");
    std::vector<DayProfile> days{day_with("A", d0, 50.0), day_with("B", d0, 101.0), day_with("C", d0, 100.0),
                                 day_with("D", d0, 20.0)};
    auto res = compute_intensities(days);
    rank_intensity(res.table);
    const auto f = filter_and_scale(days, res.table);
    CHECK(f.removed == std::vector<std::string>{"B"});
    REQUIRE(f.survivors.users.size() == 3);
    CHECK(f.survivors.find("C") != nullptr);
    CHECK(f.survivors.find("D")->rank == 0.0);
    CHECK(f.survivors.find("A")->rank == 0.5);
    CHECK(f.survivors.find("C")->rank == 1.0);
    REQUIRE(f.profiles.size() == 3);
    for (const auto& p : f.profiles) {
        if (p.day.user_id == "A") CHECK(p.day.values[0] == 0.5);
        CHECK(p.condition.rank == f.survivors.find(p.day.user_id)->rank);
        CHECK(p.condition.month() == doctest::Approx(2.0));
    }
    std::vector<DayProfile> lone{day_with("A", d0, 500.0), day_with("B", d0, 10.0)};
    auto r2 = compute_intensities(lone);
    rank_intensity(r2.table);
    CHECK_THROWS_AS(filter_and_scale(lone, r2.table), DataError);
}

TEST_CASE("scaling is reversible") {
    for (double kw : {-73.25, 0.0, 4.0, 99.99, 1234.5})
        CHECK(std::abs(unscale_value(scale_value(kw)) - kw) < 1e-12);
}

TEST_CASE("week_block_split: block constancy, ratio and determinism") {
    std::vector<DayProfile> days;
    const auto start = *parse_date("2020-01-01");  // a Wednesday
    for (int k = 0; k < 10 * 7 + 2; ++k)
        for (const char* u : {"A", "B"}) days.push_back(day_with(u, plus_days(start, k), 1.0));
    const auto s = week_block_split(days, 7);
    CHECK(s.anchor == *parse_date("2020-01-06"));
    CHECK(s.block_of(*parse_date("2020-01-05")) == -1);
    CHECK(s.block_of(*parse_date("2020-01-06")) == 0);
    CHECK(s.block_of(*parse_date("2020-01-12")) == 0);
    CHECK(s.block_of(*parse_date("2020-01-13")) == 1);
    std::map<int, std::set<Split>> per_block;
    for (const auto& d : days) per_block[s.block_of(d.date)].insert(s.label_for(d.date));
    for (const auto& [b, labels] : per_block) CHECK(labels.size() == 1);
    CHECK(s.test_block_count() == 2);  // round(11 / 5)
    const auto again = week_block_split(days, 7);
    CHECK(again.blocks == s.blocks);
    CHECK_THROWS_AS(week_block_split(std::vector<DayProfile>{}, 1), DataError);
}

TEST_CASE("week_block_split: test fraction for 50 blocks") {
    std::vector<DayProfile> days;
    const auto start = *parse_date("2024-01-01");
    for (int k = 0; k < 50 * 7; ++k) days.push_back(day_with("A", plus_days(start, k), 1.0));
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto s = week_block_split(days, seed);
        const double frac = static_cast<double>(s.test_block_count()) / static_cast<double>(s.blocks.size());
        CHECK(std::abs(frac - 0.2) <= 0.1);
    }
}

TEST_CASE("simulator: determinism, integer energies, PV export in July") {
    SimulatorConfig cfg;
    cfg.n_users = 12;
    cfg.weeks = 0;
    cfg.year = 2020;
    cfg.seed = 5;
    std::ostringstream a, b;
    const auto summary = simulate_dataset(cfg, a);
    simulate_dataset(cfg, b);
    CHECK(a.str() == b.str());

    std::istringstream in(a.str());
    const auto meter = parse_meter_csv(in);
    CHECK(meter.malformed.empty());
    CHECK(meter.records.size() == summary.rows);
    std::size_t fractional = 0, off_grid = 0;
    for (const auto& r : meter.records) {
        fractional += r.energy_kwh != std::round(r.energy_kwh);
        off_grid += std::fmod(energy_to_power(r.energy_kwh), 4.0) != 0.0;
    }
    CHECK(fractional == 0);
    CHECK(off_grid == 0);
    bool pv_seen = false;
    for (std::size_t u = 0; u < summary.population.size(); ++u) {
        if (summary.population[u].archetype != Archetype::SolarExporter) continue;
        pv_seen = true;
        double midday_min = 0;
        for (const auto& r : meter.records) {
            if (meter.users[r.user] != summary.population[u].id) continue;
            const auto local = utc_to_local(r.timestamp);
            const auto date = local_date(local);
            const int slot = slot_of_day(local);
            if (date.month() == July && slot >= 48 && slot < 56) midday_min = std::min(midday_min, r.energy_kwh);
        }
        CHECK(midday_min < 0);
    }
    CHECK(pv_seen);
}

TEST_CASE("simulator: two users for one week") {
    SimulatorConfig cfg;
    cfg.n_users = 2;
    cfg.weeks = 1;
    cfg.year = 2021;
    std::ostringstream out;
    const auto s = simulate_dataset(cfg, out);
    CHECK(s.rows == 2 * 7 * 96);
    cfg.n_users = 0;
    CHECK_THROWS_AS(cfg.validate(), DataError);
}

TEST_CASE("dataset file round-trip") {
    Dataset ds;
    ds.metadata = {{"kind", "prepared"}, {"users", {"A", "B"}}, {"scale_kw", 100.0}};
    ds.user_index = {0, 1, 1};
    ds.date = {18262, 18263, 18270};
    ds.split = {Split::Train, Split::Test, Split::Train};
    ds.conditions = nn::Matrix{{0.5, 0.8660254037844386, 0.0}, {0.5, 0.8660254037844386, 1.0}, {1.0, 0.0, 1.0}};
    ds.values = nn::Matrix(3, 96, 0.125);
    ds.values(2, 95) = -0.04;
    const auto dir = testutil::scratch_dir("dataset");
    write_dataset(ds, dir / "d.lgd");
    const auto back = read_dataset(dir / "d.lgd");
    CHECK(back == ds);
    CHECK(back.users() == std::vector<std::string>{"A", "B"});
    CHECK(back.subset(Split::Train).size() == 2);
    CHECK(back.condition(2).rank == 1.0);

    auto bytes = testutil::slurp(dir / "d.lgd");
    std::ofstream(dir / "trunc.lgd", std::ios::binary) << bytes.substr(0, bytes.size() - 9);
    CHECK_THROWS_AS(read_dataset(dir / "trunc.lgd"), FormatError);
    std::ofstream(dir / "bad.lgd", std::ios::binary) << "NOTMAGIC" << bytes.substr(8);
    CHECK_THROWS_AS(read_dataset(dir / "bad.lgd"), FormatError);
}
