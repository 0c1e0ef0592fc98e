#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "loadgen/errors.hpp"
#include "loadgen/eval/autoencoder.hpp"
#include "loadgen/eval/cdf.hpp"
#include "loadgen/eval/energy.hpp"
#include "loadgen/eval/kmeans.hpp"
#include "loadgen/eval/ks.hpp"
#include "loadgen/eval/mean_profiles.hpp"
#include "loadgen/eval/svg.hpp"
#include "test_util.hpp"

using namespace loadgen;
using namespace loadgen::eval;
using nn::Matrix;

namespace {

Matrix gaussian(std::size_t rows, std::size_t cols, double shift, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix m(rows, cols);
    for (auto& v : m.values()) v = n(rng) + shift;
    return m;
}

// Brute force: evaluate both CDFs at every pooled point.
double naive_ks(const std::vector<double>& a, const std::vector<double>& b) {
    auto cdf = [](const std::vector<double>& s, double t) {
        return static_cast<double>(std::count_if(s.begin(), s.end(), [&](double v) { return v <= t; })) /
               static_cast<double>(s.size());
    };
    double best = 0;
    for (const auto* s : {&a, &b})
        for (double t : *s) best = std::max(best, std::abs(cdf(a, t) - cdf(b, t)));
    return best;
}

double row_dist(const Matrix& a, std::size_t i, const Matrix& b, std::size_t j) {
    double s = 0;
    for (std::size_t k = 0; k < a.cols(); ++k) s += (a(i, k) - b(j, k)) * (a(i, k) - b(j, k));
    return std::sqrt(s);
}

double naive_energy(const Matrix& a, const Matrix& b) {
    double ab = 0, aa = 0, bb = 0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.rows(); ++j) ab += row_dist(a, i, b, j);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.rows(); ++j) aa += i == j ? 0 : row_dist(a, i, a, j);
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.rows(); ++j) bb += i == j ? 0 : row_dist(b, i, b, j);
    const double na = static_cast<double>(a.rows()), nb = static_cast<double>(b.rows());
    return 2 * ab / (na * nb) - aa / (na * (na - 1)) - bb / (nb * (nb - 1));
}

SampleSet with_conditions(std::string label, Matrix profiles, double month, double rank) {
    SampleSet s{std::move(label), std::move(profiles), {}};
    s.conditions.assign(s.size(), data::make_condition(month, rank));
    return s;
}

}  // namespace

TEST_CASE("ks_statistic examples") {
    const std::vector<double> a{0.1, 0.5, 0.9, 0.3};
    CHECK(ks_statistic(a, a) == 0.0);
    const std::vector<double> lo{0, 1, 2}, hi{5, 6};
    CHECK(ks_statistic(lo, hi) == 1.0);
    const std::vector<double> p{0, 1}, q{0.5, 1};
    CHECK(ks_statistic(p, q) == doctest::Approx(0.5));
    CHECK_THROWS_AS(ks_statistic(std::vector<double>{}, p), DataError);
}

TEST_CASE("ks_statistic matches brute force, is symmetric and bounded") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> level(0, 6);  // ties on purpose
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> a(5 + trial), b(3 + 2 * trial);
        for (auto& v : a) v = level(rng) * 0.25;
        for (auto& v : b) v = level(rng) * 0.25 + (trial % 3) * 0.1;
        const double d = ks_statistic(a, b);
        CHECK(d == doctest::Approx(naive_ks(a, b)).epsilon(1e-12));
        CHECK(d == ks_statistic(b, a));
        CHECK(d >= 0.0);
        CHECK(d <= 1.0);
    }
}

TEST_CASE("ks_per_dimension") {
    const auto a = gaussian(50, 4, 0, 1);
    auto b = gaussian(40, 4, 0, 2);
    for (std::size_t i = 0; i < b.rows(); ++i) b(i, 2) += 100;
    const auto r = ks_per_dimension(a, b);
    REQUIRE(r.statistic.size() == 4);
    CHECK(r.statistic[2] == 1.0);
    CHECK(r.max == 1.0);
    CHECK(r.mean == doctest::Approx(std::accumulate(r.statistic.begin(), r.statistic.end(), 0.0) / 4));
    CHECK_THROWS_AS(ks_per_dimension(a, gaussian(5, 3, 0, 1)), ShapeError);
}

TEST_CASE("energy distance examples and oracle") {
    const Matrix zeros(6, 3, 0.0);
    Matrix ones(5, 3, 0.0);
    for (std::size_t i = 0; i < ones.rows(); ++i) ones(i, 1) = 1.0;
    CHECK(energy_distance_full(zeros, ones) == 2.0);
    CHECK(energy_distance_full(zeros, zeros) == 0.0);

    const auto a = gaussian(30, 5, 0.0, 4), b = gaussian(25, 5, 0.3, 5);
    CHECK(energy_distance_full(a, b) == doctest::Approx(naive_energy(a, b)).epsilon(1e-12));
    CHECK(energy_distance_full(a, b) == doctest::Approx(energy_distance_full(b, a)).epsilon(1e-12));
    CHECK_THROWS_AS(energy_distance_full(a, Matrix(1, 5)), DataError);
}

TEST_CASE("energy distance: same distribution is near zero, shifts increase it") {
    const auto pool = gaussian(4000, 8, 0.0, 11);
    std::vector<std::size_t> first(2000), second(2000);
    std::iota(first.begin(), first.end(), 0);
    std::iota(second.begin(), second.end(), 2000);
    const auto a = nn::gather_rows(pool, first), b = nn::gather_rows(pool, second);
    const auto same = energy_distance(a, b, 256, 20, 1);
    CHECK(same.repeats == 20);
    CHECK(same.per_repeat.size() == 20);
    CHECK(std::abs(same.estimate) <= 3 * same.standard_error + 1e-12);

    double prev = -1;
    for (double delta : {0.0, 0.1, 0.2}) {
        auto shifted = b;
        for (auto& v : shifted.values()) v += delta;
        const double e = energy_distance_full(a, shifted);
        CHECK(e > prev);
        prev = e;
    }
    const auto r1 = energy_distance(a, b, 64, 3, 9), r2 = energy_distance(a, b, 64, 3, 9);
    CHECK(r1.per_repeat == r2.per_repeat);
    CHECK_THROWS_AS(energy_distance(a, b, 1, 3, 0), DataError);
    CHECK_THROWS_AS(energy_distance(a, b, 2001, 3, 0), DataError);
}

TEST_CASE("kmeans: k = 1 gives the global mean") {
    const auto x = gaussian(100, 3, 0.5, 21);
    const auto r = kmeans_fit(x, 1, 0);
    const auto mu = nn::column_means(x);
    for (std::size_t j = 0; j < 3; ++j) CHECK(r.centroids(0, j) == doctest::Approx(mu[j]).epsilon(1e-12));
    CHECK(r.converged);
}

TEST_CASE("kmeans: two well separated blobs") {
    auto x = gaussian(200, 2, 0.0, 8);
    for (std::size_t i = 0; i < 200; ++i) {
        for (std::size_t j = 0; j < 2; ++j) x(i, j) *= 0.05;
        if (i >= 100) x(i, 0) += 10.0;
    }
    const auto r = kmeans_fit(x, 2, 4);
    std::vector<double> cx{r.centroids(0, 0), r.centroids(1, 0)};
    std::sort(cx.begin(), cx.end());
    CHECK(std::abs(cx[0] - 0.0) < 0.05);
    CHECK(std::abs(cx[1] - 10.0) < 0.05);
    CHECK(r.assignment == assign_nearest(x, r.centroids));
    for (std::size_t i = 1; i < 100; ++i) CHECK(r.assignment[i] == r.assignment[0]);
    CHECK(r.assignment[150] != r.assignment[0]);

    const auto again = kmeans_fit(x, 2, 4);
    CHECK(again.centroids == r.centroids);
    CHECK(again.assignment == r.assignment);
    CHECK_THROWS_AS(kmeans_fit(Matrix(2, 2), 3, 0), DataError);
}

TEST_CASE("cluster_compare consistency") {
    const auto train = gaussian(300, 4, 0.0, 31);
    const auto fit = kmeans_fit(train, 5, 2);
    const auto other = gaussian(120, 4, 0.2, 32);
    const std::vector<SampleSet> sets{{"train", train, {}}, {"other", other, {}}};
    const auto rep = cluster_compare(fit.centroids, sets);
    REQUIRE(rep.sets.size() == 2);
    CHECK(std::accumulate(rep.sets[0].counts.begin(), rep.sets[0].counts.end(), std::size_t{0}) == 300);
    CHECK(std::accumulate(rep.sets[1].counts.begin(), rep.sets[1].counts.end(), std::size_t{0}) == 120);
    for (std::size_t c = 1; c < 5; ++c) CHECK(rep.sets[0].counts[c - 1] >= rep.sets[0].counts[c]);

    // Counts agree with the fitted assignment after re-indexing.
    for (std::size_t c = 0; c < 5; ++c) {
        const auto orig = rep.original_index[c];
        CHECK(rep.sets[0].counts[c] ==
              static_cast<std::size_t>(std::count(fit.assignment.begin(), fit.assignment.end(), orig)));
        for (std::size_t j = 0; j < 4; ++j) CHECK(rep.centroids(c, j) == fit.centroids(orig, j));
    }
    // A centroid itself lands in its own cluster.
    const auto self = assign_nearest(rep.centroids, rep.centroids);
    for (std::size_t c = 0; c < 5; ++c) CHECK(self[c] == c);
}

TEST_CASE("reference autoencoder") {
    AeConfig cfg;
    cfg.encoder_hidden = {16};
    cfg.decoder_hidden = {16};
    cfg.latent_dim = 3;
    cfg.batch_size = 32;
    cfg.learning_rate = 3e-3;
    cfg.seed = 6;
    auto x = gaussian(256, 12, 0.0, 41);
    for (auto& v : x.values()) v *= 0.1;

    cfg.epochs = 0;
    const auto untrained = train_reference_ae(x, cfg);
    CHECK(untrained == init_reference_ae(12, cfg));
    CHECK(train_reference_ae(x, cfg) == untrained);

    // Zero network: error is |p|^2 / d.
    auto zero = untrained;
    for (auto& l : zero.layers) {
        for (auto& w : l.weights.values()) w = 0;
        for (auto& b : l.bias) b = 0;
    }
    const auto errs = ae_recon_errors(zero, x);
    for (std::size_t i = 0; i < 5; ++i) {
        double sq = 0;
        for (std::size_t j = 0; j < 12; ++j) sq += x(i, j) * x(i, j);
        CHECK(errs[i] == doctest::Approx(sq / 12.0).epsilon(1e-12));
    }

    cfg.epochs = 40;
    std::vector<double> mse;
    const auto trained = train_reference_ae(x, cfg, &mse);
    CHECK(mse.size() == 40);
    CHECK(mse.back() < mse.front());
    const auto before = summarize_errors(ae_recon_errors(untrained, x));
    const auto after = summarize_errors(ae_recon_errors(trained, x));
    CHECK(after.median < before.median);
    CHECK(train_reference_ae(x, cfg) == trained);

    const auto mirror = AeConfig::mirroring(cvae::CvaeConfig::desk());
    CHECK(mirror.encoder_hidden == std::vector<std::size_t>{128, 128});
    CHECK(mirror.latent_dim == 8);
}

TEST_CASE("summarize_errors and quantile") {
    const std::vector<double> v{4, 1, 3, 2, 5};
    const auto s = summarize_errors(v);
    CHECK(s.median == 3.0);
    CHECK(s.mean == 3.0);
    CHECK(s.deciles[0] == 1.0);
    CHECK(s.deciles[10] == 5.0);
    CHECK(quantile({0, 10}, 0.25) == doctest::Approx(2.5));
    CHECK_THROWS_AS(summarize_errors(std::vector<double>{}), DataError);
}

TEST_CASE("cdf export") {
    CHECK(cdf_grouping_from_string("hour") == CdfGrouping::Hour);
    CHECK_THROWS_AS(cdf_grouping_from_string("weekday"), DataError);

    const std::vector<double> grid{-1, 0, 0.5, 1, 2};
    CHECK(empirical_cdf({0, 1}, grid) == std::vector<double>{0, 0.5, 0.5, 1, 1});

    // Constant set: a single step at the constant.
    const std::vector<SampleSet> flat{with_conditions("c", Matrix(4, 96, 0.3), 6, 0.5)};
    const auto t = cdf_export(flat, CdfGrouping::Hour, 11);
    CHECK(t.grid.front() == doctest::Approx(-0.2));
    CHECK(t.grid.back() == doctest::Approx(0.8));
    CHECK(t.columns.size() == 24);
    const auto& h = t.column("c:h00");
    for (std::size_t i = 0; i < t.grid.size(); ++i) CHECK(h[i] == (t.grid[i] >= 0.3 ? 1.0 : 0.0));
    CHECK_THROWS_AS(t.column("c:h24"), DataError);

    std::vector<SampleSet> year;
    Matrix all(12, 96);
    SampleSet s{"train", Matrix(12, 96), {}};
    for (int m = 1; m <= 12; ++m) {
        for (std::size_t j = 0; j < 96; ++j) s.profiles(m - 1, j) = m * 0.01;
        s.conditions.push_back(data::make_condition(m, 0.1 * (m % 10)));
    }
    year.push_back(s);
    const auto months = cdf_export(year, CdfGrouping::Month, 64);
    CHECK(months.columns.size() == 12);
    CHECK(months.columns.front() == "train:m01");
    CHECK(months.column("train:m12").back() == 1.0);
    const auto sizes = cdf_export(year, CdfGrouping::SizeClass, 64);
    CHECK(sizes.columns == std::vector<std::string>{"train:small", "train:medium", "train:large"});

    const std::vector<SampleSet> interp{with_conditions("g", Matrix(2, 96, 0.1), 11.5, 0.2)};
    CHECK(cdf_export(interp, CdfGrouping::Interpolation, 8).columns == std::vector<std::string>{"g:m11.5"});
    CHECK_THROWS_AS(cdf_export(std::vector<SampleSet>{{"x", Matrix(2, 96), {}}}, CdfGrouping::Month, 8), DataError);

    const std::vector<double> lo{0, 0.2, 0.5}, mid{0, 0.3, 0.9}, hi{0, 0.4, 0.8};
    CHECK(fraction_between(lo, mid, hi) == doctest::Approx(2.0 / 3.0));
    CHECK(fraction_between(hi, mid, lo) == doctest::Approx(2.0 / 3.0));

    const auto dir = testutil::scratch_dir("cdf");
    write_cdf_csv(months, dir / "cdf.csv");
    const auto text = testutil::slurp(dir / "cdf.csv");
    CHECK(text.rfind("value,train:m01,", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 65);
}

TEST_CASE("mean profiles") {
    Matrix rows(6, 96);
    std::vector<data::ConditionVector> conds;
    for (std::size_t i = 0; i < 6; ++i) {
        for (std::size_t j = 0; j < 96; ++j) rows(i, j) = i < 3 ? 0.25 + 0.001 * j : 5.0;
        conds.push_back(data::make_condition(i < 3 ? 4 : 7, 0.9));
    }
    const std::vector<SampleSet> sets{{"train", rows, conds}};
    const ProfileFilter april{4, data::SizeClass::Large};
    CHECK(april.name() == "m04-large");
    const auto e = mean_profile_compare(sets, april, 3, 10);
    REQUIRE(e.size() == 1);
    CHECK(e[0].matched == 3);
    CHECK(e[0].samples.rows() == 3);
    for (std::size_t j = 0; j < 96; ++j) CHECK(e[0].mean[j] == doctest::Approx(0.25 + 0.001 * j));
    const auto july = mean_profile_compare(sets, {7, data::SizeClass::Large}, 3, 2);
    CHECK(july[0].mean[0] == 5.0);
    CHECK(july[0].samples.rows() == 2);
    CHECK(july[0].sample_rows[0] >= 3);
    CHECK_THROWS_AS(mean_profile_compare(sets, {4, data::SizeClass::Small}, 3), DataError);
}

TEST_CASE("svg chart is deterministic and well formed") {
    const std::vector<Series> s{{"a", {0, 1, 2}, {0, 1, 0.5}, 1.0, true}, {"b & c", {0, 2}, {1, 1}, 0.3, false}};
    const ChartSpec spec{"title <x>", "slot", "kW"};
    const auto svg = render_line_chart(spec, s);
    CHECK(svg == render_line_chart(spec, s));
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("title &lt;x&gt;") != std::string::npos);
    CHECK(svg.find("<x>") == std::string::npos);
}
