#include "loadgen/pipeline/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>

#include "loadgen/cvae/checkpoint.hpp"
#include "loadgen/cvae/generator.hpp"
#include "loadgen/data/dataset_file.hpp"
#include "loadgen/data/ingest.hpp"
#include "loadgen/data/intensity.hpp"
#include "loadgen/data/profiles.hpp"
#include "loadgen/data/split.hpp"
#include "loadgen/errors.hpp"
#include "loadgen/eval/autoencoder.hpp"
#include "loadgen/eval/cdf.hpp"
#include "loadgen/eval/energy.hpp"
#include "loadgen/eval/kmeans.hpp"
#include "loadgen/eval/ks.hpp"
#include "loadgen/eval/mean_profiles.hpp"
#include "loadgen/eval/svg.hpp"
#include "loadgen/random.hpp"

namespace loadgen::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;
using nn::Matrix;

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    return out;
}

void require_file(const fs::path& path, const std::string& what) {
    if (!fs::exists(path)) throw DataError("missing " + what + ": " + path.string());
}

data::Dataset read_input(const fs::path& path, const std::string& what) {
    require_file(path, what);
    return data::read_dataset(path);
}

eval::SampleSet to_sample_set(const data::Dataset& ds, std::string label) {
    eval::SampleSet s{std::move(label), ds.values, {}};
    s.conditions.reserve(ds.size());
    for (std::size_t r = 0; r < ds.size(); ++r) s.conditions.push_back(ds.condition(r));
    return s;
}

json json_number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

SimulateResult cmd_simulate(const RunConfig& config, std::ostream& log) {
    config.simulator.validate();
    auto sim = config.simulator;
    sim.seed = config.sub_seed("simulate");
    const auto path = config.resolve(config.paths.raw_csv);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const auto summary = data::simulate_dataset(sim, path);
    log << "simulate rows=" << summary.rows << " users=" << summary.users << " first_day="
        << data::format_date(summary.first_day) << " last_day=" << data::format_date(summary.last_day)
        << " file=" << path.string() << '\n';
    return {path, summary.rows, summary.users};
}

PrepResult cmd_prep(const RunConfig& config, std::ostream& log) {
    config.validate();
    const auto raw = config.resolve(config.paths.raw_csv);
    require_file(raw, "raw meter CSV");
    const auto meter = data::ingest_csv(raw, config.prep.max_malformed_fraction);
    const auto assembled = data::assemble_days(meter);
    if (assembled.days.empty()) throw DataError("prep: no complete local day in " + raw.string());

    auto intensities = data::compute_intensities(assembled.days);
    data::rank_intensity(intensities.table);
    auto filtered = data::filter_and_scale(assembled.days, intensities.table, config.prep.max_intensity_kw,
                                           config.prep.scale_kw);
    const auto split = data::week_block_split(assembled.days, config.sub_seed("split"));

    PrepResult r;
    r.file = config.resolve(config.paths.prepared);
    r.users_in = meter.users.size();
    r.users_retained = filtered.survivors.users.size();
    r.users_removed = filtered.removed.size();
    r.users_excluded = intensities.excluded.size();
    r.dropped_incomplete = assembled.dropped_incomplete;
    r.dropped_duplicate = assembled.dropped_duplicate;
    r.malformed_rows = meter.malformed.size();

    std::map<std::string, std::uint32_t> user_index;
    json users = json::array();
    json intensity = json::array();
    for (const auto& u : filtered.survivors.users) {
        user_index.emplace(u.user_id, static_cast<std::uint32_t>(users.size()));
        users.push_back(u.user_id);
        intensity.push_back({{"user", u.user_id}, {"intensity_kw", u.intensity_kw}, {"rank", u.rank}});
    }

    const auto n = filtered.profiles.size();
    data::Dataset ds;
    ds.user_index.reserve(n);
    ds.date.reserve(n);
    ds.split.reserve(n);
    ds.conditions = Matrix(n, data::ConditionVector::kDim);
    ds.values = Matrix(n, data::kSlotsPerDay);
    for (std::size_t i = 0; i < n; ++i) {
        auto& p = filtered.profiles[i];
        p.split = split.label_for(p.day.date);
        ds.user_index.push_back(user_index.at(p.day.user_id));
        ds.date.push_back(static_cast<std::int32_t>(data::days_since_epoch(p.day.date)));
        ds.split.push_back(p.split);
        const auto c = p.condition.as_array();
        std::copy(c.begin(), c.end(), ds.conditions.row(i).begin());
        std::copy(p.day.values.begin(), p.day.values.end(), ds.values.row(i).begin());
        (p.split == data::Split::Test ? r.test_profiles : r.train_profiles) += 1;
    }
    if (r.train_profiles == 0) throw DataError("prep: the split left no training profiles");

    ds.metadata = {{"kind", "prepared"},
                   {"users", std::move(users)},
                   {"scale_kw", filtered.scale_kw},
                   {"seed", config.seed},
                   {"source_hash", meter.source_hash},
                   {"intensity", std::move(intensity)},
                   {"split_anchor", data::format_date(split.anchor)},
                   {"test_blocks", split.test_block_count()},
                   {"counts",
                    {{"users_in", r.users_in},
                     {"users_retained", r.users_retained},
                     {"users_removed", r.users_removed},
                     {"users_excluded", r.users_excluded},
                     {"train_profiles", r.train_profiles},
                     {"test_profiles", r.test_profiles},
                     {"dropped_incomplete_days", r.dropped_incomplete},
                     {"dropped_duplicate_days", r.dropped_duplicate},
                     {"malformed_rows", r.malformed_rows}}}};
    if (r.file.has_parent_path()) fs::create_directories(r.file.parent_path());
    data::write_dataset(ds, r.file);

    log << "prep users_in=" << r.users_in << " users_retained=" << r.users_retained
        << " users_removed=" << r.users_removed << " users_excluded=" << r.users_excluded
        << " train_profiles=" << r.train_profiles << " test_profiles=" << r.test_profiles
        << " dropped_days=" << r.dropped_incomplete + r.dropped_duplicate << " malformed_rows=" << r.malformed_rows
        << " file=" << r.file.string() << '\n';
    return r;
}

TrainOutcome cmd_train(const RunConfig& config, std::ostream& log) {
    config.validate();
    const auto prepared = read_input(config.resolve(config.paths.prepared), "prepared data");
    const auto train_ds = prepared.subset(data::Split::Train);
    const auto test_ds = prepared.subset(data::Split::Test);
    if (train_ds.size() == 0) throw DataError("train: prepared data has no training profiles");

    auto model_cfg = config.model;
    model_cfg.seed = config.sub_seed("train");
    log << "train profiles=" << train_ds.size() << " test_profiles=" << test_ds.size()
        << " epochs=" << model_cfg.epochs << '\n';
    auto result = cvae::train({train_ds.values, train_ds.conditions}, {test_ds.values, test_ds.conditions}, model_cfg,
                              [&](const cvae::EpochLosses& e) {
                                  log << "epoch " << e.epoch << " train_beta_kl=" << fmt(e.train_beta_kl)
                                      << " train_recon=" << fmt(e.train_recon) << " test_beta_kl="
                                      << fmt(e.test_beta_kl) << " test_recon=" << fmt(e.test_recon) << '\n';
                              });

    TrainOutcome out;
    out.checkpoint = config.resolve(config.paths.checkpoint);
    out.history_csv = config.resolve(config.paths.loss_history);
    out.history = result.history;
    if (out.checkpoint.has_parent_path()) fs::create_directories(out.checkpoint.parent_path());
    cvae::save_checkpoint({std::move(result.model), prepared.scale_kw(), result.history}, out.checkpoint);

    auto csv = open_out(out.history_csv);
    csv << "epoch,train_beta_kl,train_recon,test_beta_kl,test_recon\n";
    for (const auto& e : out.history)
        csv << e.epoch << ',' << fmt(e.train_beta_kl) << ',' << fmt(e.train_recon) << ',' << fmt(e.test_beta_kl)
            << ',' << fmt(e.test_recon) << '\n';
    log << "train checkpoint=" << out.checkpoint.string() << " history=" << out.history_csv.string() << '\n';
    return out;
}

GenerateRequest parse_generate_mode(std::string_view mode, bool noise) {
    GenerateRequest r;
    r.noise = noise;
    if (mode == "match-training") return r;
    constexpr std::string_view prefix = "class-sample:";
    if (mode.substr(0, prefix.size()) == prefix) {
        if (auto cls = data::size_class_from_string(mode.substr(prefix.size()))) {
            r.mode = GenerateMode::ClassSample;
            r.size_class = *cls;
            return r;
        }
    }
    throw DataError("unknown generation mode '" + std::string(mode) +
                    "' (expected match-training or class-sample:<small|medium|large>)");
}

std::string mode_name(const GenerateRequest& r) {
    if (r.mode == GenerateMode::MatchTraining) return "match-training";
    return "class-sample:" + std::string(data::to_string(r.size_class));
}

fs::path generated_path(const RunConfig& config, const GenerateRequest& r) {
    if (r.mode == GenerateMode::MatchTraining)
        return config.resolve(r.noise ? config.paths.generated_noisy : config.paths.generated_noisefree);
    return config.resolve("generated_" + std::string(data::to_string(r.size_class)) + "_" +
                          (r.noise ? "noisy" : "noisefree") + ".lgd");
}

GenerateResult cmd_generate(const RunConfig& config, const GenerateRequest& request, std::ostream& log) {
    const auto ckpt_path = config.resolve(config.paths.checkpoint);
    require_file(ckpt_path, "checkpoint");
    const auto ckpt = cvae::load_checkpoint(ckpt_path);
    const auto prepared = read_input(config.resolve(config.paths.prepared), "prepared data");
    const auto train_ds = prepared.subset(data::Split::Train);
    if (train_ds.size() == 0) throw DataError("generate: prepared data has no training profiles");

    data::Dataset out;
    std::uint64_t seed = 0;
    if (request.mode == GenerateMode::MatchTraining) {
        seed = config.sub_seed("generate/match-training");
        out = train_ds;
    } else {
        const auto cls_name = std::string(data::to_string(request.size_class));
        seed = config.sub_seed("generate/class-sample/" + cls_name);
        std::vector<cvae::ConditionCount> meta;
        std::vector<std::size_t> rows;
        for (std::size_t r = 0; r < train_ds.size(); ++r) {
            const auto c = train_ds.condition(r);
            meta.push_back({c.month(), c.rank, 1});
            if (data::size_class_of(c.rank) == request.size_class) rows.push_back(r);
        }
        const auto conds = cvae::sample_class_conditions(meta, request.size_class, derive_seed(seed, "ranks"));
        out = train_ds.rows(rows);
        out.conditions = cvae::to_matrix(conds);
    }
    out.values = cvae::generate(ckpt.model, out.conditions, request.noise, derive_seed(seed, "draws"));
    std::fill(out.split.begin(), out.split.end(), data::Split::Generated);
    out.metadata = {{"kind", "generated"},
                    {"users", prepared.metadata.at("users")},
                    {"scale_kw", ckpt.scale_kw},
                    {"noise", request.noise},
                    {"mode", mode_name(request)},
                    {"seed", config.seed}};

    GenerateResult r{generated_path(config, request), out.size()};
    if (r.file.has_parent_path()) fs::create_directories(r.file.parent_path());
    data::write_dataset(out, r.file);
    log << "generate mode=" << mode_name(request) << " noise=" << (request.noise ? "on" : "off")
        << " profiles=" << r.count << " file=" << r.file.string() << '\n';
    return r;
}

namespace {

void write_profile_chart(const fs::path& path, const std::string& title, const std::vector<eval::Series>& series) {
    eval::write_line_chart({title, "slot (15 min)", "scaled power"}, series, path);
}

std::vector<double> slot_axis(std::size_t d) {
    std::vector<double> x(d);
    for (std::size_t j = 0; j < d; ++j) x[j] = static_cast<double>(j);
    return x;
}

json mean_profiles_section(std::span<const eval::SampleSet> sets, const RunConfig& config, const fs::path& dir) {
    json section = json::object();
    const unsigned months[] = {4, 7};
    const data::SizeClass classes[] = {data::SizeClass::Small, data::SizeClass::Large};
    for (unsigned m : months) {
        for (auto cls : classes) {
            const eval::ProfileFilter filter{m, cls};
            const auto name = filter.name();
            std::vector<eval::MeanProfileEntry> entries;
            try {
                entries = eval::mean_profile_compare(sets, filter, config.sub_seed("evaluate/mean-profiles/" + name),
                                                     config.eval.mean_profile_samples);
            } catch (const DataError& e) {
                section[name] = {{"error", e.what()}};
                continue;
            }
            const auto d = entries.front().mean.size();
            auto csv = open_out(dir / ("mean_profile_" + name + ".csv"));
            csv << "slot";
            for (const auto& e : entries) csv << ',' << e.set;
            csv << '\n';
            for (std::size_t j = 0; j < d; ++j) {
                csv << j;
                for (const auto& e : entries) csv << ',' << fmt(e.mean[j]);
                csv << '\n';
            }
            auto samples = open_out(dir / ("mean_profile_" + name + "_samples.csv"));
            samples << "set,sample,row";
            for (std::size_t j = 0; j < d; ++j) samples << ",s" << j;
            samples << '\n';
            std::vector<eval::Series> series;
            json matched = json::object();
            for (const auto& e : entries) {
                for (std::size_t k = 0; k < e.sample_rows.size(); ++k) {
                    samples << e.set << ',' << k << ',' << e.sample_rows[k];
                    for (double v : e.samples.row(k)) samples << ',' << fmt(v);
                    samples << '\n';
                }
                series.push_back({e.set, slot_axis(d), e.mean});
                matched[e.set] = e.matched;
            }
            write_profile_chart(dir / ("mean_profile_" + name + ".svg"), "Mean profile " + name, series);
            section[name] = {{"matched", matched}};
        }
    }
    return section;
}

json cluster_section(std::span<const eval::SampleSet> sets, const RunConfig& config, const fs::path& dir) {
    const auto fit = eval::kmeans_fit(sets.front().profiles, config.eval.clusters, config.sub_seed("evaluate/kmeans"));
    const auto report = eval::cluster_compare(fit.centroids, sets);
    const auto k = report.centroids.rows();
    const auto d = report.centroids.cols();

    auto counts = open_out(dir / "clusters.csv");
    counts << "cluster";
    for (const auto& s : report.sets) counts << ',' << s.label;
    counts << '\n';
    for (std::size_t c = 0; c < k; ++c) {
        counts << c;
        for (const auto& s : report.sets) counts << ',' << s.counts[c];
        counts << '\n';
    }
    auto means = open_out(dir / "cluster_means.csv");
    means << "cluster,set";
    for (std::size_t j = 0; j < d; ++j) means << ",s" << j;
    means << '\n';
    for (std::size_t c = 0; c < k; ++c) {
        std::vector<eval::Series> series;
        for (const auto& s : report.sets) {
            means << c << ',' << s.label;
            for (double v : s.means.row(c)) means << ',' << fmt(v);
            means << '\n';
            if (s.counts[c] > 0) {
                auto row = s.means.row(c);
                series.push_back({s.label, slot_axis(d), {row.begin(), row.end()}});
            }
        }
        write_profile_chart(dir / ("cluster_" + std::to_string(c) + ".svg"), "Cluster " + std::to_string(c),
                            series);
    }

    json j = {{"k", k}, {"iterations", fit.iterations}, {"converged", fit.converged}};
    json per_set = json::object();
    for (const auto& s : report.sets) per_set[s.label] = s.counts;
    j["counts"] = per_set;
    // Largest deviation of each set's cluster mean from the training cluster mean.
    json deviation = json::object();
    const auto& lead = report.sets.front();
    for (std::size_t si = 1; si < report.sets.size(); ++si) {
        const auto& s = report.sets[si];
        json per_cluster = json::array();
        for (std::size_t c = 0; c < k; ++c) {
            if (s.counts[c] == 0 || lead.counts[c] == 0) {
                per_cluster.push_back(nullptr);
                continue;
            }
            double worst = 0.0;
            for (std::size_t t = 0; t < d; ++t)
                worst = std::max(worst, std::abs(s.means(c, t) - lead.means(c, t)));
            per_cluster.push_back(worst);
        }
        deviation[s.label] = per_cluster;
    }
    j["max_abs_mean_deviation"] = deviation;
    return j;
}

bool chart_column(eval::CdfGrouping g, const std::string& column) {
    const auto colon = column.find(':');
    const auto set = column.substr(0, colon);
    const auto group = column.substr(colon + 1);
    if (g == eval::CdfGrouping::Interpolation) return true;
    if (set != eval::kTrain && set != eval::kGenNoisy) return false;
    if (g == eval::CdfGrouping::Month) return group == "m01" || group == "m04" || group == "m07" || group == "m10";
    if (g == eval::CdfGrouping::Hour) return group == "h00" || group == "h06" || group == "h12" || group == "h18";
    return true;
}

void write_cdf_outputs(const eval::CdfTable& t, const fs::path& dir) {
    const auto name = std::string(eval::to_string(t.grouping));
    eval::write_cdf_csv(t, dir / ("cdf_" + name + ".csv"));
    std::vector<eval::Series> series;
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        if (chart_column(t.grouping, t.columns[i])) series.push_back({t.columns[i], t.grid, t.cdfs[i]});
    eval::write_line_chart({"CDF by " + name, "scaled power", "cumulative probability"}, series,
                           dir / ("cdf_" + name + ".svg"));
}

/// Common random numbers across the three months: same ranks, same latent and noise draws.
eval::SampleSet interpolation_set(const cvae::Cvae& model, const eval::SampleSet& train, std::uint64_t seed) {
    std::vector<double> ranks;
    for (const auto& c : train.conditions)
        if (eval::nearest_month(c) == 11) ranks.push_back(c.rank);
    if (ranks.empty())
        for (const auto& c : train.conditions) ranks.push_back(c.rank);

    eval::SampleSet out{"gen-interp", Matrix(3 * ranks.size(), model.config().data_dim), {}};
    std::size_t row = 0;
    for (double month : {kInterpLower, kInterpMid, kInterpUpper}) {
        std::vector<data::ConditionVector> conds;
        for (double r : ranks) conds.push_back(data::make_condition(month, r));
        const auto gen = cvae::generate(model, conds, true, seed);
        for (std::size_t i = 0; i < gen.rows(); ++i, ++row)
            std::copy(gen.row(i).begin(), gen.row(i).end(), out.profiles.row(row).begin());
        out.conditions.insert(out.conditions.end(), conds.begin(), conds.end());
    }
    return out;
}

json ae_summary_json(const eval::ErrorSummary& s) {
    return {{"mean", s.mean}, {"median", s.median}, {"deciles", s.deciles}};
}

}  // namespace

EvaluateResult cmd_evaluate(const RunConfig& config, std::ostream& log) {
    config.validate();
    const auto prepared = read_input(config.resolve(config.paths.prepared), "prepared data");
    const auto noisy = read_input(config.resolve(config.paths.generated_noisy), "noisy generated set");
    const auto noisefree = read_input(config.resolve(config.paths.generated_noisefree), "noise-free generated set");
    const auto ckpt_path = config.resolve(config.paths.checkpoint);
    require_file(ckpt_path, "checkpoint");
    const auto ckpt = cvae::load_checkpoint(ckpt_path);

    std::vector<eval::SampleSet> sets;
    sets.push_back(to_sample_set(prepared.subset(data::Split::Train), eval::kTrain));
    sets.push_back(to_sample_set(prepared.subset(data::Split::Test), eval::kTest));
    sets.push_back(to_sample_set(noisy, eval::kGenNoisy));
    sets.push_back(to_sample_set(noisefree, eval::kGenNoiseFree));
    for (const auto& s : sets)
        if (s.size() == 0) throw DataError("evaluate: sample set '" + s.label + "' is empty");

    EvaluateResult result;
    result.report_dir = config.resolve(config.paths.report_dir);
    const auto& dir = result.report_dir;
    fs::create_directories(dir);
    auto& summary = result.summary;
    summary["seed"] = config.seed;
    json sizes = json::object();
    for (const auto& s : sets) sizes[s.label] = s.size();
    summary["sizes"] = sizes;

    log << "evaluate mean-profiles\n";
    summary["mean_profiles"] = mean_profiles_section(sets, config, dir);

    log << "evaluate clusters k=" << config.eval.clusters << '\n';
    summary["clusters"] = cluster_section(sets, config, dir);

    log << "evaluate cdf\n";
    for (auto g : {eval::CdfGrouping::Month, eval::CdfGrouping::Hour, eval::CdfGrouping::SizeClass})
        write_cdf_outputs(eval::cdf_export(sets, g, config.eval.cdf_points), dir);
    {
        const auto interp = interpolation_set(ckpt.model, sets.front(), config.sub_seed("evaluate/interpolation"));
        const auto table = eval::cdf_export(std::span(&interp, 1), eval::CdfGrouping::Interpolation,
                                            config.eval.cdf_points);
        write_cdf_outputs(table, dir);
        const auto lo = table.column("gen-interp:m11.0");
        const auto mid = table.column("gen-interp:m11.5");
        const auto hi = table.column("gen-interp:m12.0");
        summary["interpolation"] = {{"months", {kInterpLower, kInterpMid, kInterpUpper}},
                                    {"profiles_per_month", interp.size() / 3},
                                    {"between_fraction", eval::fraction_between(lo, mid, hi)}};
    }

    log << "evaluate reference autoencoder epochs=" << config.eval.ae_epochs << '\n';
    auto ae_cfg = eval::AeConfig::mirroring(ckpt.model.config());
    ae_cfg.epochs = config.eval.ae_epochs;
    ae_cfg.batch_size = config.eval.ae_batch;
    ae_cfg.learning_rate = config.eval.ae_learning_rate;
    ae_cfg.seed = config.sub_seed("evaluate/ae");
    std::vector<double> ae_history;
    const auto ae = eval::train_reference_ae(sets.front().profiles, ae_cfg, &ae_history);
    std::map<std::string, eval::ErrorSummary> ae_by_set;
    {
        auto csv = open_out(dir / "ae_errors.csv");
        csv << "set,mean,median";
        for (int k = 0; k <= 10; ++k) csv << ",q" << k * 10;
        csv << '\n';
        json ae_json = json::object();
        for (const auto& s : sets) {
            const auto errors = eval::ae_recon_errors(ae, s.profiles);
            const auto es = eval::summarize_errors(errors);
            ae_by_set[s.label] = es;
            csv << s.label << ',' << fmt(es.mean) << ',' << fmt(es.median);
            for (double q : es.deciles) csv << ',' << fmt(q);
            csv << '\n';
            ae_json[s.label] = ae_summary_json(es);
        }
        json hist = json::array();
        for (double v : ae_history) hist.push_back(json_number(v));
        summary["ae"] = {{"epochs", ae_cfg.epochs}, {"train_mse_history", hist}, {"errors", ae_json}};
    }

    const std::pair<std::size_t, std::size_t> pairs[] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}};
    json pair_json = json::object();
    auto ks_csv = open_out(dir / "ks_per_dimension.csv");
    std::vector<eval::KsReport> ks_reports;
    std::vector<std::string> pair_names;
    std::vector<eval::Series> ks_series;
    const auto energy_seed = config.sub_seed("evaluate/energy");
    for (std::size_t p = 0; p < std::size(pairs); ++p) {
        const auto& a = sets[pairs[p].first];
        const auto& b = sets[pairs[p].second];
        const auto name = a.label + "|" + b.label;
        log << "evaluate tests " << name << '\n';
        auto ks = eval::ks_per_dimension(a.profiles, b.profiles);
        const auto ns = std::min({config.eval.energy_subsample, a.size(), b.size()});
        const auto energy = eval::energy_distance(a.profiles, b.profiles, ns, config.eval.energy_repeats,
                                                  stream_seed(energy_seed, p));
        const auto& ea = ae_by_set.at(a.label);
        const auto& eb = ae_by_set.at(b.label);
        pair_json[name] = {
            {"ks", {{"mean", ks.mean}, {"max", ks.max}, {"per_dimension", ks.statistic}}},
            {"energy",
             {{"estimate", energy.estimate},
              {"standard_error", energy.standard_error},
              {"subsample", energy.subsample},
              {"repeats", energy.repeats}}},
            {"ae",
             {{"median_a", ea.median},
              {"median_b", eb.median},
              {"mean_a", ea.mean},
              {"mean_b", eb.mean},
              {"median_ratio_b_over_a", ea.median > 0.0 ? json_number(eb.median / ea.median) : json(nullptr)}}}};
        ks_series.push_back({name, slot_axis(ks.statistic.size()), ks.statistic});
        pair_names.push_back(name);
        ks_reports.push_back(std::move(ks));
    }
    ks_csv << "dimension";
    for (const auto& n : pair_names) ks_csv << ',' << n;
    ks_csv << '\n';
    for (std::size_t j = 0; j < ks_reports.front().statistic.size(); ++j) {
        ks_csv << j;
        for (const auto& r : ks_reports) ks_csv << ',' << fmt(r.statistic[j]);
        ks_csv << '\n';
    }
    eval::write_line_chart({"Per-dimension KS statistic", "slot (15 min)", "D"}, ks_series, dir / "ks.svg");
    summary["pairs"] = pair_json;

    {
        std::vector<eval::Series> loss;
        std::vector<double> x, tr_kl, tr_re, te_kl, te_re;
        for (const auto& e : ckpt.history) {
            x.push_back(static_cast<double>(e.epoch));
            tr_kl.push_back(e.train_beta_kl);
            tr_re.push_back(e.train_recon);
            te_kl.push_back(e.test_beta_kl);
            te_re.push_back(e.test_recon);
        }
        loss.push_back({"train beta*KL", x, tr_kl});
        loss.push_back({"train recon", x, tr_re});
        loss.push_back({"test beta*KL", x, te_kl});
        loss.push_back({"test recon", x, te_re});
        eval::write_line_chart({"Training losses", "epoch", "loss"}, loss, dir / "losses.svg");
    }

    auto out = open_out(dir / "summary.json");
    out << summary.dump(2) << '\n';
    log << "evaluate report=" << dir.string() << '\n';
    return result;
}

}  // namespace loadgen::pipeline
