#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <type_traits>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "predtown/cube.hpp"
#include "predtown/errors.hpp"
#include "predtown/ingest.hpp"
#include "predtown/metrics.hpp"
#include "predtown/models.hpp"
#include "predtown/resample.hpp"
#include "predtown/rng.hpp"
#include "predtown/taxonomy.hpp"

namespace predtown {

struct BenchmarkConfig {
    std::uint64_t seed = 0;
    int k = 7;
    double train_fraction = 0.7;
    std::vector<std::string> families = {"knn", "dtree", "gnb", "logreg", "rforest"};
    NormalizeScope normalization = NormalizeScope::Full;
    double decision_threshold = 0.5;
    bool stratify_year = false;

    std::vector<std::string> incident_paths;
    std::map<std::string, std::string> grid_paths; // family -> grid file
    std::string out_dir;
    std::optional<std::string> centroids_path;

    CrimeTaxonomy taxonomy = default_taxonomy();
    std::optional<IngestConfig> ingest; // present: inputs are raw transactional CSVs
};

inline nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open JSON file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("cannot parse " + path + ": " + e.what());
    }
    return j;
}

// Loads the full benchmark config; relative paths resolve against the
// config file's directory.
inline BenchmarkConfig benchmark_config_from_json(const nlohmann::json& root,
                                                  const std::string& base_dir = ".") {
    BenchmarkConfig cfg;
    const auto resolve = [&](const std::string& p) {
        std::filesystem::path path(p);
        if (path.is_absolute()) return p;
        return (std::filesystem::path(base_dir) / path).string();
    };
    try {
        if (root.contains("taxonomy")) cfg.taxonomy = taxonomy_from_json(root.at("taxonomy"));
        if (root.contains("ingest")) cfg.ingest = ingest_config_from_json(root.at("ingest"));
        const auto& b = root.at("benchmark");
        cfg.seed = b.value("seed", 0ULL);
        cfg.k = b.value("k", 7);
        cfg.train_fraction = b.value("train_fraction", 0.7);
        if (b.contains("families")) {
            cfg.families.clear();
            for (const auto& f : b.at("families"))
                cfg.families.push_back(models::canonical_family(f.get<std::string>()));
        }
        cfg.normalization = normalize_scope_from_string(b.value("normalization", "full"));
        cfg.decision_threshold = b.value("decision_threshold", 0.5);
        cfg.stratify_year = b.value("stratify_year", false);
        for (const auto& p : b.at("incidents")) cfg.incident_paths.push_back(resolve(p));
        for (const auto& [family, path] : b.at("grids").items())
            cfg.grid_paths[models::canonical_family(family)] = resolve(path.get<std::string>());
        cfg.out_dir = resolve(b.at("out_dir").get<std::string>());
        if (b.contains("centroids") && !b.at("centroids").is_null())
            cfg.centroids_path = resolve(b.at("centroids").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad benchmark config: ") + e.what());
    }
    if (cfg.k < 2) throw ConfigError("benchmark: k must be >= 2");
    if (cfg.families.empty()) throw ConfigError("benchmark: no families selected");
    if (std::set<std::string>(cfg.families.begin(), cfg.families.end()).size() !=
        cfg.families.size())
        throw ConfigError("benchmark: duplicate family in families list");
    for (const auto& f : cfg.families) {
        if (!models::family_registry().count(f))
            throw ConfigError("benchmark: family not implemented or registered: " + f);
        if (!cfg.grid_paths.count(f))
            throw ConfigError("benchmark: no grid file for family: " + f);
    }
    return cfg;
}

struct NeighborhoodTally {
    std::string neighborhood;
    std::size_t hits = 0;
    std::size_t misses = 0;
};

inline std::vector<NeighborhoodTally>
neighborhood_tallies(const std::vector<FeatureRow>& test_rows,
                     const std::vector<models::Prediction>& predictions) {
    if (test_rows.size() != predictions.size())
        throw DataError("tallies: row/prediction length mismatch");
    std::map<std::string, NeighborhoodTally> acc;
    for (std::size_t i = 0; i < test_rows.size(); ++i) {
        auto& t = acc[test_rows[i].meta.neighborhood];
        t.neighborhood = test_rows[i].meta.neighborhood;
        (predictions[i].label == test_rows[i].label ? t.hits : t.misses) += 1;
    }
    std::vector<NeighborhoodTally> out;
    out.reserve(acc.size());
    for (const auto& [_, t] : acc) out.push_back(t);
    return out;
}

struct ModelReport {
    std::string family;
    nlohmann::json best_params;
    std::vector<double> cv_fold_aucs;
    double cv_mean_auc = 0.0;
    double cv_sd_auc = 0.0;
    double test_accuracy = 0.0;
    double test_auc = 0.0;
    ConfusionMatrix test_confusion;
};

struct EvalReport {
    std::uint64_t seed = 0;
    int k = 7;
    double train_fraction = 0.7;
    std::string normalization;
    double decision_threshold = 0.5;

    std::size_t dataset_rows = 0;
    std::pair<std::size_t, std::size_t> balance{0, 0};
    std::size_t neighborhood_count = 0;
    std::vector<std::string> removed_neighborhoods;
    MonthWindow window;

    std::size_t train_rows = 0, test_rows = 0;
    std::size_t test_class0 = 0, test_class1 = 0;
    std::vector<NeighborhoodCoverage> coverage;
    std::vector<std::string> uncovered;

    std::vector<ModelReport> models; // sorted by accuracy desc, ties by name
    PairwiseFriedman friedman;
    std::map<std::string, KdeCurve> kde_curves;

    std::string tally_model; // accuracy winner
    std::vector<NeighborhoodTally> tallies;
};

namespace detail {

inline nlohmann::json confusion_to_json(const ConfusionMatrix& m) {
    nlohmann::json j;
    j["tn"] = m.tn;
    j["fp"] = m.fp;
    j["fn"] = m.fn;
    j["tp"] = m.tp;
    nlohmann::json rows = nlohmann::json::array();
    for (int t = 0; t < 2; ++t) {
        if (m.row_valid[static_cast<std::size_t>(t)]) {
            rows.push_back({m.row_normalized[static_cast<std::size_t>(t)][0],
                            m.row_normalized[static_cast<std::size_t>(t)][1]});
        } else {
            rows.push_back(nullptr);
        }
    }
    j["row_normalized"] = rows;
    return j;
}

} // namespace detail

inline nlohmann::json report_to_json(const EvalReport& r) {
    nlohmann::json j;
    j["format_version"] = 1;
    j["seed"] = r.seed;
    j["k"] = r.k;
    j["train_fraction"] = r.train_fraction;
    j["normalization"] = r.normalization;
    j["decision_threshold"] = r.decision_threshold;

    j["dataset"] = {{"rows", r.dataset_rows},
                    {"class_balance", {r.balance.first, r.balance.second}},
                    {"neighborhoods", r.neighborhood_count},
                    {"removed_neighborhoods", r.removed_neighborhoods},
                    {"window", {{"start", to_string(r.window.start)}, {"end", to_string(r.window.end)}}}};

    nlohmann::json coverage = nlohmann::json::array();
    for (const auto& c : r.coverage) {
        coverage.push_back({{"neighborhood", c.neighborhood},
                            {"train", c.train_rows},
                            {"test", c.test_rows}});
    }
    j["split"] = {{"train", r.train_rows},
                  {"test", r.test_rows},
                  {"test_class0", r.test_class0},
                  {"test_class1", r.test_class1},
                  {"coverage", coverage},
                  {"uncovered", r.uncovered}};

    nlohmann::json models = nlohmann::json::array();
    for (const auto& m : r.models) {
        models.push_back({{"family", m.family},
                          {"best_params", m.best_params},
                          {"cv_fold_aucs", m.cv_fold_aucs},
                          {"cv_mean_auc", m.cv_mean_auc},
                          {"cv_sd_auc", m.cv_sd_auc},
                          {"test_accuracy", m.test_accuracy},
                          {"test_auc", m.test_auc},
                          {"confusion", detail::confusion_to_json(m.test_confusion)}});
    }
    j["models"] = models;

    j["friedman"] = {{"models", r.friedman.models},
                     {"p_values", r.friedman.p_values},
                     {"statistics", r.friedman.statistics}};

    nlohmann::json kdes = nlohmann::json::object();
    for (const auto& [family, curve] : r.kde_curves) {
        kdes[family] = {{"bandwidth", curve.bandwidth},
                        {"grid", curve.grid},
                        {"density", curve.density}};
    }
    j["kde"] = kdes;

    nlohmann::json tallies = nlohmann::json::array();
    for (const auto& t : r.tallies) {
        tallies.push_back({{"neighborhood", t.neighborhood}, {"hits", t.hits}, {"misses", t.misses}});
    }
    j["tallies"] = {{"model", r.tally_model}, {"rows", tallies}};
    return j;
}

// Markdown rendering of a report.json document, echoing the tabular layout
// of the benchmark: accuracy ranking, confusion matrices, Friedman matrix.
inline std::string render_markdown(const nlohmann::json& j) {
    std::ostringstream md;
    md << "# Benchmark report\n\n";
    md << "seed " << j.at("seed") << ", " << j.at("k") << "-fold CV, train fraction "
       << j.at("train_fraction").get<double>() << ", normalization "
       << j.at("normalization").get<std::string>() << "\n\n";

    const auto& ds = j.at("dataset");
    md << "Dataset: " << ds.at("rows") << " rows, class balance "
       << ds.at("class_balance")[0] << "/" << ds.at("class_balance")[1] << " (0/1), "
       << ds.at("neighborhoods") << " neighborhoods, window "
       << ds.at("window").at("start").get<std::string>() << ".."
       << ds.at("window").at("end").get<std::string>() << "\n\n";
    const auto& sp = j.at("split");
    md << "Split: " << sp.at("train") << " train / " << sp.at("test") << " test ("
       << sp.at("test_class1") << " of class 1, " << sp.at("test_class0") << " of class 0)\n\n";

    md << "## Accuracy by model\n\n| model | accuracy | test AUC | cv mean AUC | cv sd |\n"
       << "|---|---|---|---|---|\n";
    for (const auto& m : j.at("models")) {
        md << "| " << m.at("family").get<std::string>() << " | "
           << m.at("test_accuracy").get<double>() << " | " << m.at("test_auc").get<double>()
           << " | " << m.at("cv_mean_auc").get<double>() << " | "
           << m.at("cv_sd_auc").get<double>() << " |\n";
    }
    md << "\n## Confusion matrices (row-normalized, %)\n\n";
    for (const auto& m : j.at("models")) {
        md << "### " << m.at("family").get<std::string>() << "\n\n";
        md << "| true\\pred | 0 | 1 |\n|---|---|---|\n";
        const auto& rows = m.at("confusion").at("row_normalized");
        for (int t = 0; t < 2; ++t) {
            md << "| " << t << " |";
            if (rows[t].is_null()) {
                md << " n/a | n/a |\n";
            } else {
                for (int p = 0; p < 2; ++p) {
                    md << " " << static_cast<int>(std::lround(rows[t][p].get<double>() * 100.0))
                       << "% |";
                }
                md << "\n";
            }
        }
        md << "\n";
    }

    md << "## Pairwise Friedman p-values\n\n";
    const auto& fr = j.at("friedman");
    md << "| |";
    for (const auto& name : fr.at("models")) md << " " << name.get<std::string>() << " |";
    md << "\n|---|";
    for (std::size_t i = 0; i < fr.at("models").size(); ++i) md << "---|";
    md << "\n";
    for (std::size_t a = 0; a < fr.at("models").size(); ++a) {
        md << "| " << fr.at("models")[a].get<std::string>() << " |";
        for (std::size_t b = 0; b < fr.at("models").size(); ++b) {
            md << " " << fr.at("p_values")[a][b].get<double>() << " |";
        }
        md << "\n";
    }

    md << "\n## Per-neighborhood tallies (" << j.at("tallies").at("model").get<std::string>()
       << ")\n\n| neighborhood | hits | misses |\n|---|---|---|\n";
    for (const auto& t : j.at("tallies").at("rows")) {
        md << "| " << t.at("neighborhood").get<std::string>() << " | " << t.at("hits") << " | "
           << t.at("misses") << " |\n";
    }
    md << "\nKDE curves and raw artifacts live next to this file.\n";
    return md.str();
}

namespace detail {

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    out << content;
}

template <typename Fn>
auto run_stage(const std::string& name, std::map<std::string, double>& timings, Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
        if constexpr (std::is_void_v<decltype(fn())>) {
            fn();
            timings[name] =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        } else {
            auto result = fn();
            timings[name] =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            return result;
        }
    } catch (const ConfigError& e) {
        throw ConfigError("stage '" + name + "': " + e.what());
    } catch (const DataError& e) {
        throw DataError("stage '" + name + "': " + e.what());
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

inline std::map<std::string, std::pair<double, double>>
load_centroids(const std::string& path) {
    CsvTable t = read_csv_file(path);
    const int n = t.column("neighborhood"), la = t.column("lat"), lo = t.column("lon");
    if (n < 0 || la < 0 || lo < 0)
        throw ConfigError("centroid file needs neighborhood,lat,lon columns");
    std::map<std::string, std::pair<double, double>> out;
    for (const auto& row : t.rows) {
        out[normalize_text(row[n])] = {parse_double(row[la]), parse_double(row[lo])};
    }
    return out;
}

} // namespace detail

// Runs the full protocol: ingest (optional), dataset build, stratified
// split, per-family grid search, winner refit, test evaluation, fresh
// k-fold CV for the statistics, pairwise Friedman, KDE, per-neighborhood
// tallies. Persists every stage artifact under cfg.out_dir. Wall-clock goes
// to a separate timings.json so report.json stays byte-reproducible.
inline EvalReport run_benchmark(const BenchmarkConfig& cfg) {
    namespace fs = std::filesystem;
    std::map<std::string, double> timings;
    fs::create_directories(cfg.out_dir);
    const auto out_path = [&](const std::string& name) {
        return (fs::path(cfg.out_dir) / name).string();
    };

    EvalReport report;
    report.seed = cfg.seed;
    report.k = cfg.k;
    report.train_fraction = cfg.train_fraction;
    report.decision_threshold = cfg.decision_threshold;
    report.normalization = cfg.normalization == NormalizeScope::Full      ? "full"
                           : cfg.normalization == NormalizeScope::TrainFit ? "train-fit"
                                                                           : "none";

    // ingest
    auto incidents = detail::run_stage("ingest", timings, [&] {
        std::vector<CleanIncident> all;
        if (cfg.ingest) {
            std::vector<RawIncident> raw;
            std::vector<RejectEntry> rejects;
            for (const auto& path : cfg.incident_paths) {
                std::ifstream in(path, std::ios::binary);
                if (!in) throw DataError("cannot open incidents: " + path);
                ParsedIncidents parsed = parse_incidents(in, *cfg.ingest);
                raw.insert(raw.end(), parsed.incidents.begin(), parsed.incidents.end());
                rejects.insert(rejects.end(), parsed.rejects.begin(), parsed.rejects.end());
            }
            CleanResult cleaned = clean(raw, *cfg.ingest);
            all = std::move(cleaned.incidents);
            detail::write_text_file(out_path("cleaning_report.json"),
                                    cleaning_report_to_json(cleaned.report).dump(2) + "\n");
            std::ofstream rej(out_path("rejects.csv"), std::ios::binary);
            write_reject_log_csv(rej, rejects);
            std::ofstream inc(out_path("incidents_clean.csv"), std::ios::binary);
            write_clean_incidents_csv(inc, all);
        } else {
            for (const auto& path : cfg.incident_paths) {
                std::ifstream in(path, std::ios::binary);
                if (!in) throw DataError("cannot open incidents: " + path);
                auto part = read_clean_incidents_csv(in);
                all.insert(all.end(), part.begin(), part.end());
            }
        }
        return all;
    });

    // dataset
    std::optional<MonthWindow> window;
    if (cfg.ingest && cfg.ingest->window_start && cfg.ingest->window_end) {
        window = MonthWindow{year_month(*cfg.ingest->window_start),
                             year_month(*cfg.ingest->window_end)};
    }
    auto built = detail::run_stage("build-dataset", timings, [&] {
        auto out = build_dataset(incidents, cfg.taxonomy, window);
        if (cfg.normalization == NormalizeScope::Full) minmax_normalize(out.first);
        write_dataset(out_path("dataset.csv"), out.first,
                      cfg.normalization == NormalizeScope::Full ? "full" : "none");
        return out;
    });
    const Dataset& dataset = built.first;
    const BuildInfo& build_info = built.second;
    report.dataset_rows = dataset.rows.size();
    report.balance = class_balance(dataset);
    report.neighborhood_count = build_info.neighborhood_count;
    report.removed_neighborhoods = build_info.removed_neighborhoods;
    report.window = build_info.window;

    // split
    SplitResult split = detail::run_stage("split", timings, [&] {
        SplitResult s = stratified_split(
            dataset, SplitSpec{cfg.train_fraction, cfg.stratify_year, derive_seed(cfg.seed, 100)});
        if (cfg.normalization == NormalizeScope::TrainFit) {
            const Scaler scaler = fit_scaler(s.train);
            apply_scaler(s.train, scaler, false);
            apply_scaler(s.test, scaler, true); // clamp at inference
        }
        nlohmann::json idx;
        idx["train"] = s.train_indices;
        idx["test"] = s.test_indices;
        detail::write_text_file(out_path("split_indices.json"), idx.dump(2) + "\n");
        return s;
    });
    report.train_rows = split.train.rows.size();
    report.test_rows = split.test.rows.size();
    for (const auto& row : split.test.rows) {
        (row.label == 0 ? report.test_class0 : report.test_class1) += 1;
    }
    report.coverage = split.coverage;
    report.uncovered = split.uncovered;

    // tune + train + evaluate per family
    const FoldPlan tune_folds = detail::run_stage("make-folds", timings, [&] {
        return make_folds(split.train, cfg.k, derive_seed(cfg.seed, 101));
    });
    const FoldPlan cv_folds = make_folds(split.train, cfg.k, derive_seed(cfg.seed, 104));

    std::vector<int> test_truth;
    test_truth.reserve(split.test.rows.size());
    for (const auto& row : split.test.rows) test_truth.push_back(row.label);

    std::map<std::string, std::vector<double>> fold_scores;
    std::map<std::string, std::vector<models::Prediction>> test_predictions;
    for (std::size_t fi = 0; fi < cfg.families.size(); ++fi) {
        const std::string& family = cfg.families[fi];
        ModelReport mr;
        mr.family = family;

        const TuneResult tuned = detail::run_stage("tune:" + family, timings, [&] {
            const ParamGrid grid = param_grid_from_json(load_json_file(cfg.grid_paths.at(family)));
            TuneResult t = grid_search(family, grid, split.train, tune_folds,
                                       derive_seed(cfg.seed, 102, fi));
            detail::write_text_file(out_path("tune_" + family + ".json"),
                                    tune_result_to_json(t).dump(2) + "\n");
            return t;
        });
        mr.best_params = tuned.best_params;

        const auto model = detail::run_stage("train:" + family, timings, [&] {
            models::ModelSpec spec{family, tuned.best_params, derive_seed(cfg.seed, 103, fi)};
            auto m = models::make_classifier(spec);
            m->fit(split.train);
            detail::write_text_file(out_path("model_" + family + ".json"), m->save().dump() + "\n");
            return m;
        });

        detail::run_stage("evaluate:" + family, timings, [&] {
            const auto preds = model->predict(split.test.rows, cfg.decision_threshold);
            test_predictions[family] = preds;
            std::vector<int> labels;
            std::vector<double> scores;
            for (const auto& p : preds) {
                labels.push_back(p.label);
                scores.push_back(p.score);
            }
            mr.test_accuracy = accuracy(labels, test_truth);
            mr.test_auc = roc_auc(scores, test_truth);
            mr.test_confusion = confusion(labels, test_truth);

            std::ofstream out(out_path("predictions_" + family + ".csv"), std::ios::binary);
            write_csv_record(out, {"year", "month", "neighborhood", "truth", "label", "score"});
            for (std::size_t i = 0; i < preds.size(); ++i) {
                const auto& row = split.test.rows[i];
                write_csv_record(out, {std::to_string(row.meta.year),
                                       std::to_string(row.meta.month), row.meta.neighborhood,
                                       std::to_string(row.label),
                                       std::to_string(preds[i].label),
                                       detail::format_double(preds[i].score)});
            }
        });

        detail::run_stage("cross-validate:" + family, timings, [&] {
            std::vector<double>& aucs = fold_scores[family];
            for (int f = 0; f < cfg.k; ++f) {
                const Dataset fit_set = subset(split.train, cv_folds.complement_rows(f));
                const Dataset heldout = subset(split.train, cv_folds.fold_rows(f));
                models::ModelSpec spec{family, tuned.best_params,
                                       derive_seed(cfg.seed, 105, fi, static_cast<std::uint64_t>(f))};
                auto cv_model = models::make_classifier(spec);
                cv_model->fit(fit_set);
                std::vector<int> truths;
                for (const auto& row : heldout.rows) truths.push_back(row.label);
                aucs.push_back(roc_auc(cv_model->scores(heldout.rows), truths));
            }
            mr.cv_fold_aucs = aucs;
            double sum = 0.0;
            for (double a : aucs) sum += a;
            mr.cv_mean_auc = sum / static_cast<double>(aucs.size());
            double ss = 0.0;
            for (double a : aucs) ss += (a - mr.cv_mean_auc) * (a - mr.cv_mean_auc);
            mr.cv_sd_auc =
                aucs.size() > 1 ? std::sqrt(ss / static_cast<double>(aucs.size() - 1)) : 0.0;
        });

        report.models.push_back(std::move(mr));
    }

    // statistics
    detail::run_stage("statistics", timings, [&] {
        report.friedman = pairwise_friedman(fold_scores);
        for (const auto& [family, aucs] : fold_scores) {
            report.kde_curves[family] = kde(aucs, 0.6);
        }
    });

    // ranking: accuracy descending, ties by family name
    std::sort(report.models.begin(), report.models.end(),
              [](const ModelReport& a, const ModelReport& b) {
                  if (a.test_accuracy != b.test_accuracy) return a.test_accuracy > b.test_accuracy;
                  return a.family < b.family;
              });

    // tallies for the accuracy winner
    detail::run_stage("tallies", timings, [&] {
        report.tally_model = report.models.front().family;
        report.tallies =
            neighborhood_tallies(split.test.rows, test_predictions.at(report.tally_model));
        std::map<std::string, std::pair<double, double>> centroids;
        if (cfg.centroids_path) centroids = detail::load_centroids(*cfg.centroids_path);
        std::ofstream out(out_path("tallies.csv"), std::ios::binary);
        if (centroids.empty()) {
            write_csv_record(out, {"neighborhood", "hits", "misses"});
        } else {
            write_csv_record(out, {"neighborhood", "hits", "misses", "lat", "lon"});
        }
        for (const auto& t : report.tallies) {
            std::vector<std::string> rec = {t.neighborhood, std::to_string(t.hits),
                                            std::to_string(t.misses)};
            if (!centroids.empty()) {
                const auto it = centroids.find(t.neighborhood);
                rec.push_back(it != centroids.end() ? detail::format_double(it->second.first) : "");
                rec.push_back(it != centroids.end() ? detail::format_double(it->second.second) : "");
            }
            write_csv_record(out, rec);
        }
    });

    // emit
    detail::run_stage("emit", timings, [&] {
        const nlohmann::json j = report_to_json(report);
        detail::write_text_file(out_path("report.json"), j.dump(2) + "\n");
        detail::write_text_file(out_path("report.md"), render_markdown(j));

        std::ofstream acc(out_path("accuracy.csv"), std::ios::binary);
        write_csv_record(acc, {"model", "accuracy", "test_auc"});
        for (const auto& m : report.models) {
            write_csv_record(acc, {m.family, detail::format_double(m.test_accuracy),
                                   detail::format_double(m.test_auc)});
        }

        std::ofstream conf(out_path("confusion.csv"), std::ios::binary);
        write_csv_record(conf, {"model", "true_class", "pred_0_frac", "pred_1_frac", "count"});
        for (const auto& m : report.models) {
            const auto& cm = m.test_confusion;
            const std::uint64_t n0 = cm.tn + cm.fp, n1 = cm.fn + cm.tp;
            for (int t = 0; t < 2; ++t) {
                const std::uint64_t count = t == 0 ? n0 : n1;
                std::vector<std::string> rec = {m.family, std::to_string(t)};
                if (cm.row_valid[static_cast<std::size_t>(t)]) {
                    rec.push_back(detail::format_double(cm.row_normalized[static_cast<std::size_t>(t)][0]));
                    rec.push_back(detail::format_double(cm.row_normalized[static_cast<std::size_t>(t)][1]));
                } else {
                    rec.push_back("n/a");
                    rec.push_back("n/a");
                }
                rec.push_back(std::to_string(count));
                write_csv_record(conf, rec);
            }
        }

        std::ofstream fr(out_path("friedman.csv"), std::ios::binary);
        std::vector<std::string> header = {"model"};
        header.insert(header.end(), report.friedman.models.begin(), report.friedman.models.end());
        write_csv_record(fr, header);
        for (std::size_t a = 0; a < report.friedman.models.size(); ++a) {
            std::vector<std::string> rec = {report.friedman.models[a]};
            for (double p : report.friedman.p_values[a]) rec.push_back(detail::format_double(p));
            write_csv_record(fr, rec);
        }

        std::ofstream kd(out_path("kde.csv"), std::ios::binary);
        write_csv_record(kd, {"model", "x", "density"});
        for (const auto& [family, curve] : report.kde_curves) {
            for (std::size_t i = 0; i < curve.grid.size(); ++i) {
                write_csv_record(kd, {family, detail::format_double(curve.grid[i]),
                                      detail::format_double(curve.density[i])});
            }
        }
    });

    nlohmann::json tj;
    tj["seconds_by_stage"] = timings;
    detail::write_text_file(out_path("timings.json"), tj.dump(2) + "\n");
    return report;
}

} // namespace predtown
