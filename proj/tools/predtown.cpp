// predtown: end-to-end toolkit for next-month homicide prediction from
// police-report records. Subcommands cover the pipeline stage by stage
// (synthgen, ingest, build-dataset, tune, train, predict, friedman, kde)
// plus the full benchmark orchestrator and report rendering.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "predtown/cube.hpp"
#include "predtown/errors.hpp"
#include "predtown/ingest.hpp"
#include "predtown/metrics.hpp"
#include "predtown/models.hpp"
#include "predtown/report.hpp"
#include "predtown/resample.hpp"
#include "predtown/synthgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json load_config(const std::string& path) { return predtown::load_json_file(path); }

std::string config_dir(const std::string& path) {
    const auto parent = fs::path(path).parent_path();
    return parent.empty() ? std::string(".") : parent.string();
}

predtown::CrimeTaxonomy taxonomy_from_config(const json& cfg) {
    if (cfg.contains("taxonomy")) return predtown::taxonomy_from_json(cfg.at("taxonomy"));
    return predtown::default_taxonomy();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw predtown::DataError("cannot write file: " + path);
    out << content;
}

std::map<std::string, std::vector<double>> load_fold_scores(const std::string& path) {
    const json j = predtown::load_json_file(path);
    std::map<std::string, std::vector<double>> scores;
    try {
        for (const auto& [name, vals] : j.items()) {
            scores[name] = vals.get<std::vector<double>>();
        }
    } catch (const json::exception& e) {
        throw predtown::DataError("fold-score file must map model -> [auc...]: " +
                                  std::string(e.what()));
    }
    if (scores.empty()) throw predtown::DataError("fold-score file is empty");
    return scores;
}

int cmd_synthgen(const std::string& config_path, const std::string& out_path,
                 const std::string& truth_path, std::optional<std::uint64_t> seed) {
    json j = load_config(config_path);
    predtown::GenConfig cfg = predtown::gen_config_from_json(j);
    if (seed) cfg.seed = *seed;
    const predtown::SynthResult result = predtown::generate(cfg);

    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw predtown::DataError("cannot write: " + out_path);
    predtown::write_transactional_csv(out, result.incidents);
    if (!truth_path.empty()) {
        std::ofstream truth(truth_path, std::ios::binary);
        if (!truth) throw predtown::DataError("cannot write: " + truth_path);
        predtown::write_truth_csv(truth, result.truth);
    }
    std::cout << "wrote " << result.incidents.size() << " incidents to " << out_path;
    if (!result.holed.empty()) std::cout << " (" << result.holed.size() << " holed neighborhoods)";
    std::cout << "\n";
    return 0;
}

int cmd_ingest(const std::string& config_path, const std::vector<std::string>& inputs,
               const std::string& out_dir) {
    const json cfg_json = load_config(config_path);
    if (!cfg_json.contains("ingest"))
        throw predtown::ConfigError("config has no [ingest] section");
    const predtown::IngestConfig cfg = predtown::ingest_config_from_json(cfg_json.at("ingest"));

    std::vector<predtown::RawIncident> raw;
    std::vector<predtown::RejectEntry> rejects;
    for (const auto& path : inputs) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw predtown::DataError("cannot open input: " + path);
        predtown::ParsedIncidents parsed = predtown::parse_incidents(in, cfg);
        raw.insert(raw.end(), parsed.incidents.begin(), parsed.incidents.end());
        rejects.insert(rejects.end(), parsed.rejects.begin(), parsed.rejects.end());
    }
    const predtown::CleanResult cleaned = predtown::clean(raw, cfg);

    fs::create_directories(out_dir);
    {
        std::ofstream out(fs::path(out_dir) / "incidents.csv", std::ios::binary);
        predtown::write_clean_incidents_csv(out, cleaned.incidents);
    }
    {
        std::ofstream out(fs::path(out_dir) / "rejects.csv", std::ios::binary);
        predtown::write_reject_log_csv(out, rejects);
    }
    write_file((fs::path(out_dir) / "cleaning_report.json").string(),
               predtown::cleaning_report_to_json(cleaned.report).dump(2) + "\n");

    std::cout << cleaned.report.input_count << " -> " << cleaned.report.output_count
              << " incidents (" << cleaned.report.dedup_count << " duplicates, "
              << cleaned.report.total_dropped() << " dropped, " << rejects.size()
              << " rejected rows)\n";
    return 0;
}

int cmd_build_dataset(const std::string& config_path, const std::string& incidents_path,
                      const std::string& out_path, const std::string& normalize) {
    const json cfg_json = load_config(config_path);
    const predtown::CrimeTaxonomy taxonomy = taxonomy_from_config(cfg_json);
    const predtown::NormalizeScope scope = predtown::normalize_scope_from_string(normalize);

    std::optional<predtown::MonthWindow> window;
    if (cfg_json.contains("ingest")) {
        const auto icfg = predtown::ingest_config_from_json(cfg_json.at("ingest"));
        if (icfg.window_start && icfg.window_end) {
            window = predtown::MonthWindow{predtown::year_month(*icfg.window_start),
                                           predtown::year_month(*icfg.window_end)};
        }
    }

    std::ifstream in(incidents_path, std::ios::binary);
    if (!in) throw predtown::DataError("cannot open incidents: " + incidents_path);
    const auto incidents = predtown::read_clean_incidents_csv(in);

    auto [dataset, info] = predtown::build_dataset(incidents, taxonomy, window);
    if (scope == predtown::NormalizeScope::Full) predtown::minmax_normalize(dataset);
    predtown::write_dataset(out_path, dataset, normalize);

    const auto [c0, c1] = predtown::class_balance(dataset);
    std::cout << dataset.rows.size() << " rows (" << c0 << " class 0, " << c1 << " class 1), "
              << info.neighborhood_count << " neighborhoods";
    if (!info.removed_neighborhoods.empty())
        std::cout << ", " << info.removed_neighborhoods.size() << " removed as incomplete";
    std::cout << "\n";
    return 0;
}

int cmd_tune(const std::string& family_arg, const std::string& grid_path,
             const std::string& train_path, int k, std::uint64_t seed,
             const std::string& out_path) {
    const std::string family = predtown::models::canonical_family(family_arg);
    const predtown::Dataset train = predtown::read_dataset(train_path);
    const predtown::ParamGrid grid =
        predtown::param_grid_from_json(predtown::load_json_file(grid_path));
    const predtown::FoldPlan folds = predtown::make_folds(train, k, predtown::derive_seed(seed, 1));
    const predtown::TuneResult result =
        predtown::grid_search(family, grid, train, folds, predtown::derive_seed(seed, 2));
    write_file(out_path, predtown::tune_result_to_json(result).dump(2) + "\n");
    const auto& best = result.cv_table[result.best_index];
    std::cout << "best mean AUC " << best.mean_auc << " with " << result.best_params.dump()
              << "\n";
    return 0;
}

int cmd_train(const std::string& family_arg, const std::string& params_path,
              const std::string& train_path, std::uint64_t seed, const std::string& model_out) {
    const std::string family = predtown::models::canonical_family(family_arg);
    const predtown::Dataset train = predtown::read_dataset(train_path);
    json params = json::object();
    if (!params_path.empty()) {
        params = predtown::load_json_file(params_path);
        // accept either bare params or a tune-result file
        if (params.contains("best_params")) params = params.at("best_params");
    }
    predtown::models::ModelSpec spec{family, params, seed};
    auto model = predtown::models::make_classifier(spec);
    model->fit(train);
    write_file(model_out, model->save().dump() + "\n");
    std::cout << "trained " << family << " on " << train.rows.size() << " rows -> " << model_out
              << "\n";
    return 0;
}

int cmd_predict(const std::string& model_path, const std::string& data_path,
                const std::string& out_path, double threshold) {
    auto model = predtown::models::load_classifier(predtown::load_json_file(model_path));
    const predtown::Dataset data = predtown::read_dataset(data_path);
    const auto preds = model->predict(data.rows, threshold);

    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw predtown::DataError("cannot write: " + out_path);
    predtown::write_csv_record(out, {"year", "month", "neighborhood", "label", "score"});
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const auto& row = data.rows[i];
        predtown::write_csv_record(
            out, {std::to_string(row.meta.year), std::to_string(row.meta.month),
                  row.meta.neighborhood, std::to_string(preds[i].label),
                  predtown::detail::format_double(preds[i].score)});
    }
    std::cout << "wrote " << preds.size() << " predictions to " << out_path << "\n";
    return 0;
}

int cmd_friedman(const std::string& scores_path, const std::string& out_path) {
    const auto scores = load_fold_scores(scores_path);
    const predtown::PairwiseFriedman result = predtown::pairwise_friedman(scores);
    json j;
    j["models"] = result.models;
    j["p_values"] = result.p_values;
    j["statistics"] = result.statistics;
    json sig = json::array();
    for (std::size_t a = 0; a < result.models.size(); ++a) {
        json row = json::array();
        for (std::size_t b = 0; b < result.models.size(); ++b) {
            row.push_back(a != b && result.p_values[a][b] <= 0.05);
        }
        sig.push_back(row);
    }
    j["significant"] = sig;
    write_file(out_path, j.dump(2) + "\n");
    std::cout << result.models.size() << " models -> " << out_path << "\n";
    return 0;
}

int cmd_kde(const std::string& scores_path, double bandwidth, const std::string& out_path) {
    const auto scores = load_fold_scores(scores_path);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw predtown::DataError("cannot write: " + out_path);
    predtown::write_csv_record(out, {"model", "x", "density"});
    for (const auto& [name, vals] : scores) {
        const predtown::KdeCurve curve = predtown::kde(vals, bandwidth);
        for (std::size_t i = 0; i < curve.grid.size(); ++i) {
            predtown::write_csv_record(out, {name, predtown::detail::format_double(curve.grid[i]),
                                             predtown::detail::format_double(curve.density[i])});
        }
    }
    std::cout << "wrote KDE curves for " << scores.size() << " models to " << out_path << "\n";
    return 0;
}

int cmd_benchmark(const std::string& config_path) {
    const json cfg_json = load_config(config_path);
    const predtown::BenchmarkConfig cfg =
        predtown::benchmark_config_from_json(cfg_json, config_dir(config_path));
    const predtown::EvalReport report = predtown::run_benchmark(cfg);
    std::cout << "benchmark complete, artifacts in " << cfg.out_dir << "\n";
    for (const auto& m : report.models) {
        std::cout << "  " << m.family << ": accuracy " << m.test_accuracy << ", AUC " << m.test_auc
                  << "\n";
    }
    return 0;
}

int cmd_report(const std::string& artifacts_dir, const std::string& format) {
    const json j = predtown::load_json_file((fs::path(artifacts_dir) / "report.json").string());
    if (format == "md") {
        std::cout << predtown::render_markdown(j);
    } else if (format == "json") {
        std::cout << j.dump(2) << "\n";
    } else {
        throw predtown::ConfigError("report format must be md or json: " + format);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Transactional crime records to next-month homicide prediction"};
    app.require_subcommand(1);

    std::string config_path, out_path, truth_path, out_dir, incidents_path, normalize = "full";
    std::string family, grid_path, train_path, params_path, model_path, data_path, scores_path;
    std::string artifacts_dir, format = "md";
    std::vector<std::string> inputs;
    std::uint64_t seed = 0;
    std::optional<std::uint64_t> seed_override;
    int k = 7;
    double threshold = 0.5, bandwidth = 0.6;

    auto* synth = app.add_subcommand("synthgen", "Generate a synthetic transactional CSV");
    synth->add_option("--config", config_path, "generator config (JSON)")->required();
    synth->add_option("--out", out_path, "output transactional CSV")->required();
    synth->add_option("--truth", truth_path, "ground-truth label CSV");
    synth->add_option("--seed", seed_override, "override the config seed");

    auto* ingest = app.add_subcommand("ingest", "Parse and clean transactional CSVs");
    ingest->add_option("--config", config_path, "pipeline config with [ingest] section")->required();
    ingest->add_option("--input", inputs, "input CSV files")->required()->expected(-1);
    ingest->add_option("--out-dir", out_dir, "output directory")->required();

    auto* build = app.add_subcommand("build-dataset", "Clean incidents to labeled dataset");
    build->add_option("--config", config_path, "pipeline config")->required();
    build->add_option("--incidents", incidents_path, "clean incidents CSV")->required();
    build->add_option("--out", out_path, "output dataset CSV")->required();
    build->add_option("--normalize", normalize, "full | train-fit | none")
        ->check(CLI::IsMember({"full", "train-fit", "none"}));

    auto* tune = app.add_subcommand("tune", "Grid search with k-fold cross-validated AUC");
    tune->add_option("--family", family, "model family")->required();
    tune->add_option("--grid", grid_path, "parameter grid (JSON)")->required();
    tune->add_option("--train", train_path, "training dataset CSV")->required();
    tune->add_option("--k", k, "fold count");
    tune->add_option("--seed", seed, "master seed");
    tune->add_option("--out", out_path, "tune-result JSON")->required();

    auto* train = app.add_subcommand("train", "Fit one model");
    train->add_option("--family", family, "model family")->required();
    train->add_option("--params", params_path, "params JSON (or a tune-result file)");
    train->add_option("--train", train_path, "training dataset CSV")->required();
    train->add_option("--seed", seed, "model seed");
    train->add_option("--model-out", model_path, "output model JSON")->required();

    auto* predict = app.add_subcommand("predict", "Score a dataset with a saved model");
    predict->add_option("--model", model_path, "model JSON")->required();
    predict->add_option("--data", data_path, "dataset CSV")->required();
    predict->add_option("--out", out_path, "predictions CSV")->required();
    predict->add_option("--threshold", threshold, "decision threshold");

    auto* friedman = app.add_subcommand("friedman", "Pairwise Friedman tests on fold AUCs");
    friedman->add_option("--scores", scores_path, "JSON mapping model -> [auc...]")->required();
    friedman->add_option("--out", out_path, "output JSON")->required();

    auto* kde_cmd = app.add_subcommand("kde", "Gaussian KDE of fold AUCs");
    kde_cmd->add_option("--scores", scores_path, "JSON mapping model -> [auc...]")->required();
    kde_cmd->add_option("--bandwidth", bandwidth, "kernel bandwidth");
    kde_cmd->add_option("--out", out_path, "output CSV")->required();

    auto* bench = app.add_subcommand("benchmark", "Run the full pipeline and evaluation");
    bench->add_option("--config", config_path, "benchmark config (JSON)")->required();

    auto* report = app.add_subcommand("report", "Render a benchmark report");
    report->add_option("--artifacts", artifacts_dir, "benchmark output directory")->required();
    report->add_option("--format", format, "md | json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2; // usage problems are config errors
    }

    try {
        if (synth->parsed())
            return cmd_synthgen(config_path, out_path, truth_path, seed_override);
        if (ingest->parsed()) return cmd_ingest(config_path, inputs, out_dir);
        if (build->parsed())
            return cmd_build_dataset(config_path, incidents_path, out_path, normalize);
        if (tune->parsed()) return cmd_tune(family, grid_path, train_path, k, seed, out_path);
        if (train->parsed()) return cmd_train(family, params_path, train_path, seed, model_path);
        if (predict->parsed()) return cmd_predict(model_path, data_path, out_path, threshold);
        if (friedman->parsed()) return cmd_friedman(scores_path, out_path);
        if (kde_cmd->parsed()) return cmd_kde(scores_path, bandwidth, out_path);
        if (bench->parsed()) return cmd_benchmark(config_path);
        if (report->parsed()) return cmd_report(artifacts_dir, format);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return predtown::exit_code(e);
    }
    return 0;
}
