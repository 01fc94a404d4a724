#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "helpers.hpp"
#include "predtown/cube.hpp"
#include "predtown/ingest.hpp"
#include "predtown/synthgen.hpp"

using namespace predtown;

namespace {

GenConfig small_config() {
    GenConfig cfg;
    cfg.n_neighborhoods = 6;
    cfg.window = {{2016, 1}, {2017, 12}};
    cfg.base_rates = {{"THREAT", 4.7}, {"THEFT", 5.0}};
    cfg.default_rate = 0.6;
    cfg.seed = 11;
    return cfg;
}

Dataset pipeline(const SynthResult& synth, const MonthWindow& window) {
    IngestConfig icfg;
    const auto cleaned = clean(synth.incidents, icfg);
    auto [ds, info] = build_dataset(cleaned.incidents, default_taxonomy(), window);
    return std::move(ds);
}

} // namespace

TEST_CASE("constant signal rules produce constant labels", "[synthgen]") {
    GenConfig cfg = small_config();
    cfg.signal = test_helpers::constant_rule(0.0);
    const auto zeros = generate(cfg);
    for (const auto& [_, label] : zeros.truth) CHECK(label == 0);
    const Dataset ds0 = pipeline(zeros, cfg.window);
    for (const auto& row : ds0.rows) CHECK(row.label == 0);

    cfg.signal = test_helpers::constant_rule(1.0);
    const auto ones = generate(cfg);
    for (const auto& [_, label] : ones.truth) CHECK(label == 1);
    const Dataset ds1 = pipeline(ones, cfg.window);
    CHECK(ds1.rows.size() == ones.truth.size()); // final month emits no row
    for (const auto& row : ds1.rows) CHECK(row.label == 1);
}

TEST_CASE("pipeline labels equal the generator ground truth exactly", "[synthgen]") {
    GenConfig cfg = small_config();
    cfg.signal = test_helpers::threshold_rule("THREAT", 5);
    const auto synth = generate(cfg);
    const Dataset ds = pipeline(synth, cfg.window);
    REQUIRE(ds.rows.size() == synth.truth.size());
    for (const auto& row : ds.rows) {
        REQUIRE(synth.truth.count(row.meta) == 1);
        CHECK(row.label == synth.truth.at(row.meta));
    }
}

TEST_CASE("alternate rule plants an exact 50/50 balance", "[synthgen]") {
    GenConfig cfg = small_config();
    cfg.n_neighborhoods = 10;
    cfg.window = {{2016, 1}, {2017, 9}}; // 21 months: 20 labeled per neighborhood
    cfg.signal = test_helpers::alternate_rule();
    const auto synth = generate(cfg);
    const Dataset ds = pipeline(synth, cfg.window);
    REQUIRE(ds.rows.size() == 200);
    const auto [zeros, ones] = class_balance(ds);
    CHECK(zeros == 100);
    CHECK(ones == 100);
}

TEST_CASE("generation is deterministic under seed", "[synthgen]") {
    GenConfig cfg = small_config();
    cfg.signal = test_helpers::threshold_rule("THREAT", 5);
    const auto a = generate(cfg);
    const auto b = generate(cfg);
    REQUIRE(a.incidents.size() == b.incidents.size());
    CHECK(a.truth == b.truth);
    for (std::size_t i = 0; i < a.incidents.size(); ++i) {
        CHECK(a.incidents[i].occurrence_date == b.incidents[i].occurrence_date);
        CHECK(a.incidents[i].crime_type == b.incidents[i].crime_type);
        CHECK(a.incidents[i].neighborhood == b.incidents[i].neighborhood);
    }
    GenConfig other = cfg;
    other.seed = cfg.seed + 1;
    const auto c = generate(other);
    CHECK(a.truth != c.truth);
}

TEST_CASE("every neighborhood survives the completeness filter without holes", "[synthgen]") {
    const GenConfig cfg = small_config();
    const auto synth = generate(cfg);
    IngestConfig icfg;
    const auto cleaned = clean(synth.incidents, icfg);
    auto [ds, info] = build_dataset(cleaned.incidents, default_taxonomy(), cfg.window);
    CHECK(info.removed_neighborhoods.empty());
    CHECK(info.neighborhood_count == 6);
}

TEST_CASE("holes knock neighborhoods out of the completeness filter", "[synthgen]") {
    GenConfig cfg = small_config();
    cfg.holes = 2;
    const auto synth = generate(cfg);
    REQUIRE(synth.holed.size() == 2);
    IngestConfig icfg;
    const auto cleaned = clean(synth.incidents, icfg);
    auto [ds, info] = build_dataset(cleaned.incidents, default_taxonomy(), cfg.window);
    CHECK(info.removed_neighborhoods == synth.holed);
    CHECK(info.neighborhood_count == 4);
    // truth only covers retained neighborhoods
    for (const auto& [key, _] : synth.truth) {
        CHECK(std::find(synth.holed.begin(), synth.holed.end(), key.neighborhood) ==
              synth.holed.end());
    }
}

TEST_CASE("dedup-safe day assignment keeps every generated incident", "[synthgen]") {
    const GenConfig cfg = small_config();
    const auto synth = generate(cfg);
    IngestConfig icfg;
    const auto cleaned = clean(synth.incidents, icfg);
    CHECK(cleaned.report.dedup_count == 0);
    CHECK(cleaned.report.output_count == synth.incidents.size());
}
