#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <sstream>

#include "helpers.hpp"
#include "predtown/ingest.hpp"
#include "predtown/rng.hpp"

using namespace predtown;

namespace {

IngestConfig basic_config() {
    IngestConfig cfg;
    cfg.date_column = "data";
    cfg.type_column = "tipo";
    cfg.municipality_column = "municipio";
    cfg.neighborhood_column = "bairro";
    return cfg;
}

ParsedIncidents parse_text(const std::string& text, const IngestConfig& cfg) {
    std::istringstream in(text);
    return parse_incidents(in, cfg);
}

} // namespace

TEST_CASE("parse_incidents maps the four semantic columns", "[ingest]") {
    const auto out = parse_text(
        "data,tipo,municipio,bairro\n"
        "2016-01-15,AMEACA,BELEM,GUAMA\n",
        basic_config());
    REQUIRE(out.incidents.size() == 1);
    REQUIRE(out.rejects.empty());
    const auto& inc = out.incidents[0];
    CHECK(inc.occurrence_date == Date{2016, 1, 15});
    CHECK(inc.crime_type == "AMEACA");
    CHECK(inc.municipality == "BELEM");
    CHECK(inc.neighborhood == "GUAMA");
}

TEST_CASE("parse_incidents rejects malformed rows with reasons", "[ingest]") {
    const auto out = parse_text(
        "data,tipo,municipio,bairro,obs\n"
        "2016-13-40,AMEACA,BELEM,GUAMA,x\n"
        "2016-01-02,FURTO,BELEM,NAZARE,kept\n"
        "2016-01-03,,BELEM,GUAMA,y\n",
        basic_config());
    REQUIRE(out.incidents.size() == 1);
    REQUIRE(out.rejects.size() == 2);
    CHECK(out.rejects[0].row_number == 1);
    CHECK(out.rejects[0].reason.find("invalid date") != std::string::npos);
    CHECK(out.rejects[1].row_number == 3);
    CHECK(out.incidents[0].extra.at("obs") == "kept");
}

TEST_CASE("parse_incidents on a header-only file is empty", "[ingest]") {
    const auto out = parse_text("data,tipo,municipio,bairro\n", basic_config());
    CHECK(out.incidents.empty());
    CHECK(out.rejects.empty());
}

TEST_CASE("missing mapped column is a configuration error", "[ingest]") {
    CHECK_THROWS_AS(parse_text("data,tipo,municipio\n", basic_config()), ConfigError);
}

TEST_CASE("clean collapses exact duplicates", "[ingest]") {
    std::vector<RawIncident> raw(3);
    for (auto& r : raw) {
        r.occurrence_date = {2016, 1, 15};
        r.crime_type = "Ameaça";
        r.municipality = "Belém";
        r.neighborhood = "Guamá";
    }
    const auto res = clean(raw, IngestConfig{});
    REQUIRE(res.incidents.size() == 1);
    CHECK(res.incidents[0].crime_type == "AMEACA");
    CHECK(res.incidents[0].neighborhood == "GUAMA");
    CHECK(res.report.dedup_count == 2);
    CHECK(res.report.conserved());
}

TEST_CASE("clean applies the rules in order and accounts for drops", "[ingest]") {
    IngestConfig cfg;
    cfg.municipality_whitelist = {"BELEM"};
    cfg.excluded_neighborhoods = {"ILHA X"};
    cfg.non_crime_types = {"FATO ATIPICO"};
    cfg.consolidation_map = {{"GUAMA VELHO", "GUAMA"}};
    cfg.window_start = Date{2016, 1, 1};
    cfg.window_end = Date{2018, 12, 31};

    std::vector<RawIncident> raw;
    const auto add = [&](const char* date, const char* type, const char* muni, const char* nbhd) {
        RawIncident r;
        r.occurrence_date = *parse_date_as(date, "YYYY-MM-DD");
        r.crime_type = type;
        r.municipality = muni;
        r.neighborhood = nbhd;
        raw.push_back(r);
    };
    add("2016-05-01", "FURTO", "Belém", "Guamá");        // kept
    add("2016-05-01", "FURTO", "Ananindeua", "Guamá");   // municipality
    add("2016-05-02", "FURTO", "Belém", "Ilha X");       // excluded neighborhood
    add("2016-05-03", "Fato Atípico", "Belém", "Guamá"); // non-crime
    add("2016-05-04", "FURTO", "Belém", "Guamá Velho");  // consolidated into GUAMA
    add("2015-12-31", "FURTO", "Belém", "Guamá");        // window
    add("2016-05-04", "§§§", "Belém", "Guamá");          // empty after normalization

    const auto res = clean(raw, cfg);
    CHECK(res.report.input_count == 7);
    CHECK(res.report.output_count == 2);
    CHECK(res.report.dropped_by_rule.at("municipality") == 1);
    CHECK(res.report.dropped_by_rule.at("excluded_neighborhood") == 1);
    CHECK(res.report.dropped_by_rule.at("non_crime") == 1);
    CHECK(res.report.dropped_by_rule.at("window") == 1);
    CHECK(res.report.dropped_by_rule.at("empty_field") == 1);
    CHECK(res.report.conserved());
    CHECK(res.incidents[1].neighborhood == "GUAMA");
}

TEST_CASE("consolidation resolves chains and rejects cycles", "[ingest]") {
    const auto resolved = resolve_consolidation({{"A", "B"}, {"B", "C"}});
    CHECK(resolved.at("A") == "C");
    CHECK(resolved.at("B") == "C");

    CHECK_THROWS_AS(resolve_consolidation({{"A", "B"}, {"B", "A"}}), ConfigError);

    IngestConfig cfg;
    cfg.consolidation_map = {{"X", "Y"}, {"Y", "X"}};
    CHECK_THROWS_AS(clean(std::vector<RawIncident>{}, cfg), ConfigError);
}

TEST_CASE("cleaning conserves and ignores input order", "[ingest]") {
    Rng rng(31337);
    const std::vector<std::string> types = {"FURTO", "ROUBO", "FATO ATIPICO", "§", "Ameaça"};
    const std::vector<std::string> nbhds = {"GUAMA", "NAZARE", "ILHA X", "CANUDOS"};
    const std::vector<std::string> munis = {"BELEM", "ANANINDEUA"};

    IngestConfig cfg;
    cfg.municipality_whitelist = {"BELEM"};
    cfg.excluded_neighborhoods = {"ILHA X"};
    cfg.non_crime_types = {"FATO ATIPICO"};
    cfg.window_start = Date{2016, 1, 1};
    cfg.window_end = Date{2016, 12, 31};

    for (int trial = 0; trial < 20; ++trial) {
        std::vector<RawIncident> raw;
        const std::size_t n = 50 + rng.index(100);
        for (std::size_t i = 0; i < n; ++i) {
            RawIncident r;
            r.occurrence_date = {2016, 1 + static_cast<int>(rng.index(12)),
                                 1 + static_cast<int>(rng.index(28))};
            r.crime_type = types[rng.index(types.size())];
            r.municipality = munis[rng.index(munis.size())];
            r.neighborhood = nbhds[rng.index(nbhds.size())];
            raw.push_back(r);
        }
        const auto res = clean(raw, cfg);
        CHECK(res.report.conserved());

        auto shuffled = raw;
        rng.shuffle(shuffled);
        const auto res2 = clean(shuffled, cfg);
        CHECK(res2.report.output_count == res.report.output_count);
        CHECK(res2.report.dropped_by_rule == res.report.dropped_by_rule);
        CHECK(res2.report.dedup_count == res.report.dedup_count);

        // idempotence: a second pass drops and dedups nothing
        const auto res3 = clean(res.incidents, cfg);
        CHECK(res3.report.output_count == res3.report.input_count);
        CHECK(res3.report.dedup_count == 0);
        CHECK(res3.report.total_dropped() == 0);
    }
}

TEST_CASE("clean incident CSV round-trips", "[ingest]") {
    std::vector<CleanIncident> incidents = {
        test_helpers::incident(2016, 1, 15, "AMEACA", "GUAMA"),
        test_helpers::incident(2017, 12, 31, "FURTO", "NAZARE"),
    };
    std::ostringstream out;
    write_clean_incidents_csv(out, incidents);
    std::istringstream in(out.str());
    const auto back = read_clean_incidents_csv(in);
    REQUIRE(back.size() == 2);
    CHECK(back[0].key() == incidents[0].key());
    CHECK(back[1].key() == incidents[1].key());
}
