#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "predtown/calendar.hpp"
#include "predtown/csv.hpp"
#include "predtown/errors.hpp"
#include "predtown/text.hpp"

namespace predtown {

// One transactional police-report row, fields still raw.
struct RawIncident {
    Date occurrence_date;
    std::string crime_type;
    std::string municipality;
    std::string neighborhood;
    std::map<std::string, std::string> extra; // ignored source columns, kept for audit
};

struct CleanIncident {
    Date occurrence_date;
    std::string crime_type;   // canonical label
    std::string neighborhood; // canonical label

    auto key() const { return std::tie(occurrence_date, crime_type, neighborhood); }
};

struct RejectEntry {
    std::size_t row_number; // 1-based data row index (header not counted)
    std::string reason;
};

struct CleaningReport {
    std::uint64_t input_count = 0;
    std::uint64_t output_count = 0;
    std::map<std::string, std::uint64_t> dropped_by_rule;
    std::uint64_t dedup_count = 0;

    std::uint64_t total_dropped() const {
        std::uint64_t s = 0;
        for (const auto& [_, n] : dropped_by_rule) s += n;
        return s;
    }

    bool conserved() const {
        return input_count == output_count + total_dropped() + dedup_count;
    }
};

struct IngestConfig {
    std::string date_column = "date";
    std::string type_column = "crime_type";
    std::string municipality_column = "municipality";
    std::string neighborhood_column = "neighborhood";
    std::vector<std::string> date_formats = {"YYYY-MM-DD", "DD/MM/YYYY"};
    std::vector<std::string> municipality_whitelist;  // empty: filter disabled
    std::vector<std::string> excluded_neighborhoods;
    std::vector<std::string> non_crime_types;
    std::map<std::string, std::string> consolidation_map; // alias -> canonical
    std::optional<Date> window_start;
    std::optional<Date> window_end;
};

namespace detail {

inline std::vector<std::string> normalized_list(const nlohmann::json& arr) {
    std::vector<std::string> out;
    for (const auto& v : arr) out.push_back(normalize_text(v.get<std::string>()));
    return out;
}

} // namespace detail

inline IngestConfig ingest_config_from_json(const nlohmann::json& j) {
    IngestConfig cfg;
    try {
        if (j.contains("date_column")) cfg.date_column = j.at("date_column").get<std::string>();
        if (j.contains("type_column")) cfg.type_column = j.at("type_column").get<std::string>();
        if (j.contains("municipality_column"))
            cfg.municipality_column = j.at("municipality_column").get<std::string>();
        if (j.contains("neighborhood_column"))
            cfg.neighborhood_column = j.at("neighborhood_column").get<std::string>();
        if (j.contains("date_formats"))
            cfg.date_formats = j.at("date_formats").get<std::vector<std::string>>();
        if (j.contains("municipality_whitelist"))
            cfg.municipality_whitelist = detail::normalized_list(j.at("municipality_whitelist"));
        if (j.contains("excluded_neighborhoods"))
            cfg.excluded_neighborhoods = detail::normalized_list(j.at("excluded_neighborhoods"));
        if (j.contains("non_crime_types"))
            cfg.non_crime_types = detail::normalized_list(j.at("non_crime_types"));
        if (j.contains("consolidation_map")) {
            for (const auto& [k, v] : j.at("consolidation_map").items()) {
                cfg.consolidation_map[normalize_text(k)] = normalize_text(v.get<std::string>());
            }
        }
        for (const char* key : {"window_start", "window_end"}) {
            if (!j.contains(key)) continue;
            auto d = parse_date(j.at(key).get<std::string>(), {"YYYY-MM-DD"});
            if (!d) throw ConfigError(std::string(key) + " must be a YYYY-MM-DD date");
            (std::string(key) == "window_start" ? cfg.window_start : cfg.window_end) = d;
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad [ingest] config: ") + e.what());
    }
    for (const auto& f : cfg.date_formats) {
        if (f != "YYYY-MM-DD" && f != "DD/MM/YYYY")
            throw ConfigError("unsupported date format: " + f);
    }
    return cfg;
}

struct ParsedIncidents {
    std::vector<RawIncident> incidents;
    std::vector<RejectEntry> rejects;
};

// Parses a transactional CSV stream. Well-formed rows become RawIncidents in
// input order; rows with an unparseable date or a missing required cell go to
// the reject log. A mapped column missing from the header is a fatal
// configuration error.
inline ParsedIncidents parse_incidents(std::istream& source, const IngestConfig& cfg) {
    CsvTable table = read_csv(source);
    const int date_col = table.column(cfg.date_column);
    const int type_col = table.column(cfg.type_column);
    const int muni_col = table.column(cfg.municipality_column);
    const int nbhd_col = table.column(cfg.neighborhood_column);
    for (const auto& [name, col] :
         {std::pair{cfg.date_column, date_col}, {cfg.type_column, type_col},
          {cfg.municipality_column, muni_col}, {cfg.neighborhood_column, nbhd_col}}) {
        if (col < 0) throw ConfigError("mapped column not in CSV header: " + name);
    }
    const std::size_t required =
        static_cast<std::size_t>(std::max({date_col, type_col, muni_col, nbhd_col})) + 1;

    ParsedIncidents out;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::size_t row_number = r + 1;
        if (row.size() < required) {
            out.rejects.push_back({row_number, "missing required cell"});
            continue;
        }
        auto date = parse_date(row[date_col], cfg.date_formats);
        if (!date) {
            out.rejects.push_back({row_number, "invalid date: " + row[date_col]});
            continue;
        }
        if (row[type_col].empty() || row[nbhd_col].empty()) {
            out.rejects.push_back({row_number, "missing required cell"});
            continue;
        }
        RawIncident inc;
        inc.occurrence_date = *date;
        inc.crime_type = row[type_col];
        inc.municipality = row[muni_col];
        inc.neighborhood = row[nbhd_col];
        for (std::size_t cidx = 0; cidx < row.size() && cidx < table.header.size(); ++cidx) {
            const int ci = static_cast<int>(cidx);
            if (ci == date_col || ci == type_col || ci == muni_col || ci == nbhd_col) continue;
            inc.extra[table.header[cidx]] = row[cidx];
        }
        out.incidents.push_back(std::move(inc));
    }
    return out;
}

// Resolves consolidation chains (alias -> ... -> canonical) and rejects
// cycles. Self-mappings are allowed and act as identities.
inline std::map<std::string, std::string>
resolve_consolidation(const std::map<std::string, std::string>& aliases) {
    std::map<std::string, std::string> resolved;
    for (const auto& [alias, _] : aliases) {
        std::string cur = alias;
        std::set<std::string> seen;
        while (true) {
            auto it = aliases.find(cur);
            if (it == aliases.end() || it->second == cur) break;
            if (!seen.insert(cur).second)
                throw ConfigError("consolidation mapping contains a cycle at: " + cur);
            cur = it->second;
        }
        resolved[alias] = cur;
    }
    return resolved;
}

struct CleanResult {
    std::vector<CleanIncident> incidents;
    CleaningReport report;
};

namespace detail {

inline bool in_list(const std::vector<std::string>& list, const std::string& v) {
    return std::find(list.begin(), list.end(), v) != list.end();
}

// Shared by the RawIncident and CleanIncident entry points; has_municipality
// gates the whitelist rule (already-clean incidents carry no municipality).
template <typename Incident>
CleanResult clean_impl(const std::vector<Incident>& records, const IngestConfig& cfg,
                       bool has_municipality) {
    const auto consolidation = resolve_consolidation(cfg.consolidation_map);
    CleanResult res;
    auto& rep = res.report;
    rep.input_count = records.size();
    for (const char* rule :
         {"empty_field", "municipality", "excluded_neighborhood", "non_crime", "window"}) {
        rep.dropped_by_rule[rule] = 0;
    }

    std::set<std::tuple<Date, std::string, std::string>> seen;
    for (const auto& rec : records) {
        CleanIncident ci;
        ci.occurrence_date = rec.occurrence_date;
        ci.crime_type = normalize_text(rec.crime_type);
        ci.neighborhood = normalize_text(rec.neighborhood);

        if (ci.crime_type.empty() || ci.neighborhood.empty()) {
            ++rep.dropped_by_rule["empty_field"];
            continue;
        }
        if (has_municipality && !cfg.municipality_whitelist.empty()) {
            std::string muni;
            if constexpr (requires { rec.municipality; }) muni = normalize_text(rec.municipality);
            if (!in_list(cfg.municipality_whitelist, muni)) {
                ++rep.dropped_by_rule["municipality"];
                continue;
            }
        }
        if (in_list(cfg.excluded_neighborhoods, ci.neighborhood)) {
            ++rep.dropped_by_rule["excluded_neighborhood"];
            continue;
        }
        if (in_list(cfg.non_crime_types, ci.crime_type)) {
            ++rep.dropped_by_rule["non_crime"];
            continue;
        }
        if (auto it = consolidation.find(ci.neighborhood); it != consolidation.end()) {
            ci.neighborhood = it->second;
        }
        if ((cfg.window_start && ci.occurrence_date < *cfg.window_start) ||
            (cfg.window_end && ci.occurrence_date > *cfg.window_end)) {
            ++rep.dropped_by_rule["window"];
            continue;
        }
        if (!seen.insert({ci.occurrence_date, ci.crime_type, ci.neighborhood}).second) {
            ++rep.dedup_count;
            continue;
        }
        res.incidents.push_back(std::move(ci));
    }
    rep.output_count = res.incidents.size();
    return res;
}

} // namespace detail

// Applies the cleaning rules in order: text normalization, municipality
// filter, excluded-neighborhood drop, non-crime drop, neighborhood
// consolidation, study-window filter, exact-duplicate removal on
// (date, type, neighborhood). The report accounts for every record.
inline CleanResult clean(const std::vector<RawIncident>& records, const IngestConfig& cfg) {
    return detail::clean_impl(records, cfg, true);
}

// Re-cleaning already-clean incidents; there is no municipality to filter on.
inline CleanResult clean(const std::vector<CleanIncident>& records, const IngestConfig& cfg) {
    return detail::clean_impl(records, cfg, false);
}

inline nlohmann::json cleaning_report_to_json(const CleaningReport& r) {
    nlohmann::json j;
    j["input_count"] = r.input_count;
    j["output_count"] = r.output_count;
    j["dedup_count"] = r.dedup_count;
    j["dropped_by_rule"] = r.dropped_by_rule;
    return j;
}

inline void write_clean_incidents_csv(std::ostream& out, const std::vector<CleanIncident>& incidents) {
    write_csv_record(out, {"date", "crime_type", "neighborhood"});
    for (const auto& inc : incidents) {
        write_csv_record(out, {to_iso(inc.occurrence_date), inc.crime_type, inc.neighborhood});
    }
}

inline std::vector<CleanIncident> read_clean_incidents_csv(std::istream& in) {
    CsvTable t = read_csv(in);
    const int d = t.column("date"), c = t.column("crime_type"), n = t.column("neighborhood");
    if (d < 0 || c < 0 || n < 0)
        throw DataError("clean-incident CSV must have columns date,crime_type,neighborhood");
    std::vector<CleanIncident> out;
    out.reserve(t.rows.size());
    for (const auto& row : t.rows) {
        if (row.size() < t.header.size()) throw DataError("short row in clean-incident CSV");
        auto date = parse_date(row[d], {"YYYY-MM-DD"});
        if (!date) throw DataError("bad date in clean-incident CSV: " + row[d]);
        out.push_back({*date, row[c], row[n]});
    }
    return out;
}

inline void write_reject_log_csv(std::ostream& out, const std::vector<RejectEntry>& rejects) {
    write_csv_record(out, {"row_number", "reason"});
    for (const auto& r : rejects) {
        write_csv_record(out, {std::to_string(r.row_number), r.reason});
    }
}

} // namespace predtown
