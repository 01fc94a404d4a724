#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "predtown/calendar.hpp"
#include "predtown/csv.hpp"
#include "predtown/errors.hpp"
#include "predtown/ingest.hpp"
#include "predtown/taxonomy.hpp"

namespace predtown {

// Aggregation cell: one (year, month, neighborhood) slot of the cube.
struct CellKey {
    int year = 0;
    int month = 0;
    std::string neighborhood;

    auto operator<=>(const CellKey&) const = default;

    YearMonth ym() const { return {year, month}; }
};

using CrimeCounts = std::vector<std::int64_t>; // aligned to taxonomy order, length 34

// std::map keeps cells in (year, month, neighborhood) order, which is the
// canonical row order everywhere downstream.
using CellGrid = std::map<CellKey, CrimeCounts>;

struct FeatureRow {
    CellKey meta;              // carried, never exposed as a feature except month
    int month_feature = 0;     // 1..12
    std::vector<double> features; // 34 crime counts (raw or normalized)
    int label = 0;             // 0/1: homicide next month
};

struct Scaler {
    std::vector<double> min;
    std::vector<double> max;

    std::size_t arity() const { return min.size(); }
};

struct Dataset {
    CrimeTaxonomy taxonomy;
    std::vector<FeatureRow> rows;
    std::optional<Scaler> scaler;
};

// Model input layout: month ordinal first, then the 34 counts. Exactly 35
// entries; neighborhood and year never appear.
inline constexpr std::size_t kModelArity = 1 + kCrimeTypeCount;

inline std::vector<double> to_feature_vector(const FeatureRow& row) {
    if (row.features.size() != kCrimeTypeCount)
        throw DataError("feature row must carry exactly 34 crime counts");
    std::vector<double> x;
    x.reserve(kModelArity);
    x.push_back(static_cast<double>(row.month_feature));
    x.insert(x.end(), row.features.begin(), row.features.end());
    return x;
}

struct AggregateResult {
    CellGrid cells;
    std::map<std::string, std::uint64_t> discarded_by_type; // types outside the taxonomy
    std::uint64_t out_of_window = 0;

    std::uint64_t discarded_total() const {
        std::uint64_t s = out_of_window;
        for (const auto& [_, n] : discarded_by_type) s += n;
        return s;
    }
};

// Counts incidents per cell and materializes all-zero cells for every
// (observed neighborhood) x (month of the window), so each retained
// neighborhood has a complete monthly series. Window defaults to the
// observed month span.
inline AggregateResult aggregate(const std::vector<CleanIncident>& incidents,
                                 const CrimeTaxonomy& taxonomy,
                                 std::optional<MonthWindow> window = std::nullopt) {
    taxonomy.validate();
    AggregateResult res;
    if (incidents.empty()) return res;

    if (!window) {
        YearMonth lo = year_month(incidents.front().occurrence_date);
        YearMonth hi = lo;
        for (const auto& inc : incidents) {
            const YearMonth ym = year_month(inc.occurrence_date);
            lo = std::min(lo, ym);
            hi = std::max(hi, ym);
        }
        window = MonthWindow{lo, hi};
    }

    std::set<std::string> neighborhoods;
    for (const auto& inc : incidents) {
        const YearMonth ym = year_month(inc.occurrence_date);
        if (!window->contains(ym)) {
            ++res.out_of_window;
            continue;
        }
        neighborhoods.insert(inc.neighborhood);
        const int t = taxonomy.index_of(inc.crime_type);
        if (t < 0) {
            ++res.discarded_by_type[inc.crime_type];
            continue;
        }
        CellKey key{ym.year, ym.month, inc.neighborhood};
        auto [it, _] = res.cells.try_emplace(key, CrimeCounts(kCrimeTypeCount, 0));
        ++it->second[static_cast<std::size_t>(t)];
    }

    for (const auto& n : neighborhoods) {
        for (int ord = window->start.ordinal(); ord <= window->end.ordinal(); ++ord) {
            const YearMonth ym = YearMonth::from_ordinal(ord);
            res.cells.try_emplace(CellKey{ym.year, ym.month, n}, CrimeCounts(kCrimeTypeCount, 0));
        }
    }
    return res;
}

struct CompletenessResult {
    CellGrid cells;
    std::vector<std::string> removed_neighborhoods;
    bool all_removed = false;
};

// Retains exactly the neighborhoods with at least one recorded crime in
// every month of the window.
inline CompletenessResult filter_complete_neighborhoods(const CellGrid& cells,
                                                        const MonthWindow& window) {
    if (window.size() <= 0) throw ConfigError("completeness filter needs a non-empty window");
    std::map<std::string, std::set<int>> active_months;
    std::set<std::string> neighborhoods;
    for (const auto& [key, counts] : cells) {
        neighborhoods.insert(key.neighborhood);
        std::int64_t total = 0;
        for (auto c : counts) total += c;
        if (total > 0 && window.contains(key.ym()))
            active_months[key.neighborhood].insert(key.ym().ordinal());
    }

    CompletenessResult res;
    const int needed = window.size();
    std::set<std::string> keep;
    for (const auto& n : neighborhoods) {
        auto it = active_months.find(n);
        if (it != active_months.end() && static_cast<int>(it->second.size()) == needed) {
            keep.insert(n);
        } else {
            res.removed_neighborhoods.push_back(n);
        }
    }
    for (const auto& [key, counts] : cells) {
        if (keep.count(key.neighborhood)) res.cells.emplace(key, counts);
    }
    res.all_removed = keep.empty() && !neighborhoods.empty();
    return res;
}

// Builds one labeled row per cell whose successor month is present:
// class = 1 iff the same neighborhood records any homicide in the next
// calendar month (December rolls into January). Rows come out in
// (year, month, neighborhood) order.
inline std::vector<FeatureRow> label_next_month(const CellGrid& cells,
                                                const CrimeTaxonomy& taxonomy) {
    taxonomy.validate();
    std::vector<FeatureRow> rows;
    for (const auto& [key, counts] : cells) {
        const YearMonth next = key.ym().next();
        const auto next_it = cells.find(CellKey{next.year, next.month, key.neighborhood});
        if (next_it == cells.end()) continue; // no successor month in the data window
        FeatureRow row;
        row.meta = key;
        row.month_feature = key.month;
        row.features.assign(counts.begin(), counts.end());
        row.label = next_it->second[taxonomy.homicide_index] > 0 ? 1 : 0;
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Scaler fit_scaler(const Dataset& ds) {
    Scaler s;
    s.min.assign(kCrimeTypeCount, 0.0);
    s.max.assign(kCrimeTypeCount, 0.0);
    bool first = true;
    for (const auto& row : ds.rows) {
        for (std::size_t i = 0; i < kCrimeTypeCount; ++i) {
            if (first) {
                s.min[i] = s.max[i] = row.features[i];
            } else {
                s.min[i] = std::min(s.min[i], row.features[i]);
                s.max[i] = std::max(s.max[i], row.features[i]);
            }
        }
        first = false;
    }
    return s;
}

// x -> (x - min) / (max - min); a constant column maps to 0. The month
// feature is left on its 1..12 scale. With clamp on, values outside the
// fitted range land on the [0,1] endpoints.
inline void apply_scaler(Dataset& ds, const Scaler& scaler, bool clamp) {
    if (scaler.min.size() != kCrimeTypeCount || scaler.max.size() != kCrimeTypeCount)
        throw DataError("scaler arity mismatch: expected 34 (min,max) pairs");
    for (std::size_t i = 0; i < kCrimeTypeCount; ++i) {
        if (scaler.min[i] > scaler.max[i]) throw DataError("scaler has min > max");
    }
    for (auto& row : ds.rows) {
        for (std::size_t i = 0; i < kCrimeTypeCount; ++i) {
            const double lo = scaler.min[i], hi = scaler.max[i];
            double v = hi == lo ? 0.0 : (row.features[i] - lo) / (hi - lo);
            if (clamp) v = std::clamp(v, 0.0, 1.0);
            row.features[i] = v;
        }
    }
    ds.scaler = scaler;
}

enum class NormalizeScope { Full, TrainFit, None };

inline NormalizeScope normalize_scope_from_string(const std::string& s) {
    if (s == "full") return NormalizeScope::Full;
    if (s == "train-fit") return NormalizeScope::TrainFit;
    if (s == "none") return NormalizeScope::None;
    throw ConfigError("normalization scope must be full, train-fit or none: " + s);
}

// Fits on the dataset itself unless a reference scaler is supplied.
inline void minmax_normalize(Dataset& ds, std::optional<Scaler> reference = std::nullopt,
                             bool clamp = false) {
    apply_scaler(ds, reference ? *reference : fit_scaler(ds), clamp);
}

inline std::pair<std::size_t, std::size_t> class_balance(const Dataset& ds) {
    std::size_t zeros = 0, ones = 0;
    for (const auto& row : ds.rows) {
        (row.label == 0 ? zeros : ones) += 1;
    }
    return {zeros, ones};
}

namespace detail {

// Shortest round-trip decimal form.
inline std::string format_double(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

inline double parse_double(const std::string& s) {
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw DataError("bad numeric field: " + s);
    return v;
}

} // namespace detail

// Dataset CSV layout: year,month,neighborhood,<34 labels>,class. The year
// and neighborhood columns are meta only; a sidecar JSON carries the
// taxonomy order and scaler so the file round-trips losslessly.
inline void write_dataset_csv(std::ostream& out, const Dataset& ds) {
    std::vector<std::string> header = {"year", "month", "neighborhood"};
    header.insert(header.end(), ds.taxonomy.labels.begin(), ds.taxonomy.labels.end());
    header.push_back("class");
    write_csv_record(out, header);
    for (const auto& row : ds.rows) {
        std::vector<std::string> rec = {std::to_string(row.meta.year),
                                        std::to_string(row.month_feature),
                                        row.meta.neighborhood};
        for (double v : row.features) rec.push_back(detail::format_double(v));
        rec.push_back(std::to_string(row.label));
        write_csv_record(out, rec);
    }
}

inline nlohmann::json dataset_sidecar_json(const Dataset& ds, const std::string& normalization) {
    nlohmann::json j;
    j["taxonomy"] = taxonomy_to_json(ds.taxonomy);
    j["meta_columns"] = {"year", "neighborhood"};
    j["normalization"] = normalization;
    if (ds.scaler) {
        j["scaler"] = {{"min", ds.scaler->min}, {"max", ds.scaler->max}};
    } else {
        j["scaler"] = nullptr;
    }
    return j;
}

inline void write_dataset(const std::string& csv_path, const Dataset& ds,
                          const std::string& normalization) {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw DataError("cannot write dataset: " + csv_path);
    write_dataset_csv(out, ds);
    std::ofstream meta(csv_path + ".meta.json", std::ios::binary);
    if (!meta) throw DataError("cannot write dataset sidecar for: " + csv_path);
    meta << dataset_sidecar_json(ds, normalization).dump(2) << '\n';
}

inline Dataset read_dataset_csv(std::istream& in, std::optional<CrimeTaxonomy> taxonomy = std::nullopt) {
    CsvTable t = read_csv(in);
    if (t.header.size() != 3 + kCrimeTypeCount + 1)
        throw DataError("dataset CSV must have year,month,neighborhood,<34 labels>,class columns");
    if (t.header[0] != "year" || t.header[1] != "month" || t.header[2] != "neighborhood" ||
        t.header.back() != "class")
        throw DataError("dataset CSV header malformed");

    Dataset ds;
    if (taxonomy) {
        ds.taxonomy = *taxonomy;
        for (std::size_t i = 0; i < kCrimeTypeCount; ++i) {
            if (t.header[3 + i] != ds.taxonomy.labels[i])
                throw DataError("dataset CSV column order does not match taxonomy");
        }
    } else {
        ds.taxonomy.labels.assign(t.header.begin() + 3, t.header.end() - 1);
        const int hom = ds.taxonomy.index_of("HOMICIDE");
        ds.taxonomy.homicide_index = hom >= 0 ? static_cast<std::size_t>(hom) : 0;
        ds.taxonomy.validate();
    }

    for (const auto& rec : t.rows) {
        if (rec.size() != t.header.size()) throw DataError("dataset CSV row arity mismatch");
        FeatureRow row;
        row.meta.year = static_cast<int>(detail::parse_double(rec[0]));
        row.month_feature = static_cast<int>(detail::parse_double(rec[1]));
        row.meta.month = row.month_feature;
        row.meta.neighborhood = rec[2];
        if (row.month_feature < 1 || row.month_feature > 12)
            throw DataError("month feature outside 1..12");
        for (std::size_t i = 0; i < kCrimeTypeCount; ++i)
            row.features.push_back(detail::parse_double(rec[3 + i]));
        const double cls = detail::parse_double(rec.back());
        if (cls != 0.0 && cls != 1.0) throw DataError("class column must be 0 or 1");
        row.label = static_cast<int>(cls);
        ds.rows.push_back(std::move(row));
    }
    return ds;
}

inline Dataset read_dataset(const std::string& csv_path) {
    std::ifstream in(csv_path, std::ios::binary);
    if (!in) throw DataError("cannot open dataset: " + csv_path);
    std::optional<CrimeTaxonomy> taxonomy;
    std::ifstream meta(csv_path + ".meta.json", std::ios::binary);
    Dataset ds;
    if (meta) {
        nlohmann::json j;
        meta >> j;
        taxonomy = taxonomy_from_json(j.at("taxonomy"));
        ds = read_dataset_csv(in, taxonomy);
        if (!j.at("scaler").is_null()) {
            Scaler s;
            s.min = j["scaler"]["min"].get<std::vector<double>>();
            s.max = j["scaler"]["max"].get<std::vector<double>>();
            ds.scaler = std::move(s);
        }
    } else {
        ds = read_dataset_csv(in);
    }
    return ds;
}

// Dataset assembly used by the CLI and the benchmark: aggregate, completeness
// filter, next-month labeling.
struct BuildInfo {
    std::vector<std::string> removed_neighborhoods;
    std::size_t neighborhood_count = 0;
    std::map<std::string, std::uint64_t> discarded_by_type;
    std::uint64_t out_of_window = 0;
    MonthWindow window;
};

inline std::pair<Dataset, BuildInfo> build_dataset(const std::vector<CleanIncident>& incidents,
                                                   const CrimeTaxonomy& taxonomy,
                                                   std::optional<MonthWindow> window = std::nullopt) {
    if (incidents.empty()) throw DataError("no incidents to build a dataset from");
    AggregateResult agg = aggregate(incidents, taxonomy, window);
    if (!window) {
        YearMonth lo = agg.cells.begin()->first.ym();
        YearMonth hi = lo;
        for (const auto& [key, _] : agg.cells) {
            lo = std::min(lo, key.ym());
            hi = std::max(hi, key.ym());
        }
        window = MonthWindow{lo, hi};
    }
    CompletenessResult complete = filter_complete_neighborhoods(agg.cells, *window);

    Dataset ds;
    ds.taxonomy = taxonomy;
    ds.rows = label_next_month(complete.cells, taxonomy);

    BuildInfo info;
    info.removed_neighborhoods = complete.removed_neighborhoods;
    info.discarded_by_type = agg.discarded_by_type;
    info.out_of_window = agg.out_of_window;
    info.window = *window;
    std::set<std::string> nbhds;
    for (const auto& row : ds.rows) nbhds.insert(row.meta.neighborhood);
    info.neighborhood_count = nbhds.size();
    return {std::move(ds), std::move(info)};
}

} // namespace predtown
