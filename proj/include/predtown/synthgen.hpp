#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "predtown/calendar.hpp"
#include "predtown/csv.hpp"
#include "predtown/cube.hpp"
#include "predtown/errors.hpp"
#include "predtown/ingest.hpp"
#include "predtown/rng.hpp"
#include "predtown/taxonomy.hpp"

namespace predtown {

// Maps a month's crime counts to the probability of a homicide in the next
// month. "threshold" plants an axis-aligned, learnable dependency;
// "alternate" labels odd months deterministically; "constant" is the null.
struct SignalRule {
    std::string type = "constant"; // constant | threshold | alternate
    double p = 0.0;                // constant
    std::string label;             // threshold: triggering crime type
    int min_count = 0;             // threshold
    double p_above = 1.0;
    double p_below = 0.0;

    double probability(const CrimeCounts& counts, const CrimeTaxonomy& taxonomy,
                       int months_from_start) const {
        if (type == "constant") return p;
        if (type == "alternate") return months_from_start % 2 == 1 ? 1.0 : 0.0;
        const int idx = taxonomy.index_of(label);
        if (idx < 0) throw ConfigError("signal rule label not in taxonomy: " + label);
        return counts[static_cast<std::size_t>(idx)] >= min_count ? p_above : p_below;
    }
};

struct GenConfig {
    int n_neighborhoods = 10;
    MonthWindow window{{2016, 1}, {2018, 12}};
    CrimeTaxonomy taxonomy = default_taxonomy();
    std::map<std::string, double> base_rates; // label -> mean monthly count
    double default_rate = 1.0;
    SignalRule signal;
    double first_month_homicide_rate = 0.3;
    double homicide_burst_rate = 0.5; // extra homicides beyond the guaranteed one
    double noise = 0.0;               // blends the rule with a coin flip
    int holes = 0;                    // neighborhoods given one empty month
    std::uint64_t seed = 0;

    void validate() const {
        if (n_neighborhoods < 1) throw ConfigError("synthgen: need at least 1 neighborhood");
        if (window.size() < 2) throw ConfigError("synthgen: window needs at least 2 months");
        for (const auto& [label, rate] : base_rates) {
            if (rate < 0) throw ConfigError("synthgen: negative rate for " + label);
            if (taxonomy.index_of(label) < 0)
                throw ConfigError("synthgen: rate label not in taxonomy: " + label);
        }
        if (default_rate < 0) throw ConfigError("synthgen: default_rate must be >= 0");
        if (noise < 0 || noise > 1) throw ConfigError("synthgen: noise must be in [0,1]");
        if (holes < 0 || holes > n_neighborhoods)
            throw ConfigError("synthgen: holes must be in [0, n_neighborhoods]");
        for (double prob : {signal.p, signal.p_above, signal.p_below}) {
            if (prob < 0 || prob > 1)
                throw ConfigError("synthgen: signal probabilities must be in [0,1]");
        }
    }
};

inline std::optional<YearMonth> parse_year_month(const std::string& s) {
    if (s.size() != 7 || s[4] != '-') return std::nullopt;
    int y = 0, m = 0;
    if (!detail::parse_digits(s, 0, 4, y) || !detail::parse_digits(s, 5, 2, m))
        return std::nullopt;
    if (m < 1 || m > 12) return std::nullopt;
    return YearMonth{y, m};
}

inline GenConfig gen_config_from_json(const nlohmann::json& j) {
    GenConfig cfg;
    try {
        if (j.contains("n_neighborhoods")) cfg.n_neighborhoods = j.at("n_neighborhoods").get<int>();
        if (j.contains("window_start")) {
            auto ym = parse_year_month(j.at("window_start").get<std::string>());
            if (!ym) throw ConfigError("synthgen: window_start must be YYYY-MM");
            cfg.window.start = *ym;
        }
        if (j.contains("window_end")) {
            auto ym = parse_year_month(j.at("window_end").get<std::string>());
            if (!ym) throw ConfigError("synthgen: window_end must be YYYY-MM");
            cfg.window.end = *ym;
        }
        if (j.contains("taxonomy")) cfg.taxonomy = taxonomy_from_json(j.at("taxonomy"));
        if (j.contains("base_rates")) {
            for (const auto& [label, rate] : j.at("base_rates").items())
                cfg.base_rates[normalize_text(label)] = rate.get<double>();
        }
        if (j.contains("default_rate")) cfg.default_rate = j.at("default_rate").get<double>();
        if (j.contains("signal")) {
            const auto& s = j.at("signal");
            cfg.signal.type = s.value("type", "constant");
            cfg.signal.p = s.value("p", 0.0);
            cfg.signal.label = normalize_text(s.value("label", ""));
            cfg.signal.min_count = s.value("min_count", 0);
            cfg.signal.p_above = s.value("p_above", 1.0);
            cfg.signal.p_below = s.value("p_below", 0.0);
        }
        if (j.contains("first_month_homicide_rate"))
            cfg.first_month_homicide_rate = j.at("first_month_homicide_rate").get<double>();
        if (j.contains("homicide_burst_rate"))
            cfg.homicide_burst_rate = j.at("homicide_burst_rate").get<double>();
        if (j.contains("noise")) cfg.noise = j.at("noise").get<double>();
        if (j.contains("holes")) cfg.holes = j.at("holes").get<int>();
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad synthgen config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

struct SynthResult {
    std::vector<RawIncident> incidents;  // transactional rows, generation order
    std::map<CellKey, int> truth;        // intended labels, months [start, end-1]
    std::vector<std::string> holed;      // neighborhoods left incomplete
};

namespace detail {

inline std::string synth_neighborhood_name(int i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "N%03d", i + 1);
    return buf;
}

} // namespace detail

// Draws per-cell counts around the base rates and plants the signal rule:
// the homicide count of month m+1 is nonzero exactly when the rule fired on
// month m. Every cell keeps at least one incident so the completeness filter
// retains all neighborhoods, unless holes are requested. Counts are capped
// at 28 so each incident maps to a distinct (date, type, neighborhood).
inline SynthResult generate(const GenConfig& cfg) {
    cfg.validate();
    const std::size_t hom = cfg.taxonomy.homicide_index;
    const int trigger = cfg.signal.type == "threshold" ? cfg.taxonomy.index_of(cfg.signal.label) : -1;
    if (cfg.signal.type == "threshold" && trigger < 0)
        throw ConfigError("signal rule label not in taxonomy: " + cfg.signal.label);

    // filler type for the completeness guarantee: first label that is
    // neither the homicide label nor the rule trigger
    std::size_t filler = 0;
    while (filler == hom || static_cast<int>(filler) == trigger) ++filler;

    const auto rate_of = [&](std::size_t t) {
        const auto it = cfg.base_rates.find(cfg.taxonomy.labels[t]);
        return it != cfg.base_rates.end() ? it->second : cfg.default_rate;
    };

    std::set<int> holed_idx;
    std::map<int, int> hole_month; // neighborhood index -> month ordinal
    if (cfg.holes > 0) {
        Rng hole_rng(derive_seed(cfg.seed, 0x401e));
        const auto picks = hole_rng.sample_without_replacement(
            static_cast<std::size_t>(cfg.n_neighborhoods), static_cast<std::size_t>(cfg.holes));
        for (std::size_t p : picks) {
            const int nb = static_cast<int>(p);
            holed_idx.insert(nb);
            hole_month[nb] =
                cfg.window.start.ordinal() + static_cast<int>(hole_rng.index(
                                                 static_cast<std::size_t>(cfg.window.size())));
        }
    }

    SynthResult res;
    const int start_ord = cfg.window.start.ordinal();
    const int end_ord = cfg.window.end.ordinal();
    for (int nb = 0; nb < cfg.n_neighborhoods; ++nb) {
        const std::string name = detail::synth_neighborhood_name(nb);
        Rng rng(derive_seed(cfg.seed, 0x6e1, static_cast<std::uint64_t>(nb)));
        bool fired_prev = false;
        for (int ord = start_ord; ord <= end_ord; ++ord) {
            const YearMonth ym = YearMonth::from_ordinal(ord);
            CrimeCounts counts(kCrimeTypeCount, 0);
            for (std::size_t t = 0; t < kCrimeTypeCount; ++t) {
                if (t == hom) continue;
                counts[t] = std::min(28, rng.poisson(rate_of(t)));
            }
            if (ord == start_ord) {
                counts[hom] = std::min(28, rng.poisson(cfg.first_month_homicide_rate));
            } else {
                counts[hom] =
                    fired_prev ? std::min(28, 1 + rng.poisson(cfg.homicide_burst_rate)) : 0;
            }
            std::int64_t total = 0;
            for (auto c : counts) total += c;
            if (total == 0) counts[filler] = 1;

            const double p_rule =
                cfg.signal.probability(counts, cfg.taxonomy, ord - start_ord);
            const double p_eff = (1.0 - cfg.noise) * p_rule + cfg.noise * 0.5;
            const bool fire = rng.unit() < p_eff;

            const bool is_holed = holed_idx.count(nb) > 0;
            if (is_holed && hole_month[nb] == ord) {
                counts.assign(kCrimeTypeCount, 0); // the empty month
            }
            for (std::size_t t = 0; t < kCrimeTypeCount; ++t) {
                for (std::int64_t k = 0; k < counts[t]; ++k) {
                    RawIncident inc;
                    inc.occurrence_date = {ym.year, ym.month, 1 + static_cast<int>(k % 28)};
                    inc.crime_type = cfg.taxonomy.labels[t];
                    inc.municipality = "CITY";
                    inc.neighborhood = name;
                    res.incidents.push_back(std::move(inc));
                }
            }
            if (!is_holed && ord < end_ord) {
                res.truth[CellKey{ym.year, ym.month, name}] = fire ? 1 : 0;
            }
            fired_prev = fire;
        }
        if (holed_idx.count(nb)) res.holed.push_back(name);
    }
    return res;
}

inline void write_transactional_csv(std::ostream& out, const std::vector<RawIncident>& incidents) {
    write_csv_record(out, {"date", "crime_type", "municipality", "neighborhood"});
    for (const auto& inc : incidents) {
        write_csv_record(out, {to_iso(inc.occurrence_date), inc.crime_type, inc.municipality,
                               inc.neighborhood});
    }
}

inline void write_truth_csv(std::ostream& out, const std::map<CellKey, int>& truth) {
    write_csv_record(out, {"year", "month", "neighborhood", "class"});
    for (const auto& [key, label] : truth) {
        write_csv_record(out, {std::to_string(key.year), std::to_string(key.month),
                               key.neighborhood, std::to_string(label)});
    }
}

} // namespace predtown
