#pragma once

// Shared helpers for building small datasets and incident sets in tests.

#include <string>
#include <vector>

#include "predtown/cube.hpp"
#include "predtown/ingest.hpp"
#include "predtown/rng.hpp"
#include "predtown/synthgen.hpp"
#include "predtown/taxonomy.hpp"

namespace test_helpers {

inline predtown::SignalRule constant_rule(double p) {
    predtown::SignalRule r;
    r.type = "constant";
    r.p = p;
    return r;
}

inline predtown::SignalRule threshold_rule(const std::string& label, int min_count) {
    predtown::SignalRule r;
    r.type = "threshold";
    r.label = label;
    r.min_count = min_count;
    return r;
}

inline predtown::SignalRule alternate_rule() {
    predtown::SignalRule r;
    r.type = "alternate";
    return r;
}

inline predtown::FeatureRow make_row(int year, int month, const std::string& nbhd,
                                     const std::vector<double>& head, int label) {
    predtown::FeatureRow row;
    row.meta = {year, month, nbhd};
    row.month_feature = month;
    row.features.assign(predtown::kCrimeTypeCount, 0.0);
    for (std::size_t i = 0; i < head.size() && i < row.features.size(); ++i)
        row.features[i] = head[i];
    row.label = label;
    return row;
}

// n rows spread over months/neighborhoods with the requested class-1 count;
// features are low-signal noise.
inline predtown::Dataset make_dataset(std::size_t n, std::size_t ones, std::uint64_t seed,
                                      int n_neighborhoods = 8) {
    predtown::Dataset ds;
    ds.taxonomy = predtown::default_taxonomy();
    predtown::Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        const int month = 1 + static_cast<int>(i % 12);
        const int year = 2016 + static_cast<int>((i / 12) % 3);
        const std::string nbhd = "N" + std::to_string(i % static_cast<std::size_t>(n_neighborhoods));
        predtown::FeatureRow row = make_row(year, month, nbhd, {}, i < ones ? 1 : 0);
        for (auto& f : row.features) f = static_cast<double>(rng.index(10));
        ds.rows.push_back(std::move(row));
    }
    return ds;
}

inline predtown::CleanIncident incident(int y, int m, int d, const std::string& type,
                                        const std::string& nbhd) {
    return {{y, m, d}, type, nbhd};
}

// k incidents of one type in one month, on distinct days.
inline void add_incidents(std::vector<predtown::CleanIncident>& out, int y, int m,
                          const std::string& type, const std::string& nbhd, int count) {
    for (int i = 0; i < count; ++i) out.push_back(incident(y, m, 1 + i % 28, type, nbhd));
}

// Random x matrix with values drawn from a small integer lattice plus jitter,
// so ties across rows are common (exercises tie-handling).
inline std::vector<std::vector<double>> random_matrix(predtown::Rng& rng, std::size_t n,
                                                      std::size_t d, bool with_ties = true) {
    std::vector<std::vector<double>> x(n, std::vector<double>(d, 0.0));
    for (auto& row : x) {
        for (auto& v : row) {
            v = with_ties ? static_cast<double>(rng.index(6))
                          : rng.unit() * 10.0;
        }
    }
    return x;
}

inline std::vector<int> random_labels(predtown::Rng& rng, std::size_t n) {
    std::vector<int> y(n);
    bool has0 = false, has1 = false;
    for (auto& v : y) {
        v = static_cast<int>(rng.index(2));
        (v == 0 ? has0 : has1) = true;
    }
    if (!has0) y[0] = 0;
    if (!has1) y[y.size() > 1 ? 1 : 0] = 1;
    return y;
}

} // namespace test_helpers
