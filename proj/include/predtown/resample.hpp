#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "predtown/cube.hpp"
#include "predtown/errors.hpp"
#include "predtown/metrics.hpp"
#include "predtown/models.hpp"
#include "predtown/rng.hpp"

namespace predtown {

struct SplitSpec {
    double train_fraction = 0.7;
    bool stratify_year = false; // class is always a stratification key
    std::uint64_t seed = 0;
};

struct NeighborhoodCoverage {
    std::string neighborhood;
    std::size_t train_rows = 0;
    std::size_t test_rows = 0;
};

struct SplitResult {
    Dataset train;
    Dataset test;
    std::vector<std::size_t> train_indices; // into the canonically ordered dataset
    std::vector<std::size_t> test_indices;
    std::vector<NeighborhoodCoverage> coverage;
    std::vector<std::string> uncovered; // neighborhoods absent from one side
};

namespace detail {

inline std::int64_t round_half_even(double x) {
    const double f = std::floor(x);
    const double r = x - f;
    if (r > 0.5) return static_cast<std::int64_t>(f) + 1;
    if (r < 0.5) return static_cast<std::int64_t>(f);
    const auto fi = static_cast<std::int64_t>(f);
    return fi % 2 == 0 ? fi : fi + 1;
}

// Indices of the dataset rows in (year, month, neighborhood) order; the
// shuffle seed then acts on a machine-independent arrangement.
inline std::vector<std::size_t> canonical_order(const Dataset& ds) {
    std::vector<std::size_t> idx(ds.rows.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return ds.rows[a].meta < ds.rows[b].meta;
    });
    return idx;
}

} // namespace detail

inline Dataset subset(const Dataset& ds, const std::vector<std::size_t>& indices) {
    Dataset out;
    out.taxonomy = ds.taxonomy;
    out.scaler = ds.scaler;
    out.rows.reserve(indices.size());
    for (std::size_t i : indices) out.rows.push_back(ds.rows[i]);
    return out;
}

// Stratified train/test split. Strata are (class) or (class, year); within
// each stratum the train size is round-half-even of fraction * n, then a
// single off-by-one repair keeps the global train count closest to the
// requested fraction. Seeded shuffles act on canonically sorted rows.
inline SplitResult stratified_split(const Dataset& ds, const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
        throw ConfigError("train_fraction must lie strictly between 0 and 1");
    const std::vector<std::size_t> order = detail::canonical_order(ds);

    using StratumKey = std::pair<int, int>; // (class, year or 0)
    std::map<StratumKey, std::vector<std::size_t>> strata;
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        const auto& row = ds.rows[order[pos]];
        strata[{row.label, spec.stratify_year ? row.meta.year : 0}].push_back(order[pos]);
    }

    struct StratumPlan {
        StratumKey key;
        std::vector<std::size_t> rows;
        std::int64_t train_count = 0;
        double exact = 0.0;
    };
    std::vector<StratumPlan> plans;
    for (auto& [key, rows] : strata) {
        if (rows.size() < 2) {
            throw DataError("stratum (class=" + std::to_string(key.first) +
                            (spec.stratify_year ? ", year=" + std::to_string(key.second) : "") +
                            ") has fewer than 2 rows");
        }
        StratumPlan p;
        p.key = key;
        p.rows = std::move(rows);
        p.exact = spec.train_fraction * static_cast<double>(p.rows.size());
        p.train_count = std::clamp<std::int64_t>(detail::round_half_even(p.exact), 1,
                                                 static_cast<std::int64_t>(p.rows.size()) - 1);
        plans.push_back(std::move(p));
    }

    // off-by-one repair toward the exact global train size
    const double ideal = spec.train_fraction * static_cast<double>(ds.rows.size());
    std::int64_t total = 0;
    for (const auto& p : plans) total += p.train_count;
    for (const int delta : {-1, 1}) {
        if (std::fabs(static_cast<double>(total) - ideal) <= 0.5) break;
        const double candidate = static_cast<double>(total + delta);
        if (std::fabs(candidate - ideal) >= std::fabs(static_cast<double>(total) - ideal)) continue;
        // adjust the stratum whose rounding was the closest call
        std::size_t pick = plans.size();
        double best_margin = 2.0;
        for (std::size_t i = 0; i < plans.size(); ++i) {
            const auto& p = plans[i];
            const std::int64_t adjusted = p.train_count + delta;
            if (adjusted < 1 || adjusted > static_cast<std::int64_t>(p.rows.size()) - 1) continue;
            const double frac = p.exact - std::floor(p.exact);
            const double margin = std::fabs(frac - 0.5);
            if (margin < best_margin) {
                best_margin = margin;
                pick = i;
            }
        }
        if (pick < plans.size()) {
            plans[pick].train_count += delta;
            total += delta;
        }
    }

    SplitResult res;
    for (std::size_t s = 0; s < plans.size(); ++s) {
        auto& p = plans[s];
        Rng rng(derive_seed(spec.seed, 0x5b17, s));
        rng.shuffle(p.rows);
        for (std::size_t i = 0; i < p.rows.size(); ++i) {
            (static_cast<std::int64_t>(i) < p.train_count ? res.train_indices : res.test_indices)
                .push_back(p.rows[i]);
        }
    }
    std::sort(res.train_indices.begin(), res.train_indices.end());
    std::sort(res.test_indices.begin(), res.test_indices.end());
    res.train = subset(ds, res.train_indices);
    res.test = subset(ds, res.test_indices);

    std::map<std::string, NeighborhoodCoverage> coverage;
    for (const auto& row : res.train.rows) {
        auto& c = coverage[row.meta.neighborhood];
        c.neighborhood = row.meta.neighborhood;
        ++c.train_rows;
    }
    for (const auto& row : res.test.rows) {
        auto& c = coverage[row.meta.neighborhood];
        c.neighborhood = row.meta.neighborhood;
        ++c.test_rows;
    }
    for (const auto& [name, c] : coverage) {
        res.coverage.push_back(c);
        if (c.train_rows == 0 || c.test_rows == 0) res.uncovered.push_back(name);
    }
    return res;
}

struct FoldPlan {
    int k = 7;
    std::vector<int> assignments; // row index (canonical dataset order) -> fold id
    std::uint64_t seed = 0;

    std::vector<std::size_t> fold_rows(int fold) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < assignments.size(); ++i) {
            if (assignments[i] == fold) out.push_back(i);
        }
        return out;
    }

    std::vector<std::size_t> complement_rows(int fold) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < assignments.size(); ++i) {
            if (assignments[i] != fold) out.push_back(i);
        }
        return out;
    }
};

// Stratified-by-class k folds; per-class fold sizes differ by at most one.
// Assignments follow sorted stable row keys, so permuting the input rows
// yields the same multiset of folds.
inline FoldPlan make_folds(const Dataset& ds, int k, std::uint64_t seed) {
    if (k < 2) throw ConfigError("fold count must be >= 2");
    const std::vector<std::size_t> order = detail::canonical_order(ds);
    std::array<std::vector<std::size_t>, 2> by_class;
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        by_class[static_cast<std::size_t>(ds.rows[order[pos]].label)].push_back(order[pos]);
    }
    for (int c = 0; c < 2; ++c) {
        if (by_class[static_cast<std::size_t>(c)].size() < static_cast<std::size_t>(k))
            throw DataError("class " + std::to_string(c) + " has fewer rows than k=" +
                            std::to_string(k));
    }

    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.assignments.assign(ds.rows.size(), -1);
    for (int c = 0; c < 2; ++c) {
        auto& rows = by_class[static_cast<std::size_t>(c)];
        Rng rng(derive_seed(seed, 0xf01d, static_cast<std::uint64_t>(c)));
        rng.shuffle(rows);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            plan.assignments[rows[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
        }
    }
    return plan;
}

struct ParamGrid {
    std::map<std::string, std::vector<nlohmann::json>> values;

    std::size_t candidate_count() const {
        std::size_t n = 1;
        for (const auto& [_, vals] : values) n *= vals.size();
        return n;
    }
};

inline ParamGrid param_grid_from_json(const nlohmann::json& j) {
    ParamGrid grid;
    if (!j.is_object()) throw ConfigError("parameter grid must be a JSON object");
    for (const auto& [name, vals] : j.items()) {
        if (!vals.is_array() || vals.empty())
            throw ConfigError("grid entry must be a non-empty array: " + name);
        grid.values[name] = std::vector<nlohmann::json>(vals.begin(), vals.end());
    }
    if (grid.values.empty()) throw ConfigError("parameter grid is empty");
    return grid;
}

// Candidates in deterministic order: lexicographic over parameter names,
// then value-list order (first name varies slowest).
inline std::vector<nlohmann::json> enumerate_candidates(const ParamGrid& grid) {
    std::vector<nlohmann::json> out;
    std::vector<std::size_t> odo(grid.values.size(), 0);
    const std::size_t total = grid.candidate_count();
    for (std::size_t i = 0; i < total; ++i) {
        nlohmann::json candidate = nlohmann::json::object();
        std::size_t slot = 0;
        for (const auto& [name, vals] : grid.values) {
            candidate[name] = vals[odo[slot]];
            ++slot;
        }
        out.push_back(std::move(candidate));
        for (std::size_t s = odo.size(); s-- > 0;) {
            auto it = grid.values.begin();
            std::advance(it, s);
            if (++odo[s] < it->second.size()) break;
            odo[s] = 0;
        }
    }
    return out;
}

struct CvCandidate {
    nlohmann::json params;
    std::vector<double> fold_aucs;
    double mean_auc = 0.0;
    double sd_auc = 0.0;
    bool failed = false;
    std::string failure_reason;
};

struct TuneResult {
    std::string family;
    nlohmann::json best_params;
    std::size_t best_index = 0;
    std::vector<CvCandidate> cv_table;

    const std::vector<double>& winner_fold_aucs() const { return cv_table[best_index].fold_aucs; }
};

// Exhaustive grid search scored by cross-validated ROC-AUC. Each
// (candidate, fold) job derives its own seed from (master seed, candidate
// index, fold id); failed fits mark the candidate instead of aborting.
inline TuneResult grid_search(const std::string& family, const ParamGrid& grid,
                              const Dataset& train, const FoldPlan& folds,
                              std::uint64_t master_seed) {
    if (folds.assignments.size() != train.rows.size())
        throw DataError("fold plan does not match the training set");
    TuneResult result;
    result.family = family;
    const auto candidates = enumerate_candidates(grid);

    for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
        CvCandidate cand;
        cand.params = candidates[ci];
        try {
            for (int f = 0; f < folds.k; ++f) {
                const Dataset fit_set = subset(train, folds.complement_rows(f));
                const Dataset heldout = subset(train, folds.fold_rows(f));
                models::ModelSpec spec{family, cand.params,
                                       derive_seed(master_seed, ci, static_cast<std::uint64_t>(f))};
                auto model = models::make_classifier(spec);
                model->fit(fit_set);
                std::vector<int> truths;
                truths.reserve(heldout.rows.size());
                for (const auto& row : heldout.rows) truths.push_back(row.label);
                cand.fold_aucs.push_back(roc_auc(model->scores(heldout.rows), truths));
            }
            double sum = 0.0;
            for (double a : cand.fold_aucs) sum += a;
            cand.mean_auc = sum / static_cast<double>(cand.fold_aucs.size());
            double ss = 0.0;
            for (double a : cand.fold_aucs) ss += (a - cand.mean_auc) * (a - cand.mean_auc);
            cand.sd_auc = cand.fold_aucs.size() > 1
                              ? std::sqrt(ss / static_cast<double>(cand.fold_aucs.size() - 1))
                              : 0.0;
        } catch (const std::exception& e) {
            cand.failed = true;
            cand.failure_reason = e.what();
            cand.fold_aucs.clear();
        }
        result.cv_table.push_back(std::move(cand));
    }

    bool found = false;
    double best = -1.0;
    for (std::size_t i = 0; i < result.cv_table.size(); ++i) {
        const auto& c = result.cv_table[i];
        if (c.failed) continue;
        if (!found || c.mean_auc > best) { // ties keep the earliest candidate
            found = true;
            best = c.mean_auc;
            result.best_index = i;
        }
    }
    if (!found) throw DataError("grid search: every candidate failed to fit");
    result.best_params = result.cv_table[result.best_index].params;
    return result;
}

inline nlohmann::json tune_result_to_json(const TuneResult& r) {
    nlohmann::json cv = nlohmann::json::array();
    for (const auto& c : r.cv_table) {
        nlohmann::json e;
        e["params"] = c.params;
        if (c.failed) {
            e["failed"] = true;
            e["reason"] = c.failure_reason;
        } else {
            e["failed"] = false;
            e["fold_aucs"] = c.fold_aucs;
            e["mean_auc"] = c.mean_auc;
            e["sd_auc"] = c.sd_auc;
        }
        cv.push_back(std::move(e));
    }
    return {{"family", r.family},
            {"best_params", r.best_params},
            {"best_index", r.best_index},
            {"cv_table", cv}};
}

} // namespace predtown
