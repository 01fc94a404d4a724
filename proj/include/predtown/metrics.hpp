#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "predtown/errors.hpp"

namespace predtown {

inline double accuracy(std::span<const int> predictions, std::span<const int> truths) {
    if (predictions.size() != truths.size())
        throw DataError("accuracy: prediction/truth length mismatch");
    if (predictions.empty()) throw DataError("accuracy: empty input");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (predictions[i] == truths[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(predictions.size());
}

struct ConfusionMatrix {
    std::uint64_t tn = 0, fp = 0, fn = 0, tp = 0;
    // row_normalized[true_class][predicted_class]; a row with no true-class
    // members is flagged invalid and rendered "n/a".
    std::array<std::array<double, 2>, 2> row_normalized{{{0, 0}, {0, 0}}};
    std::array<bool, 2> row_valid{false, false};

    std::uint64_t total() const { return tn + fp + fn + tp; }
};

inline ConfusionMatrix confusion(std::span<const int> predictions, std::span<const int> truths) {
    if (predictions.size() != truths.size())
        throw DataError("confusion: prediction/truth length mismatch");
    if (predictions.empty()) throw DataError("confusion: empty input");
    ConfusionMatrix m;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (truths[i] == 0) {
            (predictions[i] == 0 ? m.tn : m.fp) += 1;
        } else {
            (predictions[i] == 0 ? m.fn : m.tp) += 1;
        }
    }
    const std::uint64_t n0 = m.tn + m.fp, n1 = m.fn + m.tp;
    if (n0 > 0) {
        m.row_valid[0] = true;
        m.row_normalized[0][0] = static_cast<double>(m.tn) / static_cast<double>(n0);
        m.row_normalized[0][1] = static_cast<double>(m.fp) / static_cast<double>(n0);
    }
    if (n1 > 0) {
        m.row_valid[1] = true;
        m.row_normalized[1][0] = static_cast<double>(m.fn) / static_cast<double>(n1);
        m.row_normalized[1][1] = static_cast<double>(m.tp) / static_cast<double>(n1);
    }
    return m;
}

namespace detail {

// Mid-ranks (1-based, ties averaged) of a value vector.
inline std::vector<double> mid_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        // rank positions i+1 .. j+1 share the mid-rank
        const double r = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

} // namespace detail

// ROC-AUC in the Mann-Whitney formulation: over all (positive, negative)
// pairs, credit 1 when the positive outscores the negative and 1/2 on ties.
// Computed from mid-ranks, which matches the all-pairs count exactly.
inline double roc_auc(std::span<const double> scores, std::span<const int> truths) {
    if (scores.size() != truths.size()) throw DataError("roc_auc: score/truth length mismatch");
    std::size_t n1 = 0, n0 = 0;
    for (int t : truths) (t == 1 ? n1 : n0) += 1;
    if (n1 == 0 || n0 == 0)
        throw DataError("roc_auc undefined: both classes must be present");
    const std::vector<double> ranks = detail::mid_ranks(scores);
    double rank_sum_pos = 0.0;
    for (std::size_t i = 0; i < truths.size(); ++i) {
        if (truths[i] == 1) rank_sum_pos += ranks[i];
    }
    const double u = rank_sum_pos - static_cast<double>(n1) * (static_cast<double>(n1) + 1.0) / 2.0;
    return u / (static_cast<double>(n1) * static_cast<double>(n0));
}

// --- chi-square tail via the regularized incomplete gamma function ---

namespace detail {

// Series expansion of P(a, x); converges fast for x < a + 1.
inline double gamma_p_series(double a, double x) {
    const double gln = std::lgamma(a);
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 1000; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * std::numeric_limits<double>::epsilon())
            break;
    }
    return sum * std::exp(-x + a * std::log(x) - gln);
}

// Continued fraction for Q(a, x); converges fast for x >= a + 1.
inline double gamma_q_cf(double a, double x) {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    const double fpmin = std::numeric_limits<double>::min() / eps;
    const double gln = std::lgamma(a);
    double b = x + 1.0 - a;
    double c = 1.0 / fpmin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 1000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) <= eps) break;
    }
    return std::exp(-x + a * std::log(x) - gln) * h;
}

} // namespace detail

// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
inline double gamma_q(double a, double x) {
    if (a <= 0 || x < 0) throw DataError("gamma_q: requires a > 0 and x >= 0");
    if (x == 0) return 1.0;
    if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
    return detail::gamma_q_cf(a, x);
}

// Upper-tail probability of the chi-square distribution.
inline double chi_square_sf(double x, int df) {
    if (x < 0) throw DataError("chi_square_sf: x must be >= 0");
    if (df < 1) throw DataError("chi_square_sf: df must be >= 1");
    return gamma_q(static_cast<double>(df) / 2.0, x / 2.0);
}

// --- Friedman test ---

struct FriedmanResult {
    double statistic = 0.0;
    int df = 0;
    double p_value = 1.0;
    bool significant = false;
};

// fold_scores[group][fold]; groups are ranked within each fold with
// mid-ranks, and the chi-square statistic carries the standard tie
// correction. Fully tied data is defined as statistic 0, p = 1.
inline FriedmanResult friedman_test(const std::vector<std::vector<double>>& fold_scores) {
    const std::size_t k = fold_scores.size();
    if (k < 2) throw DataError("friedman_test: need at least 2 groups");
    const std::size_t n = fold_scores[0].size();
    if (n < 2) throw DataError("friedman_test: need at least 2 folds");
    for (const auto& g : fold_scores) {
        if (g.size() != n) throw DataError("friedman_test: unequal fold counts");
    }

    std::vector<double> rank_sums(k, 0.0);
    double tie_term = 0.0; // sum over folds of sum(t^3 - t) per tie group
    std::vector<double> column(k);
    for (std::size_t f = 0; f < n; ++f) {
        for (std::size_t g = 0; g < k; ++g) column[g] = fold_scores[g][f];
        const std::vector<double> ranks = detail::mid_ranks(column);
        for (std::size_t g = 0; g < k; ++g) rank_sums[g] += ranks[g];

        std::vector<double> sorted(column);
        std::sort(sorted.begin(), sorted.end());
        std::size_t i = 0;
        while (i < k) {
            std::size_t j = i;
            while (j + 1 < k && sorted[j + 1] == sorted[i]) ++j;
            const double t = static_cast<double>(j - i + 1);
            tie_term += t * t * t - t;
            i = j + 1;
        }
    }

    const double kn = static_cast<double>(k);
    const double nn = static_cast<double>(n);
    double sum_r2 = 0.0;
    for (double r : rank_sums) sum_r2 += r * r;
    const double raw = 12.0 / (nn * kn * (kn + 1.0)) * sum_r2 - 3.0 * nn * (kn + 1.0);
    const double correction = 1.0 - tie_term / (nn * kn * (kn * kn - 1.0));

    FriedmanResult res;
    res.df = static_cast<int>(k) - 1;
    if (correction <= 0.0) {
        res.statistic = 0.0;
        res.p_value = 1.0;
    } else {
        res.statistic = std::max(0.0, raw / correction);
        res.p_value = chi_square_sf(res.statistic, res.df);
    }
    res.significant = res.p_value <= 0.05;
    return res;
}

struct PairwiseFriedman {
    std::vector<std::string> models;
    std::vector<std::vector<double>> p_values;   // symmetric, diagonal 1
    std::vector<std::vector<double>> statistics; // symmetric, diagonal 0
};

inline PairwiseFriedman pairwise_friedman(const std::map<std::string, std::vector<double>>& fold_scores) {
    PairwiseFriedman out;
    for (const auto& [name, _] : fold_scores) out.models.push_back(name);
    const std::size_t m = out.models.size();
    out.p_values.assign(m, std::vector<double>(m, 1.0));
    out.statistics.assign(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            const FriedmanResult r = friedman_test(
                {fold_scores.at(out.models[i]), fold_scores.at(out.models[j])});
            out.p_values[i][j] = out.p_values[j][i] = r.p_value;
            out.statistics[i][j] = out.statistics[j][i] = r.statistic;
        }
    }
    return out;
}

// --- Gaussian kernel density estimate ---

struct KdeCurve {
    std::vector<double> grid;
    std::vector<double> density;
    double bandwidth = 0.6;
};

inline double kde_value(std::span<const double> values, double bandwidth, double x) {
    if (values.empty()) throw DataError("kde: need at least one value");
    if (bandwidth <= 0) throw DataError("kde: bandwidth must be > 0");
    constexpr double inv_sqrt_2pi = 0.3989422804014327;
    double sum = 0.0;
    for (double v : values) {
        const double u = (x - v) / bandwidth;
        sum += inv_sqrt_2pi * std::exp(-0.5 * u * u);
    }
    return sum / (static_cast<double>(values.size()) * bandwidth);
}

// Evaluates the KDE on a uniform grid spanning [min - 4h, max + 4h] by
// default (512 points), which keeps the trapezoidal mass within 1e-2 of 1.
inline KdeCurve kde(std::span<const double> values, double bandwidth = 0.6,
                    std::size_t grid_points = 512,
                    std::optional<std::pair<double, double>> range = std::nullopt) {
    if (values.empty()) throw DataError("kde: need at least one value");
    if (bandwidth <= 0) throw DataError("kde: bandwidth must be > 0");
    if (grid_points < 2) throw DataError("kde: need at least 2 grid points");
    double lo, hi;
    if (range) {
        lo = range->first;
        hi = range->second;
    } else {
        const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
        lo = *mn - 4.0 * bandwidth;
        hi = *mx + 4.0 * bandwidth;
    }
    KdeCurve curve;
    curve.bandwidth = bandwidth;
    curve.grid.reserve(grid_points);
    curve.density.reserve(grid_points);
    const double step = (hi - lo) / static_cast<double>(grid_points - 1);
    for (std::size_t i = 0; i < grid_points; ++i) {
        const double x = lo + step * static_cast<double>(i);
        curve.grid.push_back(x);
        curve.density.push_back(kde_value(values, bandwidth, x));
    }
    return curve;
}

inline double trapezoid_mass(const KdeCurve& curve) {
    double mass = 0.0;
    for (std::size_t i = 1; i < curve.grid.size(); ++i) {
        mass += 0.5 * (curve.density[i] + curve.density[i - 1]) *
                (curve.grid[i] - curve.grid[i - 1]);
    }
    return mass;
}

} // namespace predtown
