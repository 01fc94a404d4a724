#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "predtown/metrics.hpp"
#include "predtown/rng.hpp"

using namespace predtown;

TEST_CASE("accuracy basics", "[metrics]") {
    const std::vector<int> t = {0, 1, 1, 0};
    CHECK(accuracy(std::vector<int>{0, 1, 1, 0}, t) == 1.0);
    CHECK(accuracy(std::vector<int>{1, 0, 0, 1}, t) == 0.0);
    CHECK(accuracy(std::vector<int>{0, 1, 0, 1}, t) == 0.5);
    CHECK_THROWS_AS(accuracy(std::vector<int>{}, std::vector<int>{}), DataError);
}

TEST_CASE("confusion counts, normalizes and flags degenerate rows", "[metrics]") {
    const std::vector<int> truths = {0, 0, 1, 1};
    const auto perfect = confusion(truths, truths);
    CHECK(perfect.tn == 2);
    CHECK(perfect.tp == 2);
    CHECK(perfect.row_normalized[0][0] == 1.0);
    CHECK(perfect.row_normalized[1][1] == 1.0);

    const auto m = confusion(std::vector<int>{0, 1, 0, 1}, truths);
    CHECK(m.total() == 4);
    CHECK(m.row_normalized[0][0] + m.row_normalized[0][1] == 1.0);
    CHECK(m.row_normalized[1][0] + m.row_normalized[1][1] == 1.0);
    // accuracy is recomputable from the matrix
    CHECK(static_cast<double>(m.tn + m.tp) / static_cast<double>(m.total()) ==
          accuracy(std::vector<int>{0, 1, 0, 1}, truths));

    const auto degenerate = confusion(std::vector<int>{1, 1}, std::vector<int>{1, 1});
    CHECK_FALSE(degenerate.row_valid[0]);
    CHECK(degenerate.row_valid[1]);
}

TEST_CASE("roc_auc matches the worked example and edge cases", "[metrics]") {
    const std::vector<int> truths = {0, 0, 1, 1};
    CHECK(roc_auc(std::vector<double>{0.1, 0.4, 0.35, 0.8}, truths) == 0.75);
    CHECK(roc_auc(std::vector<double>{0.1, 0.2, 0.8, 0.9}, truths) == 1.0);
    CHECK(roc_auc(std::vector<double>{0.5, 0.5, 0.5, 0.5}, truths) == 0.5);
    CHECK_THROWS_AS(roc_auc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}), DataError);
}

TEST_CASE("roc_auc equals the all-pairs oracle exactly", "[metrics]") {
    Rng rng(4242);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng.index(49);
        std::vector<double> scores(n);
        std::vector<int> truths(n);
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = static_cast<double>(rng.index(8)) / 7.0; // deliberate ties
            truths[i] = static_cast<int>(rng.index(2));
        }
        truths[0] = 0;
        truths[n - 1] = 1;
        CHECK(roc_auc(scores, truths) == oracles::brute_force_auc(scores, truths));
    }
}

TEST_CASE("roc_auc complement symmetry without ties", "[metrics]") {
    Rng rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 4 + rng.index(30);
        std::vector<double> scores(n);
        std::vector<int> truths(n);
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = (static_cast<double>(i) + rng.unit() * 0.5) / static_cast<double>(n);
            truths[i] = static_cast<int>(rng.index(2));
        }
        truths[0] = 0;
        truths[n - 1] = 1;
        std::vector<double> complement(n);
        for (std::size_t i = 0; i < n; ++i) complement[i] = 1.0 - scores[i];
        CHECK(roc_auc(complement, truths) == Catch::Approx(1.0 - roc_auc(scores, truths)).margin(1e-15));
    }
}

TEST_CASE("friedman on 2 groups x 7 folds", "[metrics]") {
    SECTION("all wins is significant") {
        std::vector<std::vector<double>> scores = {{2, 2, 2, 2, 2, 2, 2}, {1, 1, 1, 1, 1, 1, 1}};
        const auto res = friedman_test(scores);
        CHECK(res.statistic == Catch::Approx(7.0).margin(1e-12));
        CHECK(res.df == 1);
        CHECK(res.p_value == Catch::Approx(0.008150971593502700).margin(1e-9));
        CHECK(res.significant);
    }
    SECTION("full tie is defined as zero") {
        std::vector<std::vector<double>> scores = {{1, 2, 3, 4, 5, 6, 7}, {1, 2, 3, 4, 5, 6, 7}};
        const auto res = friedman_test(scores);
        CHECK(res.statistic == 0.0);
        CHECK(res.p_value == 1.0);
        CHECK_FALSE(res.significant);
    }
    SECTION("4-3 split is not significant") {
        std::vector<std::vector<double>> scores = {{2, 2, 2, 2, 1, 1, 1}, {1, 1, 1, 1, 2, 2, 2}};
        const auto res = friedman_test(scores);
        CHECK(res.statistic == Catch::Approx(1.0 / 7.0).margin(1e-12));
        CHECK_FALSE(res.significant);
    }
}

TEST_CASE("friedman is rank-based and symmetric", "[metrics]") {
    Rng rng(99);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t folds = 3 + rng.index(6);
        std::vector<std::vector<double>> scores(3, std::vector<double>(folds));
        for (auto& g : scores)
            for (auto& v : g) v = rng.unit();

        const auto base = friedman_test(scores);

        // strictly increasing transform per fold leaves ranks unchanged
        auto transformed = scores;
        for (std::size_t f = 0; f < folds; ++f) {
            const double shift = rng.unit() * 3.0;
            for (auto& g : transformed) g[f] = std::exp(g[f]) + shift;
        }
        const auto after = friedman_test(transformed);
        CHECK(after.statistic == Catch::Approx(base.statistic).margin(1e-12));
        CHECK(after.p_value == Catch::Approx(base.p_value).margin(1e-12));

        // swapping two groups changes nothing
        auto swapped = scores;
        std::swap(swapped[0], swapped[2]);
        const auto sw = friedman_test(swapped);
        CHECK(sw.statistic == Catch::Approx(base.statistic).margin(1e-12));
    }
}

TEST_CASE("pairwise friedman produces a symmetric matrix", "[metrics]") {
    std::map<std::string, std::vector<double>> scores = {
        {"a", {0.9, 0.8, 0.85, 0.9, 0.95, 0.88, 0.91}},
        {"b", {0.7, 0.6, 0.65, 0.7, 0.75, 0.68, 0.71}},
        {"c", {0.9, 0.8, 0.85, 0.9, 0.95, 0.88, 0.91}},
    };
    const auto res = pairwise_friedman(scores);
    REQUIRE(res.models == std::vector<std::string>{"a", "b", "c"});
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(res.p_values[i][i] == 1.0);
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK(res.p_values[i][j] == res.p_values[j][i]);
        }
    }
    CHECK(res.p_values[0][2] == 1.0); // identical score vectors
    CHECK(res.p_values[0][1] < 0.05); // a dominates b on every fold
}

TEST_CASE("chi_square_sf reference values", "[metrics]") {
    CHECK(chi_square_sf(0.0, 1) == 1.0);
    CHECK(chi_square_sf(3.841459, 1) == Catch::Approx(0.05).margin(1e-6));
    CHECK(chi_square_sf(7.0, 1) == Catch::Approx(0.008151).margin(1e-6));
    CHECK(chi_square_sf(4.605170, 2) == Catch::Approx(0.1).margin(1e-6));
    CHECK_THROWS_AS(chi_square_sf(-1.0, 1), DataError);
    CHECK_THROWS_AS(chi_square_sf(1.0, 0), DataError);
}

TEST_CASE("chi_square_sf agrees with the integration oracle", "[metrics]") {
    for (const int df : {1, 2, 3, 5, 10, 20}) {
        for (const double x : {0.1, 0.5, 1.0, 3.0, 7.0, 15.0, 40.0, 100.0}) {
            const double expected = oracles::chi_square_sf_integral(x, df);
            CHECK(chi_square_sf(x, df) == Catch::Approx(expected).margin(1e-10));
        }
    }
}

TEST_CASE("kde peak, positivity and mass", "[metrics]") {
    const double h = 0.6;
    const double peak = 1.0 / (h * std::sqrt(2.0 * std::acos(-1.0)));
    CHECK(kde_value(std::vector<double>{0.8}, h, 0.8) == Catch::Approx(peak).margin(1e-12));

    const auto curve = kde(std::vector<double>{0.8}, h);
    CHECK(curve.grid.size() == 512);
    for (double d : curve.density) CHECK(d >= 0.0);
    CHECK(trapezoid_mass(curve) == Catch::Approx(1.0).margin(1e-2));

    CHECK_THROWS_AS(kde(std::vector<double>{}, h), DataError);
    CHECK_THROWS_AS(kde(std::vector<double>{0.5}, 0.0), DataError);
}

TEST_CASE("kde mass is 1 for random inputs", "[metrics]") {
    Rng rng(2025);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<double> vals(1 + rng.index(20));
        for (auto& v : vals) v = rng.unit();
        CHECK(trapezoid_mass(kde(vals, 0.6)) == Catch::Approx(1.0).margin(1e-2));
    }
}
