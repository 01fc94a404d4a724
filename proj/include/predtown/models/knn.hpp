#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "predtown/models/core.hpp"

namespace predtown::models {

// Exact brute-force k-nearest-neighbors. At the couple of thousand rows this
// dataset has, spatial indexing buys nothing; the leaf_size and algorithm
// parameters are accepted for grid compatibility and ignored.
class KnnClassifier : public Classifier {
public:
    explicit KnnClassifier(const ModelSpec& spec) : Classifier(spec) {
        k_ = detail::get_int(spec.params, "n_neighbors", 5);
        if (k_ < 1) throw ConfigError("knn: n_neighbors must be >= 1");
        const std::string metric = detail::get_string(spec.params, "metric", "minkowski");
        // 'str' and 'callable' appear in grid files as aliases of the default.
        if (metric != "minkowski" && metric != "str" && metric != "callable")
            throw ConfigError("knn: unsupported metric: " + metric);
        p_ = detail::get_number(spec.params, "p", 2.0);
        if (p_ < 1.0) throw ConfigError("knn: p must be >= 1");
    }

    // Indices of the k nearest training rows, distance ties broken by the
    // stable row key (training order).
    std::vector<std::size_t> neighbors(const std::vector<double>& query) const {
        std::vector<std::pair<double, std::size_t>> dist;
        dist.reserve(x_.size());
        for (std::size_t i = 0; i < x_.size(); ++i) {
            dist.emplace_back(minkowski_pow(x_[i], query), i);
        }
        std::sort(dist.begin(), dist.end());
        std::vector<std::size_t> out;
        out.reserve(static_cast<std::size_t>(k_));
        for (int i = 0; i < k_; ++i) out.push_back(dist[static_cast<std::size_t>(i)].second);
        return out;
    }

    int k() const { return k_; }
    double p() const { return p_; }

protected:
    void do_fit(const std::vector<std::vector<double>>& x, const std::vector<int>& y) override {
        if (static_cast<std::size_t>(k_) > x.size())
            throw DataError("knn: n_neighbors exceeds training size");
        x_ = x;
        y_ = y;
    }

    double do_score(const std::vector<double>& x) const override {
        const auto nn = neighbors(x);
        std::size_t ones = 0;
        for (std::size_t idx : nn) ones += y_[idx] == 1;
        return static_cast<double>(ones) / static_cast<double>(nn.size());
    }

    json save_state() const override {
        return {{"x", x_}, {"y", y_}};
    }

    void load_state(const json& state) override {
        x_ = state.at("x").get<std::vector<std::vector<double>>>();
        y_ = state.at("y").get<std::vector<int>>();
    }

private:
    // Sum |dx|^p without the final root; monotone in the true distance, so
    // neighbor order is unchanged and exact.
    double minkowski_pow(const std::vector<double>& a, const std::vector<double>& b) const {
        double s = 0.0;
        if (p_ == 2.0) {
            for (std::size_t i = 0; i < a.size(); ++i) {
                const double d = a[i] - b[i];
                s += d * d;
            }
        } else {
            for (std::size_t i = 0; i < a.size(); ++i) {
                s += std::pow(std::fabs(a[i] - b[i]), p_);
            }
        }
        return s;
    }

    int k_ = 5;
    double p_ = 2.0;
    std::vector<std::vector<double>> x_;
    std::vector<int> y_;
};

} // namespace predtown::models
