#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "predtown/models/decision_tree.hpp"

namespace predtown::models {

// Bagged ensemble of CART trees. Tree t draws every random decision
// (bootstrap rows, per-node feature subsets) from a stream derived from
// (seed, t), so the forest is schedule-invariant and a single unbagged tree
// over all features reduces exactly to DecisionTreeClassifier.
class RandomForestClassifier : public Classifier {
public:
    explicit RandomForestClassifier(const ModelSpec& spec)
        : Classifier(spec), tree_params_(tree::tree_params_from_json(spec.params)) {
        n_estimators_ = detail::get_int(spec.params, "n_estimators", 100);
        if (n_estimators_ < 1) throw ConfigError("rforest: n_estimators must be >= 1");
        bootstrap_ = detail::get_bool(spec.params, "bootstrap", true);
        max_features_mode_ = detail::get_string(spec.params, "max_features", "sqrt");
        if (max_features_mode_ != "sqrt" && max_features_mode_ != "log2" &&
            max_features_mode_ != "all")
            throw ConfigError("rforest: max_features must be sqrt, log2 or all");
    }

    const std::vector<std::unique_ptr<tree::Node>>& trees() const { return trees_; }

protected:
    void do_fit(const std::vector<std::vector<double>>& x, const std::vector<int>& y) override {
        detail::require_both_classes(y, "rforest");
        const std::size_t d = x.front().size();
        tree_params_.max_features = subset_size(d);

        trees_.clear();
        trees_.reserve(static_cast<std::size_t>(n_estimators_));
        const std::size_t n = x.size();
        for (int t = 0; t < n_estimators_; ++t) {
            Rng rng(derive_seed(spec_.seed, static_cast<std::uint64_t>(t)));
            std::vector<std::size_t> rows(n);
            if (bootstrap_) {
                for (std::size_t i = 0; i < n; ++i) rows[i] = rng.index(n);
            } else {
                for (std::size_t i = 0; i < n; ++i) rows[i] = i;
            }
            tree::TreeFitter fitter(x, y, tree_params_, rng);
            trees_.push_back(fitter.fit(rows));
        }
    }

    // Mean of the per-tree leaf scores; with trees grown to purity this is
    // the fraction of trees voting class 1.
    double do_score(const std::vector<double>& x) const override {
        double sum = 0.0;
        for (const auto& t : trees_) sum += tree::tree_score(*t, x);
        return sum / static_cast<double>(trees_.size());
    }

    json save_state() const override {
        json arr = json::array();
        for (const auto& t : trees_) arr.push_back(tree::node_to_json(*t));
        return {{"trees", arr}};
    }

    void load_state(const json& state) override {
        trees_.clear();
        for (const auto& t : state.at("trees")) trees_.push_back(tree::node_from_json(t));
        if (trees_.empty()) throw DataError("rforest state has no trees");
    }

private:
    std::size_t subset_size(std::size_t d) const {
        if (max_features_mode_ == "all") return 0; // fitter treats 0 as "all"
        const double dd = static_cast<double>(d);
        const double m = max_features_mode_ == "sqrt" ? std::sqrt(dd) : std::log2(dd);
        return std::min(d, static_cast<std::size_t>(std::ceil(m)));
    }

    tree::TreeParams tree_params_;
    int n_estimators_ = 100;
    bool bootstrap_ = true;
    std::string max_features_mode_ = "sqrt";
    std::vector<std::unique_ptr<tree::Node>> trees_;
};

} // namespace predtown::models
