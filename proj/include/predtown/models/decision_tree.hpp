#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "predtown/models/core.hpp"
#include "predtown/rng.hpp"

namespace predtown::models {

namespace tree {

enum class Criterion { Gini, Entropy };
enum class Splitter { Best, Random };

inline Criterion criterion_from_string(const std::string& s) {
    if (s == "gini") return Criterion::Gini;
    if (s == "entropy") return Criterion::Entropy;
    throw ConfigError("tree: criterion must be gini or entropy, got: " + s);
}

inline Splitter splitter_from_string(const std::string& s) {
    if (s == "best") return Splitter::Best;
    if (s == "random") return Splitter::Random;
    throw ConfigError("tree: splitter must be best or random, got: " + s);
}

inline double impurity(Criterion crit, std::int64_t c0, std::int64_t c1) {
    const std::int64_t n = c0 + c1;
    if (n == 0) return 0.0;
    const double p0 = static_cast<double>(c0) / static_cast<double>(n);
    const double p1 = static_cast<double>(c1) / static_cast<double>(n);
    if (crit == Criterion::Gini) return 1.0 - p0 * p0 - p1 * p1;
    double h = 0.0;
    if (p0 > 0) h -= p0 * std::log2(p0);
    if (p1 > 0) h -= p1 * std::log2(p1);
    return h;
}

struct Node {
    int feature = -1; // -1: leaf
    double threshold = 0.0;
    std::array<std::int64_t, 2> counts{0, 0};
    double node_impurity = 0.0;
    std::unique_ptr<Node> left;
    std::unique_ptr<Node> right;

    bool is_leaf() const { return feature < 0; }

    double score() const {
        const std::int64_t n = counts[0] + counts[1];
        return n == 0 ? 0.0 : static_cast<double>(counts[1]) / static_cast<double>(n);
    }
};

struct TreeParams {
    Criterion criterion = Criterion::Gini;
    Splitter splitter = Splitter::Best;
    std::optional<int> max_depth;
    int min_samples_split = 2;
    int min_samples_leaf = 1;
    double ccp_alpha = 0.0;
    std::size_t max_features = 0; // 0: consider all features at each node
};

struct SplitChoice {
    int feature = -1;
    double threshold = 0.0;
    double decrease = 0.0;
};

// Best legal split of one feature over the node rows. Candidate thresholds
// are midpoints of consecutive distinct sorted values; a split is legal when
// both children reach min_samples_leaf. Ties keep the lowest threshold.
inline SplitChoice best_split_of_feature(const std::vector<std::vector<double>>& x,
                                         const std::vector<int>& y,
                                         const std::vector<std::size_t>& rows, int feature,
                                         Criterion crit, int min_samples_leaf) {
    const std::size_t n = rows.size();
    std::vector<std::pair<double, int>> vals;
    vals.reserve(n);
    for (std::size_t r : rows) vals.emplace_back(x[r][static_cast<std::size_t>(feature)], y[r]);
    std::sort(vals.begin(), vals.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    std::array<std::int64_t, 2> total{0, 0};
    for (const auto& [_, label] : vals) ++total[static_cast<std::size_t>(label)];
    const double parent = impurity(crit, total[0], total[1]);
    const double nd = static_cast<double>(n);

    SplitChoice best;
    std::array<std::int64_t, 2> left{0, 0};
    for (std::size_t i = 0; i + 1 < n; ++i) {
        ++left[static_cast<std::size_t>(vals[i].second)];
        if (vals[i].first == vals[i + 1].first) continue;
        const std::int64_t nl = static_cast<std::int64_t>(i) + 1;
        const std::int64_t nr = static_cast<std::int64_t>(n) - nl;
        if (nl < min_samples_leaf || nr < min_samples_leaf) continue;
        const double imp_l = impurity(crit, left[0], left[1]);
        const double imp_r = impurity(crit, total[0] - left[0], total[1] - left[1]);
        const double children =
            (static_cast<double>(nl) * imp_l + static_cast<double>(nr) * imp_r) / nd;
        const double decrease = parent - children;
        if (decrease > best.decrease) {
            best = {feature, (vals[i].first + vals[i + 1].first) / 2.0, decrease};
        }
    }
    return best;
}

class TreeFitter {
public:
    TreeFitter(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
               const TreeParams& params, Rng& rng)
        : x_(x), y_(y), params_(params), rng_(rng),
          n_features_(x.empty() ? 0 : x.front().size()) {}

    std::unique_ptr<Node> fit(const std::vector<std::size_t>& rows) {
        root_rows_ = static_cast<double>(rows.size());
        auto root = build(rows, 0);
        if (params_.ccp_alpha > 0) prune(*root);
        return root;
    }

private:
    std::unique_ptr<Node> build(const std::vector<std::size_t>& rows, int depth) {
        auto node = std::make_unique<Node>();
        for (std::size_t r : rows) ++node->counts[static_cast<std::size_t>(y_[r])];
        node->node_impurity = impurity(params_.criterion, node->counts[0], node->counts[1]);

        const bool depth_ok = !params_.max_depth || depth < *params_.max_depth;
        if (!depth_ok || node->node_impurity <= 0.0 ||
            rows.size() < static_cast<std::size_t>(params_.min_samples_split)) {
            return node;
        }

        const SplitChoice choice = choose_split(rows);
        if (choice.feature < 0 || choice.decrease <= 0.0) return node; // no improving split

        std::vector<std::size_t> left_rows, right_rows;
        for (std::size_t r : rows) {
            (x_[r][static_cast<std::size_t>(choice.feature)] <= choice.threshold ? left_rows
                                                                                 : right_rows)
                .push_back(r);
        }
        node->feature = choice.feature;
        node->threshold = choice.threshold;
        node->left = build(left_rows, depth + 1);
        node->right = build(right_rows, depth + 1);
        return node;
    }

    SplitChoice choose_split(const std::vector<std::size_t>& rows) {
        std::vector<std::size_t> candidates;
        if (params_.max_features > 0 && params_.max_features < n_features_) {
            candidates = rng_.sample_without_replacement(n_features_, params_.max_features);
            std::sort(candidates.begin(), candidates.end());
        } else {
            candidates.resize(n_features_);
            for (std::size_t i = 0; i < n_features_; ++i) candidates[i] = i;
        }

        if (params_.splitter == Splitter::Random) {
            const std::size_t f = candidates[rng_.index(candidates.size())];
            return best_split_of_feature(x_, y_, rows, static_cast<int>(f), params_.criterion,
                                         params_.min_samples_leaf);
        }

        SplitChoice best;
        for (std::size_t f : candidates) {
            const SplitChoice c = best_split_of_feature(x_, y_, rows, static_cast<int>(f),
                                                        params_.criterion,
                                                        params_.min_samples_leaf);
            if (c.feature >= 0 && c.decrease > best.decrease) best = c;
        }
        return best;
    }

    // Minimal cost-complexity pruning: repeatedly collapse the weakest link
    // while its effective alpha is at most ccp_alpha. Node risk is the
    // impurity weighted by the node's share of the training rows.
    struct SubtreeCost {
        double leaves_risk = 0.0;
        std::size_t leaf_count = 0;
    };

    double node_risk(const Node& node) const {
        return (static_cast<double>(node.counts[0] + node.counts[1]) / root_rows_) *
               node.node_impurity;
    }

    SubtreeCost subtree_cost(const Node& node) const {
        if (node.is_leaf()) return {node_risk(node), 1};
        const SubtreeCost l = subtree_cost(*node.left);
        const SubtreeCost r = subtree_cost(*node.right);
        return {l.leaves_risk + r.leaves_risk, l.leaf_count + r.leaf_count};
    }

    Node* weakest_link(Node& node, double& min_alpha) {
        if (node.is_leaf()) return nullptr;
        Node* best = nullptr;
        const SubtreeCost cost = subtree_cost(node);
        const double alpha = (node_risk(node) - cost.leaves_risk) /
                             static_cast<double>(cost.leaf_count - 1);
        if (alpha < min_alpha) {
            min_alpha = alpha;
            best = &node;
        }
        for (Node* child : {node.left.get(), node.right.get()}) {
            double child_alpha = min_alpha;
            if (Node* cand = weakest_link(*child, child_alpha); cand && child_alpha < min_alpha) {
                min_alpha = child_alpha;
                best = cand;
            }
        }
        return best;
    }

    void prune(Node& root) {
        while (!root.is_leaf()) {
            double min_alpha = std::numeric_limits<double>::infinity();
            Node* link = weakest_link(root, min_alpha);
            if (!link || min_alpha > params_.ccp_alpha) break;
            link->feature = -1;
            link->left.reset();
            link->right.reset();
        }
    }

    const std::vector<std::vector<double>>& x_;
    const std::vector<int>& y_;
    TreeParams params_;
    Rng& rng_;
    std::size_t n_features_;
    double root_rows_ = 1.0;
};

inline double tree_score(const Node& node, const std::vector<double>& x) {
    const Node* cur = &node;
    while (!cur->is_leaf()) {
        cur = x[static_cast<std::size_t>(cur->feature)] <= cur->threshold ? cur->left.get()
                                                                          : cur->right.get();
    }
    return cur->score();
}

inline int tree_depth(const Node& node) {
    if (node.is_leaf()) return 0;
    return 1 + std::max(tree_depth(*node.left), tree_depth(*node.right));
}

inline nlohmann::json node_to_json(const Node& node) {
    nlohmann::json j;
    j["counts"] = node.counts;
    if (!node.is_leaf()) {
        j["feature"] = node.feature;
        j["threshold"] = node.threshold;
        j["left"] = node_to_json(*node.left);
        j["right"] = node_to_json(*node.right);
    }
    return j;
}

inline std::unique_ptr<Node> node_from_json(const nlohmann::json& j) {
    auto node = std::make_unique<Node>();
    const auto counts = j.at("counts").get<std::vector<std::int64_t>>();
    if (counts.size() != 2) throw DataError("tree node counts must have 2 entries");
    node->counts = {counts[0], counts[1]};
    if (j.contains("feature")) {
        node->feature = j.at("feature").get<int>();
        node->threshold = j.at("threshold").get<double>();
        node->left = node_from_json(j.at("left"));
        node->right = node_from_json(j.at("right"));
    }
    return node;
}

inline TreeParams tree_params_from_json(const nlohmann::json& params) {
    TreeParams p;
    p.criterion = criterion_from_string(detail::get_string(params, "criterion", "gini"));
    p.splitter = splitter_from_string(detail::get_string(params, "splitter", "best"));
    if (params.contains("max_depth") && !params.at("max_depth").is_null()) {
        const int depth = detail::get_int(params, "max_depth", 0);
        if (depth < 1) throw ConfigError("tree: max_depth must be >= 1");
        p.max_depth = depth;
    }
    p.min_samples_split = detail::get_int(params, "min_samples_split", 2);
    if (p.min_samples_split < 2) throw ConfigError("tree: min_samples_split must be >= 2");
    p.min_samples_leaf = detail::get_int(params, "min_samples_leaf", 1);
    if (p.min_samples_leaf < 1) throw ConfigError("tree: min_samples_leaf must be >= 1");
    p.ccp_alpha = detail::get_number(params, "ccp_alpha", 0.0);
    if (p.ccp_alpha < 0) throw ConfigError("tree: ccp_alpha must be >= 0");
    return p;
}

} // namespace tree

// CART-style binary decision tree over the 35-entry feature vector.
class DecisionTreeClassifier : public Classifier {
public:
    explicit DecisionTreeClassifier(const ModelSpec& spec)
        : Classifier(spec), params_(tree::tree_params_from_json(spec.params)) {}

    const tree::Node* root() const { return root_.get(); }
    const tree::TreeParams& tree_params() const { return params_; }

protected:
    void do_fit(const std::vector<std::vector<double>>& x, const std::vector<int>& y) override {
        detail::require_both_classes(y, "dtree");
        std::vector<std::size_t> rows(x.size());
        for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
        // stream 0 so a one-tree forest with the same seed grows the same tree
        Rng rng(derive_seed(spec_.seed, 0));
        tree::TreeFitter fitter(x, y, params_, rng);
        root_ = fitter.fit(rows);
    }

    double do_score(const std::vector<double>& x) const override {
        return tree::tree_score(*root_, x);
    }

    json save_state() const override { return {{"tree", tree::node_to_json(*root_)}}; }

    void load_state(const json& state) override {
        root_ = tree::node_from_json(state.at("tree"));
    }

private:
    tree::TreeParams params_;
    std::unique_ptr<tree::Node> root_;
};

} // namespace predtown::models
