#pragma once

#include "predtown/models/core.hpp"
#include "predtown/models/decision_tree.hpp"
#include "predtown/models/knn.hpp"
#include "predtown/models/logistic_regression.hpp"
#include "predtown/models/naive_bayes.hpp"
#include "predtown/models/random_forest.hpp"

namespace predtown::models {

inline const std::vector<std::string>& builtin_families() {
    static const std::vector<std::string> families = {"knn", "dtree", "gnb", "logreg", "rforest"};
    return families;
}

// Short tags accepted anywhere a family name is: rf, dt, nb, lr.
inline std::string canonical_family(const std::string& name) {
    static const std::map<std::string, std::string> aliases = {
        {"rf", "rforest"}, {"dt", "dtree"}, {"nb", "gnb"}, {"lr", "logreg"}};
    const auto it = aliases.find(name);
    return it != aliases.end() ? it->second : name;
}

namespace detail {

inline bool register_builtin_families() {
    register_family("knn", [](const ModelSpec& s) -> std::unique_ptr<Classifier> {
        return std::make_unique<KnnClassifier>(s);
    });
    register_family("dtree", [](const ModelSpec& s) -> std::unique_ptr<Classifier> {
        return std::make_unique<DecisionTreeClassifier>(s);
    });
    register_family("gnb", [](const ModelSpec& s) -> std::unique_ptr<Classifier> {
        return std::make_unique<GaussianNbClassifier>(s);
    });
    register_family("logreg", [](const ModelSpec& s) -> std::unique_ptr<Classifier> {
        return std::make_unique<LogisticRegressionClassifier>(s);
    });
    register_family("rforest", [](const ModelSpec& s) -> std::unique_ptr<Classifier> {
        return std::make_unique<RandomForestClassifier>(s);
    });
    return true;
}

inline const bool builtin_families_registered = register_builtin_families();

} // namespace detail

} // namespace predtown::models
