#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "predtown/cube.hpp"
#include "predtown/errors.hpp"

namespace predtown::models {

using json = nlohmann::json;

struct ModelSpec {
    std::string family;
    json params = json::object();
    std::uint64_t seed = 0;
};

struct Prediction {
    int label = 0;
    double score = 0.0; // class-1 probability-like value in [0,1]
};

inline constexpr double kDecisionThreshold = 0.5;

namespace detail {

inline double get_number(const json& params, const char* name, double fallback) {
    if (!params.contains(name)) return fallback;
    const auto& v = params.at(name);
    if (!v.is_number()) throw ConfigError(std::string("parameter must be numeric: ") + name);
    return v.get<double>();
}

inline int get_int(const json& params, const char* name, int fallback) {
    if (!params.contains(name)) return fallback;
    const auto& v = params.at(name);
    if (!v.is_number_integer())
        throw ConfigError(std::string("parameter must be an integer: ") + name);
    return v.get<int>();
}

inline bool get_bool(const json& params, const char* name, bool fallback) {
    if (!params.contains(name)) return fallback;
    const auto& v = params.at(name);
    if (!v.is_boolean()) throw ConfigError(std::string("parameter must be a boolean: ") + name);
    return v.get<bool>();
}

inline std::string get_string(const json& params, const char* name, const std::string& fallback) {
    if (!params.contains(name)) return fallback;
    const auto& v = params.at(name);
    if (!v.is_string()) throw ConfigError(std::string("parameter must be a string: ") + name);
    return v.get<std::string>();
}

inline void check_finite(const std::vector<std::vector<double>>& x) {
    for (const auto& row : x) {
        for (double v : row) {
            if (!std::isfinite(v)) throw DataError("non-finite feature value in training data");
        }
    }
}

inline void require_both_classes(const std::vector<int>& y, const std::string& family) {
    bool has0 = false, has1 = false;
    for (int v : y) (v == 0 ? has0 : has1) = true;
    if (!has0 || !has1)
        throw DataError(family + " requires both classes in the training set");
}

} // namespace detail

// Design matrix view of a Dataset: x rows are 35-entry vectors
// (month + 34 counts), y holds the 0/1 labels.
struct DesignMatrix {
    std::vector<std::vector<double>> x;
    std::vector<int> y;
};

inline DesignMatrix design_matrix(const Dataset& ds) {
    DesignMatrix m;
    m.x.reserve(ds.rows.size());
    m.y.reserve(ds.rows.size());
    for (const auto& row : ds.rows) {
        m.x.push_back(to_feature_vector(row));
        m.y.push_back(row.label);
    }
    return m;
}

// Family-agnostic fit/score interface. Fitted instances are immutable and
// safe to share across concurrent predict calls.
class Classifier {
public:
    virtual ~Classifier() = default;

    void fit(const Dataset& train) {
        DesignMatrix m = design_matrix(train);
        fit(m.x, m.y);
    }

    void fit(const std::vector<std::vector<double>>& x, const std::vector<int>& y) {
        if (x.empty()) throw DataError("cannot fit on an empty training set");
        if (x.size() != y.size()) throw DataError("feature/label row count mismatch");
        for (int v : y) {
            if (v != 0 && v != 1) throw DataError("labels must be 0 or 1");
        }
        detail::check_finite(x);
        arity_ = x.front().size();
        for (const auto& row : x) {
            if (row.size() != arity_) throw DataError("inconsistent feature arity in training data");
        }
        train_rows_ = x.size();
        std::size_t ones = 0;
        for (int v : y) ones += v == 1;
        class_prior_ = {1.0 - static_cast<double>(ones) / static_cast<double>(y.size()),
                        static_cast<double>(ones) / static_cast<double>(y.size())};
        do_fit(x, y);
        fitted_ = true;
    }

    double score_row(const std::vector<double>& x) const {
        require_fitted();
        if (x.size() != arity_)
            throw DataError("feature arity mismatch: model expects " + std::to_string(arity_) +
                            ", got " + std::to_string(x.size()));
        return do_score(x);
    }

    Prediction predict_row(const std::vector<double>& x,
                           double threshold = kDecisionThreshold) const {
        const double s = score_row(x);
        return {s >= threshold ? 1 : 0, s};
    }

    std::vector<Prediction> predict(const std::vector<FeatureRow>& rows,
                                    double threshold = kDecisionThreshold) const {
        std::vector<Prediction> out;
        out.reserve(rows.size());
        for (const auto& row : rows) out.push_back(predict_row(to_feature_vector(row), threshold));
        return out;
    }

    std::vector<double> scores(const std::vector<FeatureRow>& rows) const {
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& row : rows) out.push_back(score_row(to_feature_vector(row)));
        return out;
    }

    const ModelSpec& spec() const { return spec_; }
    std::size_t arity() const { return arity_; }
    std::size_t train_rows() const { return train_rows_; }
    const std::array<double, 2>& class_prior() const { return class_prior_; }
    bool fitted() const { return fitted_; }

    json save() const {
        require_fitted();
        json j;
        j["format_version"] = 1;
        j["family"] = spec_.family;
        j["params"] = spec_.params;
        j["seed"] = spec_.seed;
        j["arity"] = arity_;
        j["train_rows"] = train_rows_;
        j["class_prior"] = class_prior_;
        j["state"] = save_state();
        return j;
    }

    void load(const json& j) {
        try {
            if (j.at("format_version").get<int>() != 1)
                throw DataError("unsupported model format version");
            spec_.family = j.at("family").get<std::string>();
            spec_.params = j.at("params");
            spec_.seed = j.at("seed").get<std::uint64_t>();
            arity_ = j.at("arity").get<std::size_t>();
            train_rows_ = j.at("train_rows").get<std::size_t>();
            const auto prior = j.at("class_prior").get<std::vector<double>>();
            if (prior.size() != 2) throw DataError("class_prior must have 2 entries");
            class_prior_ = {prior[0], prior[1]};
            load_state(j.at("state"));
            fitted_ = true;
        } catch (const json::exception& e) {
            throw DataError(std::string("malformed model file: ") + e.what());
        }
    }

protected:
    explicit Classifier(ModelSpec spec) : spec_(std::move(spec)) {}

    virtual void do_fit(const std::vector<std::vector<double>>& x, const std::vector<int>& y) = 0;
    virtual double do_score(const std::vector<double>& x) const = 0;
    virtual json save_state() const = 0;
    virtual void load_state(const json& state) = 0;

    void require_fitted() const {
        if (!fitted_) throw DataError("model is not fitted");
    }

    ModelSpec spec_;

private:
    std::size_t arity_ = 0;
    std::size_t train_rows_ = 0;
    std::array<double, 2> class_prior_{0.0, 0.0};
    bool fitted_ = false;
};

using ClassifierFactory = std::function<std::unique_ptr<Classifier>(const ModelSpec&)>;

// Family registry; built-in families register at static-init time and
// external adapters can join via register_family.
inline std::map<std::string, ClassifierFactory>& family_registry() {
    static std::map<std::string, ClassifierFactory> reg;
    return reg;
}

inline void register_family(const std::string& family, ClassifierFactory factory) {
    family_registry()[family] = std::move(factory);
}

inline std::unique_ptr<Classifier> make_classifier(const ModelSpec& spec) {
    const auto it = family_registry().find(spec.family);
    if (it == family_registry().end())
        throw ConfigError("unknown model family: " + spec.family);
    return it->second(spec);
}

inline std::unique_ptr<Classifier> load_classifier(const json& j) {
    ModelSpec spec;
    try {
        spec.family = j.at("family").get<std::string>();
        spec.params = j.at("params");
        spec.seed = j.at("seed").get<std::uint64_t>();
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed model file: ") + e.what());
    }
    auto model = make_classifier(spec);
    model->load(j);
    return model;
}

} // namespace predtown::models
