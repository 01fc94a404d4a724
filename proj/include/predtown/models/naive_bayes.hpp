#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "predtown/models/core.hpp"

namespace predtown::models {

// Gaussian naive Bayes. Per-class feature variances are stabilized by
// adding var_smoothing times the largest per-feature variance of the whole
// training set; the two class posteriors come out of a softmax over
// log-densities, so they sum to 1.
class GaussianNbClassifier : public Classifier {
public:
    explicit GaussianNbClassifier(const ModelSpec& spec) : Classifier(spec) {
        var_smoothing_ = detail::get_number(spec.params, "var_smoothing", 1e-9);
        if (var_smoothing_ < 0) throw ConfigError("gnb: var_smoothing must be >= 0");
    }

    const std::array<std::vector<double>, 2>& means() const { return mean_; }
    const std::array<std::vector<double>, 2>& variances() const { return var_; }
    const std::array<double, 2>& priors() const { return prior_; }

protected:
    void do_fit(const std::vector<std::vector<double>>& x, const std::vector<int>& y) override {
        detail::require_both_classes(y, "gnb");
        const std::size_t d = x.front().size();
        std::array<std::size_t, 2> n{0, 0};
        for (int c = 0; c < 2; ++c) {
            mean_[c].assign(d, 0.0);
            var_[c].assign(d, 0.0);
        }
        for (std::size_t i = 0; i < x.size(); ++i) {
            const int c = y[i];
            ++n[c];
            for (std::size_t j = 0; j < d; ++j) mean_[c][j] += x[i][j];
        }
        for (int c = 0; c < 2; ++c) {
            for (std::size_t j = 0; j < d; ++j) mean_[c][j] /= static_cast<double>(n[c]);
            prior_[c] = static_cast<double>(n[c]) / static_cast<double>(x.size());
        }
        for (std::size_t i = 0; i < x.size(); ++i) {
            const int c = y[i];
            for (std::size_t j = 0; j < d; ++j) {
                const double dmu = x[i][j] - mean_[c][j];
                var_[c][j] += dmu * dmu;
            }
        }
        for (int c = 0; c < 2; ++c) {
            for (std::size_t j = 0; j < d; ++j) var_[c][j] /= static_cast<double>(n[c]);
        }

        // global per-feature variance, population form
        double max_global_var = 0.0;
        std::vector<double> gmean(d, 0.0);
        for (const auto& row : x) {
            for (std::size_t j = 0; j < d; ++j) gmean[j] += row[j];
        }
        for (std::size_t j = 0; j < d; ++j) gmean[j] /= static_cast<double>(x.size());
        for (std::size_t j = 0; j < d; ++j) {
            double v = 0.0;
            for (const auto& row : x) {
                const double dm = row[j] - gmean[j];
                v += dm * dm;
            }
            v /= static_cast<double>(x.size());
            max_global_var = std::max(max_global_var, v);
        }

        const double eps = var_smoothing_ * max_global_var;
        for (int c = 0; c < 2; ++c) {
            for (std::size_t j = 0; j < d; ++j) {
                var_[c][j] += eps;
                if (var_[c][j] <= 0.0)
                    throw DataError("gnb: zero variance after smoothing; data is degenerate");
            }
        }
    }

    double do_score(const std::vector<double>& x) const override {
        const std::array<double, 2> lp = {log_posterior(x, 0), log_posterior(x, 1)};
        const double m = std::max(lp[0], lp[1]);
        const double e0 = std::exp(lp[0] - m);
        const double e1 = std::exp(lp[1] - m);
        return e1 / (e0 + e1);
    }

    json save_state() const override {
        return {{"mean", mean_}, {"var", var_}, {"prior", prior_}};
    }

    void load_state(const json& state) override {
        const auto mean = state.at("mean").get<std::vector<std::vector<double>>>();
        const auto var = state.at("var").get<std::vector<std::vector<double>>>();
        const auto prior = state.at("prior").get<std::vector<double>>();
        if (mean.size() != 2 || var.size() != 2 || prior.size() != 2)
            throw DataError("gnb state must cover exactly 2 classes");
        mean_ = {mean[0], mean[1]};
        var_ = {var[0], var[1]};
        prior_ = {prior[0], prior[1]};
    }

private:
    double log_posterior(const std::vector<double>& x, int c) const {
        constexpr double log_2pi = 1.8378770664093453;
        double lp = std::log(prior_[c]);
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double d = x[j] - mean_[c][j];
            lp += -0.5 * (log_2pi + std::log(var_[c][j])) - d * d / (2.0 * var_[c][j]);
        }
        return lp;
    }

    double var_smoothing_ = 1e-9;
    std::array<std::vector<double>, 2> mean_;
    std::array<std::vector<double>, 2> var_;
    std::array<double, 2> prior_{0.0, 0.0};
};

} // namespace predtown::models
