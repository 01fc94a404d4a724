#pragma once

#include <cmath>
#include <vector>

#include "predtown/models/core.hpp"

namespace predtown::models {

namespace logreg {

inline double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + e^z) without overflow
inline double softplus(double z) {
    if (z > 0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

struct LossGradient {
    double loss = 0.0;
    std::vector<double> grad_w;
    double grad_b = 0.0;
};

// Mean logistic loss plus L2 penalty (1 / (2 c n)) * ||w||^2; the bias is
// unpenalized.
inline LossGradient loss_and_gradient(const std::vector<std::vector<double>>& x,
                                      const std::vector<int>& y,
                                      const std::vector<double>& w, double b, double c) {
    const std::size_t n = x.size();
    const std::size_t d = w.size();
    LossGradient out;
    out.grad_w.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double z = b;
        for (std::size_t j = 0; j < d; ++j) z += w[j] * x[i][j];
        out.loss += softplus(z) - static_cast<double>(y[i]) * z;
        const double r = sigmoid(z) - static_cast<double>(y[i]);
        for (std::size_t j = 0; j < d; ++j) out.grad_w[j] += r * x[i][j];
        out.grad_b += r;
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    out.loss *= inv_n;
    out.grad_b *= inv_n;
    const double reg = 1.0 / (c * static_cast<double>(n));
    for (std::size_t j = 0; j < d; ++j) {
        out.loss += 0.5 * reg * w[j] * w[j];
        out.grad_w[j] = out.grad_w[j] * inv_n + reg * w[j];
    }
    return out;
}

} // namespace logreg

// L2-regularized logistic regression trained by deterministic full-batch
// gradient descent with Armijo backtracking. Stops when the gradient
// infinity-norm falls below 1e-6 or at max_iter.
class LogisticRegressionClassifier : public Classifier {
public:
    explicit LogisticRegressionClassifier(const ModelSpec& spec) : Classifier(spec) {
        const std::string penalty = detail::get_string(spec.params, "penalty", "l2");
        if (penalty != "l2")
            throw ConfigError("logreg: only the l2 penalty is implemented, got: " + penalty);
        c_ = detail::get_number(spec.params, "c", 1.0);
        if (c_ <= 0) throw ConfigError("logreg: c must be > 0");
        max_iter_ = detail::get_int(spec.params, "max_iter", 100);
        if (max_iter_ < 1) throw ConfigError("logreg: max_iter must be >= 1");
        // solver is accepted for grid compatibility; the optimizer here is
        // always the deterministic batch one.
        detail::get_string(spec.params, "solver", "batch-gd");
    }

    const std::vector<double>& weights() const { return w_; }
    double bias() const { return b_; }
    const std::vector<double>& loss_history() const { return loss_history_; }

protected:
    void do_fit(const std::vector<std::vector<double>>& x, const std::vector<int>& y) override {
        detail::require_both_classes(y, "logreg");
        const std::size_t d = x.front().size();
        w_.assign(d, 0.0);
        b_ = 0.0;
        loss_history_.clear();

        constexpr double grad_tol = 1e-6;
        constexpr double armijo = 1e-4;
        auto lg = logreg::loss_and_gradient(x, y, w_, b_, c_);
        if (!std::isfinite(lg.loss)) throw DataError("logreg: non-finite loss");
        loss_history_.push_back(lg.loss);

        double step = 1.0;
        for (int iter = 0; iter < max_iter_; ++iter) {
            double gmax = std::fabs(lg.grad_b);
            double gnorm2 = lg.grad_b * lg.grad_b;
            for (double g : lg.grad_w) {
                gmax = std::max(gmax, std::fabs(g));
                gnorm2 += g * g;
            }
            if (gmax < grad_tol) break;

            // backtracking line search along the negative gradient
            std::vector<double> w_next(d);
            double b_next = 0.0;
            logreg::LossGradient next;
            double alpha = std::min(step * 2.0, 1.0);
            bool accepted = false;
            for (int half = 0; half < 60; ++half) {
                for (std::size_t j = 0; j < d; ++j) w_next[j] = w_[j] - alpha * lg.grad_w[j];
                b_next = b_ - alpha * lg.grad_b;
                next = logreg::loss_and_gradient(x, y, w_next, b_next, c_);
                if (std::isfinite(next.loss) && next.loss <= lg.loss - armijo * alpha * gnorm2) {
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
            if (!accepted) break; // step underflow: numerically converged
            w_ = std::move(w_next);
            b_ = b_next;
            lg = std::move(next);
            step = alpha;
            loss_history_.push_back(lg.loss);
            if (!std::isfinite(lg.loss)) throw DataError("logreg: non-finite loss");
        }
    }

    double do_score(const std::vector<double>& x) const override {
        double z = b_;
        for (std::size_t j = 0; j < x.size(); ++j) z += w_[j] * x[j];
        return logreg::sigmoid(z);
    }

    json save_state() const override {
        return {{"weights", w_}, {"bias", b_}};
    }

    void load_state(const json& state) override {
        w_ = state.at("weights").get<std::vector<double>>();
        b_ = state.at("bias").get<double>();
    }

private:
    double c_ = 1.0;
    int max_iter_ = 100;
    std::vector<double> w_;
    double b_ = 0.0;
    std::vector<double> loss_history_;
};

} // namespace predtown::models
