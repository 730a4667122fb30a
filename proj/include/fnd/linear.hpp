#pragma once

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <memory>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fnd/model.hpp"
#include "fnd/sparse.hpp"
#include "fnd/util.hpp"

namespace fnd {

struct LogregConfig {
    double lambda = -1.0; // ridge strength; <0 means 1/N
    double tol = 1e-4;    // max-abs parameter step
    int max_epochs = 1000;
};

namespace detail {

// Parameter layout: [w0 (d), w1 (d), b0, b1].
inline void lr_forward(RowView row, std::span<const double> params, std::size_t d, double z[2]) {
    z[0] = params[2 * d];
    z[1] = params[2 * d + 1];
    for (std::size_t t = 0; t < row.cols.size(); ++t) {
        z[0] += params[row.cols[t]] * row.vals[t];
        z[1] += params[d + row.cols[t]] * row.vals[t];
    }
}

inline void softmax2(const double z[2], double p[2]) {
    const double m = z[0] > z[1] ? z[0] : z[1];
    const double e0 = std::exp(z[0] - m), e1 = std::exp(z[1] - m);
    p[0] = e0 / (e0 + e1);
    p[1] = e1 / (e0 + e1);
}

inline double weight_total(const std::vector<int>& y, const ClassWeights& w) {
    double s = 0.0;
    for (int v : y) s += w.at(v);
    return s;
}

} // namespace detail

// Mean weighted cross-entropy plus (lambda/2)*||W||^2; biases unregularized.
inline double lr_objective(const FeatureMatrix& X, const std::vector<int>& y,
                           const ClassWeights& weights, double lambda,
                           std::span<const double> params) {
    const std::size_t d = X.cols();
    if (params.size() != 2 * d + 2)
        throw std::invalid_argument("lr_objective: params size mismatch");
    const double S = detail::weight_total(y, weights);
    double loss = 0.0;
    for (std::size_t i = 0; i < X.rows(); ++i) {
        double z[2], p[2];
        detail::lr_forward(X.row(i), params, d, z);
        detail::softmax2(z, p);
        loss += weights.at(y[i]) * -std::log(std::max(p[y[i]], 1e-300));
    }
    double reg = 0.0;
    for (std::size_t j = 0; j < 2 * d; ++j) reg += params[j] * params[j];
    return loss / S + 0.5 * lambda * reg;
}

inline void lr_gradient(const FeatureMatrix& X, const std::vector<int>& y,
                        const ClassWeights& weights, double lambda,
                        std::span<const double> params, std::span<double> grad) {
    const std::size_t d = X.cols();
    if (params.size() != 2 * d + 2 || grad.size() != params.size())
        throw std::invalid_argument("lr_gradient: size mismatch");
    std::fill(grad.begin(), grad.end(), 0.0);
    const double S = detail::weight_total(y, weights);
    for (std::size_t i = 0; i < X.rows(); ++i) {
        const RowView row = X.row(i);
        double z[2], p[2];
        detail::lr_forward(row, params, d, z);
        detail::softmax2(z, p);
        const double wi = weights.at(y[i]);
        const double g0 = wi * (p[0] - (y[i] == 0 ? 1.0 : 0.0));
        const double g1 = wi * (p[1] - (y[i] == 1 ? 1.0 : 0.0));
        for (std::size_t t = 0; t < row.cols.size(); ++t) {
            grad[row.cols[t]] += g0 * row.vals[t];
            grad[d + row.cols[t]] += g1 * row.vals[t];
        }
        grad[2 * d] += g0;
        grad[2 * d + 1] += g1;
    }
    for (std::size_t j = 0; j < grad.size(); ++j) grad[j] /= S;
    for (std::size_t j = 0; j < 2 * d; ++j) grad[j] += lambda * params[j];
}

class LogregModel : public Model {
public:
    LogregModel(std::vector<double> w0, std::vector<double> w1, double b0, double b1,
                bool converged)
        : w0_(std::move(w0)), w1_(std::move(w1)), b0_(b0), b1_(b1), converged_(converged) {
        if (w0_.size() != w1_.size()) throw std::invalid_argument("logreg: weight size mismatch");
    }

    ModelKind kind() const override { return ModelKind::logreg; }
    std::size_t n_features() const override { return w0_.size(); }
    bool converged() const { return converged_; }

    double margin(RowView row) const {
        double z = b1_ - b0_;
        for (std::size_t t = 0; t < row.cols.size(); ++t)
            z += (w1_[row.cols[t]] - w0_[row.cols[t]]) * row.vals[t];
        return z;
    }

    int predict_row(RowView row) const override { return margin(row) > 0.0 ? 1 : 0; }

    double score_row(RowView row) const override {
        return 1.0 / (1.0 + std::exp(-margin(row)));
    }

    void save(std::ostream& os) const override {
        os << "fnd-model v1 logreg\n" << w0_.size() << ' ' << (converged_ ? 1 : 0) << '\n';
        os << std::setprecision(17);
        for (std::size_t j = 0; j < w0_.size(); ++j) os << (j ? " " : "") << w0_[j];
        os << '\n';
        for (std::size_t j = 0; j < w1_.size(); ++j) os << (j ? " " : "") << w1_[j];
        os << '\n' << b0_ << ' ' << b1_ << '\n';
    }

    static std::unique_ptr<LogregModel> load(std::istream& is) {
        std::size_t d;
        int conv;
        if (!(is >> d >> conv)) throw std::runtime_error("logreg load: bad header");
        std::vector<double> w0(d), w1(d);
        for (auto& v : w0)
            if (!(is >> v)) throw std::runtime_error("logreg load: truncated weights");
        for (auto& v : w1)
            if (!(is >> v)) throw std::runtime_error("logreg load: truncated weights");
        double b0, b1;
        if (!(is >> b0 >> b1)) throw std::runtime_error("logreg load: truncated biases");
        return std::make_unique<LogregModel>(std::move(w0), std::move(w1), b0, b1, conv != 0);
    }

private:
    std::vector<double> w0_, w1_;
    double b0_, b1_;
    bool converged_;
};

// Full-batch Nesterov descent with a fixed 1/L step; L comes from the
// softmax Hessian bound (1/(2S)) * sum_i w_i * (||x_i||^2 + 1) + lambda.
inline std::unique_ptr<LogregModel> train_logreg(const FeatureMatrix& X, const std::vector<int>& y,
                                                 const ClassWeights& weights, LogregConfig cfg,
                                                 std::vector<std::string>* warnings = nullptr) {
    if (X.rows() == 0) throw std::invalid_argument("train_logreg: empty training set");
    if (y.size() != X.rows()) throw std::invalid_argument("train_logreg: label count mismatch");
    bool has0 = false, has1 = false;
    for (int v : y) (v == 0 ? has0 : has1) = true;
    if (!has0 || !has1) throw std::invalid_argument("train_logreg: training set has a single class");

    const std::size_t d = X.cols();
    const double lambda = cfg.lambda < 0.0 ? 1.0 / static_cast<double>(X.rows()) : cfg.lambda;
    const double S = detail::weight_total(y, weights);
    double lip = lambda;
    for (std::size_t i = 0; i < X.rows(); ++i)
        lip += weights.at(y[i]) * (sparse_sqnorm(X.row(i)) + 1.0) / (2.0 * S);
    const double step = 1.0 / lip;

    std::vector<double> theta(2 * d + 2, 0.0), look = theta, grad(theta.size());
    bool converged = false;
    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        lr_gradient(X, y, weights, lambda, look, grad);
        double max_step = 0.0;
        const double momentum = (epoch - 1.0) / (epoch + 2.0);
        for (std::size_t j = 0; j < theta.size(); ++j) {
            const double next = look[j] - step * grad[j];
            const double delta = next - theta[j];
            max_step = std::max(max_step, std::fabs(delta));
            look[j] = next + momentum * delta;
            theta[j] = next;
        }
        if (max_step < cfg.tol) {
            converged = true;
            break;
        }
    }
    if (!converged)
        warn_into(warnings, "train_logreg: epoch cap " + std::to_string(cfg.max_epochs) +
                                " reached before parameter step fell below tolerance");

    std::vector<double> w0(theta.begin(), theta.begin() + d);
    std::vector<double> w1(theta.begin() + d, theta.begin() + 2 * d);
    return std::make_unique<LogregModel>(std::move(w0), std::move(w1), theta[2 * d],
                                         theta[2 * d + 1], converged);
}

} // namespace fnd
