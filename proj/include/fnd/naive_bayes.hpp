#pragma once

#include <cmath>
#include <iomanip>
#include <istream>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fnd/model.hpp"
#include "fnd/sparse.hpp"
#include "fnd/util.hpp"

namespace fnd {

namespace detail {

inline void nb_count_check(const FeatureMatrix& X, const std::vector<int>& y, double alpha,
                           const char* who) {
    if (X.rows() == 0) throw std::invalid_argument(std::string(who) + ": empty training set");
    if (y.size() != X.rows()) throw std::invalid_argument(std::string(who) + ": label count mismatch");
    if (!(alpha > 0.0)) throw std::invalid_argument(std::string(who) + ": alpha must be positive");
    bool has0 = false, has1 = false;
    for (int v : y) (v == 0 ? has0 : has1) = true;
    if (!has0 || !has1)
        throw std::invalid_argument(std::string(who) + ": training set has a single class");
}

// log(exp(a) - shifted) partition for two log-joints: P(1) = 1/(1+exp(j0-j1)).
inline double posterior1(double j0, double j1) { return 1.0 / (1.0 + std::exp(j0 - j1)); }

inline void write_row(std::ostream& os, const std::vector<double>& v) {
    for (std::size_t j = 0; j < v.size(); ++j) os << (j ? " " : "") << v[j];
    os << '\n';
}

inline void read_row(std::istream& is, std::vector<double>& v, const char* who) {
    for (auto& x : v)
        if (!(is >> x)) throw std::runtime_error(std::string(who) + " load: truncated row");
}

} // namespace detail

// Multinomial naive Bayes over raw feature totals with Lidstone smoothing:
// loglik[c][j] = log(count_cj + alpha) - log(total_c + alpha*d).
class MultinomialNB : public Model {
public:
    MultinomialNB(std::vector<double> lp, std::vector<double> ll0, std::vector<double> ll1)
        : log_prior_{lp.at(0), lp.at(1)}, ll0_(std::move(ll0)), ll1_(std::move(ll1)) {
        if (ll0_.size() != ll1_.size()) throw std::invalid_argument("mnb: loglik size mismatch");
    }

    ModelKind kind() const override { return ModelKind::mnb; }
    std::size_t n_features() const override { return ll0_.size(); }

    double log_joint(RowView row, int cls) const {
        const std::vector<double>& ll = cls == 0 ? ll0_ : ll1_;
        double s = log_prior_[cls];
        for (std::size_t t = 0; t < row.cols.size(); ++t) s += row.vals[t] * ll[row.cols[t]];
        return s;
    }

    int predict_row(RowView row) const override {
        return log_joint(row, 1) > log_joint(row, 0) ? 1 : 0;
    }

    double score_row(RowView row) const override {
        return detail::posterior1(log_joint(row, 0), log_joint(row, 1));
    }

    void save(std::ostream& os) const override {
        os << "fnd-model v1 mnb\n" << ll0_.size() << '\n' << std::setprecision(17);
        os << log_prior_[0] << ' ' << log_prior_[1] << '\n';
        detail::write_row(os, ll0_);
        detail::write_row(os, ll1_);
    }

    static std::unique_ptr<MultinomialNB> load(std::istream& is) {
        std::size_t d;
        if (!(is >> d)) throw std::runtime_error("mnb load: bad header");
        std::vector<double> lp(2);
        detail::read_row(is, lp, "mnb");
        std::vector<double> ll0(d), ll1(d);
        detail::read_row(is, ll0, "mnb");
        detail::read_row(is, ll1, "mnb");
        return std::make_unique<MultinomialNB>(std::move(lp), std::move(ll0), std::move(ll1));
    }

private:
    double log_prior_[2];
    std::vector<double> ll0_, ll1_;
};

inline std::unique_ptr<MultinomialNB> train_mnb(const FeatureMatrix& X, const std::vector<int>& y,
                                                double alpha,
                                                const ClassWeights* weights = nullptr,
                                                std::vector<std::string>* warnings = nullptr) {
    detail::nb_count_check(X, y, alpha, "train_mnb");
    if (weights && !weights->uniform())
        warn_into(warnings, "train_mnb: class weights are not supported and were ignored");

    const std::size_t d = X.cols();
    std::vector<double> count0(d, 0.0), count1(d, 0.0);
    double total[2] = {0.0, 0.0};
    double n[2] = {0.0, 0.0};
    for (std::size_t i = 0; i < X.rows(); ++i) {
        const RowView row = X.row(i);
        std::vector<double>& cnt = y[i] == 0 ? count0 : count1;
        for (std::size_t t = 0; t < row.cols.size(); ++t) {
            if (row.vals[t] < 0.0)
                throw std::invalid_argument("train_mnb: negative feature value at row " +
                                            std::to_string(i));
            cnt[row.cols[t]] += row.vals[t];
            total[y[i]] += row.vals[t];
        }
        n[y[i]] += 1.0;
    }

    std::vector<double> lp = {std::log(n[0] / X.rows()), std::log(n[1] / X.rows())};
    std::vector<double> ll0(d), ll1(d);
    const double denom0 = std::log(total[0] + alpha * static_cast<double>(d));
    const double denom1 = std::log(total[1] + alpha * static_cast<double>(d));
    for (std::size_t j = 0; j < d; ++j) {
        ll0[j] = std::log(count0[j] + alpha) - denom0;
        ll1[j] = std::log(count1[j] + alpha) - denom1;
    }
    return std::make_unique<MultinomialNB>(std::move(lp), std::move(ll0), std::move(ll1));
}

// Bernoulli naive Bayes over presence indicators (value > 0):
// theta_cj = (n_cj + alpha) / (n_c + 2*alpha), absent features contribute
// log(1 - theta) through a per-class constant.
class BernoulliNB : public Model {
public:
    BernoulliNB(std::vector<double> lp, std::vector<double> lt0, std::vector<double> lt1,
                std::vector<double> lf0, std::vector<double> lf1)
        : log_prior_{lp.at(0), lp.at(1)}, lt0_(std::move(lt0)), lt1_(std::move(lt1)),
          lf0_(std::move(lf0)), lf1_(std::move(lf1)) {
        if (lt0_.size() != lt1_.size() || lt0_.size() != lf0_.size() || lf0_.size() != lf1_.size())
            throw std::invalid_argument("bnb: table size mismatch");
        base_[0] = base_[1] = 0.0;
        for (double v : lf0_) base_[0] += v;
        for (double v : lf1_) base_[1] += v;
    }

    ModelKind kind() const override { return ModelKind::bnb; }
    std::size_t n_features() const override { return lt0_.size(); }

    double log_joint(RowView row, int cls) const {
        const std::vector<double>& lt = cls == 0 ? lt0_ : lt1_;
        const std::vector<double>& lf = cls == 0 ? lf0_ : lf1_;
        double s = log_prior_[cls] + base_[cls];
        for (std::size_t t = 0; t < row.cols.size(); ++t)
            if (row.vals[t] > 0.0) s += lt[row.cols[t]] - lf[row.cols[t]];
        return s;
    }

    int predict_row(RowView row) const override {
        return log_joint(row, 1) > log_joint(row, 0) ? 1 : 0;
    }

    double score_row(RowView row) const override {
        return detail::posterior1(log_joint(row, 0), log_joint(row, 1));
    }

    void save(std::ostream& os) const override {
        os << "fnd-model v1 bnb\n" << lt0_.size() << '\n' << std::setprecision(17);
        os << log_prior_[0] << ' ' << log_prior_[1] << '\n';
        detail::write_row(os, lt0_);
        detail::write_row(os, lt1_);
        detail::write_row(os, lf0_);
        detail::write_row(os, lf1_);
    }

    static std::unique_ptr<BernoulliNB> load(std::istream& is) {
        std::size_t d;
        if (!(is >> d)) throw std::runtime_error("bnb load: bad header");
        std::vector<double> lp(2);
        detail::read_row(is, lp, "bnb");
        std::vector<double> lt0(d), lt1(d), lf0(d), lf1(d);
        detail::read_row(is, lt0, "bnb");
        detail::read_row(is, lt1, "bnb");
        detail::read_row(is, lf0, "bnb");
        detail::read_row(is, lf1, "bnb");
        return std::make_unique<BernoulliNB>(std::move(lp), std::move(lt0), std::move(lt1),
                                             std::move(lf0), std::move(lf1));
    }

private:
    double log_prior_[2];
    std::vector<double> lt0_, lt1_, lf0_, lf1_; // log(theta), log(1-theta)
    double base_[2];
};

inline std::unique_ptr<BernoulliNB> train_bnb(const FeatureMatrix& X, const std::vector<int>& y,
                                              double alpha,
                                              const ClassWeights* weights = nullptr,
                                              std::vector<std::string>* warnings = nullptr) {
    detail::nb_count_check(X, y, alpha, "train_bnb");
    if (weights && !weights->uniform())
        warn_into(warnings, "train_bnb: class weights are not supported and were ignored");

    const std::size_t d = X.cols();
    std::vector<double> doc0(d, 0.0), doc1(d, 0.0);
    double n[2] = {0.0, 0.0};
    for (std::size_t i = 0; i < X.rows(); ++i) {
        const RowView row = X.row(i);
        std::vector<double>& cnt = y[i] == 0 ? doc0 : doc1;
        for (std::size_t t = 0; t < row.cols.size(); ++t)
            if (row.vals[t] > 0.0) cnt[row.cols[t]] += 1.0;
        n[y[i]] += 1.0;
    }

    std::vector<double> lp = {std::log(n[0] / X.rows()), std::log(n[1] / X.rows())};
    std::vector<double> lt0(d), lt1(d), lf0(d), lf1(d);
    for (std::size_t j = 0; j < d; ++j) {
        const double t0 = (doc0[j] + alpha) / (n[0] + 2.0 * alpha);
        const double t1 = (doc1[j] + alpha) / (n[1] + 2.0 * alpha);
        lt0[j] = std::log(t0);
        lt1[j] = std::log(t1);
        lf0[j] = std::log1p(-t0);
        lf1[j] = std::log1p(-t1);
    }
    return std::make_unique<BernoulliNB>(std::move(lp), std::move(lt0), std::move(lt1),
                                         std::move(lf0), std::move(lf1));
}

} // namespace fnd
