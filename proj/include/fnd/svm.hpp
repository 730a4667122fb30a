#pragma once

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <list>
#include <memory>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "fnd/model.hpp"
#include "fnd/sparse.hpp"
#include "fnd/util.hpp"

namespace fnd {

struct SvmConfig {
    double gamma = 1.0;
    double C = 1.0;
    double tol = 1e-3;           // KKT violation tolerance
    double eps = 1e-12;          // minimal alpha step
    std::size_t row_cap = 20000; // refuse larger training sets
    std::size_t cache_mb = 256;  // kernel row cache budget
    int max_loops = 300;         // outer sweep cap
    std::uint64_t seed = 0;
};

class RbfSvmModel : public Model {
public:
    RbfSvmModel(FeatureMatrix support, std::vector<double> coef, double b, double gamma,
                std::size_t n_feat)
        : support_(std::move(support)), coef_(std::move(coef)), b_(b), gamma_(gamma),
          n_features_(n_feat) {
        if (coef_.size() != support_.rows())
            throw std::invalid_argument("svm: coefficient count mismatch");
        sv_sq_.resize(support_.rows());
        for (std::size_t i = 0; i < support_.rows(); ++i)
            sv_sq_[i] = sparse_sqnorm(support_.row(i));
    }

    ModelKind kind() const override { return ModelKind::svm; }
    std::size_t n_features() const override { return n_features_; }
    std::size_t n_support() const { return support_.rows(); }
    double bias() const { return b_; }
    double gamma() const { return gamma_; }
    const FeatureMatrix& support_vectors() const { return support_; }
    // Signed weights alpha_i * y_i, one per support vector.
    const std::vector<double>& dual_coef() const { return coef_; }

    // Decision value f(x) = sum_i alpha_i y_i K(sv_i, x) - b.
    double score_row(RowView row) const override {
        const double x_sq = sparse_sqnorm(row);
        double f = -b_;
        for (std::size_t i = 0; i < support_.rows(); ++i)
            f += coef_[i] * std::exp(-gamma_ * sparse_sqdist(support_.row(i), row, sv_sq_[i], x_sq));
        return f;
    }

    int predict_row(RowView row) const override { return score_row(row) > 0.0 ? 1 : 0; }

    void save(std::ostream& os) const override {
        os << "fnd-model v1 svm\n"
           << support_.rows() << ' ' << n_features_ << ' ' << std::setprecision(17) << gamma_
           << ' ' << b_ << '\n';
        for (std::size_t i = 0; i < support_.rows(); ++i) {
            const RowView r = support_.row(i);
            os << coef_[i] << ' ' << r.cols.size();
            for (std::size_t t = 0; t < r.cols.size(); ++t)
                os << ' ' << r.cols[t] << ':' << r.vals[t];
            os << '\n';
        }
    }

    static std::unique_ptr<RbfSvmModel> load(std::istream& is) {
        std::size_t n_sv, d;
        double gamma, b;
        if (!(is >> n_sv >> d >> gamma >> b)) throw std::runtime_error("svm load: bad header");
        FeatureMatrix sv(d);
        std::vector<double> coef(n_sv);
        std::vector<std::pair<std::uint32_t, double>> entries;
        for (std::size_t i = 0; i < n_sv; ++i) {
            std::size_t nnz;
            if (!(is >> coef[i] >> nnz)) throw std::runtime_error("svm load: truncated row");
            entries.clear();
            for (std::size_t t = 0; t < nnz; ++t) {
                std::string tok;
                if (!(is >> tok)) throw std::runtime_error("svm load: truncated row");
                const auto colon = tok.find(':');
                if (colon == std::string::npos) throw std::runtime_error("svm load: bad entry");
                entries.emplace_back(static_cast<std::uint32_t>(std::stoul(tok.substr(0, colon))),
                                     std::stod(tok.substr(colon + 1)));
            }
            sv.append_row(entries, 0);
        }
        return std::make_unique<RbfSvmModel>(std::move(sv), std::move(coef), b, gamma, d);
    }

private:
    FeatureMatrix support_;
    std::vector<double> coef_; // alpha_i * y_i
    double b_;
    double gamma_;
    std::size_t n_features_;
    std::vector<double> sv_sq_;
};

namespace detail {

// LRU cache of full kernel rows K(i, .) for the SMO error-cache updates.
class KernelCache {
public:
    KernelCache(const FeatureMatrix& X, double gamma, std::size_t budget_bytes)
        : X_(X), gamma_(gamma) {
        sq_.resize(X.rows());
        for (std::size_t i = 0; i < X.rows(); ++i) sq_[i] = sparse_sqnorm(X.row(i));
        capacity_ = budget_bytes / (sizeof(double) * std::max<std::size_t>(X.rows(), 1));
        if (capacity_ < 2) capacity_ = 2;
    }

    const std::vector<double>& row(std::size_t i) {
        auto it = map_.find(i);
        if (it != map_.end()) {
            lru_.splice(lru_.begin(), lru_, it->second.second);
            return it->second.first;
        }
        if (map_.size() == capacity_) {
            map_.erase(lru_.back());
            lru_.pop_back();
        }
        lru_.push_front(i);
        auto [ins, ok] = map_.emplace(i, std::make_pair(std::vector<double>(), lru_.begin()));
        std::vector<double>& k = ins->second.first;
        k.resize(X_.rows());
        const RowView ri = X_.row(i);
        for (std::size_t j = 0; j < X_.rows(); ++j)
            k[j] = std::exp(-gamma_ * sparse_sqdist(ri, X_.row(j), sq_[i], sq_[j]));
        return k;
    }

    double at(std::size_t i, std::size_t j) {
        auto it = map_.find(i);
        if (it != map_.end()) return it->second.first[j];
        it = map_.find(j);
        if (it != map_.end()) return it->second.first[i];
        return std::exp(-gamma_ * sparse_sqdist(X_.row(i), X_.row(j), sq_[i], sq_[j]));
    }

private:
    const FeatureMatrix& X_;
    double gamma_;
    std::vector<double> sq_;
    std::size_t capacity_;
    std::list<std::size_t> lru_;
    std::unordered_map<std::size_t, std::pair<std::vector<double>, std::list<std::size_t>::iterator>>
        map_;
};

struct SmoState {
    const FeatureMatrix& X;
    std::vector<double> y;     // +1 / -1
    std::vector<double> cbox;  // per-row upper bound C_i
    std::vector<double> alpha;
    std::vector<double> err;   // E_i = u_i - y_i
    double b = 0.0;
    double tol, eps;
    KernelCache cache;
    std::mt19937_64 rng;

    SmoState(const FeatureMatrix& x, double gamma, std::size_t cache_bytes, std::uint64_t seed)
        : X(x), cache(x, gamma, cache_bytes), rng(seed) {}

    bool non_bound(std::size_t i) const { return alpha[i] > 0.0 && alpha[i] < cbox[i]; }

    bool take_step(std::size_t i1, std::size_t i2) {
        if (i1 == i2) return false;
        const double a1_old = alpha[i1], a2_old = alpha[i2];
        const double y1 = y[i1], y2 = y[i2];
        const double E1 = err[i1], E2 = err[i2];
        const double s = y1 * y2;
        double L, H;
        if (y1 != y2) {
            L = std::max(0.0, a2_old - a1_old);
            H = std::min(cbox[i2], cbox[i1] + a2_old - a1_old);
        } else {
            L = std::max(0.0, a1_old + a2_old - cbox[i1]);
            H = std::min(cbox[i2], a1_old + a2_old);
        }
        if (L >= H) return false;

        const double k11 = cache.at(i1, i1), k12 = cache.at(i1, i2), k22 = cache.at(i2, i2);
        const double eta = k11 + k22 - 2.0 * k12;
        double a2;
        if (eta > 0.0) {
            a2 = a2_old + y2 * (E1 - E2) / eta;
            a2 = std::min(H, std::max(L, a2));
        } else {
            // Flat direction: evaluate the objective at both ends.
            const double f1 = y1 * (E1 + b) - a1_old * k11 - s * a2_old * k12;
            const double f2 = y2 * (E2 + b) - s * a1_old * k12 - a2_old * k22;
            const double L1 = a1_old + s * (a2_old - L);
            const double H1 = a1_old + s * (a2_old - H);
            const double objL = L1 * f1 + L * f2 + 0.5 * L1 * L1 * k11 + 0.5 * L * L * k22 +
                                s * L * L1 * k12;
            const double objH = H1 * f1 + H * f2 + 0.5 * H1 * H1 * k11 + 0.5 * H * H * k22 +
                                s * H * H1 * k12;
            if (objL < objH - eps)
                a2 = L;
            else if (objL > objH + eps)
                a2 = H;
            else
                return false;
        }
        if (std::fabs(a2 - a2_old) < eps * (a2 + a2_old + eps)) return false;
        const double a1 = a1_old + s * (a2_old - a2);

        const double b1 = E1 + y1 * (a1 - a1_old) * k11 + y2 * (a2 - a2_old) * k12 + b;
        const double b2 = E2 + y1 * (a1 - a1_old) * k12 + y2 * (a2 - a2_old) * k22 + b;
        const double b_old = b;
        if (a1 > 0.0 && a1 < cbox[i1])
            b = b1;
        else if (a2 > 0.0 && a2 < cbox[i2])
            b = b2;
        else
            b = 0.5 * (b1 + b2);

        const std::vector<double>& K1 = cache.row(i1);
        const std::vector<double>& K2 = cache.row(i2);
        const double d1 = y1 * (a1 - a1_old), d2 = y2 * (a2 - a2_old);
        for (std::size_t i = 0; i < err.size(); ++i)
            err[i] += d1 * K1[i] + d2 * K2[i] + b_old - b;
        alpha[i1] = a1;
        alpha[i2] = a2;
        return true;
    }

    bool examine(std::size_t i2) {
        const double r2 = err[i2] * y[i2];
        if (!((r2 < -tol && alpha[i2] < cbox[i2]) || (r2 > tol && alpha[i2] > 0.0))) return false;

        // 1: second choice by largest |E1 - E2| among non-bound rows.
        std::size_t best = i2;
        double best_gap = -1.0;
        for (std::size_t i = 0; i < alpha.size(); ++i)
            if (non_bound(i) && std::fabs(err[i] - err[i2]) > best_gap) {
                best_gap = std::fabs(err[i] - err[i2]);
                best = i;
            }
        if (best != i2 && take_step(best, i2)) return true;

        // 2: all non-bound rows from a random start.
        const std::size_t n = alpha.size();
        std::size_t start = rng() % n;
        for (std::size_t off = 0; off < n; ++off) {
            const std::size_t i1 = (start + off) % n;
            if (non_bound(i1) && take_step(i1, i2)) return true;
        }
        // 3: everything from a random start.
        start = rng() % n;
        for (std::size_t off = 0; off < n; ++off)
            if (take_step((start + off) % n, i2)) return true;
        return false;
    }
};

} // namespace detail

inline std::unique_ptr<RbfSvmModel> train_svm(const FeatureMatrix& X, const std::vector<int>& y,
                                              const SvmConfig& cfg,
                                              const ClassWeights* weights = nullptr,
                                              std::vector<std::string>* warnings = nullptr) {
    if (X.rows() == 0) throw std::invalid_argument("train_svm: empty training set");
    if (y.size() != X.rows()) throw std::invalid_argument("train_svm: label count mismatch");
    if (X.rows() > cfg.row_cap)
        throw std::invalid_argument("train_svm: " + std::to_string(X.rows()) +
                                    " rows exceed the cap of " + std::to_string(cfg.row_cap) +
                                    "; subsample the training set first");
    if (!(cfg.gamma > 0.0)) throw std::invalid_argument("train_svm: gamma must be positive");
    if (!(cfg.C > 0.0)) throw std::invalid_argument("train_svm: C must be positive");
    bool has0 = false, has1 = false;
    for (int v : y) (v == 0 ? has0 : has1) = true;
    if (!has0 || !has1) throw std::invalid_argument("train_svm: training set has a single class");

    detail::SmoState st(X, cfg.gamma, cfg.cache_mb << 20, derive_seed(cfg.seed, 0x5170));
    const std::size_t n = X.rows();
    st.tol = cfg.tol;
    st.eps = cfg.eps;
    st.y.resize(n);
    st.cbox.resize(n);
    st.alpha.assign(n, 0.0);
    st.err.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        st.y[i] = y[i] == 1 ? 1.0 : -1.0;
        st.cbox[i] = cfg.C * (weights ? weights->at(y[i]) : 1.0);
        st.err[i] = -st.y[i]; // u = 0 initially
    }

    int num_changed = 0;
    bool examine_all = true;
    int loops = 0;
    while (num_changed > 0 || examine_all) {
        if (++loops > cfg.max_loops) {
            warn_into(warnings, "train_svm: sweep cap " + std::to_string(cfg.max_loops) +
                                    " reached before full KKT satisfaction");
            break;
        }
        num_changed = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (examine_all || st.non_bound(i)) num_changed += st.examine(i) ? 1 : 0;
        if (examine_all)
            examine_all = false;
        else if (num_changed == 0)
            examine_all = true;
    }

    FeatureMatrix sv(X.cols());
    std::vector<double> coef;
    for (std::size_t i = 0; i < n; ++i)
        if (st.alpha[i] > 0.0) {
            sv.append_row_view(X.row(i), y[i]);
            coef.push_back(st.alpha[i] * st.y[i]);
        }
    return std::make_unique<RbfSvmModel>(std::move(sv), std::move(coef), st.b, cfg.gamma, X.cols());
}

} // namespace fnd
