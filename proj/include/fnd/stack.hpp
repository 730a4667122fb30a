#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "fnd/classifiers.hpp"
#include "fnd/model.hpp"
#include "fnd/sparse.hpp"
#include "fnd/util.hpp"

namespace fnd {

struct StackSpec {
    std::vector<ClassifierConfig> base_model_configs;
    ClassifierConfig meta_model_config;
    int n_folds = 5;
    std::uint64_t seed = 0;
    bool hard_labels = false;          // ablation: meta features are 0/1 labels
    bool meta_also_at_level0 = true;   // when false, drop level-0 bases of the meta's kind
    std::size_t svm_subsample_cap = 20000;
};

// The six standard bases in report order.
inline std::vector<ClassifierConfig> default_stack_bases() {
    std::vector<ClassifierConfig> bases(6);
    bases[0].kind = ModelKind::logreg;
    bases[1].kind = ModelKind::svm;
    bases[2].kind = ModelKind::mnb;
    bases[3].kind = ModelKind::bnb;
    bases[4].kind = ModelKind::rforest;
    bases[5].kind = ModelKind::dtree;
    return bases;
}

// Seeded stratified k-fold assignment: per class, shuffled rows go round
// robin over folds, so fold class counts differ by at most one row.
inline std::vector<int> stratified_folds(const std::vector<int>& y, int n_folds,
                                         std::uint64_t seed) {
    if (n_folds < 2) throw std::invalid_argument("stratified_folds: n_folds must be >= 2");
    if (y.empty()) throw std::invalid_argument("stratified_folds: empty label vector");
    std::vector<int> fold(y.size(), 0);
    for (int label = 0; label < 2; ++label) {
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < y.size(); ++i)
            if (y[i] == label) rows.push_back(i);
        if (rows.empty()) continue;
        if (rows.size() < 2)
            throw std::invalid_argument(
                "stratified_folds: class " + std::to_string(label) +
                " has a single row, so some fold would lose it entirely; use fewer folds "
                "or more data");
        std::mt19937_64 rng(derive_seed(seed, 0xF01D + static_cast<std::uint64_t>(label)));
        std::shuffle(rows.begin(), rows.end(), rng);
        for (std::size_t p = 0; p < rows.size(); ++p)
            fold[rows[p]] = static_cast<int>(p % static_cast<std::size_t>(n_folds));
    }
    return fold;
}

namespace detail {

// Positive-class meta feature: probabilities and vote fractions pass
// through, SVM decision values are squashed to (0,1) so level-1 models that
// require non-negative inputs stay usable.
inline double meta_score(const Model& m, RowView row, bool hard_labels) {
    if (hard_labels) return static_cast<double>(m.predict_row(row));
    const double s = m.score_row(row);
    if (m.kind() == ModelKind::svm) return 1.0 / (1.0 + std::exp(-s));
    return s;
}

// Proportional stratified subsample of `cap` rows, each present class kept.
inline std::vector<std::size_t> stratified_cap(const std::vector<int>& y, std::size_t cap,
                                               std::uint64_t seed) {
    std::vector<std::size_t> c0, c1;
    for (std::size_t i = 0; i < y.size(); ++i) (y[i] == 0 ? c0 : c1).push_back(i);
    std::size_t want1 = static_cast<std::size_t>(std::llround(
        static_cast<double>(c1.size()) / static_cast<double>(y.size()) * static_cast<double>(cap)));
    if (!c1.empty() && want1 == 0) want1 = 1;
    if (want1 > c1.size()) want1 = c1.size();
    std::size_t want0 = cap - want1;
    if (want0 > c0.size()) {
        want0 = c0.size();
        want1 = std::min(cap - want0, c1.size());
    }
    std::mt19937_64 rng(seed);
    std::shuffle(c0.begin(), c0.end(), rng);
    std::shuffle(c1.begin(), c1.end(), rng);
    std::vector<std::size_t> keep(c0.begin(), c0.begin() + static_cast<std::ptrdiff_t>(want0));
    keep.insert(keep.end(), c1.begin(), c1.begin() + static_cast<std::ptrdiff_t>(want1));
    std::sort(keep.begin(), keep.end());
    return keep;
}

// Trains one level-0/level-1 model with a derived seed, subsampling SVM
// training sets above the row cap instead of failing the whole stack.
inline std::unique_ptr<Model> train_capped(ClassifierConfig cfg, const FeatureMatrix& X,
                                           const std::vector<int>& y, std::uint64_t seed,
                                           std::size_t svm_cap,
                                           std::vector<std::string>* warnings) {
    reseed(cfg, seed);
    if (cfg.kind == ModelKind::svm && X.rows() > svm_cap) {
        warn_into(warnings, "stack: svm trained on a stratified subsample of " +
                                std::to_string(svm_cap) + " of " + std::to_string(X.rows()) +
                                " rows (row cap)");
        const auto keep = stratified_cap(y, svm_cap, derive_seed(seed, 0x5AB5));
        FeatureMatrix Xs = row_subset(X, keep);
        std::vector<int> ys(keep.size());
        for (std::size_t i = 0; i < keep.size(); ++i) ys[i] = y[keep[i]];
        return train_classifier(cfg, Xs, ys, nullptr, warnings);
    }
    return train_classifier(cfg, X, y, nullptr, warnings);
}

inline std::vector<ClassifierConfig> effective_bases(const StackSpec& spec) {
    if (spec.base_model_configs.empty())
        throw std::invalid_argument("stack: need at least one base model config");
    if (spec.meta_also_at_level0) return spec.base_model_configs;
    std::vector<ClassifierConfig> kept;
    for (const ClassifierConfig& c : spec.base_model_configs)
        if (c.kind != spec.meta_model_config.kind) kept.push_back(c);
    if (kept.empty())
        throw std::invalid_argument("stack: excluding the meta kind leaves no base models");
    return kept;
}

// Core out-of-fold assembly over an explicit fold assignment. Entry (i, m)
// is base m's score on row i from the model trained on every fold except
// fold[i], so it never depends on (x_i, y_i).
template <class TrainFn>
FeatureMatrix meta_features_over(const std::vector<ClassifierConfig>& bases, const FeatureMatrix& X,
                                 const std::vector<int>& y, const std::vector<int>& folds,
                                 int n_folds, bool hard_labels, TrainFn&& train_one) {
    if (folds.size() != X.rows()) throw std::invalid_argument("stack: fold vector length mismatch");
    if (y.size() != X.rows()) throw std::invalid_argument("stack: label count mismatch");
    const std::size_t M = bases.size();
    std::vector<double> dense(X.rows() * M, 0.0);

    for (int f = 0; f < n_folds; ++f) {
        std::vector<std::size_t> train_idx, held_idx;
        for (std::size_t i = 0; i < X.rows(); ++i)
            (folds[i] == f ? held_idx : train_idx).push_back(i);
        if (held_idx.empty()) continue;
        if (train_idx.empty())
            throw std::invalid_argument("stack: fold " + std::to_string(f) +
                                        " holds every row; use fewer folds");
        const FeatureMatrix Xtr = row_subset(X, train_idx);
        std::vector<int> ytr(train_idx.size());
        for (std::size_t i = 0; i < train_idx.size(); ++i) ytr[i] = y[train_idx[i]];

        for (std::size_t m = 0; m < M; ++m) {
            const std::unique_ptr<Model> model = train_one(bases[m], Xtr, ytr, f, m);
            for (std::size_t i : held_idx)
                dense[i * M + m] = meta_score(*model, X.row(i), hard_labels);
        }
    }

    FeatureMatrix out(M);
    for (std::size_t i = 0; i < X.rows(); ++i)
        out.append_dense_row(std::span<const double>(dense.data() + i * M, M), y[i]);
    return out;
}

} // namespace detail

// Out-of-fold level-0 score matrix (r x M) over an explicit fold assignment.
inline FeatureMatrix meta_features(const StackSpec& spec, const FeatureMatrix& X,
                                   const std::vector<int>& y, const std::vector<int>& folds,
                                   std::vector<std::string>* warnings = nullptr) {
    const auto bases = detail::effective_bases(spec);
    return detail::meta_features_over(
        bases, X, y, folds, spec.n_folds, spec.hard_labels,
        [&](const ClassifierConfig& cfg, const FeatureMatrix& Xtr, const std::vector<int>& ytr,
            int fold, std::size_t m) {
            const std::uint64_t seed =
                derive_seed(spec.seed, 0x10000 + static_cast<std::uint64_t>(fold) * 64 + m);
            return detail::train_capped(cfg, Xtr, ytr, seed, spec.svm_subsample_cap, warnings);
        });
}

inline FeatureMatrix meta_features(const StackSpec& spec, const FeatureMatrix& X,
                                   const std::vector<int>& y,
                                   std::vector<std::string>* warnings = nullptr) {
    return meta_features(spec, X, y, stratified_folds(y, spec.n_folds, spec.seed), warnings);
}

struct StackedModel {
    std::vector<std::unique_ptr<Model>> base_models; // refit on the full data
    std::unique_ptr<Model> meta_model;               // n_features == base_models.size()
    bool hard_labels = false;
    std::size_t level0_width = 0;
};

inline StackedModel train_stack(const StackSpec& spec, const FeatureMatrix& X,
                                const std::vector<int>& y,
                                std::vector<std::string>* warnings = nullptr) {
    const FeatureMatrix meta_x = meta_features(spec, X, y, warnings);
    StackedModel out;
    out.hard_labels = spec.hard_labels;
    out.level0_width = X.cols();
    out.meta_model = detail::train_capped(spec.meta_model_config, meta_x, y,
                                          derive_seed(spec.seed, 0x4D45),
                                          spec.svm_subsample_cap, warnings);
    const auto bases = detail::effective_bases(spec);
    for (std::size_t m = 0; m < bases.size(); ++m)
        out.base_models.push_back(detail::train_capped(bases[m], X, y,
                                                       derive_seed(spec.seed, 0xF177 + m),
                                                       spec.svm_subsample_cap, warnings));
    return out;
}

namespace detail {
inline void stack_width_check(const StackedModel& sm, const FeatureMatrix& X) {
    if (X.cols() != sm.level0_width)
        throw std::invalid_argument("predict_stack: matrix has " + std::to_string(X.cols()) +
                                    " features but level-0 models expect " +
                                    std::to_string(sm.level0_width));
}

template <class Use>
void for_each_meta_row(const StackedModel& sm, const FeatureMatrix& X, Use&& use) {
    const std::size_t M = sm.base_models.size();
    std::vector<std::uint32_t> cols(M);
    for (std::size_t m = 0; m < M; ++m) cols[m] = static_cast<std::uint32_t>(m);
    std::vector<double> vals(M);
    for (std::size_t i = 0; i < X.rows(); ++i) {
        for (std::size_t m = 0; m < M; ++m)
            vals[m] = meta_score(*sm.base_models[m], X.row(i), sm.hard_labels);
        use(i, RowView{cols, vals});
    }
}
} // namespace detail

inline std::vector<int> predict_stack(const StackedModel& sm, const FeatureMatrix& X) {
    detail::stack_width_check(sm, X);
    std::vector<int> out(X.rows());
    detail::for_each_meta_row(
        sm, X, [&](std::size_t i, RowView r) { out[i] = sm.meta_model->predict_row(r); });
    return out;
}

inline std::vector<double> score_stack(const StackedModel& sm, const FeatureMatrix& X) {
    detail::stack_width_check(sm, X);
    std::vector<double> out(X.rows());
    detail::for_each_meta_row(
        sm, X, [&](std::size_t i, RowView r) { out[i] = sm.meta_model->score_row(r); });
    return out;
}

} // namespace fnd
