#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <memory>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "fnd/model.hpp"
#include "fnd/tree.hpp"
#include "fnd/util.hpp"

namespace fnd {

struct ForestConfig {
    int n_estimators = 400;
    bool sqrt_features = true; // else every feature at every node
    bool bootstrap = true;
    int max_depth = 6;
    std::uint64_t seed = 0;
};

class RandomForestModel : public Model {
public:
    RandomForestModel(std::vector<std::unique_ptr<DecisionTreeModel>> trees, std::size_t n_feat)
        : trees_(std::move(trees)), n_features_(n_feat) {
        if (trees_.empty()) throw std::invalid_argument("rforest: no trees");
    }

    ModelKind kind() const override { return ModelKind::rforest; }
    std::size_t n_features() const override { return n_features_; }
    std::size_t n_trees() const { return trees_.size(); }
    const DecisionTreeModel& tree(std::size_t t) const { return *trees_[t]; }

    // Fraction of trees voting for the positive class.
    double score_row(RowView row) const override {
        std::size_t votes = 0;
        for (const auto& t : trees_) votes += static_cast<std::size_t>(t->predict_row(row));
        return static_cast<double>(votes) / static_cast<double>(trees_.size());
    }

    int predict_row(RowView row) const override { return score_row(row) > 0.5 ? 1 : 0; }

    void save(std::ostream& os) const override {
        os << "fnd-model v1 rforest\n" << trees_.size() << '\n';
        for (const auto& t : trees_) t->save_body(os);
    }

    static std::unique_ptr<RandomForestModel> load(std::istream& is) {
        std::size_t count;
        if (!(is >> count)) throw std::runtime_error("rforest load: bad header");
        std::vector<std::unique_ptr<DecisionTreeModel>> trees;
        trees.reserve(count);
        std::size_t d = 0;
        for (std::size_t t = 0; t < count; ++t) {
            trees.push_back(DecisionTreeModel::load(is));
            d = trees.back()->n_features();
        }
        return std::make_unique<RandomForestModel>(std::move(trees), d);
    }

private:
    std::vector<std::unique_ptr<DecisionTreeModel>> trees_;
    std::size_t n_features_;
};

// Bagged CART ensemble. Each tree draws its own bootstrap sample (weighted
// by multiplicity times any class weight) and subsamples ceil(sqrt(F))
// fresh candidate features per node; tree t seeds from derive_seed(seed, t).
inline std::unique_ptr<RandomForestModel> train_rforest(const FeatureMatrix& X,
                                                        const std::vector<int>& y,
                                                        const ForestConfig& cfg = {},
                                                        const ClassWeights* weights = nullptr) {
    if (X.rows() == 0) throw std::invalid_argument("train_rforest: empty training set");
    if (y.size() != X.rows()) throw std::invalid_argument("train_rforest: label count mismatch");
    if (cfg.n_estimators < 1) throw std::invalid_argument("train_rforest: n_estimators must be >= 1");

    TreeConfig tree_cfg;
    tree_cfg.max_depth = cfg.max_depth;
    tree_cfg.max_features =
        cfg.sqrt_features && X.cols() > 0
            ? static_cast<int>(std::ceil(std::sqrt(static_cast<double>(X.cols()))))
            : -1;

    const std::size_t n = X.rows();
    std::vector<std::unique_ptr<DecisionTreeModel>> trees;
    trees.reserve(static_cast<std::size_t>(cfg.n_estimators));
    std::vector<double> w(n);
    std::vector<std::size_t> samples;
    for (int t = 0; t < cfg.n_estimators; ++t) {
        std::mt19937_64 rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(t)));
        samples.clear();
        if (cfg.bootstrap) {
            std::vector<std::size_t> count(n, 0);
            std::uniform_int_distribution<std::size_t> pick(0, n - 1);
            for (std::size_t i = 0; i < n; ++i) ++count[pick(rng)];
            for (std::size_t i = 0; i < n; ++i)
                if (count[i] > 0) {
                    samples.push_back(i);
                    w[i] = static_cast<double>(count[i]) * (weights ? weights->at(y[i]) : 1.0);
                }
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                samples.push_back(i);
                w[i] = weights ? weights->at(y[i]) : 1.0;
            }
        }
        detail::TreeBuilder builder(X, y, w, tree_cfg, &rng);
        trees.push_back(
            std::make_unique<DecisionTreeModel>(builder.build(samples), X.cols()));
    }
    return std::make_unique<RandomForestModel>(std::move(trees), X.cols());
}

} // namespace fnd
