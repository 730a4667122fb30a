#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <memory>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fnd/model.hpp"
#include "fnd/sparse.hpp"

namespace fnd {

struct TreeConfig {
    int max_depth = 6;
    int max_features = -1; // -1: consider every feature
    double min_gain = 1e-12;
    std::uint64_t seed = 0;
};

struct TreeNode {
    std::int32_t feature = -1; // -1 marks a leaf
    double threshold = 0.0;
    double w0 = 0.0, w1 = 0.0; // weighted label mass reaching the node
    std::uint32_t left = 0, right = 0;
};

class DecisionTreeModel : public Model {
public:
    DecisionTreeModel(std::vector<TreeNode> nodes, std::size_t n_feat)
        : nodes_(std::move(nodes)), n_features_(n_feat) {
        if (nodes_.empty()) throw std::invalid_argument("dtree: empty node table");
    }

    ModelKind kind() const override { return ModelKind::dtree; }
    std::size_t n_features() const override { return n_features_; }
    const std::vector<TreeNode>& nodes() const { return nodes_; }

    const TreeNode& leaf_for(RowView row) const {
        std::uint32_t at = 0;
        while (nodes_[at].feature >= 0) {
            const double v = value_at(row, static_cast<std::uint32_t>(nodes_[at].feature));
            at = v <= nodes_[at].threshold ? nodes_[at].left : nodes_[at].right;
        }
        return nodes_[at];
    }

    int predict_row(RowView row) const override {
        const TreeNode& leaf = leaf_for(row);
        return leaf.w1 > leaf.w0 ? 1 : 0;
    }

    double score_row(RowView row) const override {
        const TreeNode& leaf = leaf_for(row);
        const double w = leaf.w0 + leaf.w1;
        return w > 0.0 ? leaf.w1 / w : 0.0;
    }

    void save(std::ostream& os) const override {
        os << "fnd-model v1 dtree\n";
        save_body(os);
    }

    void save_body(std::ostream& os) const {
        os << n_features_ << ' ' << nodes_.size() << '\n' << std::setprecision(17);
        for (const TreeNode& n : nodes_)
            os << n.feature << ' ' << n.threshold << ' ' << n.w0 << ' ' << n.w1 << ' ' << n.left
               << ' ' << n.right << '\n';
    }

    static std::unique_ptr<DecisionTreeModel> load(std::istream& is) {
        std::size_t d, count;
        if (!(is >> d >> count)) throw std::runtime_error("dtree load: bad header");
        std::vector<TreeNode> nodes(count);
        for (TreeNode& n : nodes)
            if (!(is >> n.feature >> n.threshold >> n.w0 >> n.w1 >> n.left >> n.right))
                throw std::runtime_error("dtree load: truncated node table");
        return std::make_unique<DecisionTreeModel>(std::move(nodes), d);
    }

private:
    std::vector<TreeNode> nodes_;
    std::size_t n_features_;
};

namespace detail {

inline double gini(double a, double b) {
    const double w = a + b;
    if (w <= 0.0) return 0.0;
    return 1.0 - (a * a + b * b) / (w * w);
}

struct NodeEntry {
    std::uint32_t col;
    double val;
    double w0, w1;
};

struct BestSplit {
    double gain = 0.0;
    std::uint32_t feature = 0;
    double threshold = 0.0;
    bool found = false;
};

// Greedy CART builder over a weighted sample subset. Only features carrying
// an explicit value in the node can yield a second distinct value, so the
// scan walks a node-local column-sorted transpose of the sample rows.
class TreeBuilder {
public:
    TreeBuilder(const FeatureMatrix& X, const std::vector<int>& y,
                std::span<const double> sample_weight, const TreeConfig& cfg, std::mt19937_64* rng)
        : X_(X), y_(y), w_(sample_weight), cfg_(cfg), rng_(rng) {
        if (cfg_.max_features >= 0 && static_cast<std::size_t>(cfg_.max_features) < X.cols()) {
            if (!rng_) throw std::invalid_argument("tree: feature sampling needs an rng");
            pool_.resize(X.cols());
            for (std::size_t j = 0; j < X.cols(); ++j) pool_[j] = static_cast<std::uint32_t>(j);
            marked_.assign(X.cols(), 0);
        }
    }

    std::vector<TreeNode> build(std::vector<std::size_t> samples) {
        nodes_.clear();
        grow(std::move(samples), 0);
        return std::move(nodes_);
    }

private:
    std::uint32_t grow(std::vector<std::size_t> samples, int depth) {
        double W0 = 0.0, W1 = 0.0;
        for (std::size_t i : samples) (y_[i] == 0 ? W0 : W1) += w_[i];
        const std::uint32_t at = static_cast<std::uint32_t>(nodes_.size());
        nodes_.push_back({-1, 0.0, W0, W1, 0, 0});

        if (depth >= cfg_.max_depth || W0 <= 0.0 || W1 <= 0.0) return at;
        const BestSplit split = find_split(samples, W0, W1);
        if (!split.found || split.gain <= cfg_.min_gain) return at;

        std::vector<std::size_t> left_rows, right_rows;
        for (std::size_t i : samples)
            (value_at(X_.row(i), split.feature) <= split.threshold ? left_rows : right_rows)
                .push_back(i);
        if (left_rows.empty() || right_rows.empty()) return at; // degenerate threshold
        samples.clear();
        samples.shrink_to_fit();

        nodes_[at].feature = static_cast<std::int32_t>(split.feature);
        nodes_[at].threshold = split.threshold;
        const std::uint32_t l = grow(std::move(left_rows), depth + 1);
        nodes_[at].left = l;
        const std::uint32_t r = grow(std::move(right_rows), depth + 1);
        nodes_[at].right = r;
        return at;
    }

    BestSplit find_split(const std::vector<std::size_t>& samples, double W0, double W1) {
        const bool sampled = !pool_.empty();
        std::vector<std::uint32_t> chosen;
        if (sampled) {
            const std::size_t m =
                std::min<std::size_t>(static_cast<std::size_t>(cfg_.max_features), pool_.size());
            for (std::size_t t = 0; t < m; ++t) {
                std::uniform_int_distribution<std::size_t> pick(t, pool_.size() - 1);
                std::swap(pool_[t], pool_[pick(*rng_)]);
                chosen.push_back(pool_[t]);
                marked_[pool_[t]] = 1;
            }
        }

        entries_.clear();
        for (std::size_t i : samples) {
            const RowView row = X_.row(i);
            for (std::size_t t = 0; t < row.cols.size(); ++t) {
                if (sampled && !marked_[row.cols[t]]) continue;
                entries_.push_back({row.cols[t], row.vals[t], y_[i] == 0 ? w_[i] : 0.0,
                                    y_[i] == 0 ? 0.0 : w_[i]});
            }
        }
        if (sampled)
            for (std::uint32_t c : chosen) marked_[c] = 0;

        std::sort(entries_.begin(), entries_.end(), [](const NodeEntry& a, const NodeEntry& b) {
            return a.col != b.col ? a.col < b.col : a.val < b.val;
        });

        BestSplit best;
        const double g_node = gini(W0, W1);
        std::size_t lo = 0;
        while (lo < entries_.size()) {
            std::size_t hi = lo;
            while (hi < entries_.size() && entries_[hi].col == entries_[lo].col) ++hi;
            scan_feature(lo, hi, W0, W1, g_node, best);
            lo = hi;
        }
        return best;
    }

    // Explicit entries [lo,hi) of one column, value-sorted; the implicit
    // zero bucket holds whatever node mass carries no explicit value.
    void scan_feature(std::size_t lo, std::size_t hi, double W0, double W1, double g_node,
                      BestSplit& best) {
        double e0 = 0.0, e1 = 0.0;
        for (std::size_t t = lo; t < hi; ++t) {
            e0 += entries_[t].w0;
            e1 += entries_[t].w1;
        }
        const double z0 = W0 - e0, z1 = W1 - e1;
        const bool has_zero = z0 + z1 > 0.0;
        const double W = W0 + W1;

        // Merge into distinct (value, mass) steps, zero bucket in order.
        vals_.clear();
        bool zero_done = !has_zero;
        auto push = [&](double v, double a, double b) {
            if (!vals_.empty() && vals_.back().val == v) {
                vals_.back().w0 += a;
                vals_.back().w1 += b;
            } else {
                vals_.push_back({0, v, a, b});
            }
        };
        for (std::size_t t = lo; t < hi; ++t) {
            if (!zero_done && entries_[t].val > 0.0) {
                push(0.0, z0, z1);
                zero_done = true;
            }
            push(entries_[t].val, entries_[t].w0, entries_[t].w1);
        }
        if (!zero_done) push(0.0, z0, z1);
        if (vals_.size() < 2) return;

        double c0 = 0.0, c1 = 0.0;
        for (std::size_t t = 0; t + 1 < vals_.size(); ++t) {
            c0 += vals_[t].w0;
            c1 += vals_[t].w1;
            const double gain =
                g_node - ((c0 + c1) * gini(c0, c1) + (W - c0 - c1) * gini(W0 - c0, W1 - c1)) / W;
            if (gain > best.gain) {
                double thr = 0.5 * (vals_[t].val + vals_[t + 1].val);
                if (!(vals_[t].val < thr && thr < vals_[t + 1].val)) thr = vals_[t].val;
                best.gain = gain;
                best.feature = entries_[lo].col;
                best.threshold = thr;
                best.found = true;
            }
        }
    }

    const FeatureMatrix& X_;
    const std::vector<int>& y_;
    std::span<const double> w_;
    TreeConfig cfg_;
    std::mt19937_64* rng_;
    std::vector<TreeNode> nodes_;
    std::vector<std::uint32_t> pool_;
    std::vector<char> marked_;
    std::vector<NodeEntry> entries_;
    std::vector<NodeEntry> vals_;
};

} // namespace detail

inline std::unique_ptr<DecisionTreeModel> train_dtree(const FeatureMatrix& X,
                                                      const std::vector<int>& y,
                                                      const TreeConfig& cfg = {},
                                                      const ClassWeights* weights = nullptr) {
    if (X.rows() == 0) throw std::invalid_argument("train_dtree: empty training set");
    if (y.size() != X.rows()) throw std::invalid_argument("train_dtree: label count mismatch");
    if (cfg.max_depth < 0) throw std::invalid_argument("train_dtree: max_depth must be >= 0");

    std::vector<double> w(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) w[i] = weights ? weights->at(y[i]) : 1.0;
    std::mt19937_64 rng(cfg.seed);
    detail::TreeBuilder builder(X, y, w, cfg, &rng);
    std::vector<std::size_t> all(X.rows());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return std::make_unique<DecisionTreeModel>(builder.build(std::move(all)), X.cols());
}

} // namespace fnd
