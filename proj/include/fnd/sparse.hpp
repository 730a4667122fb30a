#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fnd {

// One row of a FeatureMatrix: column indices sorted ascending with parallel values.
struct RowView {
    std::span<const std::uint32_t> cols;
    std::span<const double> vals;

    std::size_t nnz() const { return cols.size(); }
};

// Row-major sparse matrix (CSR) with a parallel label vector. Rows are
// append-only; absent entries are zero.
class FeatureMatrix {
public:
    FeatureMatrix() = default;
    explicit FeatureMatrix(std::size_t n_cols) : n_cols_(n_cols) {}

    std::size_t rows() const { return row_start_.size() - 1; }
    std::size_t cols() const { return n_cols_; }
    std::size_t nnz() const { return col_idx_.size(); }

    RowView row(std::size_t i) const {
        const std::size_t a = row_start_[i], b = row_start_[i + 1];
        return {std::span(col_idx_).subspan(a, b - a),
                std::span(values_).subspan(a, b - a)};
    }

    // Entries may arrive unsorted and may repeat; duplicates are summed and
    // exact zeros dropped.
    void append_row(std::vector<std::pair<std::uint32_t, double>> entries, int label) {
        std::sort(entries.begin(), entries.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t i = 0; i < entries.size();) {
            std::uint32_t c = entries[i].first;
            if (c >= n_cols_)
                throw std::out_of_range("FeatureMatrix: column " + std::to_string(c) +
                                        " out of range (cols=" + std::to_string(n_cols_) + ")");
            double v = 0.0;
            while (i < entries.size() && entries[i].first == c) v += entries[i++].second;
            if (v != 0.0) {
                col_idx_.push_back(c);
                values_.push_back(v);
            }
        }
        row_start_.push_back(col_idx_.size());
        labels.push_back(label);
    }

    void append_dense_row(std::span<const double> dense, int label) {
        for (std::uint32_t j = 0; j < dense.size(); ++j) {
            if (dense[j] != 0.0) {
                col_idx_.push_back(j);
                values_.push_back(dense[j]);
            }
        }
        if (dense.size() > n_cols_)
            throw std::out_of_range("FeatureMatrix: dense row wider than matrix");
        row_start_.push_back(col_idx_.size());
        labels.push_back(label);
    }

    // Copies an existing row (possibly from another matrix of equal width).
    void append_row_view(RowView r, int label) {
        col_idx_.insert(col_idx_.end(), r.cols.begin(), r.cols.end());
        values_.insert(values_.end(), r.vals.begin(), r.vals.end());
        row_start_.push_back(col_idx_.size());
        labels.push_back(label);
    }

    double value_at(std::size_t i, std::uint32_t j) const {
        RowView r = row(i);
        auto it = std::lower_bound(r.cols.begin(), r.cols.end(), j);
        if (it == r.cols.end() || *it != j) return 0.0;
        return r.vals[static_cast<std::size_t>(it - r.cols.begin())];
    }

    friend bool operator==(const FeatureMatrix& a, const FeatureMatrix& b) {
        return a.n_cols_ == b.n_cols_ && a.row_start_ == b.row_start_ &&
               a.col_idx_ == b.col_idx_ && a.values_ == b.values_ && a.labels == b.labels;
    }

    std::vector<int> labels;

private:
    std::size_t n_cols_ = 0;
    std::vector<std::size_t> row_start_{0};
    std::vector<std::uint32_t> col_idx_;
    std::vector<double> values_;
};

inline double value_at(RowView r, std::uint32_t j) {
    auto it = std::lower_bound(r.cols.begin(), r.cols.end(), j);
    if (it == r.cols.end() || *it != j) return 0.0;
    return r.vals[static_cast<std::size_t>(it - r.cols.begin())];
}

inline double sparse_dot(RowView a, RowView b) {
    double s = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.cols.size() && j < b.cols.size()) {
        if (a.cols[i] == b.cols[j])
            s += a.vals[i++] * b.vals[j++];
        else if (a.cols[i] < b.cols[j])
            ++i;
        else
            ++j;
    }
    return s;
}

inline double sparse_sqnorm(RowView a) {
    double s = 0.0;
    for (double v : a.vals) s += v * v;
    return s;
}

// ||a-b||^2 via the expansion; clamped at zero against cancellation noise.
inline double sparse_sqdist(RowView a, RowView b, double sqnorm_a, double sqnorm_b) {
    double d = sqnorm_a + sqnorm_b - 2.0 * sparse_dot(a, b);
    return d > 0.0 ? d : 0.0;
}

inline double sparse_sqdist(RowView a, RowView b) {
    return sparse_sqdist(a, b, sparse_sqnorm(a), sparse_sqnorm(b));
}

inline FeatureMatrix row_subset(const FeatureMatrix& X, std::span<const std::size_t> idx) {
    FeatureMatrix out(X.cols());
    for (std::size_t i : idx) out.append_row_view(X.row(i), X.labels[i]);
    return out;
}

} // namespace fnd
