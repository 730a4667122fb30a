#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fnd/sparse.hpp"
#include "fnd/util.hpp"

namespace fnd {

enum class ResampleMethod { random_over, smote, adasyn, random_under, nearmiss };

struct ResamplePlan {
    ResampleMethod method = ResampleMethod::smote;
    int k_neighbors = 5;
    int nearmiss_version = 1; // 1, 2 or 3
    double beta = 1.0;        // ADASYN balance target in (0,1]
    std::uint64_t seed = 0;
};

struct Neighbor {
    std::size_t id;
    double distance;
};

// Per-query neighbor lists, distances non-decreasing, ties broken by lower id.
struct NeighborIndex {
    std::vector<std::vector<Neighbor>> neighbors;
};

namespace detail {

// Exact brute-force Euclidean kNN over row-id lists into one matrix.
// When exclude_identical_id is set a reference with the same row id as the
// query is skipped (self-querying).
inline NeighborIndex knn_ids(const FeatureMatrix& X, std::span<const std::size_t> query_ids,
                             std::span<const std::size_t> ref_ids, int k,
                             bool exclude_identical_id) {
    const std::size_t avail = ref_ids.size() - (exclude_identical_id ? 1 : 0);
    if (k < 1 || static_cast<std::size_t>(k) > avail)
        throw std::invalid_argument("knn: k=" + std::to_string(k) + " exceeds available references (" +
                                    std::to_string(avail) + ")");

    std::vector<double> ref_sq(ref_ids.size());
    for (std::size_t j = 0; j < ref_ids.size(); ++j) ref_sq[j] = sparse_sqnorm(X.row(ref_ids[j]));

    NeighborIndex out;
    out.neighbors.resize(query_ids.size());
    std::vector<Neighbor> cand;
    for (std::size_t qi = 0; qi < query_ids.size(); ++qi) {
        const std::size_t q = query_ids[qi];
        const RowView qr = X.row(q);
        const double q_sq = sparse_sqnorm(qr);
        cand.clear();
        cand.reserve(ref_ids.size());
        for (std::size_t j = 0; j < ref_ids.size(); ++j) {
            const std::size_t r = ref_ids[j];
            if (exclude_identical_id && r == q) continue;
            cand.push_back({r, sparse_sqdist(qr, X.row(r), q_sq, ref_sq[j])});
        }
        auto by_dist_then_id = [](const Neighbor& a, const Neighbor& b) {
            return a.distance != b.distance ? a.distance < b.distance : a.id < b.id;
        };
        std::partial_sort(cand.begin(), cand.begin() + k, cand.end(), by_dist_then_id);
        cand.resize(k);
        for (auto& nb : cand) nb.distance = std::sqrt(nb.distance);
        out.neighbors[qi] = cand;
    }
    return out;
}

inline std::vector<std::size_t> iota_ids(std::size_t n) {
    std::vector<std::size_t> ids(n);
    std::iota(ids.begin(), ids.end(), 0);
    return ids;
}

struct ClassSplit {
    std::vector<std::size_t> minority, majority;
    int minority_label;
};

// Smaller class is the minority; exact ties mean already balanced.
inline ClassSplit split_by_class(const std::vector<int>& y) {
    ClassSplit s;
    std::vector<std::size_t> zero, one;
    for (std::size_t i = 0; i < y.size(); ++i) (y[i] == 0 ? zero : one).push_back(i);
    if (zero.empty() || one.empty())
        throw std::invalid_argument("resampling requires both classes present");
    if (one.size() <= zero.size()) {
        s.minority = std::move(one);
        s.majority = std::move(zero);
        s.minority_label = 1;
    } else {
        s.minority = std::move(zero);
        s.majority = std::move(one);
        s.minority_label = 0;
    }
    return s;
}

inline FeatureMatrix copy_with_labels(const FeatureMatrix& X, const std::vector<int>& y) {
    FeatureMatrix out = X;
    out.labels = y;
    return out;
}

// s = a + lambda * (b - a), merged over the union of supports.
inline std::vector<std::pair<std::uint32_t, double>> interpolate_rows(RowView a, RowView b,
                                                                      double lambda) {
    std::vector<std::pair<std::uint32_t, double>> entries;
    entries.reserve(a.cols.size() + b.cols.size());
    std::size_t i = 0, j = 0;
    while (i < a.cols.size() || j < b.cols.size()) {
        if (j >= b.cols.size() || (i < a.cols.size() && a.cols[i] < b.cols[j])) {
            entries.emplace_back(a.cols[i], a.vals[i] * (1.0 - lambda));
            ++i;
        } else if (i >= a.cols.size() || b.cols[j] < a.cols[i]) {
            entries.emplace_back(b.cols[j], b.vals[j] * lambda);
            ++j;
        } else {
            entries.emplace_back(a.cols[i], a.vals[i] + lambda * (b.vals[j] - a.vals[i]));
            ++i;
            ++j;
        }
    }
    return entries;
}

} // namespace detail

inline NeighborIndex knn(const FeatureMatrix& X, std::span<const std::size_t> query_ids,
                         std::span<const std::size_t> ref_ids, int k,
                         bool exclude_identical_id = false) {
    return detail::knn_ids(X, query_ids, ref_ids, k, exclude_identical_id);
}

// All rows of X as both queries and references, self excluded.
inline NeighborIndex knn_self(const FeatureMatrix& X, int k) {
    auto ids = detail::iota_ids(X.rows());
    return detail::knn_ids(X, ids, ids, k, true);
}

// Duplicates minority rows (sampling with replacement) until class counts
// are equal. Originals are all retained in their input order.
inline FeatureMatrix random_oversample(const FeatureMatrix& X, const std::vector<int>& y,
                                       std::uint64_t seed) {
    auto cs = detail::split_by_class(y);
    FeatureMatrix out = detail::copy_with_labels(X, y);
    const std::size_t need = cs.majority.size() - cs.minority.size();
    if (need == 0) return out;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, cs.minority.size() - 1);
    for (std::size_t i = 0; i < need; ++i) {
        const std::size_t src = cs.minority[pick(rng)];
        out.append_row_view(X.row(src), cs.minority_label);
    }
    return out;
}

// Appends synthetic minority rows s = x_i + lambda * (x_nn - x_i) with x_nn
// drawn from the k nearest minority neighbors of a uniformly drawn minority
// row, until class counts are equal.
inline FeatureMatrix smote(const FeatureMatrix& X, const std::vector<int>& y,
                           const ResamplePlan& plan, std::vector<std::string>* warnings = nullptr) {
    auto cs = detail::split_by_class(y);
    FeatureMatrix out = detail::copy_with_labels(X, y);
    const std::size_t need = cs.majority.size() - cs.minority.size();
    if (need == 0) return out;
    if (cs.minority.size() < 2)
        throw std::invalid_argument("smote: minority class has fewer than 2 rows, cannot interpolate");

    int k = plan.k_neighbors;
    if (static_cast<std::size_t>(k) > cs.minority.size() - 1) {
        k = static_cast<int>(cs.minority.size()) - 1;
        warn_into(warnings, "smote: k_neighbors clamped to " + std::to_string(k));
    }
    const NeighborIndex nn = detail::knn_ids(X, cs.minority, cs.minority, k, true);

    std::mt19937_64 rng(plan.seed);
    std::uniform_int_distribution<std::size_t> pick_row(0, cs.minority.size() - 1);
    std::uniform_int_distribution<int> pick_nn(0, k - 1);
    std::uniform_real_distribution<double> lambda(0.0, 1.0);
    for (std::size_t s = 0; s < need; ++s) {
        const std::size_t qi = pick_row(rng);
        const std::size_t nb = nn.neighbors[qi][static_cast<std::size_t>(pick_nn(rng))].id;
        const double lam = lambda(rng);
        out.append_row(detail::interpolate_rows(X.row(cs.minority[qi]), X.row(nb), lam),
                       cs.minority_label);
    }
    return out;
}

// Adaptive synthetic oversampling: per-minority-point budgets proportional
// to the fraction of majority points among its k nearest neighbors in the
// full data, then SMOTE-style interpolation toward minority neighbors.
// Budgets use largest-remainder rounding so they sum to G exactly.
inline FeatureMatrix adasyn(const FeatureMatrix& X, const std::vector<int>& y,
                            const ResamplePlan& plan, std::vector<std::string>* warnings = nullptr) {
    auto cs = detail::split_by_class(y);
    FeatureMatrix out = detail::copy_with_labels(X, y);
    if (cs.majority.size() == cs.minority.size()) return out;
    if (cs.minority.size() < 2)
        throw std::invalid_argument("adasyn: minority class has fewer than 2 rows, cannot interpolate");
    if (!(plan.beta > 0.0 && plan.beta <= 1.0))
        throw std::invalid_argument("adasyn: beta must lie in (0,1]");

    const long long G =
        std::llround(plan.beta * static_cast<double>(cs.majority.size() - cs.minority.size()));
    if (G <= 0) return out;

    int k_ratio = plan.k_neighbors;
    if (static_cast<std::size_t>(k_ratio) > X.rows() - 1) {
        k_ratio = static_cast<int>(X.rows()) - 1;
        warn_into(warnings, "adasyn: ratio k clamped to " + std::to_string(k_ratio));
    }
    const auto all_ids = detail::iota_ids(X.rows());
    const NeighborIndex full_nn = detail::knn_ids(X, cs.minority, all_ids, k_ratio, true);

    std::vector<double> ratio(cs.minority.size(), 0.0);
    double ratio_sum = 0.0;
    for (std::size_t i = 0; i < cs.minority.size(); ++i) {
        int majority_hits = 0;
        for (const auto& nb : full_nn.neighbors[i])
            if (y[nb.id] != cs.minority_label) ++majority_hits;
        ratio[i] = static_cast<double>(majority_hits) / static_cast<double>(k_ratio);
        ratio_sum += ratio[i];
    }
    if (ratio_sum == 0.0) {
        warn_into(warnings, "adasyn: no minority point has majority neighbors; "
                            "falling back to uniform allocation");
        std::fill(ratio.begin(), ratio.end(), 1.0);
        ratio_sum = static_cast<double>(ratio.size());
    }

    // Largest-remainder apportionment of G over normalized ratios.
    std::vector<long long> budget(cs.minority.size());
    std::vector<std::pair<double, std::size_t>> frac(cs.minority.size());
    long long assigned = 0;
    for (std::size_t i = 0; i < ratio.size(); ++i) {
        const double exact = ratio[i] / ratio_sum * static_cast<double>(G);
        budget[i] = static_cast<long long>(std::floor(exact));
        frac[i] = {exact - std::floor(exact), i};
        assigned += budget[i];
    }
    std::sort(frac.begin(), frac.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    for (long long r = 0; r < G - assigned; ++r) ++budget[frac[static_cast<std::size_t>(r)].second];

    int k_gen = plan.k_neighbors;
    if (static_cast<std::size_t>(k_gen) > cs.minority.size() - 1) {
        k_gen = static_cast<int>(cs.minority.size()) - 1;
        warn_into(warnings, "adasyn: generation k clamped to " + std::to_string(k_gen));
    }
    const NeighborIndex min_nn = detail::knn_ids(X, cs.minority, cs.minority, k_gen, true);

    std::mt19937_64 rng(plan.seed);
    std::uniform_int_distribution<int> pick_nn(0, k_gen - 1);
    std::uniform_real_distribution<double> lambda(0.0, 1.0);
    for (std::size_t i = 0; i < cs.minority.size(); ++i) {
        for (long long g = 0; g < budget[i]; ++g) {
            const std::size_t nb = min_nn.neighbors[i][static_cast<std::size_t>(pick_nn(rng))].id;
            const double lam = lambda(rng);
            out.append_row(detail::interpolate_rows(X.row(cs.minority[i]), X.row(nb), lam),
                           cs.minority_label);
        }
    }
    return out;
}

// Keeps all minority rows and a seeded without-replacement subsample of the
// majority, preserving original row order.
inline FeatureMatrix random_undersample(const FeatureMatrix& X, const std::vector<int>& y,
                                        std::uint64_t seed) {
    auto cs = detail::split_by_class(y);
    if (cs.majority.size() == cs.minority.size()) return detail::copy_with_labels(X, y);
    std::mt19937_64 rng(seed);
    std::shuffle(cs.majority.begin(), cs.majority.end(), rng);
    cs.majority.resize(cs.minority.size());

    std::vector<std::size_t> keep = cs.majority;
    keep.insert(keep.end(), cs.minority.begin(), cs.minority.end());
    std::sort(keep.begin(), keep.end());
    FeatureMatrix out = row_subset(X, keep);
    for (std::size_t i = 0; i < keep.size(); ++i) out.labels[i] = y[keep[i]];
    return out;
}

// Distance-based majority selection. Version 1 keeps majority rows with the
// smallest mean distance to their k nearest minority rows; version 2 uses
// the k farthest minority rows; version 3 shortlists each minority row's k
// nearest majority rows first, then keeps shortlisted rows with the largest
// mean distance to their k nearest minority rows. Deterministic: ties break
// by row id.
inline FeatureMatrix nearmiss(const FeatureMatrix& X, const std::vector<int>& y,
                              const ResamplePlan& plan, std::vector<std::string>* warnings = nullptr) {
    auto cs = detail::split_by_class(y);
    if (cs.majority.size() == cs.minority.size()) return detail::copy_with_labels(X, y);

    int k = plan.k_neighbors;
    if (static_cast<std::size_t>(k) > cs.minority.size()) {
        k = static_cast<int>(cs.minority.size());
        warn_into(warnings, "nearmiss: k clamped to minority count " + std::to_string(k));
    }

    // Per-majority-row distance aggregation with a reused scratch buffer so
    // memory stays O(minority count) at full corpus scale.
    std::vector<double> min_sq(cs.minority.size());
    for (std::size_t j = 0; j < cs.minority.size(); ++j)
        min_sq[j] = sparse_sqnorm(X.row(cs.minority[j]));
    std::vector<double> scratch(cs.minority.size());
    auto mean_over = [&](std::size_t mi, bool nearest) {
        const RowView mr = X.row(cs.majority[mi]);
        const double m_sq = sparse_sqnorm(mr);
        for (std::size_t j = 0; j < cs.minority.size(); ++j)
            scratch[j] = sparse_sqdist(mr, X.row(cs.minority[j]), m_sq, min_sq[j]);
        const auto kth = scratch.begin() + k;
        if (nearest)
            std::partial_sort(scratch.begin(), kth, scratch.end());
        else
            std::partial_sort(scratch.begin(), kth, scratch.end(), std::greater<double>());
        double s = 0.0;
        for (int i = 0; i < k; ++i) s += std::sqrt(scratch[static_cast<std::size_t>(i)]);
        return s / static_cast<double>(k);
    };

    std::vector<std::size_t> keep_majority;
    const std::size_t want = cs.minority.size();
    if (plan.nearmiss_version == 1 || plan.nearmiss_version == 2) {
        std::vector<std::pair<double, std::size_t>> ranked(cs.majority.size());
        for (std::size_t mi = 0; mi < cs.majority.size(); ++mi)
            ranked[mi] = {mean_over(mi, plan.nearmiss_version == 1), cs.majority[mi]};
        std::sort(ranked.begin(), ranked.end());
        for (std::size_t i = 0; i < want; ++i) keep_majority.push_back(ranked[i].second);
    } else if (plan.nearmiss_version == 3) {
        const NeighborIndex shortlist_nn = detail::knn_ids(
            X, cs.minority, cs.majority, std::min<int>(k, static_cast<int>(cs.majority.size())),
            false);
        std::vector<char> shortlisted(X.rows(), 0);
        for (const auto& lst : shortlist_nn.neighbors)
            for (const auto& nb : lst) shortlisted[nb.id] = 1;

        std::vector<std::pair<double, std::size_t>> in_list, out_list;
        for (std::size_t mi = 0; mi < cs.majority.size(); ++mi) {
            const double m = mean_over(mi, true);
            // Largest mean first; ties by lower id.
            (shortlisted[cs.majority[mi]] ? in_list : out_list).push_back({-m, cs.majority[mi]});
        }
        std::sort(in_list.begin(), in_list.end());
        std::sort(out_list.begin(), out_list.end());
        for (const auto& [negm, id] : in_list) {
            if (keep_majority.size() == want) break;
            keep_majority.push_back(id);
        }
        if (keep_majority.size() < want) {
            warn_into(warnings, "nearmiss v3: shortlist smaller than minority count; "
                                "padding from remaining majority rows");
            for (const auto& [negm, id] : out_list) {
                if (keep_majority.size() == want) break;
                keep_majority.push_back(id);
            }
        }
    } else {
        throw std::invalid_argument("nearmiss: unknown version " +
                                    std::to_string(plan.nearmiss_version));
    }

    std::vector<std::size_t> keep = std::move(keep_majority);
    keep.insert(keep.end(), cs.minority.begin(), cs.minority.end());
    std::sort(keep.begin(), keep.end());
    FeatureMatrix out = row_subset(X, keep);
    for (std::size_t i = 0; i < keep.size(); ++i) out.labels[i] = y[keep[i]];
    return out;
}

inline FeatureMatrix resample(const FeatureMatrix& X, const std::vector<int>& y,
                              const ResamplePlan& plan, std::vector<std::string>* warnings = nullptr) {
    switch (plan.method) {
        case ResampleMethod::random_over: return random_oversample(X, y, plan.seed);
        case ResampleMethod::smote: return smote(X, y, plan, warnings);
        case ResampleMethod::adasyn: return adasyn(X, y, plan, warnings);
        case ResampleMethod::random_under: return random_undersample(X, y, plan.seed);
        case ResampleMethod::nearmiss: return nearmiss(X, y, plan, warnings);
    }
    throw std::logic_error("unreachable resample method");
}

} // namespace fnd
