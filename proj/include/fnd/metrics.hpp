#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

namespace fnd {

struct Confusion {
    std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
    std::uint64_t total() const { return tp + fp + tn + fn; }
};

inline Confusion confusion(std::span<const int> truth, std::span<const int> pred,
                           int positive_label) {
    if (truth.size() != pred.size())
        throw std::invalid_argument("confusion: " + std::to_string(truth.size()) + " labels vs " +
                                    std::to_string(pred.size()) + " predictions");
    Confusion c;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool t = truth[i] == positive_label;
        const bool p = pred[i] == positive_label;
        if (t && p)
            ++c.tp;
        else if (!t && p)
            ++c.fp;
        else if (t && !p)
            ++c.fn;
        else
            ++c.tn;
    }
    return c;
}

// Positive-class metrics. Undefined ratios (0/0) come back as 0 with the
// degenerate flag raised so callers can tell a true zero from a vacuous one;
// sweeps must never abort on a lopsided confusion matrix.
struct MetricsReport {
    Confusion cm;
    int positive_label = 1;
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool degenerate = false;

    std::uint64_t support_positive() const { return cm.tp + cm.fn; }
    std::uint64_t support_negative() const { return cm.tn + cm.fp; }
};

inline MetricsReport metrics(const Confusion& c, int positive_label = 1) {
    MetricsReport r;
    r.cm = c;
    r.positive_label = positive_label;
    if (c.total() == 0) {
        r.degenerate = true;
        return r;
    }
    r.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
    if (c.tp + c.fp == 0)
        r.degenerate = true;
    else
        r.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    if (c.tp + c.fn == 0)
        r.degenerate = true;
    else
        r.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    if (r.precision + r.recall > 0.0)
        r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
    else
        r.degenerate = true;
    return r;
}

inline MetricsReport evaluate(std::span<const int> truth, std::span<const int> pred,
                              int positive_label) {
    return metrics(confusion(truth, pred, positive_label), positive_label);
}

} // namespace fnd
