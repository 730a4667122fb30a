#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "fnd/sparse.hpp"

namespace fnd {

enum class ModelKind { logreg, svm, mnb, bnb, dtree, rforest };

inline const char* to_string(ModelKind k) {
    switch (k) {
        case ModelKind::logreg: return "logreg";
        case ModelKind::svm: return "svm";
        case ModelKind::mnb: return "mnb";
        case ModelKind::bnb: return "bnb";
        case ModelKind::dtree: return "dtree";
        case ModelKind::rforest: return "rforest";
    }
    return "?";
}

// Per-class sample weights for the binary labels {0, 1}.
struct ClassWeights {
    double w0 = 1.0;
    double w1 = 1.0;
    double at(int label) const { return label == 0 ? w0 : w1; }
    bool uniform() const { return w0 == 1.0 && w1 == 1.0; }
};

// w_c = N / (K * n_c) over the K classes actually present. A class with no
// rows keeps weight 1 so at() stays harmless.
inline ClassWeights balanced_class_weights(const std::vector<int>& y) {
    if (y.empty()) throw std::invalid_argument("balanced_class_weights: empty label vector");
    double n0 = 0, n1 = 0;
    for (int v : y) (v == 0 ? n0 : n1) += 1.0;
    const double n = n0 + n1;
    const double k = (n0 > 0 ? 1.0 : 0.0) + (n1 > 0 ? 1.0 : 0.0);
    ClassWeights w;
    if (n0 > 0) w.w0 = n / (k * n0);
    if (n1 > 0) w.w1 = n / (k * n1);
    return w;
}

// Binary classifier interface. score_row is a positive-class score: a
// probability for the probabilistic models, a margin for the SVM, a vote
// fraction for the forest. Higher always means more fake-leaning.
class Model {
public:
    virtual ~Model() = default;
    virtual ModelKind kind() const = 0;
    virtual std::size_t n_features() const = 0;
    virtual int predict_row(RowView row) const = 0;
    virtual double score_row(RowView row) const = 0;
    virtual void save(std::ostream& os) const = 0;
};

namespace detail {
inline void check_width(const Model& m, const FeatureMatrix& X, const char* op) {
    if (X.cols() != m.n_features())
        throw std::invalid_argument(std::string(op) + ": matrix has " + std::to_string(X.cols()) +
                                    " features but model expects " +
                                    std::to_string(m.n_features()));
}
} // namespace detail

inline std::vector<int> predict(const Model& m, const FeatureMatrix& X) {
    detail::check_width(m, X, "predict");
    std::vector<int> out(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) out[i] = m.predict_row(X.row(i));
    return out;
}

inline std::vector<double> score(const Model& m, const FeatureMatrix& X) {
    detail::check_width(m, X, "score");
    std::vector<double> out(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) out[i] = m.score_row(X.row(i));
    return out;
}

} // namespace fnd
