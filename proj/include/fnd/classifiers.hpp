#pragma once

#include <istream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fnd/forest.hpp"
#include "fnd/linear.hpp"
#include "fnd/model.hpp"
#include "fnd/naive_bayes.hpp"
#include "fnd/svm.hpp"
#include "fnd/tree.hpp"

namespace fnd {

inline ModelKind model_kind_from_string(std::string s) {
    for (char& c : s)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if (s == "logreg" || s == "lr") return ModelKind::logreg;
    if (s == "svm") return ModelKind::svm;
    if (s == "mnb") return ModelKind::mnb;
    if (s == "bnb") return ModelKind::bnb;
    if (s == "dtree" || s == "dtc") return ModelKind::dtree;
    if (s == "rforest" || s == "rfc") return ModelKind::rforest;
    throw std::invalid_argument("unknown classifier '" + s +
                                "' (expected lr, svm, mnb, bnb, dtc or rfc)");
}

struct ClassifierConfig {
    ModelKind kind = ModelKind::logreg;
    double nb_alpha = 0.01;
    LogregConfig logreg;
    SvmConfig svm;
    TreeConfig tree;
    ForestConfig forest;
};

inline void reseed(ClassifierConfig& cfg, std::uint64_t seed) {
    cfg.svm.seed = seed;
    cfg.tree.seed = seed;
    cfg.forest.seed = seed;
}

inline std::unique_ptr<Model> train_classifier(const ClassifierConfig& cfg, const FeatureMatrix& X,
                                               const std::vector<int>& y,
                                               const ClassWeights* weights = nullptr,
                                               std::vector<std::string>* warnings = nullptr) {
    switch (cfg.kind) {
        case ModelKind::logreg:
            return train_logreg(X, y, weights ? *weights : ClassWeights{}, cfg.logreg, warnings);
        case ModelKind::svm: return train_svm(X, y, cfg.svm, weights, warnings);
        case ModelKind::mnb: return train_mnb(X, y, cfg.nb_alpha, weights, warnings);
        case ModelKind::bnb: return train_bnb(X, y, cfg.nb_alpha, weights, warnings);
        case ModelKind::dtree: return train_dtree(X, y, cfg.tree, weights);
        case ModelKind::rforest: return train_rforest(X, y, cfg.forest, weights);
    }
    throw std::logic_error("unreachable classifier kind");
}

// Reads back any stream produced by Model::save.
inline std::unique_ptr<Model> load_model(std::istream& is) {
    std::string magic, version, kind;
    if (!(is >> magic >> version >> kind) || magic != "fnd-model" || version != "v1")
        throw std::runtime_error("load_model: not a recognized model stream");
    if (kind == "logreg") return LogregModel::load(is);
    if (kind == "svm") return RbfSvmModel::load(is);
    if (kind == "mnb") return MultinomialNB::load(is);
    if (kind == "bnb") return BernoulliNB::load(is);
    if (kind == "dtree") return DecisionTreeModel::load(is);
    if (kind == "rforest") return RandomForestModel::load(is);
    throw std::runtime_error("load_model: unknown model kind '" + kind + "'");
}

inline std::string save_to_string(const Model& m) {
    std::ostringstream os;
    m.save(os);
    return os.str();
}

inline std::unique_ptr<Model> load_from_string(const std::string& s) {
    std::istringstream is(s);
    return load_model(is);
}

} // namespace fnd
