#pragma once

#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fnd/classifiers.hpp"
#include "fnd/corpus.hpp"
#include "fnd/vectorize.hpp"

namespace fnd {

enum class Method {
    baseline,
    random_over,
    smote,
    adasyn,
    random_under,
    nearmiss,
    class_weight,
    stacking
};

enum class VectorizerKind { count, tfidf };

inline const char* to_string(Method m) {
    switch (m) {
        case Method::baseline: return "baseline";
        case Method::random_over: return "random_over";
        case Method::smote: return "smote";
        case Method::adasyn: return "adasyn";
        case Method::random_under: return "random_under";
        case Method::nearmiss: return "nearmiss";
        case Method::class_weight: return "class_weight";
        case Method::stacking: return "stacking";
    }
    return "?";
}

inline const char* to_string(VectorizerKind v) {
    return v == VectorizerKind::count ? "count" : "tfidf";
}

inline Method method_from_string(const std::string& s) {
    if (s == "baseline") return Method::baseline;
    if (s == "random_over" || s == "oversample") return Method::random_over;
    if (s == "smote") return Method::smote;
    if (s == "adasyn") return Method::adasyn;
    if (s == "random_under" || s == "undersample") return Method::random_under;
    if (s == "nearmiss") return Method::nearmiss;
    if (s == "class_weight") return Method::class_weight;
    if (s == "stacking") return Method::stacking;
    throw std::invalid_argument("unknown method '" + s +
                                "' (expected baseline, random_over, smote, adasyn, random_under, "
                                "nearmiss, class_weight or stacking)");
}

inline VectorizerKind vectorizer_from_string(const std::string& s) {
    if (s == "count") return VectorizerKind::count;
    if (s == "tfidf") return VectorizerKind::tfidf;
    throw std::invalid_argument("unknown vectorizer '" + s + "' (expected count or tfidf)");
}

inline bool is_oversampler(Method m) {
    return m == Method::random_over || m == Method::smote || m == Method::adasyn;
}

// One experiment, fully specified. split_ratio 0 means the protocol
// default: 0.7 for oversampling methods, 0.8 for everything else.
struct ExperimentConfig {
    Method method = Method::baseline;
    VectorizerKind vectorizer = VectorizerKind::tfidf;
    ModelKind classifier = ModelKind::logreg;
    double split_ratio = 0.0;
    bool oversample_test = false;
    std::uint64_t seed = 0;
    int k_neighbors = 5;
    int nearmiss_version = 1;
    double adasyn_beta = 1.0;
    NgramRange ngrams{1, 2};
    ClassifierConfig model; // hyperparameters; kind is overwritten by `classifier`
    int n_folds = 5;        // stacking only
    bool stack_hard_labels = false;
    bool stack_exclude_meta = false;
    CsvSchema schema;
};

inline double effective_split_ratio(const ExperimentConfig& cfg) {
    if (cfg.split_ratio != 0.0) return cfg.split_ratio;
    return is_oversampler(cfg.method) ? 0.7 : 0.8;
}

namespace detail {

inline bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw std::invalid_argument("config key '" + key + "': expected a boolean, got '" + v + "'");
}

inline double parse_double(const std::string& v, const std::string& key) {
    std::size_t used = 0;
    double d;
    try {
        d = std::stod(v, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': expected a number, got '" + v + "'");
    }
    if (used != v.size())
        throw std::invalid_argument("config key '" + key + "': trailing junk in '" + v + "'");
    return d;
}

inline long long parse_int(const std::string& v, const std::string& key) {
    std::size_t used = 0;
    long long d;
    try {
        d = std::stoll(v, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': expected an integer, got '" + v +
                                    "'");
    }
    if (used != v.size())
        throw std::invalid_argument("config key '" + key + "': trailing junk in '" + v + "'");
    return d;
}

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

} // namespace detail

// Applies one key=value pair; CLI overrides reuse this so flag and file
// semantics cannot drift apart.
inline void apply_config_entry(ExperimentConfig& cfg, const std::string& key,
                               const std::string& value) {
    using detail::parse_bool;
    using detail::parse_double;
    using detail::parse_int;
    if (key == "method")
        cfg.method = method_from_string(value);
    else if (key == "vectorizer")
        cfg.vectorizer = vectorizer_from_string(value);
    else if (key == "classifier")
        cfg.classifier = model_kind_from_string(value);
    else if (key == "split_ratio") {
        const double r = parse_double(value, key);
        if (!(r > 0.0 && r < 1.0))
            throw std::invalid_argument("config key 'split_ratio': must lie in (0,1)");
        cfg.split_ratio = r;
    } else if (key == "oversample_test")
        cfg.oversample_test = parse_bool(value, key);
    else if (key == "seed")
        cfg.seed = static_cast<std::uint64_t>(parse_int(value, key));
    else if (key == "k_neighbors")
        cfg.k_neighbors = static_cast<int>(parse_int(value, key));
    else if (key == "nearmiss_version")
        cfg.nearmiss_version = static_cast<int>(parse_int(value, key));
    else if (key == "adasyn_beta")
        cfg.adasyn_beta = parse_double(value, key);
    else if (key == "ngram_min")
        cfg.ngrams.lo = static_cast<int>(parse_int(value, key));
    else if (key == "ngram_max")
        cfg.ngrams.hi = static_cast<int>(parse_int(value, key));
    else if (key == "nb_alpha")
        cfg.model.nb_alpha = parse_double(value, key);
    else if (key == "svm_gamma")
        cfg.model.svm.gamma = parse_double(value, key);
    else if (key == "svm_c")
        cfg.model.svm.C = parse_double(value, key);
    else if (key == "svm_tol")
        cfg.model.svm.tol = parse_double(value, key);
    else if (key == "svm_row_cap")
        cfg.model.svm.row_cap = static_cast<std::size_t>(parse_int(value, key));
    else if (key == "lr_lambda")
        cfg.model.logreg.lambda = parse_double(value, key);
    else if (key == "lr_tol")
        cfg.model.logreg.tol = parse_double(value, key);
    else if (key == "lr_max_epochs")
        cfg.model.logreg.max_epochs = static_cast<int>(parse_int(value, key));
    else if (key == "max_depth") {
        cfg.model.tree.max_depth = static_cast<int>(parse_int(value, key));
        cfg.model.forest.max_depth = cfg.model.tree.max_depth;
    } else if (key == "n_estimators")
        cfg.model.forest.n_estimators = static_cast<int>(parse_int(value, key));
    else if (key == "sqrt_features")
        cfg.model.forest.sqrt_features = parse_bool(value, key);
    else if (key == "bootstrap")
        cfg.model.forest.bootstrap = parse_bool(value, key);
    else if (key == "n_folds")
        cfg.n_folds = static_cast<int>(parse_int(value, key));
    else if (key == "stack_hard_labels")
        cfg.stack_hard_labels = parse_bool(value, key);
    else if (key == "stack_exclude_meta")
        cfg.stack_exclude_meta = parse_bool(value, key);
    else if (key == "content_column")
        cfg.schema.content = value;
    else if (key == "label_column")
        cfg.schema.label = value;
    else if (key == "id_column")
        cfg.schema.id = value;
    else if (key == "delimiter") {
        if (value == "tab" || value == "\\t")
            cfg.schema.delimiter = '\t';
        else if (value.size() == 1)
            cfg.schema.delimiter = value[0];
        else
            throw std::invalid_argument("config key 'delimiter': expected one character or 'tab'");
    } else
        throw std::invalid_argument("unknown config key '" + key + "'");
}

// Flat key = value text; '#' starts a comment, blank lines ignored.
inline ExperimentConfig parse_config(std::istream& is, ExperimentConfig cfg = {}) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const std::string t = detail::trim(line);
        if (t.empty()) continue;
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected key = value, got '" + t + "'");
        const std::string key = detail::trim(t.substr(0, eq));
        const std::string value = detail::trim(t.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty key");
        try {
            apply_config_entry(cfg, key, value);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {}) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config file: " + path);
    return parse_config(f, std::move(base));
}

} // namespace fnd
