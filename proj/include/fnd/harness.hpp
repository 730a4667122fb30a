#pragma once

#include <chrono>
#include <cstdint>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "fnd/config.hpp"
#include "fnd/corpus.hpp"
#include "fnd/metrics.hpp"
#include "fnd/resample.hpp"
#include "fnd/stack.hpp"
#include "fnd/text.hpp"
#include "fnd/vectorize.hpp"

namespace fnd {

struct StageTime {
    std::string stage;
    double seconds = 0.0;
};

// One pipeline execution. The config snapshot plus the input corpus fully
// determine every number here; timing is the only nondeterministic field
// and machine-readable reports leave it out for that reason.
struct RunResult {
    ExperimentConfig config;
    MetricsReport metric;
    std::vector<StageTime> timing;
    std::vector<std::string> warnings;
    std::size_t train_rows = 0, train_rows_resampled = 0;
    std::size_t test_rows = 0, test_rows_resampled = 0;
    std::size_t vocab_size = 0;
    int positive_label = 1;
    bool ok = false;
    std::string status = "failed"; // ok | failed | skipped
    std::string detail;

    double total_seconds() const {
        double s = 0.0;
        for (const StageTime& t : timing) s += t.seconds;
        return s;
    }
};

namespace detail {

class StageRunner {
public:
    explicit StageRunner(std::vector<StageTime>& sink) : sink_(&sink) {}

    template <class F>
    auto operator()(const char* name, F&& f) {
        const auto t0 = std::chrono::steady_clock::now();
        try {
            if constexpr (std::is_void_v<std::invoke_result_t<F>>) {
                std::forward<F>(f)();
                push(name, t0);
            } else {
                auto r = std::forward<F>(f)();
                push(name, t0);
                return r;
            }
        } catch (const std::exception& e) {
            throw std::runtime_error("stage " + std::string(name) + ": " + e.what());
        }
    }

private:
    void push(const char* name, std::chrono::steady_clock::time_point t0) {
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
        sink_->push_back({name, dt.count()});
    }
    std::vector<StageTime>* sink_;
};

inline ResampleMethod to_resample_method(Method m) {
    switch (m) {
        case Method::random_over: return ResampleMethod::random_over;
        case Method::smote: return ResampleMethod::smote;
        case Method::adasyn: return ResampleMethod::adasyn;
        case Method::random_under: return ResampleMethod::random_under;
        case Method::nearmiss: return ResampleMethod::nearmiss;
        default: throw std::logic_error("method does not resample");
    }
}

inline std::vector<ClassifierConfig> stack_bases_from(const ClassifierConfig& tmpl) {
    std::vector<ClassifierConfig> bases = default_stack_bases();
    for (ClassifierConfig& b : bases) {
        const ModelKind kind = b.kind;
        b = tmpl;
        b.kind = kind;
    }
    return bases;
}

} // namespace detail

inline RunResult run_experiment(const ExperimentConfig& cfg, const LabeledDataset& corpus) {
    RunResult rr;
    rr.config = cfg;
    detail::StageRunner stage(rr.timing);
    const double ratio = effective_split_ratio(cfg);
    const bool resamples = cfg.method != Method::baseline && cfg.method != Method::class_weight &&
                           cfg.method != Method::stacking;

    const auto docs = stage("preprocess", [&] {
        const StopwordSet stops = StopwordSet::builtin();
        const Stemmer stemmer = Stemmer::builtin();
        return preprocess_all(corpus, stops, stemmer);
    });

    std::vector<TokenizedDoc> train_docs, test_docs;
    stage("split", [&] {
        const std::vector<char> mask =
            split_train_mask(corpus.labels(), ratio, cfg.seed, true, &rr.warnings);
        for (std::size_t i = 0; i < docs.size(); ++i)
            (mask[i] ? train_docs : test_docs).push_back(docs[i]);
    });

    const Vocabulary vocab = stage("fit_vectorizer", [&] {
        return cfg.vectorizer == VectorizerKind::count
                   ? fit_count(train_docs, cfg.ngrams, &rr.warnings)
                   : fit_tfidf(train_docs, cfg.ngrams, &rr.warnings);
    });
    rr.vocab_size = vocab.size();

    auto transform = [&](const std::vector<TokenizedDoc>& d) {
        return cfg.vectorizer == VectorizerKind::count ? transform_count(d, vocab)
                                                       : transform_tfidf(d, vocab);
    };
    FeatureMatrix Xtr = stage("transform_train", [&] { return transform(train_docs); });
    FeatureMatrix Xte = stage("transform_test", [&] { return transform(test_docs); });
    if (vocab.size() != rr.vocab_size)
        throw std::runtime_error("stage transform_test: vocabulary changed while transforming "
                                 "the test split (train-only fit violated)");
    rr.train_rows = Xtr.rows();
    rr.test_rows = Xte.rows();

    // The positive (reported) class is the rarer label before resampling.
    std::size_t n0 = 0, n1 = 0;
    for (int v : Xtr.labels) (v == 0 ? n0 : n1) += 1;
    rr.positive_label = n1 <= n0 ? 1 : 0;

    if (resamples) {
        ResamplePlan plan;
        plan.method = detail::to_resample_method(cfg.method);
        plan.k_neighbors = cfg.k_neighbors;
        plan.nearmiss_version = cfg.nearmiss_version;
        plan.beta = cfg.adasyn_beta;
        plan.seed = derive_seed(cfg.seed, 11);
        Xtr = stage("resample_train",
                    [&] { return resample(Xtr, Xtr.labels, plan, &rr.warnings); });
        if (cfg.oversample_test && is_oversampler(cfg.method)) {
            plan.seed = derive_seed(cfg.seed, 12);
            Xte = stage("resample_test",
                        [&] { return resample(Xte, Xte.labels, plan, &rr.warnings); });
        }
    }
    rr.train_rows_resampled = Xtr.rows();
    rr.test_rows_resampled = Xte.rows();

    ClassWeights weights;
    const ClassWeights* weights_ptr = nullptr;
    if (cfg.method == Method::class_weight) {
        weights = balanced_class_weights(Xtr.labels);
        weights_ptr = &weights;
    }

    std::vector<int> preds;
    if (cfg.method == Method::stacking) {
        StackSpec sp;
        sp.base_model_configs = detail::stack_bases_from(cfg.model);
        sp.meta_model_config = cfg.model;
        sp.meta_model_config.kind = cfg.classifier;
        sp.n_folds = cfg.n_folds;
        sp.seed = derive_seed(cfg.seed, 21);
        sp.hard_labels = cfg.stack_hard_labels;
        sp.meta_also_at_level0 = !cfg.stack_exclude_meta;
        const StackedModel sm =
            stage("train", [&] { return train_stack(sp, Xtr, Xtr.labels, &rr.warnings); });
        preds = stage("predict", [&] { return predict_stack(sm, Xte); });
    } else {
        ClassifierConfig mc = cfg.model;
        mc.kind = cfg.classifier;
        reseed(mc, derive_seed(cfg.seed, 21));
        const std::unique_ptr<Model> model = stage(
            "train", [&] { return train_classifier(mc, Xtr, Xtr.labels, weights_ptr, &rr.warnings); });
        preds = stage("predict", [&] { return predict(*model, Xte); });
    }

    rr.metric = stage("evaluate", [&] {
        return fnd::evaluate(Xte.labels, preds, rr.positive_label);
    });
    rr.ok = true;
    rr.status = "ok";
    return rr;
}

inline RunResult run_experiment(const ExperimentConfig& cfg, const std::string& corpus_path) {
    std::vector<StageTime> pre;
    detail::StageRunner stage(pre);
    std::vector<std::string> diags;
    const LabeledDataset ds =
        stage("load", [&] { return load_corpus(corpus_path, cfg.schema, &diags); });
    RunResult rr = run_experiment(cfg, ds);
    rr.timing.insert(rr.timing.begin(), pre.begin(), pre.end());
    rr.warnings.insert(rr.warnings.begin(), diags.begin(), diags.end());
    return rr;
}

struct MethodVariant {
    Method method = Method::baseline;
    bool oversample_test = false;
};

// The ten resampling-table rows: each oversampler once with the test split
// untouched and once with it oversampled too.
inline std::vector<MethodVariant> default_sweep_variants() {
    return {{Method::baseline, false},    {Method::random_over, false},
            {Method::random_over, true},  {Method::smote, false},
            {Method::smote, true},        {Method::adasyn, false},
            {Method::adasyn, true},       {Method::random_under, false},
            {Method::nearmiss, false},    {Method::class_weight, false}};
}

inline std::vector<VectorizerKind> default_sweep_vectorizers() {
    return {VectorizerKind::count, VectorizerKind::tfidf};
}

inline std::vector<ModelKind> default_sweep_classifiers() {
    return {ModelKind::logreg, ModelKind::svm,     ModelKind::mnb,
            ModelKind::bnb,    ModelKind::rforest, ModelKind::dtree};
}

struct SweepSummaryRow {
    Method method = Method::baseline;
    bool oversample_test = false;
    VectorizerKind vectorizer = VectorizerKind::count;
    ModelKind classifier = ModelKind::logreg;
    MetricsReport metric;
    bool valid = false; // false when every run in the cell failed
};

struct SweepReport {
    std::vector<RunResult> runs;
    std::vector<SweepSummaryRow> best;
};

// Never-throwing variant: exceptions become a failed (or, for the kernel
// row-cap refusal, skipped) result so batch callers can keep going.
inline RunResult run_guarded(const ExperimentConfig& cfg, const LabeledDataset& corpus) {
    try {
        return run_experiment(cfg, corpus);
    } catch (const std::exception& e) {
        RunResult rr;
        rr.config = cfg;
        rr.ok = false;
        rr.detail = e.what();
        rr.status = rr.detail.find("exceed the cap") != std::string::npos ? "skipped" : "failed";
        return rr;
    }
}

// Full grid in roster order; per-run seeds derive from the base seed and the
// run index, and each cell's summary row is the F1 argmax (earlier classifier
// wins ties). Failed cells are recorded, never fatal.
inline SweepReport run_sweep(const ExperimentConfig& base, const std::vector<MethodVariant>& methods,
                             const std::vector<VectorizerKind>& vectorizers,
                             const std::vector<ModelKind>& classifiers,
                             const LabeledDataset& corpus) {
    SweepReport rep;
    std::uint64_t run_idx = 0;
    for (const MethodVariant& mv : methods) {
        for (VectorizerKind vec : vectorizers) {
            SweepSummaryRow row;
            row.method = mv.method;
            row.oversample_test = mv.oversample_test;
            row.vectorizer = vec;
            for (ModelKind clf : classifiers) {
                ExperimentConfig cfg = base;
                cfg.method = mv.method;
                cfg.oversample_test = mv.oversample_test;
                cfg.vectorizer = vec;
                cfg.classifier = clf;
                cfg.seed = derive_seed(base.seed, run_idx++);
                RunResult rr = run_guarded(cfg, corpus);
                if (rr.ok && (!row.valid || rr.metric.f1 > row.metric.f1)) {
                    row.valid = true;
                    row.classifier = clf;
                    row.metric = rr.metric;
                }
                rep.runs.push_back(std::move(rr));
            }
            rep.best.push_back(row);
        }
    }
    return rep;
}

inline SweepReport run_sweep(const ExperimentConfig& base, const LabeledDataset& corpus) {
    return run_sweep(base, default_sweep_variants(), default_sweep_vectorizers(),
                     default_sweep_classifiers(), corpus);
}

// Six stacking runs on TF-IDF features, one per meta-classifier, plus a
// single best row.
inline SweepReport run_stacking_sweep(const ExperimentConfig& base, const LabeledDataset& corpus) {
    SweepReport rep;
    const std::vector<ModelKind> metas = {ModelKind::logreg, ModelKind::svm,     ModelKind::mnb,
                                          ModelKind::bnb,    ModelKind::rforest, ModelKind::dtree};
    SweepSummaryRow row;
    row.method = Method::stacking;
    row.vectorizer = VectorizerKind::tfidf;
    for (std::size_t m = 0; m < metas.size(); ++m) {
        ExperimentConfig cfg = base;
        cfg.method = Method::stacking;
        cfg.vectorizer = VectorizerKind::tfidf;
        cfg.classifier = metas[m];
        cfg.seed = derive_seed(base.seed, m);
        RunResult rr = run_guarded(cfg, corpus);
        if (rr.ok && (!row.valid || rr.metric.f1 > row.metric.f1)) {
            row.valid = true;
            row.classifier = metas[m];
            row.metric = rr.metric;
        }
        rep.runs.push_back(std::move(rr));
    }
    rep.best.push_back(row);
    return rep;
}

// ---------------------------------------------------------------------------
// Report writers. CSV and JSON are the machine-readable forms: stable field
// order, full double precision, no timing, so equal-seed runs are
// byte-identical. The table form is for terminals and includes timing.

namespace detail {

inline void csv_text(std::ostream& os, const std::string& v) {
    if (v.find_first_of(",\"\n\r") == std::string::npos) {
        os << v;
        return;
    }
    os << '"';
    for (char c : v) {
        if (c == '"') os << '"';
        os << c;
    }
    os << '"';
}

inline std::string joined_warnings(const std::vector<std::string>& w) {
    std::string out;
    for (const std::string& s : w) {
        if (!out.empty()) out += "; ";
        out += s;
    }
    return out;
}

inline void json_text(std::ostream& os, const std::string& v) {
    os << '"';
    for (char c : v) {
        switch (c) {
            case '"': os << "\\\""; break;
            case '\\': os << "\\\\"; break;
            case '\n': os << "\\n"; break;
            case '\r': os << "\\r"; break;
            case '\t': os << "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20)
                    os << "\\u" << std::hex << std::setw(4) << std::setfill('0')
                       << static_cast<int>(c) << std::dec << std::setfill(' ');
                else
                    os << c;
        }
    }
    os << '"';
}

inline const char* bool_text(bool b) { return b ? "true" : "false"; }

} // namespace detail

inline std::string csv_runs_report(const SweepReport& rep) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "method,oversample_test,vectorizer,classifier,split_ratio,seed,status,detail,"
          "positive_label,train_rows,train_rows_resampled,test_rows,test_rows_resampled,"
          "vocab_size,tp,fp,tn,fn,accuracy,precision,recall,f1,degenerate,warnings\n";
    for (const RunResult& r : rep.runs) {
        const ExperimentConfig& c = r.config;
        os << to_string(c.method) << ',' << (c.oversample_test ? 1 : 0) << ','
           << to_string(c.vectorizer) << ',' << to_string(c.classifier) << ','
           << effective_split_ratio(c) << ',' << c.seed << ',' << r.status << ',';
        detail::csv_text(os, r.detail);
        os << ',' << r.positive_label << ',' << r.train_rows << ',' << r.train_rows_resampled
           << ',' << r.test_rows << ',' << r.test_rows_resampled << ',' << r.vocab_size << ','
           << r.metric.cm.tp << ',' << r.metric.cm.fp << ',' << r.metric.cm.tn << ','
           << r.metric.cm.fn << ',' << r.metric.accuracy << ',' << r.metric.precision << ','
           << r.metric.recall << ',' << r.metric.f1 << ',' << (r.metric.degenerate ? 1 : 0) << ',';
        detail::csv_text(os, detail::joined_warnings(r.warnings));
        os << '\n';
    }
    return os.str();
}

inline std::string csv_summary_report(const SweepReport& rep) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "method,oversample_test,vectorizer,classifier,accuracy,precision,recall,f1,valid\n";
    for (const SweepSummaryRow& row : rep.best) {
        os << to_string(row.method) << ',' << (row.oversample_test ? 1 : 0) << ','
           << to_string(row.vectorizer) << ',' << to_string(row.classifier) << ','
           << row.metric.accuracy << ',' << row.metric.precision << ',' << row.metric.recall
           << ',' << row.metric.f1 << ',' << (row.valid ? 1 : 0) << '\n';
    }
    return os.str();
}

inline std::string json_report(const SweepReport& rep) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "{\n  \"runs\": [";
    for (std::size_t i = 0; i < rep.runs.size(); ++i) {
        const RunResult& r = rep.runs[i];
        const ExperimentConfig& c = r.config;
        os << (i ? ",\n    " : "\n    ") << "{\"method\": ";
        detail::json_text(os, to_string(c.method));
        os << ", \"oversample_test\": " << detail::bool_text(c.oversample_test)
           << ", \"vectorizer\": ";
        detail::json_text(os, to_string(c.vectorizer));
        os << ", \"classifier\": ";
        detail::json_text(os, to_string(c.classifier));
        os << ", \"split_ratio\": " << effective_split_ratio(c) << ", \"seed\": " << c.seed
           << ", \"status\": ";
        detail::json_text(os, r.status);
        os << ", \"detail\": ";
        detail::json_text(os, r.detail);
        os << ", \"positive_label\": " << r.positive_label
           << ", \"train_rows\": " << r.train_rows
           << ", \"train_rows_resampled\": " << r.train_rows_resampled
           << ", \"test_rows\": " << r.test_rows
           << ", \"test_rows_resampled\": " << r.test_rows_resampled
           << ", \"vocab_size\": " << r.vocab_size << ", \"confusion\": {\"tp\": " << r.metric.cm.tp
           << ", \"fp\": " << r.metric.cm.fp << ", \"tn\": " << r.metric.cm.tn
           << ", \"fn\": " << r.metric.cm.fn << "}, \"accuracy\": " << r.metric.accuracy
           << ", \"precision\": " << r.metric.precision << ", \"recall\": " << r.metric.recall
           << ", \"f1\": " << r.metric.f1
           << ", \"degenerate\": " << detail::bool_text(r.metric.degenerate) << ", \"warnings\": [";
        for (std::size_t w = 0; w < r.warnings.size(); ++w) {
            if (w) os << ", ";
            detail::json_text(os, r.warnings[w]);
        }
        os << "]}";
    }
    os << "\n  ],\n  \"best\": [";
    for (std::size_t i = 0; i < rep.best.size(); ++i) {
        const SweepSummaryRow& row = rep.best[i];
        os << (i ? ",\n    " : "\n    ") << "{\"method\": ";
        detail::json_text(os, to_string(row.method));
        os << ", \"oversample_test\": " << detail::bool_text(row.oversample_test)
           << ", \"vectorizer\": ";
        detail::json_text(os, to_string(row.vectorizer));
        os << ", \"classifier\": ";
        detail::json_text(os, to_string(row.classifier));
        os << ", \"accuracy\": " << row.metric.accuracy
           << ", \"precision\": " << row.metric.precision << ", \"recall\": " << row.metric.recall
           << ", \"f1\": " << row.metric.f1 << ", \"valid\": " << detail::bool_text(row.valid)
           << "}";
    }
    os << "\n  ]\n}\n";
    return os.str();
}

inline std::string table_report(const SweepReport& rep) {
    std::ostringstream os;
    os << std::left << std::setw(14) << "method" << std::setw(9) << "test_rs" << std::setw(7)
       << "vec" << std::setw(9) << "clf" << std::right << std::setw(7) << "acc" << std::setw(7)
       << "prec" << std::setw(7) << "rec" << std::setw(7) << "f1" << std::setw(10) << "train"
       << std::setw(9) << "test" << std::setw(9) << "sec"
       << "  status\n";
    os << std::string(95, '-') << '\n';
    os << std::fixed;
    for (const RunResult& r : rep.runs) {
        const ExperimentConfig& c = r.config;
        os << std::left << std::setw(14) << to_string(c.method) << std::setw(9)
           << (c.oversample_test ? "yes" : "no") << std::setw(7) << to_string(c.vectorizer)
           << std::setw(9) << to_string(c.classifier) << std::right << std::setprecision(3)
           << std::setw(7) << r.metric.accuracy << std::setw(7) << r.metric.precision
           << std::setw(7) << r.metric.recall << std::setw(7) << r.metric.f1 << std::setw(10)
           << r.train_rows_resampled << std::setw(9) << r.test_rows_resampled << std::setw(9)
           << std::setprecision(2) << r.total_seconds() << "  " << r.status;
        if (!r.detail.empty()) os << ": " << r.detail;
        os << '\n';
    }
    if (!rep.best.empty()) {
        os << '\n' << "best per cell:\n";
        for (const SweepSummaryRow& row : rep.best) {
            os << "  " << std::left << std::setw(14) << to_string(row.method) << std::setw(9)
               << (row.oversample_test ? "yes" : "no") << std::setw(7) << to_string(row.vectorizer);
            if (row.valid)
                os << std::setw(9) << to_string(row.classifier) << " f1=" << std::setprecision(3)
                   << row.metric.f1;
            else
                os << "(no successful run)";
            os << '\n';
        }
    }
    return os.str();
}

// Per-stage timing detail for a single run.
inline std::string run_report_text(const RunResult& r) {
    std::ostringstream os;
    SweepReport one;
    one.runs.push_back(r);
    os << table_report(one) << '\n' << "stages:\n" << std::fixed << std::setprecision(3);
    for (const StageTime& t : r.timing)
        os << "  " << std::left << std::setw(18) << t.stage << t.seconds << "s\n";
    return os.str();
}

} // namespace fnd
