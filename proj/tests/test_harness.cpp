#include <catch2/catch_amalgamated.hpp>

#include <sstream>
#include <string>
#include <vector>

#include "fnd/config.hpp"
#include "fnd/harness.hpp"
#include "fnd/synth.hpp"

using fnd::ExperimentConfig;
using fnd::LabeledDataset;
using fnd::Method;
using fnd::ModelKind;
using fnd::SynthSpec;
using fnd::VectorizerKind;

namespace {

LabeledDataset small_corpus(std::uint64_t seed = 1) {
    SynthSpec spec;
    spec.n_majority = 200;
    spec.n_minority = 40;
    spec.doc_len_min = 15;
    spec.doc_len_max = 25;
    spec.seed = seed;
    return fnd::generate_synthetic_corpus(spec);
}

ExperimentConfig fast_config() {
    ExperimentConfig cfg;
    cfg.classifier = ModelKind::mnb;
    cfg.vectorizer = VectorizerKind::count;
    cfg.model.forest.n_estimators = 10;
    return cfg;
}

} // namespace

TEST_CASE("split protocol defaults depend on whether the method oversamples") {
    ExperimentConfig cfg;
    cfg.method = Method::baseline;
    CHECK(fnd::effective_split_ratio(cfg) == 0.8);
    cfg.method = Method::smote;
    CHECK(fnd::effective_split_ratio(cfg) == 0.7);
    cfg.method = Method::random_over;
    CHECK(fnd::effective_split_ratio(cfg) == 0.7);
    cfg.method = Method::random_under;
    CHECK(fnd::effective_split_ratio(cfg) == 0.8);
    cfg.method = Method::smote;
    cfg.split_ratio = 0.6; // explicit ratio always wins
    CHECK(fnd::effective_split_ratio(cfg) == 0.6);
}

TEST_CASE("runs observe the protocol split sizes") {
    const auto corpus = small_corpus();

    auto cfg = fast_config();
    cfg.method = Method::baseline;
    const auto base = fnd::run_experiment(cfg, corpus);
    REQUIRE(base.ok);
    CHECK(base.train_rows == 192); // 160 + 32 at the 80:20 protocol
    CHECK(base.test_rows == 48);
    CHECK(base.train_rows_resampled == base.train_rows);
    CHECK(base.positive_label == 1);

    cfg.method = Method::smote;
    const auto sm = fnd::run_experiment(cfg, corpus);
    REQUIRE(sm.ok);
    CHECK(sm.train_rows == 168); // 140 + 28 at the 70:30 protocol
    CHECK(sm.test_rows == 72);
    CHECK(sm.train_rows_resampled == 280); // equalized at two x 140
    CHECK(sm.test_rows_resampled == 72);   // test split untouched by default

    cfg.oversample_test = true;
    const auto smt = fnd::run_experiment(cfg, corpus);
    REQUIRE(smt.ok);
    CHECK(smt.test_rows_resampled == 120); // two x 60 after oversampling
}

TEST_CASE("machine-readable reports replay byte-identically") {
    const auto corpus = small_corpus(7);
    auto cfg = fast_config();
    cfg.method = Method::smote;
    cfg.seed = 99;

    fnd::SweepReport a, b;
    a.runs.push_back(fnd::run_experiment(cfg, corpus));
    b.runs.push_back(fnd::run_experiment(cfg, corpus));
    CHECK(fnd::csv_runs_report(a) == fnd::csv_runs_report(b));
    CHECK(fnd::json_report(a) == fnd::json_report(b));
    CHECK(fnd::csv_runs_report(a).find("smote") != std::string::npos);

    // Different seed, different resample draws: the reports must not match.
    cfg.seed = 100;
    fnd::SweepReport c;
    c.runs.push_back(fnd::run_experiment(cfg, corpus));
    CHECK(fnd::csv_runs_report(a) != fnd::csv_runs_report(c));
}

TEST_CASE("a reduced sweep grid runs every combination in roster order") {
    const auto corpus = small_corpus(3);
    auto base = fast_config();
    base.seed = 5;

    const std::vector<fnd::MethodVariant> methods = {{Method::baseline, false},
                                                     {Method::smote, true}};
    const std::vector<VectorizerKind> vecs = {VectorizerKind::count};
    const std::vector<ModelKind> clfs = {ModelKind::mnb, ModelKind::dtree};
    const auto rep = fnd::run_sweep(base, methods, vecs, clfs, corpus);

    REQUIRE(rep.runs.size() == 4);
    REQUIRE(rep.best.size() == 2);
    CHECK(rep.runs[0].config.method == Method::baseline);
    CHECK(rep.runs[0].config.classifier == ModelKind::mnb);
    CHECK(rep.runs[1].config.classifier == ModelKind::dtree);
    CHECK(rep.runs[2].config.method == Method::smote);
    CHECK(rep.runs[2].config.oversample_test);
    for (const auto& rr : rep.runs) CHECK(rr.ok);
    // Per-run seeds are derived, not shared.
    CHECK(rep.runs[0].config.seed != rep.runs[1].config.seed);

    for (const auto& row : rep.best) {
        CHECK(row.valid);
        CHECK((row.classifier == ModelKind::mnb || row.classifier == ModelKind::dtree));
    }

    const auto empty = fnd::run_sweep(base, {}, vecs, clfs, corpus);
    CHECK(empty.runs.empty());
    CHECK(empty.best.empty());
    const auto csv = fnd::csv_runs_report(empty);
    CHECK(csv.find("method,") == 0); // header only
    CHECK(csv.find('\n') == csv.size() - 1);
}

TEST_CASE("row-capped svm runs are skipped, real failures are failures") {
    const auto corpus = small_corpus(11);
    auto cfg = fast_config();
    cfg.classifier = ModelKind::svm;
    cfg.model.svm.row_cap = 5;
    const auto skipped = fnd::run_guarded(cfg, corpus);
    CHECK_FALSE(skipped.ok);
    CHECK(skipped.status == "skipped");
    CHECK(skipped.detail.find("exceed the cap") != std::string::npos);

    LabeledDataset lone;
    for (const auto& a : corpus.records)
        if (a.label == 0) lone.push_back(a);
    auto base = fast_config();
    base.classifier = ModelKind::logreg;
    const auto failed = fnd::run_guarded(base, lone);
    CHECK_FALSE(failed.ok);
    CHECK(failed.status == "failed");
    CHECK(failed.detail.find("stage train") != std::string::npos);
    CHECK(failed.detail.find("single class") != std::string::npos);
}

TEST_CASE("config text parses keys, comments and aliases") {
    std::istringstream is("method = smote   # oversampler\n"
                          "\n"
                          "vectorizer = count\n"
                          "classifier = rfc\n"
                          "split_ratio = 0.6\n"
                          "seed = 42\n"
                          "k_neighbors = 3\n"
                          "n_estimators = 25\n");
    const auto cfg = fnd::parse_config(is);
    CHECK(cfg.method == Method::smote);
    CHECK(cfg.vectorizer == VectorizerKind::count);
    CHECK(cfg.classifier == ModelKind::rforest);
    CHECK(cfg.split_ratio == 0.6);
    CHECK(cfg.seed == 42);
    CHECK(cfg.k_neighbors == 3);
    CHECK(cfg.model.forest.n_estimators == 25);
}

TEST_CASE("config errors name the offending line") {
    std::istringstream bad_key("seed = 1\nnot_a_key = 2\n");
    CHECK_THROWS_WITH(fnd::parse_config(bad_key),
                      Catch::Matchers::ContainsSubstring("line 2") &&
                          Catch::Matchers::ContainsSubstring("unknown config key"));

    std::istringstream no_eq("method smote\n");
    CHECK_THROWS_WITH(fnd::parse_config(no_eq),
                      Catch::Matchers::ContainsSubstring("line 1") &&
                          Catch::Matchers::ContainsSubstring("key = value"));

    std::istringstream bad_ratio("split_ratio = 1.5\n");
    CHECK_THROWS_WITH(fnd::parse_config(bad_ratio),
                      Catch::Matchers::ContainsSubstring("split_ratio"));

    ExperimentConfig cfg;
    CHECK_THROWS_WITH(fnd::apply_config_entry(cfg, "method", "bogus"),
                      Catch::Matchers::ContainsSubstring("unknown"));
}

TEST_CASE("synthetic corpora are deterministic and well-formed") {
    SynthSpec spec;
    spec.n_majority = 60;
    spec.n_minority = 12;
    spec.doc_len_min = 10;
    spec.doc_len_max = 16;
    spec.seed = 5;

    const auto a = fnd::generate_synthetic_corpus(spec);
    const auto b = fnd::generate_synthetic_corpus(spec);
    std::ostringstream sa, sb;
    fnd::write_corpus_csv(a, sa);
    fnd::write_corpus_csv(b, sb);
    CHECK(sa.str() == sb.str());

    spec.seed = 6;
    std::ostringstream sc;
    fnd::write_corpus_csv(fnd::generate_synthetic_corpus(spec), sc);
    CHECK(sa.str() != sc.str());

    REQUIRE(a.size() == 72);
    std::size_t fake = 0;
    for (const auto& r : a.records) fake += static_cast<std::size_t>(r.label);
    CHECK(fake == 12);

    // Written CSV loads straight back with the default schema.
    std::istringstream round(sa.str());
    const auto loaded = fnd::load_corpus(round);
    REQUIRE(loaded.size() == 72);
    CHECK(loaded.labels() == a.labels());

    // The Bangla token stream survives the preprocessing whitelist.
    const auto docs =
        fnd::preprocess_all(loaded, fnd::StopwordSet::builtin(), fnd::Stemmer::builtin());
    std::size_t nonempty = 0;
    for (const auto& d : docs) nonempty += d.tokens.empty() ? 0 : 1;
    CHECK(nonempty == docs.size());
}

TEST_CASE("bad synth specs are rejected") {
    SynthSpec spec;
    spec.n_minority = 0;
    CHECK_THROWS(fnd::generate_synthetic_corpus(spec));
    spec.n_minority = 5;
    spec.doc_len_min = 9;
    spec.doc_len_max = 3;
    CHECK_THROWS(fnd::generate_synthetic_corpus(spec));
}

TEST_CASE("stacking runs report through the same harness") {
    SynthSpec spec;
    spec.n_majority = 90;
    spec.n_minority = 30;
    spec.doc_len_min = 10;
    spec.doc_len_max = 18;
    spec.seed = 17;
    const auto corpus = fnd::generate_synthetic_corpus(spec);

    auto cfg = fast_config();
    cfg.method = Method::stacking;
    cfg.classifier = ModelKind::rforest; // meta model
    cfg.vectorizer = VectorizerKind::tfidf;
    cfg.n_folds = 3;
    const auto rr = fnd::run_experiment(cfg, corpus);
    REQUIRE(rr.ok);
    CHECK(rr.train_rows == rr.train_rows_resampled); // stacking never resamples
    CHECK(rr.metric.cm.total() == rr.test_rows);

    const auto text = fnd::run_report_text(rr);
    CHECK(text.find("stacking") != std::string::npos);
    CHECK(text.find("train") != std::string::npos);
}
