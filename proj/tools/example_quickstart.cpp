// Minimal library walkthrough: build a skewed corpus, run the baseline and a
// SMOTE pipeline on it, and compare minority-class F1.
#include <iostream>

#include "fnd/harness.hpp"
#include "fnd/synth.hpp"

int main() {
    fnd::SynthSpec spec;
    spec.n_majority = 1200;
    spec.n_minority = 60;
    spec.seed = 42;
    const fnd::LabeledDataset corpus = fnd::generate_synthetic_corpus(spec);
    std::cout << "corpus: " << corpus.count(0) << " majority / " << corpus.count(1)
              << " minority documents\n";

    fnd::ExperimentConfig cfg;
    cfg.vectorizer = fnd::VectorizerKind::count;
    cfg.classifier = fnd::ModelKind::logreg;
    cfg.seed = 1;

    cfg.method = fnd::Method::baseline;
    const fnd::RunResult base = fnd::run_experiment(cfg, corpus);
    std::cout << "baseline  count+lr  f1=" << base.metric.f1 << "\n";

    cfg.method = fnd::Method::smote;
    const fnd::RunResult smote = fnd::run_experiment(cfg, corpus);
    std::cout << "smote     count+lr  f1=" << smote.metric.f1 << "\n";
    return 0;
}
