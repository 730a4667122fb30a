// Command-line front end: run one experiment, sweep the method grid, sweep
// stacking meta-models, or generate a synthetic corpus.
#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "fnd/config.hpp"
#include "fnd/harness.hpp"
#include "fnd/synth.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string corpus_path;
    std::string out_dir = ".";
    std::string format = "table";
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string method, vectorizer, classifier;
    int oversample_test = -1; // -1 unset, else 0/1
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool with_method_flags) {
    cmd->add_option("--config", a.config_path, "Config file (key = value lines)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--corpus", a.corpus_path, "Corpus CSV file")->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", a.out_dir, "Directory for report files (default .)");
    cmd->add_option("--format", a.format, "Report format: table, csv or json")
        ->check(CLI::IsMember({"table", "csv", "json"}));
    cmd->add_option("--seed", a.seed, "Master seed")->each([&](const std::string&) {
        a.seed_set = true;
    });
    cmd->add_option("--set", a.overrides, "Extra config override, key=value (repeatable)");
    if (with_method_flags) {
        cmd->add_option("--method", a.method,
                        "baseline, random_over, smote, adasyn, random_under, nearmiss, "
                        "class_weight or stacking");
        cmd->add_option("--vectorizer", a.vectorizer, "count or tfidf");
        cmd->add_option("--classifier", a.classifier, "lr, svm, mnb, bnb, dtc or rfc");
        cmd->add_flag_callback(
            "--oversample-test", [&a] { a.oversample_test = 1; },
            "Also oversample the test split (oversampling methods only)");
        cmd->add_flag_callback(
            "--no-oversample-test", [&a] { a.oversample_test = 0; },
            "Leave the test split untouched even if the config says otherwise");
    }
}

fnd::ExperimentConfig build_config(const CommonArgs& a) {
    fnd::ExperimentConfig cfg;
    if (!a.config_path.empty()) cfg = fnd::load_config(a.config_path, cfg);
    if (a.seed_set) cfg.seed = a.seed;
    if (!a.method.empty()) fnd::apply_config_entry(cfg, "method", a.method);
    if (!a.vectorizer.empty()) fnd::apply_config_entry(cfg, "vectorizer", a.vectorizer);
    if (!a.classifier.empty()) fnd::apply_config_entry(cfg, "classifier", a.classifier);
    if (a.oversample_test >= 0) cfg.oversample_test = a.oversample_test != 0;
    for (const std::string& kv : a.overrides) {
        const std::size_t eq = kv.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
        fnd::apply_config_entry(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    return cfg;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << content;
    std::cout << "wrote " << path.string() << "\n";
}

void emit(const fnd::SweepReport& rep, const CommonArgs& a, const std::string& stem) {
    if (a.format == "table") {
        std::cout << fnd::table_report(rep);
        return;
    }
    const std::filesystem::path dir(a.out_dir);
    std::filesystem::create_directories(dir);
    if (a.format == "csv") {
        write_file(dir / (stem + "_runs.csv"), fnd::csv_runs_report(rep));
        write_file(dir / (stem + "_summary.csv"), fnd::csv_summary_report(rep));
    } else {
        write_file(dir / (stem + ".json"), fnd::json_report(rep));
    }
}

int cmd_run(const CommonArgs& a) {
    const fnd::ExperimentConfig cfg = build_config(a);
    const fnd::RunResult rr = fnd::run_experiment(cfg, a.corpus_path);
    if (a.format == "table") {
        std::cout << fnd::run_report_text(rr);
    } else {
        fnd::SweepReport rep;
        rep.runs.push_back(rr);
        emit(rep, a, "run");
    }
    return 0;
}

int cmd_sweep(const CommonArgs& a) {
    const fnd::ExperimentConfig base = build_config(a);
    std::vector<std::string> diags;
    const fnd::LabeledDataset ds = fnd::load_corpus(a.corpus_path, base.schema, &diags);
    for (const std::string& d : diags) std::cerr << "note: " << d << "\n";
    const fnd::SweepReport rep = fnd::run_sweep(base, ds);
    emit(rep, a, "sweep");
    for (const fnd::RunResult& r : rep.runs)
        if (r.status != "ok") std::cerr << r.status << ": " << r.detail << "\n";
    return 0;
}

int cmd_stack(const CommonArgs& a) {
    const fnd::ExperimentConfig base = build_config(a);
    std::vector<std::string> diags;
    const fnd::LabeledDataset ds = fnd::load_corpus(a.corpus_path, base.schema, &diags);
    for (const std::string& d : diags) std::cerr << "note: " << d << "\n";
    const fnd::SweepReport rep = fnd::run_stacking_sweep(base, ds);
    emit(rep, a, "stack");
    for (const fnd::RunResult& r : rep.runs)
        if (r.status != "ok") std::cerr << r.status << ": " << r.detail << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Imbalanced Bangla text-classification pipeline"};
    app.require_subcommand(1);

    CommonArgs run_args, sweep_args, stack_args;
    CLI::App* run = app.add_subcommand("run", "Run a single experiment");
    add_common(run, run_args, true);
    CLI::App* sweep = app.add_subcommand("sweep", "Run the full method x vectorizer x "
                                                  "classifier grid");
    add_common(sweep, sweep_args, false);
    CLI::App* stack = app.add_subcommand("stack", "Run the six stacking meta-model variants");
    add_common(stack, stack_args, false);

    CLI::App* synth = app.add_subcommand("synth", "Generate a seeded synthetic corpus CSV");
    fnd::SynthSpec synth_spec;
    std::string synth_out = "synthetic.csv";
    synth->add_option("--out", synth_out, "Output CSV path");
    synth->add_option("--majority", synth_spec.n_majority, "Majority-class documents");
    synth->add_option("--minority", synth_spec.n_minority, "Minority-class documents");
    synth->add_option("--seed", synth_spec.seed, "Generator seed");
    synth->add_option("--noise", synth_spec.noise_rate, "Junk-token rate in (0,1)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(run)) return cmd_run(run_args);
        if (app.got_subcommand(sweep)) return cmd_sweep(sweep_args);
        if (app.got_subcommand(stack)) return cmd_stack(stack_args);
        const fnd::LabeledDataset ds = fnd::generate_synthetic_corpus(synth_spec);
        fnd::write_corpus_csv(ds, synth_out);
        std::cout << "wrote " << synth_out << " (" << ds.count(0) << " majority, " << ds.count(1)
                  << " minority)\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
