#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "fnd/classifiers.hpp"
#include "fnd/naive_bayes.hpp"
#include "generators.hpp"

using fnd::FeatureMatrix;
using testgen::make_dense;

namespace {

// One document per class: class 0 holds term 0 once, class 1 holds term 1
// once. With alpha = 0.01 and equal priors, querying {term0: 1} gives a
// log joint difference of exactly ln(101) for MNB and 2 ln(101) for BNB.
const FeatureMatrix kTwoDoc = make_dense({{1.0, 0.0}, {0.0, 1.0}}, {0, 1});
constexpr double kLn101 = 4.61512051684126;

} // namespace

TEST_CASE("multinomial posterior matches the hand-computed log-odds") {
    const auto m = fnd::train_mnb(kTwoDoc, kTwoDoc.labels, 0.01);
    const fnd::RowView q = kTwoDoc.row(0); // {term0: 1}
    const double lo = m->log_joint(q, 0) - m->log_joint(q, 1);
    CHECK(lo == Catch::Approx(kLn101).margin(1e-9));
    CHECK(m->predict_row(q) == 0);
    CHECK(m->score_row(q) == Catch::Approx(1.0 / (1.0 + std::exp(lo))).margin(1e-12));
}

TEST_CASE("bernoulli posterior matches the hand-computed log-odds") {
    const auto m = fnd::train_bnb(kTwoDoc, kTwoDoc.labels, 0.01);
    const fnd::RowView q = kTwoDoc.row(0); // term0 present, term1 absent
    const double lo = m->log_joint(q, 0) - m->log_joint(q, 1);
    CHECK(lo == Catch::Approx(2.0 * kLn101).margin(1e-9));
    CHECK(m->predict_row(q) == 0);
}

TEST_CASE("huge smoothing washes out the evidence") {
    // alpha -> infinity pushes every theta to the uniform limit; with equal
    // priors the log-odds collapse toward zero.
    const auto m = fnd::train_mnb(kTwoDoc, kTwoDoc.labels, 1e9);
    const fnd::RowView q = kTwoDoc.row(0);
    CHECK(std::abs(m->log_joint(q, 0) - m->log_joint(q, 1)) < 1e-6);
}

TEST_CASE("bernoulli ignores magnitudes, multinomial does not") {
    const FeatureMatrix amplified = make_dense({{7.0, 0.0}, {0.0, 3.0}}, {0, 1});
    const auto b_plain = fnd::train_bnb(kTwoDoc, kTwoDoc.labels, 0.01);
    const auto b_amp = fnd::train_bnb(amplified, amplified.labels, 0.01);
    const fnd::RowView q = kTwoDoc.row(0);
    CHECK(b_plain->log_joint(q, 0) == Catch::Approx(b_amp->log_joint(q, 0)).margin(1e-12));
    CHECK(b_plain->log_joint(q, 1) == Catch::Approx(b_amp->log_joint(q, 1)).margin(1e-12));

    const auto m_plain = fnd::train_mnb(kTwoDoc, kTwoDoc.labels, 0.01);
    const auto m_amp = fnd::train_mnb(amplified, amplified.labels, 0.01);
    CHECK(std::abs((m_plain->log_joint(q, 0) - m_plain->log_joint(q, 1)) -
                   (m_amp->log_joint(q, 0) - m_amp->log_joint(q, 1))) > 1e-6);
}

TEST_CASE("scaling one class's counts proportionally keeps mnb argmax stable") {
    // Three docs per class over four terms with clear margins; tripling the
    // counts of every class-0 document leaves all predicted labels unchanged
    // (priors stay equal, likelihood ratios are invariant up to smoothing).
    const FeatureMatrix base = make_dense(
        {
            {4.0, 1.0, 0.0, 0.0},
            {3.0, 2.0, 0.0, 0.0},
            {5.0, 1.0, 1.0, 0.0},
            {0.0, 0.0, 3.0, 2.0},
            {0.0, 1.0, 2.0, 4.0},
            {1.0, 0.0, 2.0, 3.0},
        },
        {0, 0, 0, 1, 1, 1});
    FeatureMatrix scaled(base.cols());
    for (std::size_t i = 0; i < base.rows(); ++i) {
        const fnd::RowView r = base.row(i);
        std::vector<std::pair<std::uint32_t, double>> entries;
        for (std::size_t k = 0; k < r.nnz(); ++k) {
            const double f = base.labels[i] == 0 ? 3.0 : 1.0;
            entries.emplace_back(r.cols[k], r.vals[k] * f);
        }
        scaled.append_row(entries, base.labels[i]);
    }
    const auto a = fnd::train_mnb(base, base.labels, 0.01);
    const auto b = fnd::train_mnb(scaled, scaled.labels, 0.01);
    for (std::size_t i = 0; i < base.rows(); ++i)
        CHECK(a->predict_row(base.row(i)) == b->predict_row(base.row(i)));
}

TEST_CASE("empty query row falls back to the prior argmax") {
    // 3:1 prior toward class 0.
    const FeatureMatrix X =
        make_dense({{1.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}, {0, 0, 0, 1});
    FeatureMatrix empty_row(2);
    empty_row.append_row({}, 0);
    const auto m = fnd::train_mnb(X, X.labels, 0.01);
    CHECK(m->predict_row(empty_row.row(0)) == 0);
    const auto b = fnd::train_bnb(X, X.labels, 0.01);
    CHECK(b->predict_row(empty_row.row(0)) == 0);
}

TEST_CASE("negative features are rejected, class weights warn") {
    const FeatureMatrix bad = make_dense({{-1.0, 0.0}, {0.0, 1.0}}, {0, 1});
    CHECK_THROWS_WITH(fnd::train_mnb(bad, bad.labels, 0.01),
                      Catch::Matchers::ContainsSubstring("negative feature"));

    std::vector<std::string> warnings;
    const fnd::ClassWeights w{0.6, 19.2};
    const auto m = fnd::train_mnb(kTwoDoc, kTwoDoc.labels, 0.01, &w, &warnings);
    CHECK(m != nullptr);
    REQUIRE_FALSE(warnings.empty());
    CHECK(warnings[0].find("ignored") != std::string::npos);
}

TEST_CASE("alpha must be positive") {
    CHECK_THROWS(fnd::train_mnb(kTwoDoc, kTwoDoc.labels, 0.0));
    CHECK_THROWS(fnd::train_bnb(kTwoDoc, kTwoDoc.labels, -1.0));
}

TEST_CASE("nb models save/load round-trip") {
    const auto m = fnd::train_mnb(kTwoDoc, kTwoDoc.labels, 0.01);
    std::stringstream ss;
    m->save(ss);
    const auto r = fnd::load_model(ss);
    REQUIRE(r->kind() == fnd::ModelKind::mnb);
    for (std::size_t i = 0; i < kTwoDoc.rows(); ++i)
        CHECK(m->score_row(kTwoDoc.row(i)) ==
              Catch::Approx(r->score_row(kTwoDoc.row(i))).margin(1e-15));

    const auto b = fnd::train_bnb(kTwoDoc, kTwoDoc.labels, 0.01);
    std::stringstream sb;
    b->save(sb);
    const auto rb = fnd::load_model(sb);
    REQUIRE(rb->kind() == fnd::ModelKind::bnb);
    for (std::size_t i = 0; i < kTwoDoc.rows(); ++i)
        CHECK(b->score_row(kTwoDoc.row(i)) ==
              Catch::Approx(rb->score_row(kTwoDoc.row(i))).margin(1e-15));
}
