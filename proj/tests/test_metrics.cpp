#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "fnd/metrics.hpp"
#include "generators.hpp"

using fnd::Confusion;
using fnd::confusion;
using fnd::metrics;

TEST_CASE("the harmonic mean of a published precision/recall pair") {
    // P = 0.846, R = 0.742 gives F1 = 2PR/(P+R) = 0.790594..., i.e. 0.791
    // at three decimals.
    const double p = 0.846, r = 0.742;
    const double f1 = 2.0 * p * r / (p + r);
    CHECK(f1 == Catch::Approx(0.790594458438287).margin(1e-12));
    CHECK(std::round(f1 * 1000.0) / 1000.0 == Catch::Approx(0.791).margin(1e-12));
}

TEST_CASE("metrics on a hand-filled confusion matrix") {
    const Confusion c{.tp = 30, .fp = 10, .tn = 50, .fn = 10};
    const auto m = metrics(c);
    CHECK(m.accuracy == Catch::Approx(0.8).margin(1e-15));
    CHECK(m.precision == Catch::Approx(0.75).margin(1e-15));
    CHECK(m.recall == Catch::Approx(0.75).margin(1e-15));
    CHECK(m.f1 == Catch::Approx(0.75).margin(1e-15));
    CHECK_FALSE(m.degenerate);
    CHECK(m.support_positive() == 40);
    CHECK(m.support_negative() == 60);
}

TEST_CASE("f1 lies between precision and recall and is zero iff tp is zero") {
    std::mt19937_64 rng(8675309);
    std::uniform_int_distribution<std::uint64_t> cell(0, 40);
    for (int it = 0; it < 400; ++it) {
        Confusion c{.tp = cell(rng), .fp = cell(rng), .tn = cell(rng), .fn = cell(rng)};
        if (c.total() == 0) c.tn = 1;
        const auto m = metrics(c);
        if (!m.degenerate) {
            CHECK(m.f1 >= std::min(m.precision, m.recall) - 1e-12);
            CHECK(m.f1 <= std::max(m.precision, m.recall) + 1e-12);
        }
        if (c.tp + c.fp + c.fn > 0) {
            if (c.tp == 0)
                CHECK(m.f1 == 0.0);
            else
                CHECK(m.f1 > 0.0);
        }
        CHECK(m.accuracy >= 0.0);
        CHECK(m.accuracy <= 1.0);
    }
}

TEST_CASE("perfect agreement scores ones across the board") {
    std::mt19937_64 rng(42);
    std::vector<int> y(200);
    for (int& v : y) v = static_cast<int>(rng() % 2);
    y[0] = 1; // make sure the positive class is present
    const auto m = metrics(confusion(y, y, 1), 1);
    CHECK(m.accuracy == 1.0);
    CHECK(m.precision == 1.0);
    CHECK(m.recall == 1.0);
    CHECK(m.f1 == 1.0);
    CHECK_FALSE(m.degenerate);
}

TEST_CASE("confusion cells agree with a brute-force recount") {
    std::mt19937_64 rng(1000003);
    for (int it = 0; it < 1000; ++it) {
        const std::size_t n = 1 + rng() % 60;
        std::vector<int> truth(n), pred(n);
        for (std::size_t i = 0; i < n; ++i) {
            truth[i] = static_cast<int>(rng() % 2);
            pred[i] = static_cast<int>(rng() % 2);
        }
        const int positive = static_cast<int>(rng() % 2);
        const auto got = confusion(truth, pred, positive);
        const auto want = testgen::recount(truth, pred, positive);
        REQUIRE(got.tp == want.tp);
        REQUIRE(got.fp == want.fp);
        REQUIRE(got.tn == want.tn);
        REQUIRE(got.fn == want.fn);
        REQUIRE(got.total() == n);
    }
}

TEST_CASE("positive label zero swaps the cell roles") {
    const std::vector<int> truth{0, 0, 1, 1};
    const std::vector<int> pred{0, 1, 1, 0};
    const auto pos1 = confusion(truth, pred, 1);
    const auto pos0 = confusion(truth, pred, 0);
    CHECK(pos1.tp == pos0.tn);
    CHECK(pos1.fp == pos0.fn);
    CHECK(pos1.tn == pos0.tp);
    CHECK(pos1.fn == pos0.fp);
}

TEST_CASE("degenerate inputs flag instead of throwing") {
    const auto empty = metrics(Confusion{});
    CHECK(empty.degenerate);
    CHECK(empty.accuracy == 0.0);
    CHECK(empty.f1 == 0.0);

    // All-negative truth and predictions: no positive support anywhere.
    const std::vector<int> zeros(5, 0);
    const auto m = fnd::evaluate(zeros, zeros, 1);
    CHECK(m.degenerate);
    CHECK(m.accuracy == 1.0);
    CHECK(m.precision == 0.0);
    CHECK(m.recall == 0.0);
    CHECK(m.f1 == 0.0);
}

TEST_CASE("length mismatch is an error") {
    const std::vector<int> a{0, 1};
    const std::vector<int> b{0, 1, 0};
    CHECK_THROWS_WITH(confusion(a, b, 1), Catch::Matchers::ContainsSubstring("2 labels vs 3"));
}
