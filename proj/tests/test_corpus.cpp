#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <set>
#include <sstream>

#include "fnd/corpus.hpp"

using fnd::CsvSchema;
using fnd::LabeledDataset;

namespace {

std::string fixture_path(const char* name) {
    return std::string(FND_FIXTURE_DIR) + "/" + name;
}

LabeledDataset dataset_with_counts(std::size_t n0, std::size_t n1) {
    LabeledDataset ds;
    for (std::size_t i = 0; i < n0 + n1; ++i) {
        fnd::RawArticle a;
        a.id = "r" + std::to_string(i);
        a.content = "x";
        a.label = i < n1 ? 1 : 0;
        ds.push_back(std::move(a));
    }
    return ds;
}

} // namespace

TEST_CASE("csv reader handles quoting, embedded delimiters and newlines") {
    std::istringstream csv(
        "id,content,label\n"
        "a1,\"line one\nline two, with comma\",0\n"
        "a2,\"a \"\"quoted\"\" word\",1\n"
        "a3,plain,0\n");
    const LabeledDataset ds = fnd::load_corpus(csv, CsvSchema{});
    REQUIRE(ds.size() == 3);
    CHECK(ds.records[0].content == "line one\nline two, with comma");
    CHECK(ds.records[1].content == "a \"quoted\" word");
    CHECK(ds.records[1].label == 1);
    CHECK(ds.count(0) == 2);
    CHECK(ds.count(1) == 1);
}

TEST_CASE("csv reader loads the tiny fixture file") {
    const LabeledDataset ds = fnd::load_corpus(fixture_path("tiny.csv"), CsvSchema{});
    REQUIRE(ds.size() == 3);
    CHECK(ds.count(0) == 2);
    CHECK(ds.count(1) == 1);
    CHECK(ds.records[2].id == "t3");
}

TEST_CASE("csv reader rejects a missing label column") {
    std::istringstream csv("id,content\na1,hello\n");
    CHECK_THROWS_WITH(fnd::load_corpus(csv, CsvSchema{}),
                      Catch::Matchers::ContainsSubstring("label"));
}

TEST_CASE("csv reader rejects an unterminated quote") {
    std::istringstream csv("id,content,label\na1,\"no closing quote,0\n");
    CHECK_THROWS(fnd::load_corpus(csv, CsvSchema{}));
}

TEST_CASE("label aliases map onto 0/1") {
    CsvSchema schema;
    schema.label_aliases = {{"authentic", 0}, {"fake", 1}};
    std::istringstream csv("id,content,label\na1,x,authentic\na2,y,fake\n");
    const LabeledDataset ds = fnd::load_corpus(csv, schema);
    CHECK(ds.records[0].label == 0);
    CHECK(ds.records[1].label == 1);
}

TEST_CASE("stratified split matches the published corpus arithmetic") {
    // 48,678 + 1,299 documents at 70:30 must land exactly on the reported
    // per-class train counts (34,075 / 909) and test counts (14,603 / 390).
    const LabeledDataset ds = dataset_with_counts(48678, 1299);
    const std::vector<int> y = ds.labels();
    const std::vector<char> mask = fnd::split_train_mask(y, 0.7, 123);
    std::size_t tr0 = 0, tr1 = 0, te0 = 0, te1 = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (mask[i]) (y[i] == 0 ? tr0 : tr1) += 1;
        else (y[i] == 0 ? te0 : te1) += 1;
    }
    CHECK(tr0 == 34075);
    CHECK(tr1 == 909);
    CHECK(te0 == 14603);
    CHECK(te1 == 390);
}

TEST_CASE("split is a partition and deterministic per seed") {
    const LabeledDataset ds = dataset_with_counts(97, 31);
    const std::vector<int> y = ds.labels();
    const std::vector<char> m1 = fnd::split_train_mask(y, 0.8, 7);
    const std::vector<char> m2 = fnd::split_train_mask(y, 0.8, 7);
    const std::vector<char> m3 = fnd::split_train_mask(y, 0.8, 8);
    CHECK(m1 == m2);
    CHECK(m1 != m3); // overwhelmingly likely for 128 rows
    REQUIRE(m1.size() == y.size());

    std::size_t train = 0;
    for (char c : m1) train += c != 0;
    CHECK(train + (m1.size() - train) == y.size());
}

TEST_CASE("stratified split keeps per-class proportions within one record") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        for (double frac : {0.5, 0.7, 0.8}) {
            const LabeledDataset ds = dataset_with_counts(83, 17);
            const std::vector<int> y = ds.labels();
            const std::vector<char> mask = fnd::split_train_mask(y, frac, seed);
            std::size_t n0 = 0, n1 = 0, t0 = 0, t1 = 0;
            for (std::size_t i = 0; i < y.size(); ++i) {
                (y[i] == 0 ? n0 : n1) += 1;
                if (mask[i]) (y[i] == 0 ? t0 : t1) += 1;
            }
            CHECK(std::abs(static_cast<double>(t0) - frac * static_cast<double>(n0)) <= 1.0);
            CHECK(std::abs(static_cast<double>(t1) - frac * static_cast<double>(n1)) <= 1.0);
        }
    }
}

TEST_CASE("split_dataset partitions records without duplication") {
    const LabeledDataset ds = dataset_with_counts(40, 10);
    const auto [train, test] = fnd::split_dataset(ds, 0.8, 42);
    CHECK(train.size() + test.size() == ds.size());
    std::set<std::string> ids;
    for (const auto& r : train.records) ids.insert(r.id);
    for (const auto& r : test.records) {
        CHECK(ids.count(r.id) == 0);
        ids.insert(r.id);
    }
    CHECK(ids.size() == ds.size());
}
