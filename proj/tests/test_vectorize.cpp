#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "fnd/vectorize.hpp"

using fnd::NgramRange;
using fnd::TokenizedDoc;
using fnd::Vocabulary;

namespace {

std::vector<TokenizedDoc> docs_from(std::vector<std::vector<std::string>> token_lists) {
    std::vector<TokenizedDoc> docs;
    for (std::size_t i = 0; i < token_lists.size(); ++i) {
        TokenizedDoc d;
        d.doc_id = "d" + std::to_string(i + 1);
        d.tokens = std::move(token_lists[i]);
        docs.push_back(std::move(d));
    }
    return docs;
}

// d1=[a,b], d2=[a,c], d3=[a]; unigrams only. Hand-computed expectations:
// idf uses ln((1+n)/(1+df)) + 1 and each row is L2-normalized.
const std::vector<TokenizedDoc> kGolden = docs_from({{"a", "b"}, {"a", "c"}, {"a"}});

} // namespace

TEST_CASE("tfidf golden corpus matches hand-computed values") {
    const Vocabulary v = fnd::fit_tfidf(kGolden, {1, 1});
    REQUIRE(v.size() == 3);
    REQUIRE(v.index_of("a") == 0);
    REQUIRE(v.index_of("b") == 1);
    REQUIRE(v.index_of("c") == 2);
    CHECK(v.idf(0) == Catch::Approx(1.0).margin(1e-9));
    CHECK(v.idf(1) == Catch::Approx(1.6931471805599454).margin(1e-9));
    CHECK(v.idf(2) == Catch::Approx(1.6931471805599454).margin(1e-9));

    const fnd::FeatureMatrix X = fnd::transform_tfidf(kGolden, v);
    REQUIRE(X.rows() == 3);
    CHECK(X.value_at(0, 0) == Catch::Approx(0.5085423203783267).margin(1e-9));
    CHECK(X.value_at(0, 1) == Catch::Approx(0.8610369959439764).margin(1e-9));
    CHECK(X.value_at(0, 2) == Catch::Approx(0.0).margin(1e-9));
    CHECK(X.value_at(1, 0) == Catch::Approx(0.5085423203783267).margin(1e-9));
    CHECK(X.value_at(1, 2) == Catch::Approx(0.8610369959439764).margin(1e-9));
    CHECK(X.value_at(2, 0) == Catch::Approx(1.0).margin(1e-9));
    CHECK(X.value_at(2, 1) == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("tfidf rows have unit or zero L2 norm") {
    const std::vector<TokenizedDoc> docs =
        docs_from({{"x", "y", "x", "z"}, {"y"}, {"q", "q", "q"}, {}});
    const Vocabulary v = fnd::fit_tfidf(docs, {1, 2});
    const fnd::FeatureMatrix X = fnd::transform_tfidf(docs, v);
    for (std::size_t i = 0; i < X.rows(); ++i) {
        const double n2 = fnd::sparse_sqnorm(X.row(i));
        if (n2 > 0.0)
            CHECK(std::sqrt(n2) == Catch::Approx(1.0).margin(1e-9));
        else
            CHECK(X.row(i).nnz() == 0);
    }
}

TEST_CASE("count transform row sums equal the n-gram window count") {
    const std::vector<TokenizedDoc> docs =
        docs_from({{"a", "b", "c"}, {"a"}, {"b", "b"}, {}});
    const Vocabulary v = fnd::fit_count(docs, {1, 2});
    const fnd::FeatureMatrix X = fnd::transform_count(docs, v);
    for (std::size_t i = 0; i < X.rows(); ++i) {
        const std::size_t len = docs[i].tokens.size();
        const std::size_t windows = len + (len >= 2 ? len - 1 : 0); // unigrams + bigrams
        double sum = 0.0;
        const fnd::RowView r = X.row(i);
        for (std::size_t k = 0; k < r.nnz(); ++k) sum += r.vals[k];
        CHECK(sum == Catch::Approx(static_cast<double>(windows)));
    }
}

TEST_CASE("ngram range (1,2) produces unigrams and bigrams only") {
    const std::vector<TokenizedDoc> docs = docs_from({{"a", "b", "c"}});
    const Vocabulary v = fnd::fit_count(docs, {1, 2});
    CHECK(v.size() == 5); // a, b, c, "a b", "b c"
    CHECK(v.index_of("a b") >= 0);
    CHECK(v.index_of("b c") >= 0);
    CHECK(v.index_of("a b c") == -1);
}

TEST_CASE("transform drops out-of-vocabulary terms instead of growing the vocabulary") {
    const std::vector<TokenizedDoc> train = docs_from({{"a", "b"}, {"a"}});
    const Vocabulary v = fnd::fit_count(train, {1, 1});
    const std::size_t before = v.size();
    const std::vector<TokenizedDoc> test = docs_from({{"a", "unseen", "b"}, {"unseen"}});
    const fnd::FeatureMatrix X = fnd::transform_count(test, v);
    CHECK(v.size() == before);
    CHECK(v.index_of("unseen") == -1);
    CHECK(X.value_at(0, static_cast<std::uint32_t>(v.index_of("a"))) == 1.0);
    CHECK(X.row(1).nnz() == 0); // all-OOV doc maps to the zero row
}

TEST_CASE("adding a duplicate token never decreases any count cell") {
    const std::vector<TokenizedDoc> base = docs_from({{"a", "b", "c"}});
    const std::vector<TokenizedDoc> more = docs_from({{"a", "b", "c", "b"}});
    const Vocabulary v = fnd::fit_count(more, {1, 2});
    const fnd::FeatureMatrix X0 = fnd::transform_count(base, v);
    const fnd::FeatureMatrix X1 = fnd::transform_count(more, v);
    for (std::uint32_t j = 0; j < v.size(); ++j)
        CHECK(X1.value_at(0, j) >= X0.value_at(0, j));
}

TEST_CASE("transform_tfidf requires an idf-bearing vocabulary") {
    const std::vector<TokenizedDoc> docs = docs_from({{"a"}});
    const Vocabulary v = fnd::fit_count(docs, {1, 1});
    CHECK_THROWS_WITH(fnd::transform_tfidf(docs, v),
                      Catch::Matchers::ContainsSubstring("without idf"));
}

TEST_CASE("invalid ngram range is rejected") {
    const std::vector<TokenizedDoc> docs = docs_from({{"a"}});
    CHECK_THROWS(fnd::fit_count(docs, {2, 1}));
    CHECK_THROWS(fnd::fit_count(docs, {0, 1}));
}

TEST_CASE("vocabulary save/load round-trips terms, indices and idf") {
    const Vocabulary v = fnd::fit_tfidf(kGolden, {1, 1});
    std::stringstream ss;
    v.save(ss);
    const Vocabulary w = Vocabulary::load(ss);
    REQUIRE(w.size() == v.size());
    CHECK(w.has_idf());
    CHECK(w.n_docs() == v.n_docs());
    for (std::size_t i = 0; i < v.size(); ++i) {
        CHECK(w.term(i) == v.term(i));
        CHECK(w.idf(i) == v.idf(i));
    }
    const fnd::FeatureMatrix a = fnd::transform_tfidf(kGolden, v);
    const fnd::FeatureMatrix b = fnd::transform_tfidf(kGolden, w);
    CHECK(a == b);
}

TEST_CASE("empty corpus fit warns and yields an empty vocabulary") {
    std::vector<std::string> warnings;
    const Vocabulary v = fnd::fit_count({}, {1, 2}, &warnings);
    CHECK(v.size() == 0);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("empty") != std::string::npos);
}
