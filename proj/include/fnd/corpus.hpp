#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fnd/util.hpp"

namespace fnd {

// One ingested news record. Only `content` feeds the feature pipeline; the
// remaining columns are carried through untouched.
struct RawArticle {
    std::string id;
    std::string headline;
    std::string content;
    std::string source;
    std::string domain;
    std::string date;
    std::string category;
    int label = 0; // 0 = authentic, 1 = fake
};

class LabeledDataset {
public:
    std::vector<RawArticle> records;

    std::size_t size() const { return records.size(); }

    std::size_t count(int label) const { return label == 0 ? counts_[0] : counts_[1]; }

    void push_back(RawArticle a) {
        ++counts_[a.label == 0 ? 0 : 1];
        records.push_back(std::move(a));
    }

    std::vector<int> labels() const {
        std::vector<int> y;
        y.reserve(records.size());
        for (const auto& r : records) y.push_back(r.label);
        return y;
    }

private:
    std::array<std::size_t, 2> counts_{0, 0};
};

inline std::map<std::string, int> default_label_aliases() {
    return {{"0", 0}, {"1", 1}, {"authentic", 0}, {"Authentic", 0}, {"fake", 1}, {"Fake", 1}};
}

// Maps CSV header names onto RawArticle fields. `content` and `label` are
// mandatory; every other column is optional and left empty when absent.
struct CsvSchema {
    std::string content = "content";
    std::string label = "label";
    std::string id = "id";
    std::string headline = "headline";
    std::string source = "source";
    std::string domain = "domain";
    std::string date = "date";
    std::string category = "category";
    char delimiter = ',';
    std::map<std::string, int> label_aliases = default_label_aliases();
};

namespace detail {

// RFC-4180 style row reader: quoted fields, doubled quotes, embedded
// delimiters and newlines. Returns false at end of input. `line` tracks the
// physical line the row started on, for diagnostics.
inline bool read_csv_row(const std::string& text, std::size_t& pos, std::size_t& line,
                         char delim, std::vector<std::string>& out) {
    out.clear();
    if (pos >= text.size()) return false;
    const std::size_t start_line = line;
    std::string field;
    bool in_quotes = false;
    bool row_done = false;
    bool quoted_field = false;
    while (!row_done) {
        if (pos >= text.size()) {
            if (in_quotes)
                throw std::runtime_error("malformed quoting: unterminated quote in row starting at line " +
                                         std::to_string(start_line));
            out.push_back(field);
            return true;
        }
        char c = text[pos++];
        if (in_quotes) {
            if (c == '"') {
                if (pos < text.size() && text[pos] == '"') {
                    field += '"';
                    ++pos;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field += c;
            }
            continue;
        }
        if (c == '"') {
            if (!field.empty() || quoted_field)
                throw std::runtime_error("malformed quoting: stray quote at line " + std::to_string(line));
            in_quotes = true;
            quoted_field = true;
        } else if (c == delim) {
            out.push_back(field);
            field.clear();
            quoted_field = false;
        } else if (c == '\n') {
            ++line;
            row_done = true;
        } else if (c == '\r') {
            if (pos < text.size() && text[pos] == '\n') {
                ++pos;
                ++line;
                row_done = true;
            } else {
                field += c;
            }
        } else {
            if (quoted_field)
                throw std::runtime_error("malformed quoting: content after closing quote at line " +
                                         std::to_string(line));
            field += c;
        }
    }
    out.push_back(field);
    return true;
}

} // namespace detail

// Reads a delimited UTF-8 file with a header row into a LabeledDataset. Rows
// whose label does not map through schema.label_aliases are rejected with a
// per-row diagnostic; structural problems (missing file/column, broken
// quoting) throw.
inline LabeledDataset load_corpus(std::istream& in, const CsvSchema& schema = {},
                                  std::vector<std::string>* diagnostics = nullptr) {
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();

    std::size_t pos = 0, line = 1;
    std::vector<std::string> header;
    if (!detail::read_csv_row(text, pos, line, schema.delimiter, header) || header.empty())
        throw std::runtime_error("corpus input has no header row");

    auto find_col = [&](const std::string& name) -> int {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        return -1;
    };
    const int c_content = find_col(schema.content);
    const int c_label = find_col(schema.label);
    if (c_content < 0) throw std::runtime_error("missing mandatory column '" + schema.content + "'");
    if (c_label < 0) throw std::runtime_error("missing mandatory column '" + schema.label + "'");
    const int c_id = find_col(schema.id);
    const int c_headline = find_col(schema.headline);
    const int c_source = find_col(schema.source);
    const int c_domain = find_col(schema.domain);
    const int c_date = find_col(schema.date);
    const int c_category = find_col(schema.category);

    LabeledDataset ds;
    std::vector<std::string> fields;
    std::size_t row_number = 0; // 1-based data row, header excluded
    while (true) {
        const std::size_t row_line = line;
        if (!detail::read_csv_row(text, pos, line, schema.delimiter, fields)) break;
        ++row_number;
        if (fields.size() == 1 && fields[0].empty()) continue; // trailing blank line
        if (fields.size() != header.size()) {
            warn_into(diagnostics, "row " + std::to_string(row_number) + " (line " +
                                       std::to_string(row_line) + "): expected " +
                                       std::to_string(header.size()) + " fields, got " +
                                       std::to_string(fields.size()) + "; row rejected");
            continue;
        }
        auto alias = schema.label_aliases.find(fields[c_label]);
        if (alias == schema.label_aliases.end()) {
            warn_into(diagnostics, "row " + std::to_string(row_number) + ": unmappable label '" +
                                       fields[c_label] + "'; row rejected");
            continue;
        }
        RawArticle a;
        a.id = c_id >= 0 ? fields[c_id] : std::to_string(row_number);
        if (a.id.empty()) a.id = std::to_string(row_number);
        a.content = fields[c_content];
        if (c_headline >= 0) a.headline = fields[c_headline];
        if (c_source >= 0) a.source = fields[c_source];
        if (c_domain >= 0) a.domain = fields[c_domain];
        if (c_date >= 0) a.date = fields[c_date];
        if (c_category >= 0) a.category = fields[c_category];
        a.label = alias->second;
        ds.push_back(std::move(a));
    }
    return ds;
}

inline LabeledDataset load_corpus(const std::string& path, const CsvSchema& schema = {},
                                  std::vector<std::string>* diagnostics = nullptr) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open corpus file: " + path);
    return load_corpus(in, schema, diagnostics);
}

// Seeded train/test partition. Stratified mode draws round(n_c * fraction)
// records from each class, with the larger class absorbing any remainder so
// the train total equals round(N * fraction) exactly.
inline std::vector<char> split_train_mask(const std::vector<int>& labels, double train_fraction,
                                          std::uint64_t seed, bool stratified = true,
                                          std::vector<std::string>* warnings = nullptr) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw std::invalid_argument("train_fraction must lie in (0,1)");

    const std::size_t n = labels.size();
    std::vector<char> in_train(n, 0);
    std::mt19937_64 rng(seed);

    if (stratified) {
        std::array<std::vector<std::size_t>, 2> by_class;
        for (std::size_t i = 0; i < n; ++i) by_class[labels[i] == 0 ? 0 : 1].push_back(i);
        if (by_class[0].empty() || by_class[1].empty())
            warn_into(warnings, "stratified split: a class has 0 records; carrying it through");

        const long long total_target = std::llround(static_cast<double>(n) * train_fraction);
        std::array<long long, 2> want{};
        for (int c = 0; c < 2; ++c)
            want[c] = std::llround(static_cast<double>(by_class[c].size()) * train_fraction);
        const int larger = by_class[1].size() > by_class[0].size() ? 1 : 0;
        want[larger] += total_target - (want[0] + want[1]);
        for (int c = 0; c < 2; ++c) {
            want[c] = std::clamp<long long>(want[c], 0, static_cast<long long>(by_class[c].size()));
            std::shuffle(by_class[c].begin(), by_class[c].end(), rng);
            for (long long i = 0; i < want[c]; ++i) in_train[by_class[c][i]] = 1;
        }
    } else {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        const long long want = std::llround(static_cast<double>(n) * train_fraction);
        for (long long i = 0; i < want && i < static_cast<long long>(n); ++i) in_train[order[i]] = 1;
    }
    return in_train;
}

inline std::pair<LabeledDataset, LabeledDataset> split_dataset(const LabeledDataset& ds,
                                                               double train_fraction,
                                                               std::uint64_t seed,
                                                               bool stratified = true,
                                                               std::vector<std::string>* warnings = nullptr) {
    const std::vector<char> in_train =
        split_train_mask(ds.labels(), train_fraction, seed, stratified, warnings);
    LabeledDataset train, test;
    for (std::size_t i = 0; i < ds.size(); ++i)
        (in_train[i] ? train : test).push_back(ds.records[i]);
    return {std::move(train), std::move(test)};
}

} // namespace fnd
