#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "fnd/sparse.hpp"
#include "fnd/text.hpp"
#include "fnd/util.hpp"

namespace fnd {

struct NgramRange {
    int lo = 1;
    int hi = 2;

    bool valid() const { return lo >= 1 && lo <= hi; }
};

// Term dictionary fitted on training documents only. Columns are assigned in
// lexicographic (code point) order of the term strings, so a vocabulary is a
// pure function of the training token streams.
class Vocabulary {
public:
    Vocabulary() = default;

    std::size_t size() const { return terms_.size(); }
    bool has_idf() const { return !idf_.empty(); }
    NgramRange ngram_range() const { return range_; }
    std::size_t n_docs() const { return n_docs_; }

    // -1 when the term is out of vocabulary.
    long long index_of(const std::string& term) const {
        auto it = index_.find(term);
        return it == index_.end() ? -1 : static_cast<long long>(it->second);
    }

    const std::string& term(std::size_t i) const { return terms_[i]; }
    double idf(std::size_t i) const { return idf_[i]; }

    void save(std::ostream& out) const {
        out << "fnd-vocab v1\t" << range_.lo << '\t' << range_.hi << '\t' << n_docs_ << '\t'
            << (has_idf() ? 1 : 0) << '\n';
        char buf[64];
        for (std::size_t i = 0; i < terms_.size(); ++i) {
            out << terms_[i] << '\t' << i;
            if (has_idf()) {
                std::snprintf(buf, sizeof buf, "%.17g", idf_[i]);
                out << '\t' << buf;
            }
            out << '\n';
        }
    }

    static Vocabulary load(std::istream& in) {
        std::string line;
        if (!std::getline(in, line)) throw std::runtime_error("vocabulary stream is empty");
        std::istringstream hdr(line);
        std::string magic;
        int has_idf = 0;
        Vocabulary v;
        hdr >> magic;
        std::string version;
        hdr >> version >> v.range_.lo >> v.range_.hi >> v.n_docs_ >> has_idf;
        if (magic != "fnd-vocab" || version != "v1")
            throw std::runtime_error("not a vocabulary dump: bad header");
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const std::size_t t1 = line.find('\t');
            if (t1 == std::string::npos) throw std::runtime_error("bad vocabulary line: " + line);
            const std::size_t t2 = has_idf ? line.find('\t', t1 + 1) : std::string::npos;
            std::string term = line.substr(0, t1);
            const std::size_t idx = std::stoul(line.substr(t1 + 1, t2 - t1 - 1));
            if (idx != v.terms_.size()) throw std::runtime_error("vocabulary indices out of order");
            if (has_idf) {
                if (t2 == std::string::npos) throw std::runtime_error("missing idf: " + line);
                v.idf_.push_back(std::stod(line.substr(t2 + 1)));
            }
            v.index_.emplace(term, static_cast<std::uint32_t>(idx));
            v.terms_.push_back(std::move(term));
        }
        return v;
    }

private:
    friend Vocabulary fit_vocabulary(const std::vector<TokenizedDoc>&, NgramRange, bool,
                                     std::vector<std::string>*);

    std::unordered_map<std::string, std::uint32_t> index_;
    std::vector<std::string> terms_; // index -> term
    std::vector<double> idf_;        // present iff fitted as TF-IDF
    NgramRange range_;
    std::size_t n_docs_ = 0;
};

namespace detail {

template <typename Fn>
void for_each_ngram(const std::vector<std::string>& tokens, NgramRange range, Fn&& fn) {
    std::string term;
    for (int n = range.lo; n <= range.hi; ++n) {
        if (tokens.size() < static_cast<std::size_t>(n)) break;
        for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
            term = tokens[i];
            for (int j = 1; j < n; ++j) {
                term += ' ';
                term += tokens[i + j];
            }
            fn(term);
        }
    }
}

} // namespace detail

inline Vocabulary fit_vocabulary(const std::vector<TokenizedDoc>& train_docs, NgramRange range,
                                 bool with_idf, std::vector<std::string>* warnings = nullptr) {
    if (!range.valid()) throw std::invalid_argument("invalid n-gram range");
    Vocabulary v;
    v.range_ = range;
    v.n_docs_ = train_docs.size();

    std::unordered_map<std::string, std::size_t> df; // docs containing the term
    std::unordered_map<std::string, std::size_t> seen_in_doc;
    for (const auto& doc : train_docs) {
        seen_in_doc.clear();
        detail::for_each_ngram(doc.tokens, range, [&](const std::string& term) {
            auto [it, fresh] = df.try_emplace(term, 0);
            if (seen_in_doc.insert({term, 1}).second) ++it->second;
        });
    }
    if (df.empty()) warn_into(warnings, "fitting vocabulary on an empty corpus");

    v.terms_.reserve(df.size());
    for (const auto& [term, _] : df) v.terms_.push_back(term);
    std::sort(v.terms_.begin(), v.terms_.end());
    v.index_.reserve(v.terms_.size());
    for (std::size_t i = 0; i < v.terms_.size(); ++i)
        v.index_.emplace(v.terms_[i], static_cast<std::uint32_t>(i));

    if (with_idf) {
        v.idf_.resize(v.terms_.size());
        const double n = static_cast<double>(v.n_docs_);
        for (std::size_t i = 0; i < v.terms_.size(); ++i) {
            const double d = static_cast<double>(df[v.terms_[i]]);
            v.idf_[i] = std::log((1.0 + n) / (1.0 + d)) + 1.0;
        }
    }
    return v;
}

inline Vocabulary fit_count(const std::vector<TokenizedDoc>& train_docs, NgramRange range = {},
                            std::vector<std::string>* warnings = nullptr) {
    return fit_vocabulary(train_docs, range, /*with_idf=*/false, warnings);
}

inline Vocabulary fit_tfidf(const std::vector<TokenizedDoc>& train_docs, NgramRange range = {},
                            std::vector<std::string>* warnings = nullptr) {
    return fit_vocabulary(train_docs, range, /*with_idf=*/true, warnings);
}

// Cell (i,j) = occurrence count of term j in doc i; out-of-vocabulary
// n-grams are dropped.
inline FeatureMatrix transform_count(const std::vector<TokenizedDoc>& docs, const Vocabulary& vocab) {
    FeatureMatrix X(vocab.size());
    std::vector<std::pair<std::uint32_t, double>> entries;
    for (const auto& doc : docs) {
        entries.clear();
        detail::for_each_ngram(doc.tokens, vocab.ngram_range(), [&](const std::string& term) {
            const long long j = vocab.index_of(term);
            if (j >= 0) entries.emplace_back(static_cast<std::uint32_t>(j), 1.0);
        });
        X.append_row(entries, doc.label);
    }
    return X;
}

// Count times idf, then each row L2-normalized; all-OOV rows stay zero.
inline FeatureMatrix transform_tfidf(const std::vector<TokenizedDoc>& docs, const Vocabulary& vocab) {
    if (!vocab.has_idf() && vocab.size() > 0)
        throw std::invalid_argument("transform_tfidf: vocabulary was fitted without idf");
    FeatureMatrix X(vocab.size());
    std::vector<std::pair<std::uint32_t, double>> entries;
    std::unordered_map<std::uint32_t, double> counts;
    for (const auto& doc : docs) {
        counts.clear();
        detail::for_each_ngram(doc.tokens, vocab.ngram_range(), [&](const std::string& term) {
            const long long j = vocab.index_of(term);
            if (j >= 0) counts[static_cast<std::uint32_t>(j)] += 1.0;
        });
        entries.clear();
        double sq = 0.0;
        for (const auto& [j, c] : counts) {
            const double w = c * vocab.idf(j);
            entries.emplace_back(j, w);
            sq += w * w;
        }
        if (sq > 0.0) {
            const double inv = 1.0 / std::sqrt(sq);
            for (auto& e : entries) e.second *= inv;
        }
        X.append_row(entries, doc.label);
    }
    return X;
}

} // namespace fnd
