#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "fnd/corpus.hpp"

namespace fnd {

// Synthetic news corpus: two token distributions over a shared Bangla-like
// vocabulary with a configurable class skew. The classes overlap (no token
// is exclusive to either), so plain training under heavy skew yields poor
// minority recall and rebalancing has something real to recover.
struct SynthSpec {
    std::size_t n_majority = 5000;
    std::size_t n_minority = 150;
    int doc_len_min = 40;
    int doc_len_max = 70;
    int vocab_common = 220;      // tokens shared by both classes
    int vocab_class = 45;        // additional class-leaning tokens per class
    double class_token_rate = 0.32; // chance a position draws from a leaning pool
    double own_pool_tilt = 0.80;    // chance the leaning pool is the doc's own class
    double noise_rate = 0.02;       // chance of Latin/digit junk at a position
    // Optional asymmetry: a separate minority tilt (< 0 means "same as
    // own_pool_tilt"). Dropping it below the majority tilt plants majority
    // vocabulary inside minority documents as counter-evidence, which is
    // what gives rebalancing methods real recall to recover.
    double own_pool_tilt_minority = -1.0;
    std::uint64_t seed = 0;
};

namespace detail {

// Deterministic weighted draw by inverse CDF; avoids unspecified stdlib
// distribution algorithms beyond this translation environment.
class WeightedPool {
public:
    explicit WeightedPool(std::vector<std::string> items) : items_(std::move(items)) {
        cum_.reserve(items_.size());
        double total = 0.0;
        for (std::size_t r = 0; r < items_.size(); ++r) {
            total += 1.0 / static_cast<double>(r + 2); // zipf-ish
            cum_.push_back(total);
        }
    }

    const std::string& draw(std::mt19937_64& rng) const {
        std::uniform_real_distribution<double> u(0.0, cum_.back());
        const double x = u(rng);
        const auto it = std::lower_bound(cum_.begin(), cum_.end(), x);
        return items_[static_cast<std::size_t>(it - cum_.begin())];
    }

private:
    std::vector<std::string> items_;
    std::vector<double> cum_;
};

inline std::vector<std::string> make_tokens(std::size_t count, std::mt19937_64& rng) {
    static const char* consonants[] = {"ক", "খ", "গ", "ঘ", "চ", "ছ", "জ", "ঝ", "ট", "ঠ",
                                       "ড", "ঢ", "ত", "থ", "দ", "ধ", "ন", "প", "ফ", "ব",
                                       "ভ", "ম", "য", "র", "ল", "শ", "ষ", "স", "হ"};
    static const char* vowels[] = {"া", "ি", "ী", "ু", "ূ", "ে", "ৈ", "ো", ""};
    std::uniform_int_distribution<int> n_syll(2, 4);
    std::uniform_int_distribution<std::size_t> pick_c(0, std::size(consonants) - 1);
    std::uniform_int_distribution<std::size_t> pick_v(0, std::size(vowels) - 1);
    std::vector<std::string> out;
    out.reserve(count);
    while (out.size() < count) {
        std::string tok;
        const int syll = n_syll(rng);
        for (int s = 0; s < syll; ++s) {
            tok += consonants[pick_c(rng)];
            tok += vowels[pick_v(rng)];
        }
        if (std::find(out.begin(), out.end(), tok) == out.end()) out.push_back(tok);
    }
    return out;
}

inline void csv_field(std::ostream& os, const std::string& v, char delim) {
    if (v.find_first_of({delim, '"', '\n', '\r'}) == std::string::npos) {
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

} // namespace detail

inline LabeledDataset generate_synthetic_corpus(const SynthSpec& spec) {
    if (spec.n_majority == 0 || spec.n_minority == 0)
        throw std::invalid_argument("synth: both classes need at least one document");
    if (spec.doc_len_min < 1 || spec.doc_len_max < spec.doc_len_min)
        throw std::invalid_argument("synth: bad document length range");

    std::mt19937_64 rng(spec.seed);
    const auto common_tokens =
        detail::make_tokens(static_cast<std::size_t>(spec.vocab_common), rng);
    const auto auth_tokens = detail::make_tokens(static_cast<std::size_t>(spec.vocab_class), rng);
    const auto fake_tokens = detail::make_tokens(static_cast<std::size_t>(spec.vocab_class), rng);
    const detail::WeightedPool common(common_tokens);
    const detail::WeightedPool lean[2] = {detail::WeightedPool(auth_tokens),
                                          detail::WeightedPool(fake_tokens)};
    static const char* junk[] = {"breaking", "2021", "LIVE", "http://example.net", "...", "২০২১"};

    std::vector<int> order(spec.n_majority + spec.n_minority, 0);
    std::fill(order.begin() + static_cast<std::ptrdiff_t>(spec.n_majority), order.end(), 1);
    std::shuffle(order.begin(), order.end(), rng);

    std::uniform_int_distribution<int> len(spec.doc_len_min, spec.doc_len_max);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick_junk(0, std::size(junk) - 1);

    LabeledDataset ds;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const int label = order[i];
        RawArticle a;
        a.id = "synth-" + std::to_string(i + 1);
        a.source = "synth";
        a.domain = "example.net";
        a.date = "2021-01-01";
        a.category = label == 1 ? "Misleading" : "National";
        a.label = label;
        const int L = len(rng);
        const double tilt = label == 1 && spec.own_pool_tilt_minority >= 0.0
                                ? spec.own_pool_tilt_minority
                                : spec.own_pool_tilt;
        std::string body;
        for (int t = 0; t < L; ++t) {
            const std::string* tok;
            if (u(rng) < spec.class_token_rate) {
                const int pool = u(rng) < tilt ? label : 1 - label;
                tok = &lean[pool].draw(rng);
            } else {
                tok = &common.draw(rng);
            }
            if (!body.empty()) body += ' ';
            body += *tok;
            if (u(rng) < spec.noise_rate) {
                body += ' ';
                body += junk[pick_junk(rng)];
            }
        }
        a.content = body;
        a.headline = body.substr(0, body.find(' '));
        ds.push_back(std::move(a));
    }
    return ds;
}

// Writes the canonical column layout load_corpus expects by default.
inline void write_corpus_csv(const LabeledDataset& ds, std::ostream& os, char delimiter = ',') {
    static const char* names[] = {"id",     "domain", "date",    "category",
                                  "source", "headline", "content", "label"};
    for (std::size_t c = 0; c < std::size(names); ++c) {
        if (c) os << delimiter;
        os << names[c];
    }
    os << '\n';
    for (const RawArticle& a : ds.records) {
        const std::string* fields[] = {&a.id,     &a.domain,   &a.date,    &a.category,
                                       &a.source, &a.headline, &a.content, nullptr};
        for (std::size_t c = 0; c + 1 < std::size(fields); ++c) {
            if (c) os << delimiter;
            detail::csv_field(os, *fields[c], delimiter);
        }
        os << delimiter << a.label << '\n';
    }
}

inline void write_corpus_csv(const LabeledDataset& ds, const std::string& path,
                             char delimiter = ',') {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    write_corpus_csv(ds, f, delimiter);
}

} // namespace fnd
