#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "fnd/bn_defaults.hpp"
#include "fnd/corpus.hpp"

namespace fnd {

struct TokenizedDoc {
    std::string doc_id;
    std::vector<std::string> tokens;
    int label = 0;
};

namespace utf8 {

constexpr char32_t kInvalid = 0xFFFFFFFF;

// Decodes one code point starting at text[pos]; advances pos past it.
// Malformed sequences consume a single byte and yield kInvalid.
inline char32_t next(std::string_view text, std::size_t& pos) {
    const unsigned char b0 = static_cast<unsigned char>(text[pos]);
    if (b0 < 0x80) {
        ++pos;
        return b0;
    }
    int extra;
    char32_t cp;
    if ((b0 & 0xE0) == 0xC0) {
        extra = 1;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        extra = 2;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        extra = 3;
        cp = b0 & 0x07;
    } else {
        ++pos;
        return kInvalid;
    }
    if (pos + extra >= text.size()) {
        ++pos;
        return kInvalid;
    }
    for (int i = 1; i <= extra; ++i) {
        const unsigned char b = static_cast<unsigned char>(text[pos + i]);
        if ((b & 0xC0) != 0x80) {
            ++pos;
            return kInvalid;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    pos += extra + 1;
    return cp;
}

inline void append(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

inline std::size_t length(std::string_view text) {
    std::size_t pos = 0, n = 0;
    while (pos < text.size()) {
        next(text, pos);
        ++n;
    }
    return n;
}

} // namespace utf8

// Bengali block letters and in-word signs; the Bengali digit range is
// excluded alongside everything else (Latin, ASCII digits, punctuation,
// symbols, emoticons).
inline bool is_bengali_word_char(char32_t cp) {
    return cp >= 0x0980 && cp <= 0x09FF && !(cp >= 0x09E6 && cp <= 0x09EF);
}

// Keeps only Bengali word characters; every removed character becomes a
// space, runs of spaces collapse, and the result is trimmed.
inline std::string standardize(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t pos = 0;
    bool pending_space = false;
    while (pos < text.size()) {
        const char32_t cp = utf8::next(text, pos);
        if (cp != utf8::kInvalid && is_bengali_word_char(cp)) {
            if (pending_space && !out.empty()) out += ' ';
            pending_space = false;
            utf8::append(out, cp);
        } else {
            pending_space = true;
        }
    }
    return out;
}

inline std::vector<std::string> tokenize(std::string_view clean) {
    std::vector<std::string> tokens;
    std::size_t start = 0;
    while (start < clean.size()) {
        std::size_t end = clean.find(' ', start);
        if (end == std::string_view::npos) end = clean.size();
        if (end > start) tokens.emplace_back(clean.substr(start, end - start));
        start = end + 1;
    }
    return tokens;
}

class StopwordSet {
public:
    StopwordSet() = default;
    explicit StopwordSet(std::unordered_set<std::string> words) : words_(std::move(words)) {}

    bool contains(const std::string& token) const { return words_.count(token) != 0; }
    std::size_t size() const { return words_.size(); }

    static StopwordSet parse(std::string_view text) {
        std::unordered_set<std::string> words;
        std::size_t start = 0;
        while (start <= text.size()) {
            std::size_t end = text.find('\n', start);
            if (end == std::string_view::npos) end = text.size();
            std::string_view line = text.substr(start, end - start);
            while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
            while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
            if (!line.empty() && line.front() != '#') words.emplace(line);
            if (end == text.size()) break;
            start = end + 1;
        }
        return StopwordSet(std::move(words));
    }

    static StopwordSet load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open stopword file: " + path);
        std::stringstream buf;
        buf << in.rdbuf();
        return parse(buf.str());
    }

    static StopwordSet builtin() { return parse(default_stopwords_text()); }

private:
    std::unordered_set<std::string> words_;
};

inline std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens,
                                                 const StopwordSet& stops) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens)
        if (!stops.contains(t)) out.push_back(t);
    return out;
}

struct StemRule {
    std::string suffix;
    std::string replacement;
    std::size_t min_stem_len; // code points in the resulting stem
};

// Ordered suffix-strip stemmer. The first matching rule is applied and the
// scan restarts, so stacked endings peel off until a fixed point; that makes
// stem(stem(w)) == stem(w) hold by construction.
class Stemmer {
public:
    Stemmer() = default;
    explicit Stemmer(std::vector<StemRule> rules) : rules_(std::move(rules)) {
        for (auto& r : rules_) {
            if (r.suffix.empty()) throw std::invalid_argument("stemmer rule with empty suffix");
            if (r.replacement.size() >= r.suffix.size())
                throw std::invalid_argument("stemmer rule must shorten the token: " + r.suffix);
            if (r.min_stem_len < 1) r.min_stem_len = 1;
        }
    }

    std::string stem(std::string token) const {
        bool changed = true;
        while (changed) {
            changed = false;
            const std::size_t token_cp = utf8::length(token);
            for (const auto& r : rules_) {
                if (token.size() <= r.suffix.size()) continue;
                if (token.compare(token.size() - r.suffix.size(), r.suffix.size(), r.suffix) != 0)
                    continue;
                const std::size_t result_cp =
                    token_cp - utf8::length(r.suffix) + utf8::length(r.replacement);
                if (result_cp < r.min_stem_len) continue;
                token.resize(token.size() - r.suffix.size());
                token += r.replacement;
                changed = true;
                break;
            }
        }
        return token;
    }

    const std::vector<StemRule>& rules() const { return rules_; }

    // "suffix<TAB>replacement<TAB>min_stem_len" per line, '#' comments.
    static Stemmer parse(std::string_view text) {
        std::vector<StemRule> rules;
        std::size_t start = 0;
        std::size_t line_no = 0;
        while (start <= text.size()) {
            std::size_t end = text.find('\n', start);
            if (end == std::string_view::npos) end = text.size();
            std::string_view line = text.substr(start, end - start);
            ++line_no;
            while (!line.empty() && line.back() == '\r') line.remove_suffix(1);
            if (!line.empty() && line.front() != '#') {
                const std::size_t t1 = line.find('\t');
                const std::size_t t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
                if (t1 == std::string_view::npos || t2 == std::string_view::npos)
                    throw std::runtime_error("bad stemmer rule at line " + std::to_string(line_no));
                StemRule r;
                r.suffix = std::string(line.substr(0, t1));
                r.replacement = std::string(line.substr(t1 + 1, t2 - t1 - 1));
                r.min_stem_len = std::stoul(std::string(line.substr(t2 + 1)));
                rules.push_back(std::move(r));
            }
            if (end == text.size()) break;
            start = end + 1;
        }
        return Stemmer(std::move(rules));
    }

    static Stemmer load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open stemmer rule file: " + path);
        std::stringstream buf;
        buf << in.rdbuf();
        return parse(buf.str());
    }

    static Stemmer builtin() { return parse(default_stemmer_rules_text()); }

private:
    std::vector<StemRule> rules_;
};

inline std::vector<std::string> stem_tokens(const std::vector<std::string>& tokens,
                                            const Stemmer& stemmer) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(stemmer.stem(t));
    return out;
}

// standardize -> tokenize -> stopword removal -> stemming, in that order.
inline TokenizedDoc preprocess(const RawArticle& article, const StopwordSet& stops,
                               const Stemmer& stemmer) {
    TokenizedDoc doc;
    doc.doc_id = article.id;
    doc.label = article.label;
    doc.tokens = stem_tokens(remove_stopwords(tokenize(standardize(article.content)), stops), stemmer);
    return doc;
}

inline std::vector<TokenizedDoc> preprocess_all(const LabeledDataset& ds, const StopwordSet& stops,
                                                const Stemmer& stemmer) {
    std::vector<TokenizedDoc> docs;
    docs.reserve(ds.size());
    for (const auto& a : ds.records) docs.push_back(preprocess(a, stops, stemmer));
    return docs;
}

} // namespace fnd
