#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace viewdiv {

// Token normalization used by every text-consuming stage (topic model,
// TF-IDF, classification, cue matching). One pipeline, no silent
// mismatches between stages.
//
// Rules, applied in order per whitespace-separated chunk:
//   1. strip leading/trailing ASCII punctuation ("protest!" -> "protest",
//      "covid-19" keeps its inner hyphen)
//   2. lowercase (ASCII) when `lowercase` is set
//   3. lemma lookup, when a table is configured
//   4. drop stop-words (checked after normalization)
struct Normalizer {
    bool lowercase = true;
    std::unordered_set<std::string> stop_words;
    std::unordered_map<std::string, std::string> lemmas;

    std::string normalize_token(std::string_view raw) const {
        std::size_t b = 0, e = raw.size();
        while (b < e && std::ispunct(static_cast<unsigned char>(raw[b]))) ++b;
        while (e > b && std::ispunct(static_cast<unsigned char>(raw[e - 1]))) --e;
        std::string tok(raw.substr(b, e - b));
        if (lowercase)
            for (char& c : tok) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (!lemmas.empty()) {
            auto it = lemmas.find(tok);
            if (it != lemmas.end()) tok = it->second;
        }
        return tok;
    }
};

inline std::vector<std::string> preprocess(std::string_view text, const Normalizer& norm) {
    std::vector<std::string> tokens;
    std::size_t i = 0, n = text.size();
    while (i < n) {
        while (i < n && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t start = i;
        while (i < n && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i == start) continue;
        std::string tok = norm.normalize_token(text.substr(start, i - start));
        if (tok.empty()) continue;
        if (norm.stop_words.count(tok)) continue;
        tokens.push_back(std::move(tok));
    }
    return tokens;
}

// Sentence splitter: a sentence ends at '.', '!' or '?' followed by
// whitespace and an uppercase letter or an opening quote. Abbreviations
// are not handled; the rule is deterministic and auditable.
inline std::vector<std::string> split_sentences(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0, n = text.size();
    auto flush = [&](std::size_t end) {
        while (start < end && std::isspace(static_cast<unsigned char>(text[start]))) ++start;
        std::size_t stop = end;
        while (stop > start && std::isspace(static_cast<unsigned char>(text[stop - 1]))) --stop;
        if (stop > start) out.emplace_back(text.substr(start, stop - start));
        start = end;
    };
    for (std::size_t i = 0; i < n; ++i) {
        char c = text[i];
        if (c != '.' && c != '!' && c != '?') continue;
        std::size_t j = i + 1;
        while (j < n && (text[j] == '.' || text[j] == '!' || text[j] == '?')) ++j;
        if (j >= n) continue; // end of text; the final flush picks it up
        if (!std::isspace(static_cast<unsigned char>(text[j]))) continue;
        std::size_t k = j;
        while (k < n && std::isspace(static_cast<unsigned char>(text[k]))) ++k;
        if (k < n && (std::isupper(static_cast<unsigned char>(text[k])) || text[k] == '"' ||
                      text[k] == '\'')) {
            flush(j);
            i = j - 1;
        }
    }
    flush(n);
    return out;
}

} // namespace viewdiv
