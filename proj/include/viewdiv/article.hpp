#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "viewdiv/errors.hpp"

namespace viewdiv {

// Whitespace token count after trimming. Punctuation stays attached to
// its token, so "protest!" is one word.
inline std::size_t count_words(std::string_view text) {
    std::size_t n = 0;
    bool in_token = false;
    for (char c : text) {
        bool ws = c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
        if (!ws && !in_token) ++n;
        in_token = !ws;
    }
    return n;
}

inline bool is_blank(std::string_view s) {
    for (char c : s)
        if (c != ' ' && c != '\t' && c != '\n' && c != '\r' && c != '\f' && c != '\v') return false;
    return true;
}

// One news item as it appears in a corpus file. Immutable after parsing.
struct Article {
    std::string id;
    std::string title;
    std::optional<std::string> editorial_title;
    std::string publisher;
    std::string published_at; // ISO-8601 calendar date, YYYY-MM-DD
    std::set<std::string> channels;
    std::vector<std::string> paragraphs;
    std::string extra_json; // unknown keys from the source record, re-emitted on serialize

    // Whitespace tokens over title + all paragraphs. The title counts
    // toward the word filter even though it is not a paragraph.
    std::size_t word_count() const {
        std::size_t n = count_words(title);
        for (const auto& p : paragraphs) n += count_words(p);
        return n;
    }
};

struct ValidationResult {
    bool accepted = false;
    std::string reason; // "word_count" or "paragraph_count"; empty when accepted
};

inline constexpr std::size_t kDefaultMinWords = 450;
inline constexpr std::size_t kDefaultMinParagraphs = 5;

// Corpus filter. Rejection is a value, not an error; word_count is
// checked first so an article failing both reports "word_count".
inline ValidationResult validate_article(const Article& a,
                                         std::size_t min_words = kDefaultMinWords,
                                         std::size_t min_paragraphs = kDefaultMinParagraphs) {
    if (a.word_count() < min_words) return {false, "word_count"};
    if (a.paragraphs.size() < min_paragraphs) return {false, "paragraph_count"};
    return {true, ""};
}

// An article split into intro / body / conclusion under (x, y).
// The intro carries the title plus the first x paragraphs; the last y
// paragraphs form the conclusion; the body is whatever remains and is
// never empty (x + y < paragraph count).
struct StructuredArticle {
    const Article* article = nullptr;
    int x = 1;
    int y = 1;

    std::span<const std::string> intro_paragraphs() const {
        return {article->paragraphs.data(), static_cast<std::size_t>(x)};
    }
    std::span<const std::string> body_paragraphs() const {
        return {article->paragraphs.data() + x,
                article->paragraphs.size() - static_cast<std::size_t>(x) - static_cast<std::size_t>(y)};
    }
    std::span<const std::string> conclusion_paragraphs() const {
        std::size_t n = article->paragraphs.size();
        return {article->paragraphs.data() + (n - static_cast<std::size_t>(y)),
                static_cast<std::size_t>(y)};
    }

    // Title plus intro paragraphs, newline-joined; input to the
    // problem-definition extraction.
    std::string intro_text() const {
        std::string out = article->title;
        for (const auto& p : intro_paragraphs()) {
            out += '\n';
            out += p;
        }
        return out;
    }
};

inline StructuredArticle segment(const Article& a, int x, int y) {
    if (x < 1 || y < 1) throw ConfigError("segment: x and y must be >= 1");
    std::size_t n = a.paragraphs.size();
    if (static_cast<std::size_t>(x) + static_cast<std::size_t>(y) >= n)
        throw ValidationError("segment: article '" + a.id + "' has " + std::to_string(n) +
                              " paragraphs, too short for x=" + std::to_string(x) +
                              " y=" + std::to_string(y));
    return StructuredArticle{&a, x, y};
}

} // namespace viewdiv
