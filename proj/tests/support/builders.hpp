#pragma once

// Small helpers for constructing test articles and corpora.

#include <string>
#include <vector>

#include "viewdiv/article.hpp"
#include "viewdiv/corpus.hpp"

namespace builders {

inline viewdiv::Article article(std::string id, std::vector<std::string> paragraphs,
                                std::string publisher = "pub",
                                std::vector<std::string> channels = {}) {
    viewdiv::Article a;
    a.id = std::move(id);
    a.title = "Title for " + a.id;
    a.publisher = std::move(publisher);
    a.published_at = "2020-06-15";
    for (auto& c : channels) a.channels.insert(std::move(c));
    a.paragraphs = std::move(paragraphs);
    return a;
}

// n paragraphs of `words` words each ("w1 w2 ...").
inline viewdiv::Article article_with_counts(std::string id, std::size_t n_paragraphs,
                                            std::size_t words_per_paragraph,
                                            std::string publisher = "pub") {
    std::vector<std::string> paragraphs;
    for (std::size_t p = 0; p < n_paragraphs; ++p) {
        std::string text;
        for (std::size_t w = 0; w < words_per_paragraph; ++w) {
            if (!text.empty()) text += ' ';
            text += "w" + std::to_string(p) + "_" + std::to_string(w);
        }
        paragraphs.push_back(text);
    }
    viewdiv::Article a = article(std::move(id), std::move(paragraphs), std::move(publisher));
    a.title = "t"; // keep word counts easy to reason about: n*words + 1
    return a;
}

} // namespace builders
