#pragma once

#include <algorithm>
#include <string>
#include <unordered_map>

#include <json.hpp>

#include "viewdiv/errors.hpp"
#include "viewdiv/text.hpp"

namespace viewdiv {

// Valence lexicon standing in for an external sentiment service.
// Paragraph score = mean valence over matched token occurrences,
// 0 when nothing matches, clamped to [-1, 1].
class SentimentLexicon {
public:
    SentimentLexicon() = default;

    explicit SentimentLexicon(std::unordered_map<std::string, double> valences)
        : valences_(std::move(valences)) {
        validate();
    }

    static SentimentLexicon from_json(const nlohmann::json& j) {
        SentimentLexicon lex;
        try {
            for (auto it = j.begin(); it != j.end(); ++it)
                lex.valences_[it.key()] = it.value().get<double>();
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("sentiment lexicon: ") + e.what());
        }
        lex.validate();
        return lex;
    }

    nlohmann::json to_json() const {
        nlohmann::json j = nlohmann::json::object();
        for (const auto& [tok, v] : valences_) j[tok] = v;
        return j;
    }

    std::size_t size() const { return valences_.size(); }

    double score(std::string_view paragraph, const Normalizer& norm) const {
        double sum = 0;
        std::size_t hits = 0;
        for (const auto& tok : preprocess(paragraph, norm)) {
            auto it = valences_.find(tok);
            if (it != valences_.end()) {
                sum += it->second;
                ++hits;
            }
        }
        if (hits == 0) return 0.0;
        return std::clamp(sum / static_cast<double>(hits), -1.0, 1.0);
    }

private:
    void validate() const {
        for (const auto& [tok, v] : valences_)
            if (v < -1.0 || v > 1.0)
                throw ConfigError("sentiment lexicon: valence for '" + tok +
                                  "' outside [-1, 1]");
    }

    std::unordered_map<std::string, double> valences_;
};

} // namespace viewdiv
