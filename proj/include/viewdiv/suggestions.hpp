#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "viewdiv/errors.hpp"
#include "viewdiv/text.hpp"

namespace viewdiv {

// Rule set for suggestion mining: a sentence is a suggestion when it
// contains a modal cue ("should", "must", "need to", ...) or opens with
// an imperative starter. Ships in English and Dutch variants; both are
// plain JSON so new languages are a data file away.
//
// Cue matching runs on lowercased, punctuation-stripped tokens with no
// stop-word removal -- modal verbs are exactly the words stop lists drop.
struct CueLexicon {
    std::vector<std::vector<std::string>> modal_cues; // token sequences
    std::vector<std::string> imperative_starters;

    static CueLexicon from_json(const nlohmann::json& j) {
        CueLexicon lex;
        Normalizer norm; // lowercase, nothing else
        try {
            for (const auto& cue : j.at("modal")) {
                auto toks = preprocess(cue.get<std::string>(), norm);
                if (!toks.empty()) lex.modal_cues.push_back(std::move(toks));
            }
            if (j.contains("imperative"))
                for (const auto& s : j.at("imperative"))
                    lex.imperative_starters.push_back(
                        norm.normalize_token(s.get<std::string>()));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("cue lexicon: ") + e.what());
        }
        if (lex.modal_cues.empty() && lex.imperative_starters.empty())
            throw ConfigError("cue lexicon: no rules defined");
        return lex;
    }

    nlohmann::json to_json() const {
        nlohmann::json modal = nlohmann::json::array();
        for (const auto& cue : modal_cues) {
            std::string joined;
            for (const auto& t : cue) {
                if (!joined.empty()) joined += ' ';
                joined += t;
            }
            modal.push_back(joined);
        }
        return {{"modal", modal}, {"imperative", imperative_starters}};
    }

    bool matches(std::span<const std::string> tokens) const {
        if (tokens.empty()) return false;
        for (const auto& starter : imperative_starters)
            if (tokens.front() == starter) return true;
        for (const auto& cue : modal_cues) {
            if (cue.size() > tokens.size()) continue;
            for (std::size_t i = 0; i + cue.size() <= tokens.size(); ++i) {
                bool hit = true;
                for (std::size_t k = 0; k < cue.size(); ++k)
                    if (tokens[i + k] != cue[k]) {
                        hit = false;
                        break;
                    }
                if (hit) return true;
            }
        }
        return false;
    }
};

// Splits the conclusion paragraphs into sentences and keeps those
// matching at least one rule, in original order.
inline std::vector<std::string> mine_suggestions(std::span<const std::string> conclusion_paragraphs,
                                                 const CueLexicon& cues) {
    Normalizer norm; // lowercase only; cue words must survive
    std::vector<std::string> out;
    for (const auto& paragraph : conclusion_paragraphs) {
        for (auto& sentence : split_sentences(paragraph)) {
            auto tokens = preprocess(sentence, norm);
            if (cues.matches(tokens)) out.push_back(std::move(sentence));
        }
    }
    return out;
}

} // namespace viewdiv
