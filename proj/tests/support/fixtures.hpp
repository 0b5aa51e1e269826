#pragma once

#include <random>
#include <string>
#include <vector>

#include "debate_audit/corpus.hpp"

namespace fixtures {

using namespace debate_audit;

// words_per_utterance fixed so tests can reason about word counts exactly
inline corpus::Debate make_debate(const std::string& id, int rounds, Side initiating, Side winner,
                                  long vote_difference = 5, bool forfeited = false,
                                  int words_per_utterance = 10) {
    std::vector<corpus::RawUtterance> utterances;
    Side side = initiating;
    for (int i = 0; i < rounds * 2; ++i) {
        // texts carry the debate id so distinct debates render distinct prompts
        std::string text;
        for (int w = 0; w < words_per_utterance; ++w) {
            if (!text.empty()) text += ' ';
            text += id + "-w" + std::to_string(i) + "x" + std::to_string(w);
        }
        utterances.push_back({side, text});
        side = opposite(side);
    }
    return corpus::make_debate(id, "test topic " + id, std::move(utterances), winner,
                               vote_difference, forfeited);
}

// A corpus with known stratum counts per round count.
inline std::vector<corpus::Debate> stratified_corpus(long per_stratum,
                                                     const std::vector<int>& round_counts = {3, 4,
                                                                                             5}) {
    std::vector<corpus::Debate> debates;
    long counter = 0;
    for (int rounds : round_counts) {
        for (Side initiating : {Side::Pro, Side::Con}) {
            for (Side winner : {Side::Pro, Side::Con}) {
                for (long i = 0; i < per_stratum; ++i) {
                    debates.push_back(make_debate("fix-" + std::to_string(++counter), rounds,
                                                  initiating, winner));
                }
            }
        }
    }
    return debates;
}

inline std::vector<corpus::Debate> random_corpus(std::mt19937_64& gen, long count) {
    std::vector<corpus::Debate> debates;
    std::uniform_int_distribution<int> rounds_dist(2, 6);
    std::uniform_int_distribution<long> votes_dist(0, 9);
    std::bernoulli_distribution coin(0.5);
    std::bernoulli_distribution rare(0.1);
    for (long i = 0; i < count; ++i) {
        debates.push_back(make_debate("rnd-" + std::to_string(i), rounds_dist(gen),
                                      coin(gen) ? Side::Pro : Side::Con,
                                      coin(gen) ? Side::Pro : Side::Con, votes_dist(gen),
                                      rare(gen)));
    }
    return debates;
}

// The fixed 3-round debate behind the prompt golden files.
inline corpus::Debate golden_debate() {
    std::vector<corpus::RawUtterance> utterances = {
        {Side::Pro, "Books let readers set the pace and imagine every scene for themselves."},
        {Side::Con, "Films deliver performances, music, and imagery no page can match."},
        {Side::Pro, "Imagination outlasts spectacle; a reader co-creates the story."},
        {Side::Con, "A great cast makes characters breathe in ways prose cannot."},
        {Side::Pro, "Novels hold interior thought, the one thing cameras never capture."},
        {Side::Con, "Editing and sound design carry emotion straight to the audience."},
    };
    return corpus::make_debate("golden-001", "books beat films for storytelling",
                               std::move(utterances), Side::Con, 4, false);
}

}  // namespace fixtures
