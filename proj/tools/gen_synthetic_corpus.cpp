// Generates the bundled synthetic debate corpus: deterministic given the
// seed, with enough debates per (round count, initiating side, winner)
// stratum for the default balanced quotas, plus a sprinkling of ineligible
// records (low vote margins, forfeits, out-of-range round counts) so the
// ingest stage has something to reject.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "debate_audit/corpus.hpp"
#include "debate_audit/io.hpp"
#include "debate_audit/rng.hpp"

using namespace debate_audit;

namespace {

const std::vector<std::string> kTopics = {
    "school uniforms should be mandatory",
    "homework does more harm than good",
    "social media improves public discourse",
    "space exploration deserves more funding",
    "zoos should be abolished",
    "voting should be compulsory",
    "cities should ban private cars",
    "exams measure real learning",
    "video games are a legitimate sport",
    "nuclear energy is the best climate option",
    "museums should be free for everyone",
    "remote work helps society",
    "junk food advertising should be banned",
    "books beat films for storytelling",
    "year-round schooling is better",
    "animal testing is never justified",
    "cash should be phased out",
    "national service should be required",
    "billboards should be illegal",
    "the school day should start later",
};

const std::vector<std::string> kWords = {
    "argument",  "evidence",   "because",   "policy",   "benefit",  "harm",     "society",
    "clearly",   "therefore",  "opponent",  "claim",    "support",  "against",  "propose",
    "consider",  "important",  "outcome",   "measure",  "public",   "private",  "value",
    "freedom",   "fairness",   "cost",      "data",     "study",    "shows",    "however",
    "moreover",  "granted",    "rebuttal",  "point",    "first",    "second",   "finally",
    "question",  "answer",     "position",  "reason",   "practice", "principle", "balance",
    "impact",    "risk",       "reward",    "history",  "future",   "present",  "people",
    "community", "individual", "evidence",  "conclude", "assert",   "deny",     "affirm",
    "challenge", "defend",     "context",   "detail",   "overall",  "likely",   "unlikely",
    "standard",  "burden",     "proof",     "framework", "weigh",   "compare",  "contrast",
};

std::string make_sentence(rng::Engine& engine, int words) {
    std::string out;
    for (int w = 0; w < words; ++w) {
        std::string word = kWords[engine.below(kWords.size())];
        if (w == 0) word[0] = static_cast<char>(std::toupper(word[0]));
        if (!out.empty()) out += ' ';
        out += word;
    }
    out += '.';
    return out;
}

std::string make_utterance(rng::Engine& engine) {
    int sentences = 1 + static_cast<int>(engine.below(2));
    std::string out;
    for (int s = 0; s < sentences; ++s) {
        if (!out.empty()) out += ' ';
        out += make_sentence(engine, 8 + static_cast<int>(engine.below(8)));
    }
    return out;
}

corpus::Debate make_synthetic_debate(rng::Engine& engine, const std::string& id, int rounds,
                                     Side initiating, Side winner, long vote_difference,
                                     bool forfeited) {
    std::vector<corpus::RawUtterance> utterances;
    Side side = initiating;
    for (int i = 0; i < rounds * 2; ++i) {
        utterances.push_back({side, make_utterance(engine)});
        side = opposite(side);
    }
    return corpus::make_debate(id, kTopics[engine.below(kTopics.size())], std::move(utterances),
                               winner, vote_difference, forfeited);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"generate the bundled synthetic debate corpus"};
    std::string out_path = "data/synthetic_corpus.jsonl";
    std::uint64_t seed = 20240301;
    long per_stratum_small = 150;  // initiating side wins
    long per_stratum_large = 200;  // concluding side wins (mild Con-style skew)
    app.add_option("--out", out_path, "output jsonl path");
    app.add_option("--seed", seed, "generator seed");
    CLI11_PARSE(app, argc, argv);

    rng::Engine engine(seed);
    std::vector<corpus::Debate> debates;
    long counter = 0;
    auto next_id = [&counter] {
        std::string digits = std::to_string(++counter);
        return "syn-" + std::string(6 - std::min<std::size_t>(6, digits.size()), '0') + digits;
    };

    for (int rounds : {3, 4, 5}) {
        for (Side initiating : {Side::Pro, Side::Con}) {
            for (Side winner : {Side::Pro, Side::Con}) {
                // a debate with an even utterance count always concludes on
                // the non-initiating side, so "concluder wins" is the larger
                // stratum, echoing the vote skew seen in real corpora
                long quota = winner == initiating ? per_stratum_small : per_stratum_large;
                for (long i = 0; i < quota; ++i) {
                    long votes = 3 + static_cast<long>(engine.below(10));
                    debates.push_back(make_synthetic_debate(engine, next_id(), rounds, initiating,
                                                            winner, votes, false));
                }
            }
        }
    }

    // ineligible records: tied or narrow votes, forfeits, out-of-range length
    for (int i = 0; i < 40; ++i) {
        Side initiating = engine.below(2) ? Side::Pro : Side::Con;
        Side winner = engine.below(2) ? Side::Pro : Side::Con;
        debates.push_back(make_synthetic_debate(engine, next_id(), 3 + int(engine.below(3)),
                                                initiating, winner, long(engine.below(3)), false));
    }
    for (int i = 0; i < 30; ++i) {
        Side initiating = engine.below(2) ? Side::Pro : Side::Con;
        Side winner = engine.below(2) ? Side::Pro : Side::Con;
        debates.push_back(make_synthetic_debate(engine, next_id(), 3 + int(engine.below(3)),
                                                initiating, winner, 3 + long(engine.below(5)),
                                                true));
    }
    for (int i = 0; i < 30; ++i) {
        Side initiating = engine.below(2) ? Side::Pro : Side::Con;
        Side winner = engine.below(2) ? Side::Pro : Side::Con;
        int rounds = engine.below(2) ? 2 : 6;
        debates.push_back(make_synthetic_debate(engine, next_id(), rounds, initiating, winner,
                                                3 + long(engine.below(5)), false));
    }

    // mix strata through the file
    rng::fisher_yates(debates, engine);
    io::write_debates_jsonl(out_path, debates);
    std::cout << "wrote " << debates.size() << " debates to " << out_path << " (seed " << seed
              << ")\n";
    return 0;
}
