#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "debate_audit/corpus.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace debate_audit;
using corpus::CorpusFormat;

namespace {

std::string good_record(const std::string& id, int rounds = 3, const char* first = "Pro") {
    std::ostringstream out;
    const char* second = std::string(first) == "Pro" ? "Con" : "Pro";
    out << R"({"id":")" << id << R"(","topic":"t","utterances":[)";
    for (int i = 0; i < rounds * 2; ++i) {
        if (i > 0) out << ',';
        out << R"({"side":")" << (i % 2 == 0 ? first : second) << R"(","text":"speech )" << i
            << R"( words here"})";
    }
    out << R"(],"winner":"Con","vote_difference":4,"forfeited":false})";
    return out.str();
}

corpus::ParseResult parse_string(const std::string& text,
                                 CorpusFormat format = CorpusFormat::Jsonl) {
    std::istringstream in(text);
    return corpus::parse_corpus(in, format);
}

}  // namespace

TEST_CASE("well-formed record gets derived fields") {
    auto result = parse_string(good_record("d1"));
    REQUIRE(result.debates.size() == 1);
    CHECK(result.diagnostics.empty());
    const auto& d = result.debates[0];
    CHECK(d.rounds == 3);
    CHECK(d.initiating_side == Side::Pro);
    CHECK(d.concluding_side == Side::Con);
    CHECK(d.utterances.size() == 6);
    CHECK(d.utterances[0].round_index == 1);
    CHECK(d.utterances[5].round_index == 3);
    CHECK(d.word_count == 6 * 4);
}

TEST_CASE("non-alternating sides are rejected") {
    std::string bad = R"({"id":"d1","topic":"t","utterances":[)"
                      R"({"side":"Pro","text":"a"},{"side":"Pro","text":"b"}],)"
                      R"("winner":"Pro","vote_difference":3,"forfeited":false})";
    auto result = parse_string(bad);
    CHECK(result.debates.empty());
    REQUIRE(result.diagnostics.size() == 1);
    CHECK(result.diagnostics[0].kind == corpus::DiagnosticKind::NonAlternatingSides);
    CHECK(result.diagnostics[0].debate_id == "d1");
}

TEST_CASE("empty utterance is rejected with its index") {
    std::string bad = R"({"id":"d2","topic":"t","utterances":[)"
                      R"({"side":"Pro","text":"fine"},{"side":"Con","text":"  \n "}],)"
                      R"("winner":"Pro","vote_difference":3,"forfeited":false})";
    auto result = parse_string(bad);
    CHECK(result.debates.empty());
    REQUIRE(result.diagnostics.size() == 1);
    CHECK(result.diagnostics[0].kind == corpus::DiagnosticKind::EmptyUtterance);
    CHECK(result.diagnostics[0].utterance_index == 1);
}

TEST_CASE("odd utterance count is malformed") {
    std::string bad = R"({"id":"d3","topic":"t","utterances":[)"
                      R"({"side":"Pro","text":"a"},{"side":"Con","text":"b"},)"
                      R"({"side":"Pro","text":"c"}],)"
                      R"("winner":"Pro","vote_difference":3,"forfeited":false})";
    auto result = parse_string(bad);
    CHECK(result.debates.empty());
    REQUIRE(result.diagnostics.size() == 1);
    CHECK(result.diagnostics[0].kind == corpus::DiagnosticKind::MalformedRecord);
}

TEST_CASE("ten records with two malformed yield eight debates and two diagnostics") {
    std::ostringstream file;
    for (int i = 0; i < 4; ++i) file << good_record("ok-" + std::to_string(i)) << "\n";
    file << "{ this is not json\n";
    for (int i = 4; i < 8; ++i) file << good_record("ok-" + std::to_string(i)) << "\n";
    file << R"({"id":"bad","topic":"t","utterances":[{"side":"Pro","text":"a"},)"
         << R"({"side":"Pro","text":"b"}],"winner":"Pro","vote_difference":3,"forfeited":false})"
         << "\n";
    auto result = parse_string(file.str());
    CHECK(result.debates.size() == 8);
    CHECK(result.diagnostics.size() == 2);
    CHECK(result.diagnostics[0].line == 5);
    CHECK(result.diagnostics[1].line == 10);
}

TEST_CASE("csv format parses one utterance per row") {
    std::string csv =
        "id,topic,side,text,winner,vote_difference,forfeited\n"
        "c1,\"taxes, etc\",Pro,\"first speech, with a comma\",Con,4,false\n"
        "c1,\"taxes, etc\",Con,\"reply\nspanning lines\",Con,4,false\n"
        "c2,other,Con,opening,Pro,3,false\n"
        "c2,other,Pro,closing,Pro,3,false\n";
    auto result = parse_string(csv, CorpusFormat::Csv);
    REQUIRE(result.debates.size() == 2);
    CHECK(result.diagnostics.empty());
    CHECK(result.debates[0].id == "c1");
    CHECK(result.debates[0].utterances[0].text == "first speech, with a comma");
    CHECK(result.debates[0].utterances[1].text == "reply\nspanning lines");
    CHECK(result.debates[1].initiating_side == Side::Con);
    CHECK(result.debates[1].concluding_side == Side::Pro);
}

TEST_CASE("csv rows of one debate must be contiguous") {
    std::string csv =
        "id,topic,side,text,winner,vote_difference,forfeited\n"
        "c1,t,Pro,a,Con,4,false\n"
        "c2,t,Pro,b,Con,4,false\n"
        "c2,t,Con,c,Con,4,false\n"
        "c1,t,Con,d,Con,4,false\n";
    auto result = parse_string(csv, CorpusFormat::Csv);
    // c1 flushes as a one-utterance (odd) record, c2 parses, the late c1 row errors
    CHECK(result.debates.size() == 1);
    CHECK(result.debates[0].id == "c2");
    CHECK(result.diagnostics.size() == 2);
}

TEST_CASE("filter_eligible applies the strict vote threshold") {
    std::vector<corpus::Debate> debates = {
        fixtures::make_debate("at-threshold", 3, Side::Pro, Side::Con, 2),
        fixtures::make_debate("above-threshold", 3, Side::Pro, Side::Con, 3),
        fixtures::make_debate("forfeit", 4, Side::Pro, Side::Con, 5, true),
        fixtures::make_debate("too-long", 6, Side::Pro, Side::Con, 5),
        fixtures::make_debate("too-short", 2, Side::Pro, Side::Con, 5),
        fixtures::make_debate("five-rounds", 5, Side::Con, Side::Pro, 9),
    };
    auto eligible = corpus::filter_eligible(debates, {});
    REQUIRE(eligible.size() == 2);
    CHECK(eligible[0].id == "above-threshold");
    CHECK(eligible[1].id == "five-rounds");
}

TEST_CASE("filter_eligible is idempotent") {
    std::mt19937_64 gen(123);
    auto debates = fixtures::random_corpus(gen, 300);
    corpus::EligibilityRule rule;
    auto once = corpus::filter_eligible(debates, rule);
    auto twice = corpus::filter_eligible(once, rule);
    REQUIRE(once.size() == twice.size());
    for (std::size_t i = 0; i < once.size(); ++i) CHECK(once[i].id == twice[i].id);
}

TEST_CASE("corpus_stats") {
    SUBCASE("mean word count is the arithmetic mean") {
        std::vector<corpus::Debate> debates = {
            fixtures::make_debate("a", 3, Side::Pro, Side::Con, 5, false, 100),  // 600 words
            fixtures::make_debate("b", 3, Side::Pro, Side::Con, 5, false, 200),  // 1200 words
        };
        auto stats = corpus::corpus_stats(debates);
        CHECK(stats.mean_word_count == doctest::Approx(900.0));
        CHECK(stats.debate_count == 2);
    }
    SUBCASE("all Con-concluding gives fraction one") {
        std::vector<corpus::Debate> debates = {
            fixtures::make_debate("a", 3, Side::Pro, Side::Con),
            fixtures::make_debate("b", 4, Side::Pro, Side::Pro),
        };
        auto stats = corpus::corpus_stats(debates);
        CHECK(stats.per_round.at(3).fraction_con_concluding == 1.0);
        CHECK(stats.per_round.at(4).fraction_con_concluding == 1.0);
        CHECK(stats.per_round.at(3).fraction_con_winning == 1.0);
        CHECK(stats.per_round.at(4).fraction_con_winning == 0.0);
    }
    SUBCASE("empty corpus throws") {
        CHECK_THROWS_AS(corpus::corpus_stats({}), corpus::EmptyCorpus);
    }
}

TEST_CASE("alternation invariant holds for every parsed debate") {
    std::mt19937_64 gen(99);
    auto debates = fixtures::random_corpus(gen, 200);
    for (const auto& d : debates) {
        CHECK(d.utterances.size() % 2 == 0);
        CHECK(d.initiating_side == d.utterances.front().side);
        CHECK(d.concluding_side == d.utterances.back().side);
        CHECK(d.concluding_side == opposite(d.initiating_side));
        for (std::size_t i = 1; i < d.utterances.size(); ++i)
            CHECK(d.utterances[i].side != d.utterances[i - 1].side);
    }
}

TEST_CASE("balanced sample has exact stratum counts") {
    auto debates = fixtures::stratified_corpus(160);
    auto sample = corpus::sample_balanced(debates, corpus::default_balanced_quota(), 42);
    CHECK(sample.size() == 500 + 500 + 300);

    std::map<std::tuple<int, Side, Side>, long> counts;
    for (const auto& d : sample) ++counts[{d.rounds, d.initiating_side, d.winner}];
    for (int rounds : {3, 4, 5}) {
        long expected = rounds == 5 ? 75 : 125;
        for (Side init : {Side::Pro, Side::Con})
            for (Side winner : {Side::Pro, Side::Con})
                CHECK(counts[{rounds, init, winner}] == expected);
    }
}

TEST_CASE("balanced sample is deterministic in the seed") {
    auto debates = fixtures::stratified_corpus(160);
    auto a = corpus::sample_balanced(debates, corpus::default_balanced_quota(), 7);
    auto b = corpus::sample_balanced(debates, corpus::default_balanced_quota(), 7);
    auto c = corpus::sample_balanced(debates, corpus::default_balanced_quota(), 8);
    REQUIRE(a.size() == b.size());
    bool identical = true, differs_from_c = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        identical = identical && a[i].id == b[i].id;
        differs_from_c = differs_from_c || a[i].id != c[i].id;
    }
    CHECK(identical);
    CHECK(differs_from_c);
}

TEST_CASE("balanced sample ignores input order") {
    auto debates = fixtures::stratified_corpus(130);
    auto reversed = debates;
    std::reverse(reversed.begin(), reversed.end());
    auto a = corpus::sample_balanced(debates, corpus::default_balanced_quota(), 9);
    auto b = corpus::sample_balanced(reversed, corpus::default_balanced_quota(), 9);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].id == b[i].id);
}

TEST_CASE("insufficient stratum fails loudly") {
    auto debates = fixtures::stratified_corpus(10);
    try {
        corpus::sample_balanced(debates, corpus::default_balanced_quota(), 1);
        FAIL("expected InsufficientStratum");
    } catch (const corpus::InsufficientStratum& e) {
        CHECK(e.available == 10);
        CHECK(e.requested == 125);
        CHECK(e.round_count == 3);
    }
}

TEST_CASE("unbalanced sample") {
    SUBCASE("zero per round gives the empty sample") {
        auto debates = fixtures::stratified_corpus(10);
        CHECK(corpus::sample_unbalanced(debates, 0, 1).empty());
    }
    SUBCASE("insufficient debates throw") {
        auto debates = fixtures::stratified_corpus(10, {3});
        CHECK_THROWS_AS(corpus::sample_unbalanced(debates, 500, 1),
                        corpus::InsufficientDebates);
    }
    SUBCASE("default size draws 1500 across three round counts") {
        auto debates = fixtures::stratified_corpus(160);  // 640 per round count
        auto sample = corpus::sample_unbalanced(debates, 500, 11);
        CHECK(sample.size() == 1500);
    }
    SUBCASE("class proportions survive sampling within the hypergeometric bound") {
        // population: per round count 3, Con wins 320 of 640
        auto debates = fixtures::stratified_corpus(160, {3});
        long N = 640, K = 320, n = 500;
        double population = double(K) / double(N);

        // oracle: exact probability that a simple random sample deviates by
        // more than 5 points, summed from the hypergeometric pmf
        double p_miss = 0.0;
        for (long k = 0; k <= n; ++k) {
            if (std::fabs(double(k) / double(n) - population) > 0.05)
                p_miss += oracles::hypergeometric_pmf(N, K, n, k);
        }
        CHECK(p_miss < 0.02);

        int misses = 0;
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            auto sample = corpus::sample_unbalanced(debates, n, seed);
            long con = 0;
            for (const auto& d : sample) con += d.winner == Side::Con ? 1 : 0;
            if (std::fabs(double(con) / double(n) - population) > 0.05) ++misses;
        }
        CHECK(misses <= 2);
    }
}
