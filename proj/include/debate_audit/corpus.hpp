#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "debate_audit/errors.hpp"
#include "debate_audit/side.hpp"

namespace debate_audit::corpus {

class EmptyCorpus : public DataError {
public:
    using DataError::DataError;
};

class InsufficientStratum : public DataError {
public:
    InsufficientStratum(int round_count, std::string stratum, long available, long requested);

    int round_count;
    std::string stratum;
    long available;
    long requested;
};

class InsufficientDebates : public DataError {
public:
    explicit InsufficientDebates(int round_count, long available, long requested);

    int round_count;
    long available;
    long requested;
};

struct Utterance {
    Side side = Side::Pro;
    std::string text;
    int round_index = 1;  // 1-based
};

/// One debate. Derived fields (rounds, sides, word_count) are computed at
/// construction and the alternation invariants are enforced there.
struct Debate {
    std::string id;
    std::string topic;
    std::vector<Utterance> utterances;
    int rounds = 0;
    Side initiating_side = Side::Pro;
    Side concluding_side = Side::Con;
    Side winner = Side::Pro;
    long vote_difference = 0;
    bool forfeited = false;
    long word_count = 0;
};

struct RawUtterance {
    Side side;
    std::string text;
};

/// Validate and derive. Throws DataError with a reason usable as a parse
/// diagnostic: sides must strictly alternate, the count must be even and
/// positive, and every utterance must be non-empty after trimming.
Debate make_debate(std::string id, std::string topic, std::vector<RawUtterance> utterances,
                   Side winner, long vote_difference, bool forfeited);

struct EligibilityRule {
    int min_rounds = 3;
    int max_rounds = 5;
    long min_vote_difference_exclusive = 2;  // keep only vote_difference > this
    bool exclude_forfeits = true;
};

enum class CorpusFormat { Jsonl, Csv };

CorpusFormat format_from_string(std::string_view name);

enum class DiagnosticKind { MalformedRecord, NonAlternatingSides, EmptyUtterance };

struct ParseDiagnostic {
    DiagnosticKind kind = DiagnosticKind::MalformedRecord;
    long line = 0;            // 1-based line of the offending record
    std::string debate_id;    // empty when the id itself was unreadable
    int utterance_index = -1; // for EmptyUtterance, 0-based
    std::string reason;
};

struct ParseResult {
    std::vector<Debate> debates;
    std::vector<ParseDiagnostic> diagnostics;
};

/// Parse a corpus stream. Malformed records become diagnostics, never
/// silent skips; well-formed records are returned in input order.
///
/// Jsonl: one JSON object per line with fields id, topic, utterances
/// (array of {side, text}), winner, vote_difference, forfeited.
/// Csv: RFC-4180-style rows `id,topic,side,text,winner,vote_difference,
/// forfeited` with a header line, one utterance per row, rows of the same
/// debate contiguous.
ParseResult parse_corpus(std::istream& input, CorpusFormat format);

std::vector<Debate> filter_eligible(const std::vector<Debate>& debates,
                                    const EligibilityRule& rule);

struct RoundStats {
    long count = 0;
    double fraction_con_concluding = 0.0;
    double fraction_con_winning = 0.0;
};

struct CorpusStats {
    long debate_count = 0;
    double mean_word_count = 0.0;
    std::map<int, RoundStats> per_round;  // keyed by round count
};

CorpusStats corpus_stats(const std::vector<Debate>& debates);

/// Quotas from the balanced design: 125 per stratum for 3- and 4-round
/// debates, 75 for 5-round.
std::map<int, long> default_balanced_quota();

/// Stratified sample with exact per-stratum counts. Strata are
/// (initiating side x winner) within each round count in the quota map.
/// Procedure, pinned for reproducibility: strata visited with round counts
/// ascending and strata ordered (Pro,Pro),(Pro,Con),(Con,Pro),(Con,Con);
/// each stratum's members sorted by id, Fisher-Yates shuffled with a single
/// shared Engine seeded by `seed`, first `quota` taken.
std::vector<Debate> sample_balanced(const std::vector<Debate>& debates,
                                    const std::map<int, long>& per_round_quota,
                                    std::uint64_t seed);

/// Simple random sample of `per_round_count` debates from every round count
/// present, preserving natural class proportions. Same shuffle procedure as
/// sample_balanced, applied per round count in ascending order.
std::vector<Debate> sample_unbalanced(const std::vector<Debate>& debates,
                                      long per_round_count, std::uint64_t seed);

}  // namespace debate_audit::corpus
