#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "debate_audit/judge.hpp"
#include "debate_audit/metrics.hpp"
#include "debate_audit/stats.hpp"

namespace debate_audit::bias {

class MissingArm : public DataError {
public:
    using DataError::DataError;
};

class PolicyMismatch : public DataError {
public:
    using DataError::DataError;
};

class EmptyCell : public DataError {
public:
    using DataError::DataError;
};

class SelfVerificationFailure : public VerificationError {
public:
    using VerificationError::VerificationError;
};

/// Every section embeds the raw counts next to each statistic so a report
/// can be re-verified from its own numbers alone.

struct UnpairedPositional {
    metrics::Proportion con_when_con_second;  // Con is the second candidate
    metrics::Proportion con_when_con_first;
    stats::TestResult z_test;
};

struct PairedPositional {
    std::string fixed_run;
    std::string shuffled_run;
    long f12 = 0;
    long f21 = 0;
    long dropped_invalid = 0;
    bool continuity_correction = false;
    stats::TestResult mcnemar;
};

struct PositionalSection {
    std::optional<UnpairedPositional> unpaired;
    std::optional<PairedPositional> paired;
};

struct LexicalPair {
    std::string verbalizer_first;   // e.g. "A/B"
    std::string verbalizer_second;  // e.g. "B/A"
    long f12 = 0;
    long f21 = 0;
    long dropped_invalid = 0;
    bool continuity_correction = false;
    stats::TestResult mcnemar;
    metrics::Proportion con_under_first;
    metrics::Proportion con_under_second;
};

struct OrderSection {
    stats::Table2x2 table;  // rows concluding side Pro/Con, columns predicted Pro/Con
    long dropped_invalid = 0;
    stats::TestResult chi_square;
};

struct StanceSection {
    long predicted_pro = 0;
    long valid_n = 0;
    double proportion = 0.0;
    stats::TestResult vs_half;
    metrics::ConfusionMatrix confusion;
};

struct SensitivityCell {
    std::string verbalizer;
    design::OutcomeQuestion question = design::OutcomeQuestion::Winner;
    long n = 0;
    double accuracy = 0.0;
    double weighted_f1 = 0.0;
    double invalid_rate = 0.0;
    bool best = false;
    bool worst = false;
};

struct ReportMetadata {
    std::map<std::string, std::uint64_t> seeds;
    std::vector<std::string> conditions;
    std::map<std::string, long> sample_sizes;
    std::map<std::string, bool> correction_flags;
    std::string rng_identity;
    std::string template_version;
    std::string manifest_digest;
};

struct BiasReport {
    std::optional<PositionalSection> positional;
    std::vector<LexicalPair> lexical;
    std::optional<OrderSection> order;
    std::optional<StanceSection> stance;
    std::vector<SensitivityCell> sensitivity;
    ReportMetadata metadata;
};

/// Predicted-Con proportions for each candidate order plus the pooled
/// two-proportion z-test. Needs both orders present (MissingArm otherwise);
/// the records may come from one shuffled run or two fixed runs combined.
UnpairedPositional positional_unpaired(const std::vector<judge::RunRecord>& records);

/// McNemar over a position-fixed run and a position-shuffled run covering
/// the same debates.
PairedPositional positional_paired(const std::vector<judge::RunRecord>& fixed_run,
                                   const std::vector<judge::RunRecord>& shuffled_run,
                                   bool continuity_correction);

/// Label-flip comparison: both runs must use ShuffledPositions and cover the
/// same debates; f12/f21 follow the run order given.
LexicalPair lexical_analysis(const std::vector<judge::RunRecord>& run_first,
                             const std::vector<judge::RunRecord>& run_second,
                             bool continuity_correction);

/// Concluding side vs predicted winner, chi-square with Yates by default.
OrderSection order_analysis(const std::vector<judge::RunRecord>& records,
                            const std::map<std::string, Side>& concluding_side_by_id,
                            bool yates_correction = true);

/// Residual stance preference on a DoubleShuffled run: predicted-Pro share
/// against one half, plus the run's confusion matrix.
StanceSection stance_analysis(const std::vector<judge::RunRecord>& records);

/// Accuracy / weighted F1 / invalid rate per (verbalizer, question) cell;
/// extremes by accuracy are flagged best/worst.
std::vector<SensitivityCell> sensitivity_table(
    const std::map<std::pair<std::string, design::OutcomeQuestion>,
                   std::vector<judge::RunRecord>>& cells);

/// Recomputes every statistic from the counts embedded beside it and throws
/// SelfVerificationFailure on any mismatch. Called by build_report and again
/// after deserialization, so tampered reports fail loudly.
void self_verify(const BiasReport& report);

BiasReport build_report(std::optional<PositionalSection> positional,
                        std::vector<LexicalPair> lexical, std::optional<OrderSection> order,
                        std::optional<StanceSection> stance,
                        std::vector<SensitivityCell> sensitivity, ReportMetadata metadata);

}  // namespace debate_audit::bias
