#include "debate_audit/bias.hpp"

#include <algorithm>
#include <cmath>

namespace debate_audit::bias {

namespace {

std::vector<stats::VerdictRow> verdict_rows(const std::vector<judge::RunRecord>& records) {
    std::vector<stats::VerdictRow> rows;
    rows.reserve(records.size());
    for (const auto& r : records) rows.push_back({r.debate_id, r.verdict.predicted});
    return rows;
}

void require_policy(const std::vector<judge::RunRecord>& records, design::PositionPolicy policy,
                    const char* where) {
    for (const auto& r : records) {
        if (r.assignment.policy != policy)
            throw PolicyMismatch(std::string(where) + ": run uses policy " +
                                 std::string(design::to_string(r.assignment.policy)) +
                                 ", expected " + std::string(design::to_string(policy)));
    }
}

bool position_varied(const std::vector<judge::RunRecord>& records) {
    for (const auto& r : records) {
        if (r.assignment.policy != design::PositionPolicy::ShuffledPositions &&
            r.assignment.policy != design::PositionPolicy::DoubleShuffled)
            return false;
    }
    return true;
}

}  // namespace

UnpairedPositional positional_unpaired(const std::vector<judge::RunRecord>& records) {
    bool has_con_second = false, has_con_first = false;
    for (const auto& r : records) {
        (r.assignment.first_candidate == Side::Pro ? has_con_second : has_con_first) = true;
    }
    if (!has_con_second || !has_con_first)
        throw MissingArm("positional_unpaired: need records with Con in both positions");

    UnpairedPositional section;
    section.con_when_con_second = metrics::predicted_con_proportion(
        records,
        [](const judge::RunRecord& r) { return r.assignment.first_candidate == Side::Pro; });
    section.con_when_con_first = metrics::predicted_con_proportion(
        records,
        [](const judge::RunRecord& r) { return r.assignment.first_candidate == Side::Con; });
    section.z_test = stats::two_proportion_z(
        section.con_when_con_second.count, section.con_when_con_second.valid_n,
        section.con_when_con_first.count, section.con_when_con_first.valid_n);
    return section;
}

PairedPositional positional_paired(const std::vector<judge::RunRecord>& fixed_run,
                                   const std::vector<judge::RunRecord>& shuffled_run,
                                   bool continuity_correction) {
    require_policy(fixed_run, design::PositionPolicy::FixedProFirst, "positional_paired");
    if (!position_varied(shuffled_run))
        throw PolicyMismatch("positional_paired: second run must shuffle positions");

    auto counts = stats::discordant_counts(verdict_rows(fixed_run), verdict_rows(shuffled_run));
    PairedPositional section;
    section.f12 = counts.f12;
    section.f21 = counts.f21;
    section.dropped_invalid = counts.dropped_invalid;
    section.continuity_correction = continuity_correction;
    section.mcnemar = stats::mcnemar({counts.f12, counts.f21, continuity_correction});
    return section;
}

LexicalPair lexical_analysis(const std::vector<judge::RunRecord>& run_first,
                             const std::vector<judge::RunRecord>& run_second,
                             bool continuity_correction) {
    if (!position_varied(run_first) || !position_varied(run_second))
        throw PolicyMismatch("lexical_analysis: both runs must shuffle positions");

    auto counts = stats::discordant_counts(verdict_rows(run_first), verdict_rows(run_second));
    LexicalPair pair;
    pair.verbalizer_first = run_first.empty() ? "" : run_first.front().assignment.verbalizer_name;
    pair.verbalizer_second =
        run_second.empty() ? "" : run_second.front().assignment.verbalizer_name;
    pair.f12 = counts.f12;
    pair.f21 = counts.f21;
    pair.dropped_invalid = counts.dropped_invalid;
    pair.continuity_correction = continuity_correction;
    pair.mcnemar = stats::mcnemar({counts.f12, counts.f21, continuity_correction});
    pair.con_under_first = metrics::predicted_con_proportion(run_first);
    pair.con_under_second = metrics::predicted_con_proportion(run_second);
    return pair;
}

OrderSection order_analysis(const std::vector<judge::RunRecord>& records,
                            const std::map<std::string, Side>& concluding_side_by_id,
                            bool yates_correction) {
    OrderSection section;
    section.table.yates_correction = yates_correction;
    for (const auto& r : records) {
        if (r.verdict.predicted == Outcome::Invalid) {
            ++section.dropped_invalid;
            continue;
        }
        auto it = concluding_side_by_id.find(r.debate_id);
        if (it == concluding_side_by_id.end())
            throw DataError("order_analysis: no concluding side for debate '" + r.debate_id + "'");
        bool predicted_pro = r.verdict.predicted == Outcome::Pro;
        if (it->second == Side::Pro) {
            ++(predicted_pro ? section.table.a : section.table.b);
        } else {
            ++(predicted_pro ? section.table.c : section.table.d);
        }
    }
    section.chi_square = stats::chi_square_2x2(section.table);
    return section;
}

StanceSection stance_analysis(const std::vector<judge::RunRecord>& records) {
    require_policy(records, design::PositionPolicy::DoubleShuffled, "stance_analysis");

    StanceSection section;
    auto prop = metrics::predicted_pro_proportion(records);
    section.predicted_pro = prop.count;
    section.valid_n = prop.valid_n;
    section.proportion = prop.value;
    section.vs_half = stats::proportion_vs_half(prop.count, prop.valid_n);
    section.confusion = metrics::confusion(records);
    return section;
}

std::vector<SensitivityCell> sensitivity_table(
    const std::map<std::pair<std::string, design::OutcomeQuestion>,
                   std::vector<judge::RunRecord>>& cells) {
    std::vector<SensitivityCell> out;
    for (const auto& [key, records] : cells) {
        if (records.empty())
            throw EmptyCell("sensitivity_table: empty cell " + key.first + "/" +
                            std::string(design::to_string(key.second)));
        SensitivityCell cell;
        cell.verbalizer = key.first;
        cell.question = key.second;
        cell.n = static_cast<long>(records.size());
        auto matrix = metrics::confusion(records);
        cell.accuracy = metrics::accuracy(matrix);
        cell.weighted_f1 = metrics::weighted_f1(matrix);
        cell.invalid_rate = double(matrix.invalid_count()) / double(matrix.total());
        out.push_back(std::move(cell));
    }
    if (out.empty()) return out;
    auto [lo, hi] = std::minmax_element(
        out.begin(), out.end(),
        [](const SensitivityCell& a, const SensitivityCell& b) { return a.accuracy < b.accuracy; });
    for (auto& cell : out) {
        cell.best = cell.accuracy == hi->accuracy;
        cell.worst = cell.accuracy == lo->accuracy;
    }
    return out;
}

namespace {

constexpr double kVerifyTolerance = 1e-9;

void check_close(double actual, double expected, const std::string& what) {
    if (std::isnan(actual) != std::isnan(expected) ||
        std::fabs(actual - expected) > kVerifyTolerance * std::max(1.0, std::fabs(expected)))
        throw SelfVerificationFailure("self-verification failed: " + what);
}

void check_test(const stats::TestResult& stored, const stats::TestResult& recomputed,
                const std::string& what) {
    check_close(stored.statistic, recomputed.statistic, what + " statistic");
    check_close(stored.p_value, recomputed.p_value, what + " p-value");
    if (stored.effect_size.has_value() != recomputed.effect_size.has_value())
        throw SelfVerificationFailure("self-verification failed: " + what + " effect size");
    if (stored.effect_size)
        check_close(*stored.effect_size, *recomputed.effect_size, what + " effect size");
}

void check_proportion(const metrics::Proportion& p, const std::string& what) {
    if (p.valid_n <= 0) throw SelfVerificationFailure("self-verification failed: " + what + " n");
    check_close(p.value, double(p.count) / double(p.valid_n), what);
}

}  // namespace

void self_verify(const BiasReport& report) {
    if (report.positional) {
        if (report.positional->unpaired) {
            const auto& u = *report.positional->unpaired;
            check_proportion(u.con_when_con_second, "positional con-second proportion");
            check_proportion(u.con_when_con_first, "positional con-first proportion");
            check_test(u.z_test,
                       stats::two_proportion_z(u.con_when_con_second.count,
                                               u.con_when_con_second.valid_n,
                                               u.con_when_con_first.count,
                                               u.con_when_con_first.valid_n),
                       "positional z-test");
        }
        if (report.positional->paired) {
            const auto& p = *report.positional->paired;
            check_test(p.mcnemar, stats::mcnemar({p.f12, p.f21, p.continuity_correction}),
                       "positional McNemar");
        }
    }
    for (const auto& pair : report.lexical) {
        check_test(pair.mcnemar, stats::mcnemar({pair.f12, pair.f21, pair.continuity_correction}),
                   "lexical McNemar " + pair.verbalizer_first + " vs " + pair.verbalizer_second);
        check_proportion(pair.con_under_first, "lexical proportion " + pair.verbalizer_first);
        check_proportion(pair.con_under_second, "lexical proportion " + pair.verbalizer_second);
    }
    if (report.order) {
        check_test(report.order->chi_square, stats::chi_square_2x2(report.order->table),
                   "order chi-square");
    }
    if (report.stance) {
        const auto& s = *report.stance;
        if (s.valid_n != s.confusion.valid_total())
            throw SelfVerificationFailure(
                "self-verification failed: stance n vs confusion matrix");
        check_close(s.proportion, double(s.predicted_pro) / double(s.valid_n),
                    "stance proportion");
        check_test(s.vs_half, stats::proportion_vs_half(s.predicted_pro, s.valid_n),
                   "stance test");
    }
}

BiasReport build_report(std::optional<PositionalSection> positional,
                        std::vector<LexicalPair> lexical, std::optional<OrderSection> order,
                        std::optional<StanceSection> stance,
                        std::vector<SensitivityCell> sensitivity, ReportMetadata metadata) {
    BiasReport report;
    report.positional = std::move(positional);
    report.lexical = std::move(lexical);
    report.order = std::move(order);
    report.stance = std::move(stance);
    report.sensitivity = std::move(sensitivity);
    report.metadata = std::move(metadata);
    self_verify(report);
    return report;
}

}  // namespace debate_audit::bias
