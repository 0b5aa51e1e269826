#include "debate_audit/metrics.hpp"

namespace debate_audit::metrics {

ConfusionMatrix confusion(const std::vector<judge::RunRecord>& records) {
    ConfusionMatrix m;
    for (const auto& r : records) {
        if (r.verdict.predicted == Outcome::Invalid) {
            ++(r.truth == Side::Pro ? m.invalid_truth_pro : m.invalid_truth_con);
            continue;
        }
        Side named = r.verdict.predicted == Outcome::Pro ? Side::Pro : Side::Con;
        // a Loser-question answer names the loser, so the implied winner is
        // the other side; cells are always winner-vs-winner
        Side predicted_winner =
            r.question == design::OutcomeQuestion::Loser ? opposite(named) : named;
        if (r.truth == Side::Pro) {
            ++(predicted_winner == Side::Pro ? m.tp_pro : m.fn_pro);
        } else {
            ++(predicted_winner == Side::Pro ? m.fp_pro : m.tn_pro);
        }
    }
    return m;
}

double accuracy(const ConfusionMatrix& m) {
    long valid = m.valid_total();
    if (valid == 0) throw NoValidRecords("accuracy: no valid verdicts");
    return double(m.tp_pro + m.tn_pro) / double(valid);
}

namespace {

double f1_class(long tp, long predicted_positive, long support) {
    if (tp == 0) return 0.0;
    double precision = double(tp) / double(predicted_positive);
    double recall = double(tp) / double(support);
    return 2.0 * precision * recall / (precision + recall);
}

}  // namespace

double weighted_f1(const ConfusionMatrix& m) {
    long support_pro = m.support_pro();
    long support_con = m.support_con();
    if (support_pro == 0) throw ZeroSupport("weighted_f1: no Pro-truth records");
    if (support_con == 0) throw ZeroSupport("weighted_f1: no Con-truth records");

    double f1_pro = f1_class(m.tp_pro, m.tp_pro + m.fp_pro, support_pro);
    double f1_con = f1_class(m.tn_pro, m.tn_pro + m.fn_pro, support_con);
    double total = double(support_pro + support_con);
    return (support_pro / total) * f1_pro + (support_con / total) * f1_con;
}

namespace {

Proportion proportion_of(const std::vector<judge::RunRecord>& records,
                         const RecordPredicate& filter, Outcome counted) {
    Proportion p;
    for (const auto& r : records) {
        if (filter && !filter(r)) continue;
        if (r.verdict.predicted == Outcome::Invalid) continue;
        ++p.valid_n;
        if (r.verdict.predicted == counted) ++p.count;
    }
    if (p.valid_n == 0) throw EmptySubset("proportion: no valid records in subset");
    p.value = double(p.count) / double(p.valid_n);
    return p;
}

}  // namespace

Proportion predicted_con_proportion(const std::vector<judge::RunRecord>& records,
                                    const RecordPredicate& filter) {
    return proportion_of(records, filter, Outcome::Con);
}

Proportion predicted_pro_proportion(const std::vector<judge::RunRecord>& records,
                                    const RecordPredicate& filter) {
    return proportion_of(records, filter, Outcome::Pro);
}

}  // namespace debate_audit::metrics
