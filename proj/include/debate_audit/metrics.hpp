#pragma once

#include <functional>
#include <vector>

#include "debate_audit/judge.hpp"

namespace debate_audit::metrics {

class NoValidRecords : public DataError {
public:
    using DataError::DataError;
};

class ZeroSupport : public DataError {
public:
    using DataError::DataError;
};

class EmptySubset : public DataError {
public:
    using DataError::DataError;
};

/// Cell counts with Pro as the positive class. Invalid verdicts never enter
/// the four cells; they are tallied per true side because weighted F1 counts
/// them in class support.
struct ConfusionMatrix {
    long tp_pro = 0;  // truth Pro, predicted Pro
    long fn_pro = 0;  // truth Pro, predicted Con
    long fp_pro = 0;  // truth Con, predicted Pro
    long tn_pro = 0;  // truth Con, predicted Con
    long invalid_truth_pro = 0;
    long invalid_truth_con = 0;

    long invalid_count() const { return invalid_truth_pro + invalid_truth_con; }
    long valid_total() const { return tp_pro + fn_pro + fp_pro + tn_pro; }
    long total() const { return valid_total() + invalid_count(); }
    long support_pro() const { return tp_pro + fn_pro + invalid_truth_pro; }
    long support_con() const { return fp_pro + tn_pro + invalid_truth_con; }
};

/// Cells compare the implied predicted winner against the actual winner:
/// a record from a Loser-question run names the loser, so its implied
/// winner is the opposite side.
ConfusionMatrix confusion(const std::vector<judge::RunRecord>& records);

/// correct / valid total. Invalid verdicts are abstentions, not errors.
double accuracy(const ConfusionMatrix& matrix);

/// Support-weighted mean of the per-class F1 scores over {Pro, Con}.
/// Invalid verdicts count toward support (and so depress recall) but never
/// toward true positives or predicted-positive denominators.
double weighted_f1(const ConfusionMatrix& matrix);

struct Proportion {
    long count = 0;    // predicted-Con (or -Pro) verdicts in the subset
    long valid_n = 0;  // valid verdicts in the subset
    double value = 0.0;
};

using RecordPredicate = std::function<bool(const judge::RunRecord&)>;

/// Share of valid verdicts predicting Con within the filtered subset, with
/// the subset size for downstream z-tests.
Proportion predicted_con_proportion(const std::vector<judge::RunRecord>& records,
                                    const RecordPredicate& filter = nullptr);

Proportion predicted_pro_proportion(const std::vector<judge::RunRecord>& records,
                                    const RecordPredicate& filter = nullptr);

}  // namespace debate_audit::metrics
