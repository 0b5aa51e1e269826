#include "debate_audit/reference_tables.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "debate_audit/stats.hpp"

namespace debate_audit::reference {

namespace {

constexpr PCheck p_below(double bound) { return {PKind::LessThan, bound, 0.0}; }
constexpr PCheck p_approx(double value, double tol = 0.001) { return {PKind::Approx, value, tol}; }
constexpr PCheck p_flagged(double published) { return {PKind::Flagged, published, 0.0}; }

}  // namespace

// Published counts and statistics reproduced by this build. The GPT-3.5
// McNemar tables only back-compute without the continuity correction, the
// GPT-4 tables only with it; the flags below pin each table to its variant.
const std::vector<McNemarRow>& mcnemar_rows() {
    static const std::vector<McNemarRow> rows = {
        {"gpt-3.5 positional (fixed vs shuffled)", "A/B", 25, 86, false, 33.52, p_below(0.001)},
        {"gpt-3.5 positional (fixed vs shuffled)", "P/C", 16, 205, false, 161.63, p_below(0.001)},
        {"gpt-3.5 positional (fixed vs shuffled)", "1/-1", 38, 124, false, 45.65, p_below(0.001)},
        {"gpt-3.5 positional (fixed vs shuffled)", "Pro/Con", 34, 79, false, 17.92,
         p_below(0.001)},

        {"gpt-3.5 lexical (flipped labels, shuffled positions)", "A/B vs B/A", 59, 178, false,
         59.751, p_below(0.001)},
        {"gpt-3.5 lexical (flipped labels, shuffled positions)", "P/C vs C/P", 166, 99, false,
         16.94, p_below(0.001)},
        {"gpt-3.5 lexical (flipped labels, shuffled positions)", "1/-1 vs -1/1", 33, 556, false,
         464.40, p_below(0.001)},
        {"gpt-3.5 lexical (flipped labels, shuffled positions)", "Pro/Con vs Con/Pro", 147, 298,
         false, 51.24, p_below(0.001)},

        {"gpt-4 positional (fixed vs shuffled)", "A/B", 6, 54, true, 36.82, p_below(0.001)},
        {"gpt-4 positional (fixed vs shuffled)", "P/C", 9, 39, true, 17.52, p_below(0.001)},
        // printed p of 0.002 does not follow from chi2 = 14.02 (survival is
        // about 2e-4); chi2 is checked, the p is reported as a warning
        {"gpt-4 positional (fixed vs shuffled)", "1/-1", 15, 45, true, 14.02, p_flagged(0.002)},
        {"gpt-4 positional (fixed vs shuffled)", "Pro/Con", 11, 63, true, 35.15, p_below(0.001)},

        {"gpt-4 lexical (flipped labels, shuffled positions)", "A/B vs B/A", 4, 36, true, 24.03,
         p_below(0.001)},
        {"gpt-4 lexical (flipped labels, shuffled positions)", "P/C vs C/P", 6, 134, true, 115.21,
         p_below(0.001)},
        {"gpt-4 lexical (flipped labels, shuffled positions)", "1/-1 vs -1/1", 11, 166, true,
         133.99, p_below(0.001)},
        {"gpt-4 lexical (flipped labels, shuffled positions)", "Pro/Con vs Con/Pro", 6, 581, true,
         561.29, p_below(0.001)},
    };
    return rows;
}

const std::vector<OrderRow>& order_rows() {
    static const std::vector<OrderRow> rows = {
        // gpt-3.5: no published phi, significance only
        {"gpt-3.5 order (concluding side vs prediction)", "A/B", 389, 253, 215, 427, std::nullopt,
         p_below(0.001)},
        {"gpt-3.5 order (concluding side vs prediction)", "P/C", 408, 245, 184, 460, std::nullopt,
         p_below(0.001)},
        {"gpt-3.5 order (concluding side vs prediction)", "1/-1", 238, 409, 70, 575, std::nullopt,
         p_below(0.001)},
        {"gpt-3.5 order (concluding side vs prediction)", "Pro/Con", 399, 218, 248, 426,
         std::nullopt, p_below(0.001)},

        {"gpt-4 order (concluding side vs prediction)", "A/B", 359, 291, 293, 356, 0.099,
         p_below(0.001)},
        {"gpt-4 order (concluding side vs prediction)", "P/C", 277, 372, 227, 419, 0.076,
         p_approx(0.006)},
        {"gpt-4 order (concluding side vs prediction)", "1/-1", 286, 362, 238, 411, 0.074,
         p_approx(0.007)},
        // the source table prints a p of 0.001 for this row, but its own
        // counts give about 0.013 (it also repeats the 1/-1 verbalizer
        // name); phi is checked, the p mismatch stays a warning
        {"gpt-4 order (concluding side vs prediction)", "(fourth row)", 203, 445, 162, 486, 0.069,
         p_flagged(0.001)},
    };
    return rows;
}

namespace {

struct RowOutcome {
    bool failed = false;
    bool warned = false;
    std::string p_note;
};

RowOutcome check_p(double computed_p, const PCheck& check) {
    RowOutcome outcome;
    std::ostringstream note;
    note << std::setprecision(4);
    switch (check.kind) {
        case PKind::LessThan:
            note << "p " << computed_p << " (expect < " << check.value << ")";
            outcome.failed = !(computed_p < check.value);
            break;
        case PKind::Approx:
            note << "p " << computed_p << " (expect " << check.value << " +/- "
                 << check.tolerance << ")";
            outcome.failed = std::fabs(computed_p - check.value) > check.tolerance;
            break;
        case PKind::Flagged:
            note << "p " << computed_p << " (source prints " << check.value
                 << "; known discrepancy, not enforced)";
            outcome.warned = true;
            break;
    }
    outcome.p_note = note.str();
    return outcome;
}

}  // namespace

VerifySummary verify_reference_tables(std::ostream& out, const VerifyOptions& options) {
    VerifySummary summary;

    auto report = [&](const std::string& table, const std::string& verbalizer, bool failed,
                      bool warned, const std::string& detail) {
        ++summary.rows_checked;
        if (failed) ++summary.failures;
        if (warned) ++summary.warnings;
        out << (failed ? "FAIL" : (warned ? "WARN" : "PASS")) << "  " << table << "  "
            << verbalizer << "  " << detail << "\n";
    };

    for (const auto& row : mcnemar_rows()) {
        auto result = stats::mcnemar({row.f12, row.f21, row.continuity_correction});
        double chi2_error = std::fabs(result.statistic - row.expected_chi2);
        summary.max_chi2_error = std::max(summary.max_chi2_error, chi2_error);
        auto outcome = check_p(result.p_value, row.p);
        bool failed = chi2_error > options.chi2_tolerance || outcome.failed;

        std::ostringstream detail;
        detail << std::fixed << std::setprecision(3) << "chi2 " << result.statistic << " (expect "
               << row.expected_chi2 << " +/- " << options.chi2_tolerance << "), " << outcome.p_note
               << (row.continuity_correction ? " [corrected]" : " [uncorrected]");
        report(row.table, row.verbalizer, failed, outcome.warned, detail.str());
    }

    for (const auto& row : order_rows()) {
        auto result = stats::chi_square_2x2({row.a, row.b, row.c, row.d, true});
        auto outcome = check_p(result.p_value, row.p);
        bool failed = outcome.failed;

        std::ostringstream detail;
        detail << std::fixed << std::setprecision(3) << "chi2 " << result.statistic;
        if (row.expected_phi) {
            double phi_error = std::fabs(result.effect_size.value() - *row.expected_phi);
            summary.max_phi_error = std::max(summary.max_phi_error, phi_error);
            failed = failed || phi_error > options.phi_tolerance;
            detail << ", phi " << result.effect_size.value() << " (expect " << *row.expected_phi
                   << " +/- " << options.phi_tolerance << ")";
        } else {
            detail << ", phi " << result.effect_size.value();
        }
        detail << ", " << outcome.p_note << " [Yates]";
        report(row.table, row.verbalizer, failed, outcome.warned, detail.str());
    }

    out << (summary.ok() ? "OK" : "MISMATCH") << ": " << summary.rows_checked << " rows, "
        << summary.failures << " failures, " << summary.warnings << " warnings"
        << ", max chi2 error " << std::setprecision(4) << summary.max_chi2_error
        << ", max phi error " << summary.max_phi_error << "\n";
    return summary;
}

}  // namespace debate_audit::reference
