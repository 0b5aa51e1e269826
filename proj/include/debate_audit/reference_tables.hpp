#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace debate_audit::reference {

/// How a row's published p-value is checked.
enum class PKind {
    LessThan,  // published as "< bound"
    Approx,    // published value, |computed - value| <= tolerance
    Flagged    // published value contradicts the row's own counts: warn only
};

struct PCheck {
    PKind kind = PKind::LessThan;
    double value = 0.001;
    double tolerance = 0.001;
};

struct McNemarRow {
    const char* table;
    const char* verbalizer;
    long f12;
    long f21;
    bool continuity_correction;
    double expected_chi2;
    PCheck p;
};

struct OrderRow {
    const char* table;
    const char* verbalizer;
    long a, b, c, d;  // rows: concluding Pro / Con; columns: predicted Pro / Con
    std::optional<double> expected_phi;
    PCheck p;
};

const std::vector<McNemarRow>& mcnemar_rows();
const std::vector<OrderRow>& order_rows();

struct VerifyOptions {
    double chi2_tolerance = 0.01;
    double phi_tolerance = 0.002;
};

struct VerifySummary {
    int rows_checked = 0;
    int failures = 0;
    int warnings = 0;
    double max_chi2_error = 0.0;
    double max_phi_error = 0.0;

    bool ok() const { return failures == 0; }
};

/// Replays every pinned reference table through the stats module, printing
/// one expected-vs-computed line per row. Flagged rows print as warnings,
/// never failures.
VerifySummary verify_reference_tables(std::ostream& out, const VerifyOptions& options = {});

}  // namespace debate_audit::reference
