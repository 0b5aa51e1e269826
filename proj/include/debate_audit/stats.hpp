#pragma once

#include <optional>
#include <string>
#include <vector>

#include "debate_audit/errors.hpp"
#include "debate_audit/side.hpp"

namespace debate_audit::stats {

class NoDiscordantPairs : public DataError {
public:
    using DataError::DataError;
};

class ZeroMarginal : public DataError {
public:
    using DataError::DataError;
};

class IdMismatch : public DataError {
public:
    using DataError::DataError;
};

/// Error function, evaluated in-repo with Cody-style rational minimax
/// approximations (three argument regions, double precision).
double erf(double x);
double erfc(double x);

/// Standard normal CDF, accurate to well under 1e-7 absolute.
double normal_cdf(double x);

/// P(chi2 with 1 df <= x) = erf(sqrt(x/2)). Throws DomainError for x < 0.
double chi2_cdf_df1(double x);

/// Upper tail P(chi2 with 1 df > x).
double chi2_survival_df1(double x);

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::optional<double> effect_size;  // phi for 2x2 tables
    int df = 1;
    bool degenerate = false;  // pooled proportion was 0 or 1
};

/// Pooled two-proportion z-test, two-sided. A degenerate pool (all successes
/// or all failures) yields z = 0, p = 1 with the degenerate flag set.
TestResult two_proportion_z(long k1, long n1, long k2, long n2);

struct McNemarInput {
    long f12 = 0;  // first run Pro, second run Con
    long f21 = 0;  // first run Con, second run Pro
    bool continuity_correction = false;
};

/// McNemar's chi-square on discordant pair counts. The correction flag is
/// mandatory at the call site: the corrected statistic is
/// (max(|f12-f21|-1, 0))^2 / (f12+f21), the plain one (f12-f21)^2 / (f12+f21).
TestResult mcnemar(const McNemarInput& input);

struct Table2x2 {
    // rows: debate-concluding side Pro / Con; columns: predicted Pro / Con
    long a = 0, b = 0, c = 0, d = 0;
    bool yates_correction = true;

    long n() const { return a + b + c + d; }
};

/// Pearson chi-square of independence for a 2x2 table, with optional Yates
/// continuity correction (|ad-bc| reduced by N/2 and floored at 0).
/// effect_size carries phi = sqrt(chi2 / N).
TestResult chi_square_2x2(const Table2x2& table);

/// One-sample z-test of k/n against 0.5 with null variance 0.25/n, two-sided.
TestResult proportion_vs_half(long k, long n);

struct VerdictRow {
    std::string debate_id;
    Outcome predicted = Outcome::Invalid;
};

struct DiscordantCounts {
    long f12 = 0;
    long f21 = 0;
    long dropped_invalid = 0;  // pairs with an Invalid member on either side
};

/// Pair two runs by debate id and tally discordant predictions. The runs must
/// cover exactly the same id set, each id once; otherwise IdMismatch.
DiscordantCounts discordant_counts(const std::vector<VerdictRow>& first,
                                   const std::vector<VerdictRow>& second);

}  // namespace debate_audit::stats
