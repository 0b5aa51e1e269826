#include "debate_audit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace debate_audit::stats {

namespace {

// Rational minimax coefficients for erf/erfc after W. J. Cody,
// "Rational Chebyshev approximation for the error function" (1969),
// as used by the netlib SPECFUN calerf routine. Good to ~1e-16 relative.
constexpr double kA[5] = {3.16112374387056560e+00, 1.13864154151050156e+02,
                          3.77485237685302021e+02, 3.20937758913846947e+03,
                          1.85777706184603153e-01};
constexpr double kB[4] = {2.36012909523441209e+01, 2.44024637934444173e+02,
                          1.28261652607737228e+03, 2.84423683343917062e+03};
constexpr double kC[9] = {5.64188496988670089e-01, 8.88314979438837594e+00,
                          6.61191906371416295e+01, 2.98635138197400131e+02,
                          8.81952221241769090e+02, 1.71204761263407058e+03,
                          2.05107837782607147e+03, 1.23033935479799725e+03,
                          2.15311535474403846e-08};
constexpr double kD[8] = {1.57449261107098347e+01, 1.17693950891312499e+02,
                          5.37181101862009858e+02, 1.62138957456669019e+03,
                          3.29079923573345963e+03, 4.36261909014324716e+03,
                          3.43936767414372164e+03, 1.23033935480374942e+03};
constexpr double kP[6] = {3.05326634961232344e-01, 3.60344899949804439e-01,
                          1.25781726111229246e-01, 1.60837851487422766e-02,
                          6.58749161529837803e-04, 1.63153871373020978e-02};
constexpr double kQ[5] = {2.56852019228982242e+00, 1.87295284992346047e+00,
                          5.27905102951428412e-01, 6.05183413124413191e-02,
                          2.33520497626869185e-03};

constexpr double kInvSqrtPi = 5.6418958354775628695e-01;
constexpr double kThreshold = 0.46875;

// erfc(x) for x >= kThreshold, central and asymptotic regions.
double erfc_positive(double x) {
    double result;
    if (x <= 4.0) {
        double num = kC[8] * x;
        double den = x;
        for (int i = 0; i < 7; ++i) {
            num = (num + kC[i]) * x;
            den = (den + kD[i]) * x;
        }
        result = (num + kC[7]) / (den + kD[7]);
    } else if (x < 26.543) {
        double ysq = 1.0 / (x * x);
        double num = kP[5] * ysq;
        double den = ysq;
        for (int i = 0; i < 4; ++i) {
            num = (num + kP[i]) * ysq;
            den = (den + kQ[i]) * ysq;
        }
        result = ysq * (num + kP[4]) / (den + kQ[4]);
        result = (kInvSqrtPi - result) / x;
    } else {
        return 0.0;
    }
    // exp(-x^2) split to keep precision for large x
    double xtrunc = std::trunc(x * 16.0) / 16.0;
    double del = (x - xtrunc) * (x + xtrunc);
    return std::exp(-xtrunc * xtrunc) * std::exp(-del) * result;
}

}  // namespace

double erf(double x) {
    double ax = std::fabs(x);
    if (ax <= kThreshold) {
        double ysq = ax > 1.11e-16 ? ax * ax : 0.0;
        double num = kA[4] * ysq;
        double den = ysq;
        for (int i = 0; i < 3; ++i) {
            num = (num + kA[i]) * ysq;
            den = (den + kB[i]) * ysq;
        }
        return x * (num + kA[3]) / (den + kB[3]);
    }
    double c = erfc_positive(ax);
    return x > 0 ? 1.0 - c : c - 1.0;
}

double erfc(double x) {
    double ax = std::fabs(x);
    if (ax <= kThreshold) return 1.0 - erf(x);
    double c = erfc_positive(ax);
    return x > 0 ? c : 2.0 - c;
}

double normal_cdf(double x) {
    return 0.5 * erfc(-x * M_SQRT1_2);
}

double chi2_cdf_df1(double x) {
    if (x < 0.0) throw DomainError("chi2_cdf_df1: negative argument");
    return erf(std::sqrt(0.5 * x));
}

double chi2_survival_df1(double x) {
    if (x < 0.0) throw DomainError("chi2_survival_df1: negative argument");
    return erfc(std::sqrt(0.5 * x));
}

namespace {

double two_sided_normal_p(double z) {
    return erfc(std::fabs(z) * M_SQRT1_2);
}

}  // namespace

TestResult two_proportion_z(long k1, long n1, long k2, long n2) {
    if (n1 <= 0 || n2 <= 0) throw DomainError("two_proportion_z: empty group");
    if (k1 < 0 || k1 > n1 || k2 < 0 || k2 > n2)
        throw DomainError("two_proportion_z: counts out of range");

    TestResult r;
    r.df = 1;
    double pooled = double(k1 + k2) / double(n1 + n2);
    if (pooled <= 0.0 || pooled >= 1.0) {
        r.degenerate = true;
        return r;  // z = 0, p = 1
    }
    double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2));
    double z = (double(k1) / n1 - double(k2) / n2) / se;
    r.statistic = z;
    r.p_value = two_sided_normal_p(z);
    return r;
}

TestResult mcnemar(const McNemarInput& input) {
    if (input.f12 < 0 || input.f21 < 0) throw DomainError("mcnemar: negative count");
    long total = input.f12 + input.f21;
    if (total == 0) throw NoDiscordantPairs("mcnemar: no discordant pairs");

    double diff = std::fabs(double(input.f12) - double(input.f21));
    if (input.continuity_correction) diff = std::max(diff - 1.0, 0.0);
    TestResult r;
    r.statistic = diff * diff / double(total);
    r.p_value = chi2_survival_df1(r.statistic);
    r.df = 1;
    return r;
}

TestResult chi_square_2x2(const Table2x2& t) {
    if (t.a < 0 || t.b < 0 || t.c < 0 || t.d < 0)
        throw DomainError("chi_square_2x2: negative cell");
    double n = double(t.n());
    double r1 = double(t.a + t.b), r2 = double(t.c + t.d);
    double c1 = double(t.a + t.c), c2 = double(t.b + t.d);
    if (n <= 0 || r1 == 0 || r2 == 0 || c1 == 0 || c2 == 0)
        throw ZeroMarginal("chi_square_2x2: zero marginal");

    double cross = std::fabs(double(t.a) * double(t.d) - double(t.b) * double(t.c));
    if (t.yates_correction) cross = std::max(cross - n / 2.0, 0.0);
    TestResult r;
    r.statistic = n * cross * cross / (r1 * r2 * c1 * c2);
    r.p_value = chi2_survival_df1(r.statistic);
    r.effect_size = std::sqrt(r.statistic / n);
    r.df = 1;
    return r;
}

TestResult proportion_vs_half(long k, long n) {
    if (n <= 0) throw DomainError("proportion_vs_half: n must be positive");
    if (k < 0 || k > n) throw DomainError("proportion_vs_half: k out of range");
    TestResult r;
    r.statistic = (double(k) / n - 0.5) / std::sqrt(0.25 / n);
    r.p_value = two_sided_normal_p(r.statistic);
    r.df = 1;
    return r;
}

DiscordantCounts discordant_counts(const std::vector<VerdictRow>& first,
                                   const std::vector<VerdictRow>& second) {
    std::map<std::string, Outcome> by_id;
    for (const auto& row : first) {
        if (!by_id.emplace(row.debate_id, row.predicted).second)
            throw IdMismatch("discordant_counts: duplicate id in first run: " + row.debate_id);
    }
    if (second.size() != first.size())
        throw IdMismatch("discordant_counts: runs differ in size");

    DiscordantCounts out;
    std::map<std::string, bool> seen;
    std::vector<std::string> missing;
    for (const auto& row : second) {
        auto it = by_id.find(row.debate_id);
        if (it == by_id.end() || seen[row.debate_id]) {
            missing.push_back(row.debate_id);
            continue;
        }
        seen[row.debate_id] = true;
        Outcome a = it->second, b = row.predicted;
        if (a == Outcome::Invalid || b == Outcome::Invalid) {
            ++out.dropped_invalid;
        } else if (a == Outcome::Pro && b == Outcome::Con) {
            ++out.f12;
        } else if (a == Outcome::Con && b == Outcome::Pro) {
            ++out.f21;
        }
    }
    if (!missing.empty()) {
        std::ostringstream msg;
        msg << "discordant_counts: ids not shared by both runs:";
        for (const auto& id : missing) msg << ' ' << id;
        throw IdMismatch(msg.str());
    }
    return out;
}

}  // namespace debate_audit::stats
