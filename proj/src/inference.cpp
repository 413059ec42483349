#include "cattab/inference.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cattab/special.hpp"

namespace cattab {

std::string_view to_string(StatisticKind kind) {
    switch (kind) {
        case StatisticKind::score_z: return "score_z";
        case StatisticKind::wald_chisq: return "wald_chisq";
        case StatisticKind::lr_chisq: return "lr_chisq";
        case StatisticKind::pearson_chisq: return "pearson_chisq";
        case StatisticKind::deviance_chisq: return "deviance_chisq";
        case StatisticKind::mantel_haenszel: return "mantel_haenszel";
    }
    return "unknown";
}

std::string_view to_string(Sidedness sided) {
    switch (sided) {
        case Sidedness::two_sided: return "two_sided";
        case Sidedness::upper: return "upper";
        case Sidedness::lower: return "lower";
    }
    return "unknown";
}

std::string_view to_string(Hypothesis hypothesis) {
    return hypothesis == Hypothesis::independence ? "independence" : "homogeneity";
}

namespace {

void check_counts(long long y, long long n, const char* where) {
    if (n < 1) throw DomainError(std::string(where) + ": trials must be >= 1, got " + std::to_string(n));
    if (y < 0 || y > n) {
        throw DomainError(std::string(where) + ": successes " + std::to_string(y) + " outside [0, " +
                          std::to_string(n) + "]");
    }
}

void check_open_null(double pi0, const char* where) {
    if (!(pi0 > 0 && pi0 < 1)) {
        throw DomainError(std::string(where) + ": null probability must lie in (0, 1), got " +
                          std::to_string(pi0));
    }
}

TestResult chi_square_result(double statistic, StatisticKind kind, int df) {
    TestResult r;
    r.statistic = statistic;
    r.kind = kind;
    r.df = df;
    r.p_value = chi2_sf(double(df), statistic);
    return r;
}

TableTestResult table_test(const ContingencyTable& table, Hypothesis hypothesis) {
    TableTestResult out;
    out.expected = expected_frequencies(table, hypothesis);
    const auto& mu = out.expected.values;
    const int df = int((table.rows() - 1) * (table.cols() - 1));
    const bool small = (mu.array() < 5.0).any();

    out.pearson = chi_square_result(pearson_statistic(table.counts(), mu), StatisticKind::pearson_chisq, df);
    out.deviance = chi_square_result(deviance_statistic(table.counts(), mu), StatisticKind::deviance_chisq, df);
    out.pearson.small_cell_warning = small;
    out.deviance.small_cell_warning = small;
    return out;
}

}  // namespace

ProportionEstimate mle_proportion(long long successes, long long trials) {
    check_counts(successes, trials, "mle_proportion");
    const double p = double(successes) / double(trials);
    return {p, std::sqrt(p * (1 - p) / double(trials))};
}

double log_likelihood(double pi, long long successes, long long trials) {
    if (!(pi >= 0 && pi <= 1)) throw DomainError("log_likelihood: probability outside [0, 1]");
    if (trials < 0 || successes < 0 || successes > trials) {
        throw DomainError("log_likelihood: need 0 <= successes <= trials");
    }
    auto xlogy = [](long long k, double p) {
        if (k == 0) return 0.0;
        return double(k) * std::log(p);
    };
    return xlogy(successes, pi) + xlogy(trials - successes, 1 - pi);
}

TestResult score_test_proportion(long long successes, long long trials, double pi0, Sidedness sided) {
    check_counts(successes, trials, "score_test_proportion");
    check_open_null(pi0, "score_test_proportion");
    const double estimate = double(successes) / double(trials);
    const double null_se = std::sqrt(pi0 * (1 - pi0) / double(trials));
    const double z = (estimate - pi0) / null_se;

    TestResult r;
    r.statistic = z;
    r.z = z;
    r.kind = StatisticKind::score_z;
    r.df = 1;
    r.sidedness = sided;
    switch (sided) {
        case Sidedness::two_sided: r.p_value = std::min(1.0, 2 * normal_sf(std::abs(z))); break;
        case Sidedness::upper: r.p_value = normal_sf(z); break;
        case Sidedness::lower: r.p_value = normal_cdf(z); break;
    }
    return r;
}

TestResult wald_test_proportion(long long successes, long long trials, double pi0) {
    check_counts(successes, trials, "wald_test_proportion");
    if (!(pi0 >= 0 && pi0 <= 1)) throw DomainError("wald_test_proportion: null probability outside [0, 1]");
    if (successes == 0 || successes == trials) {
        throw DomainError("wald_test_proportion: estimate on the boundary (y = " + std::to_string(successes) +
                          ", n = " + std::to_string(trials) + ") gives zero standard error");
    }
    const auto [estimate, se] = mle_proportion(successes, trials);
    const double z = (estimate - pi0) / se;
    TestResult r = chi_square_result(z * z, StatisticKind::wald_chisq, 1);
    r.z = z;
    return r;
}

LikelihoodRatioResult lr_test_proportion(long long successes, long long trials, double pi0) {
    check_counts(successes, trials, "lr_test_proportion");
    check_open_null(pi0, "lr_test_proportion");
    LikelihoodRatioResult out;
    out.detail.log_l1 = log_likelihood(double(successes) / double(trials), successes, trials);
    out.detail.log_l0 = log_likelihood(pi0, successes, trials);
    const double statistic = std::max(0.0, 2 * (out.detail.log_l1 - out.detail.log_l0));
    out.test = chi_square_result(statistic, StatisticKind::lr_chisq, 1);
    return out;
}

ConfidenceInterval wald_ci(long long successes, long long trials, double level, bool clip) {
    check_counts(successes, trials, "wald_ci");
    if (!(level > 0 && level < 1)) throw DomainError("wald_ci: level must lie in (0, 1)");
    const auto [estimate, se] = mle_proportion(successes, trials);
    ConfidenceInterval ci;
    ci.estimate = estimate;
    ci.level = level;
    ci.standard_error = se;
    ci.critical_value = normal_quantile(1 - (1 - level) / 2);
    ci.lower = estimate - ci.critical_value * se;
    ci.upper = estimate + ci.critical_value * se;
    ci.degenerate = successes == 0 || successes == trials;
    if (clip) {
        ci.clipped = ci.lower < 0 || ci.upper > 1;
        ci.lower = std::max(0.0, ci.lower);
        ci.upper = std::min(1.0, ci.upper);
    }
    return ci;
}

ExpectedFrequencies expected_frequencies(const ContingencyTable& table, Hypothesis hypothesis) {
    for (Eigen::Index i = 0; i < table.rows(); ++i) {
        if (table.row_total(i) == 0) {
            throw DomainError("expected frequencies undefined: row '" + table.row_labels()[i] +
                              "' has zero total");
        }
    }
    for (Eigen::Index j = 0; j < table.cols(); ++j) {
        if (table.col_total(j) == 0) {
            throw DomainError("expected frequencies undefined: column '" + table.col_labels()[j] +
                              "' has zero total");
        }
    }
    return {expected_counts(table.counts()), hypothesis};
}

TableTestResult independence_test(const ContingencyTable& table) {
    return table_test(table, Hypothesis::independence);
}

TableTestResult homogeneity_test(const ContingencyTable& table) {
    return table_test(table, Hypothesis::homogeneity);
}

TestResult mantel_haenszel_test(const ContingencyTable& table, const std::optional<ScoreAssignment>& scores) {
    if (!scores && !(table.row_ordinal() && table.col_ordinal())) {
        throw DomainError(
            "mantel_haenszel_test: supply scores or mark both axes ordinal (nominal categories have no order)");
    }
    const ScoreAssignment s = scores ? *scores : ScoreAssignment::equally_spaced(table);
    const double r = pearson_correlation(table, s);
    return chi_square_result(double(table.total() - 1) * r * r, StatisticKind::mantel_haenszel, 1);
}

}  // namespace cattab
