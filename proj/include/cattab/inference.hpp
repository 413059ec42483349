#ifndef CATTAB_INFERENCE_HPP
#define CATTAB_INFERENCE_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <string_view>

#include "cattab/association.hpp"
#include "cattab/table.hpp"

namespace cattab {

enum class StatisticKind { score_z, wald_chisq, lr_chisq, pearson_chisq, deviance_chisq, mantel_haenszel };
enum class Sidedness { two_sided, upper, lower };
enum class Hypothesis { independence, homogeneity };

std::string_view to_string(StatisticKind kind);
std::string_view to_string(Sidedness sided);
std::string_view to_string(Hypothesis hypothesis);

struct TestResult {
    double statistic = 0;
    StatisticKind kind = StatisticKind::pearson_chisq;
    int df = 1;
    double p_value = 1;
    std::optional<Sidedness> sidedness;  // z tests only
    std::optional<double> z;             // signed z behind score/Wald statistics
    bool small_cell_warning = false;
};

struct ProportionEstimate {
    double estimate = 0;
    double standard_error = 0;  // sqrt(π̂(1-π̂)/n)
};

struct ConfidenceInterval {
    double estimate = 0;
    double lower = 0;
    double upper = 0;
    double level = 0.95;
    double standard_error = 0;
    double critical_value = 0;  // z_{α/2}
    bool degenerate = false;    // y ∈ {0, n}: zero-width interval
    bool clipped = false;

    bool contains(double value) const { return lower <= value && value <= upper; }
};

struct LikelihoodDetail {
    double log_l0 = 0;
    double log_l1 = 0;
};

struct LikelihoodRatioResult {
    TestResult test;
    LikelihoodDetail detail;
};

struct ExpectedFrequencies {
    Matrix<double> values;
    Hypothesis hypothesis = Hypothesis::independence;
};

struct TableTestResult {
    TestResult pearson;
    TestResult deviance;
    ExpectedFrequencies expected;
};

// Eigen-level building blocks over any count/expected expression.

/// μ̂_ij = n_{i+} n_{+j} / n.
template <typename Derived>
Matrix<double> expected_counts(const Eigen::MatrixBase<Derived>& counts) {
    const Matrix<double> c = counts.template cast<double>();
    return (c.rowwise().sum() * c.colwise().sum()) / c.sum();
}

/// Σ (n_ij - μ̂_ij)² / μ̂_ij.
template <typename DerivedO, typename DerivedE>
double pearson_statistic(const Eigen::MatrixBase<DerivedO>& observed,
                         const Eigen::MatrixBase<DerivedE>& expected) {
    const auto o = observed.template cast<double>().array();
    return ((o - expected.array()).square() / expected.array()).sum();
}

/// 2 Σ n_ij ln(n_ij / μ̂_ij), with empty cells contributing 0.
template <typename DerivedO, typename DerivedE>
double deviance_statistic(const Eigen::MatrixBase<DerivedO>& observed,
                          const Eigen::MatrixBase<DerivedE>& expected) {
    double sum = 0;
    for (Eigen::Index j = 0; j < observed.cols(); ++j) {
        for (Eigen::Index i = 0; i < observed.rows(); ++i) {
            const double o = double(observed(i, j));
            if (o > 0) sum += o * std::log(o / double(expected(i, j)));
        }
    }
    return std::max(0.0, 2 * sum);
}

ProportionEstimate mle_proportion(long long successes, long long trials);

/// Binomial log-likelihood kernel y ln π + (n - y) ln(1 - π), 0 ln 0 = 0.
/// The binomial coefficient is omitted (it cancels in every ratio).
double log_likelihood(double pi, long long successes, long long trials);

/// z = (π̂ - π0) / sqrt(π0(1-π0)/n), with the standard error taken under the null.
TestResult score_test_proportion(long long successes, long long trials, double pi0,
                                 Sidedness sided = Sidedness::two_sided);

/// z² with the standard error at the estimate; requires 0 < y < n.
TestResult wald_test_proportion(long long successes, long long trials, double pi0);

/// -2 ln(l0 / l1) on 1 df.
LikelihoodRatioResult lr_test_proportion(long long successes, long long trials, double pi0);

/// π̂ ± z_{α/2} sqrt(π̂(1-π̂)/n). Unclipped unless `clip`.
ConfidenceInterval wald_ci(long long successes, long long trials, double level, bool clip = false);

ExpectedFrequencies expected_frequencies(const ContingencyTable& table, Hypothesis hypothesis);

/// Pearson X² and deviance G² against μ̂ under independence, df = (I-1)(J-1).
TableTestResult independence_test(const ContingencyTable& table);

/// Same numerics as independence_test; rows are the fixed design margin.
TableTestResult homogeneity_test(const ContingencyTable& table);

/// M² = (n - 1) r², 1 df. Without explicit scores both axes must be ordinal,
/// and equally spaced scores are used.
TestResult mantel_haenszel_test(const ContingencyTable& table,
                                const std::optional<ScoreAssignment>& scores = std::nullopt);

}  // namespace cattab

#endif  // CATTAB_INFERENCE_HPP
