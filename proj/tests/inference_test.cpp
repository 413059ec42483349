#include <cmath>
#include <random>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <gtest/gtest.h>

#include "cattab/inference.hpp"
#include "cattab/special.hpp"
#include "fixtures.hpp"

using namespace cattab;
using cattab::testing::random_table;

namespace {

double boost_chi2_sf(double df, double x) {
    return boost::math::cdf(boost::math::complement(boost::math::chi_squared(df), x));
}

// Plain double loops over the cells, independent of the Eigen expressions.
std::pair<double, double> brute_force_x2_g2(const ContingencyTable& t) {
    double x2 = 0, g2 = 0;
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
        for (Eigen::Index j = 0; j < t.cols(); ++j) {
            const double mu = double(t.row_total(i)) * double(t.col_total(j)) / double(t.total());
            const double o = double(t.count(i, j));
            x2 += (o - mu) * (o - mu) / mu;
            if (o > 0) g2 += 2 * o * std::log(o / mu);
        }
    }
    return {x2, g2};
}

}  // namespace

TEST(Mle, CoinExample) {
    const auto m = mle_proportion(3, 10);
    EXPECT_DOUBLE_EQ(m.estimate, 0.3);
    EXPECT_NEAR(m.standard_error, 0.1449, 5e-5);
    EXPECT_NEAR(m.standard_error, 0.145, 5e-4);
    const auto zero = mle_proportion(0, 25);
    EXPECT_EQ(zero.estimate, 0.0);
    EXPECT_EQ(zero.standard_error, 0.0);
    EXPECT_THROW(mle_proportion(11, 10), DomainError);
    EXPECT_THROW(mle_proportion(1, 0), DomainError);
}

TEST(Mle, EqualsGridArgmax) {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<long long> trials(1, 400);
    auto check = [](long long y, long long n) {
        double best = -INFINITY, arg = -1;
        for (int k = 0; k <= 1000; ++k) {
            const double pi = k / 1000.0;
            const double ll = log_likelihood(pi, y, n);
            if (ll > best) {
                best = ll;
                arg = pi;
            }
        }
        EXPECT_NEAR(mle_proportion(y, n).estimate, arg, 0.5e-3 + 1e-12) << y << "/" << n;
    };
    check(3, 10);
    for (int trial = 0; trial < 200; ++trial) {
        const long long n = trials(rng);
        check(std::uniform_int_distribution<long long>(0, n)(rng), n);
    }
}

TEST(LogLikelihood, Values) {
    EXPECT_EQ(log_likelihood(1.0, 5, 5), 0.0);
    EXPECT_EQ(log_likelihood(0.0, 0, 5), 0.0);
    EXPECT_NEAR(log_likelihood(0.5, 3, 10), 10 * std::log(0.5), 1e-12);
    EXPECT_NEAR(log_likelihood(0.5, 3, 10), -6.9315, 5e-5);
    EXPECT_TRUE(std::isinf(log_likelihood(0.0, 3, 10)));
}

TEST(LogLikelihood, Unimodal) {
    double previous = log_likelihood(0.001, 3, 10);
    for (int k = 2; k <= 999; ++k) {
        const double pi = k / 1000.0;
        const double ll = log_likelihood(pi, 3, 10);
        if (pi <= 0.3) EXPECT_GT(ll, previous) << pi;
        else EXPECT_LT(ll, previous) << pi;
        previous = ll;
    }
}

TEST(ScoreTest, CoinExample) {
    const auto t = score_test_proportion(3, 10, 0.5);
    EXPECT_EQ(t.kind, StatisticKind::score_z);
    EXPECT_NEAR(t.statistic, -1.265, 5e-4);
    EXPECT_NEAR(*t.z, -0.2 / std::sqrt(0.025), 1e-12);
    EXPECT_NEAR(std::sqrt(0.5 * 0.5 / 10), 0.1581, 5e-5);
    EXPECT_EQ(*t.sidedness, Sidedness::two_sided);

    const boost::math::normal standard;
    const double z = 0.2 / std::sqrt(0.025);
    EXPECT_NEAR(t.p_value, 2 * boost::math::cdf(boost::math::complement(standard, z)), 1e-12);
    EXPECT_NEAR(t.p_value, 0.2059, 5e-5);
    const auto upper = score_test_proportion(3, 10, 0.5, Sidedness::upper);
    EXPECT_NEAR(upper.p_value, boost::math::cdf(standard, z), 1e-12);
    EXPECT_NEAR(upper.p_value, 0.897, 5e-4);
    const auto lower = score_test_proportion(3, 10, 0.5, Sidedness::lower);
    EXPECT_NEAR(lower.p_value + upper.p_value, 1.0, 1e-12);
}

TEST(ScoreTest, NullEqualsEstimateAndErrors) {
    const auto t = score_test_proportion(5, 10, 0.5);
    EXPECT_EQ(t.statistic, 0.0);
    EXPECT_EQ(t.p_value, 1.0);
    EXPECT_THROW(score_test_proportion(3, 10, 0.0), DomainError);
    EXPECT_THROW(score_test_proportion(3, 10, 1.0), DomainError);
}

TEST(WaldTest, CoinExample) {
    const auto t = wald_test_proportion(3, 10, 0.5);
    EXPECT_EQ(t.kind, StatisticKind::wald_chisq);
    EXPECT_NEAR(t.statistic, 0.04 / 0.021, 1e-12);
    EXPECT_NEAR(t.statistic, 1.9048, 5e-5);
    EXPECT_NEAR(t.p_value, boost_chi2_sf(1, 0.04 / 0.021), 1e-10);
    EXPECT_NEAR(t.p_value, 0.1675, 5e-5);
    EXPECT_EQ(t.df, 1);
}

TEST(WaldTest, NullEqualsEstimateAndBoundary) {
    const auto t = wald_test_proportion(5, 10, 0.5);
    EXPECT_EQ(t.statistic, 0.0);
    EXPECT_EQ(t.p_value, 1.0);
    EXPECT_THROW(wald_test_proportion(0, 10, 0.5), DomainError);
    EXPECT_THROW(wald_test_proportion(10, 10, 0.5), DomainError);
}

TEST(ProportionTests, AsymptoticAgreementNearNull) {
    const double score = std::pow(*score_test_proportion(480, 1000, 0.5).z, 2);
    const double wald = wald_test_proportion(480, 1000, 0.5).statistic;
    const double lr = lr_test_proportion(480, 1000, 0.5).test.statistic;
    EXPECT_NEAR(wald / score, 1.0, 0.02);
    EXPECT_NEAR(lr / score, 1.0, 0.02);
    EXPECT_NEAR(lr / wald, 1.0, 0.02);

    // Far from the null the three diverge even at n = 1000.
    const double far_wald = wald_test_proportion(300, 1000, 0.5).statistic;
    const double far_score = std::pow(*score_test_proportion(300, 1000, 0.5).z, 2);
    EXPECT_GT(far_wald / far_score, 1.15);
}

TEST(LrTest, Values) {
    const auto same = lr_test_proportion(5, 10, 0.5);
    EXPECT_EQ(same.test.statistic, 0.0);
    EXPECT_EQ(same.test.p_value, 1.0);

    const auto t = lr_test_proportion(3, 10, 0.5);
    const double oracle = 2 * (3 * std::log(3.0 / 5.0) + 7 * std::log(7.0 / 5.0));
    EXPECT_NEAR(t.test.statistic, oracle, 1e-12);
    EXPECT_NEAR(t.test.statistic, 1.6457, 5e-5);
    EXPECT_NEAR(t.test.p_value, boost_chi2_sf(1, oracle), 1e-10);
    EXPECT_NEAR(t.test.p_value, 0.1996, 5e-5);
    EXPECT_EQ(t.test.kind, StatisticKind::lr_chisq);
}

TEST(LrTest, AlternativeLikelihoodDominatesNull) {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<long long> trials(1, 5000);
    std::uniform_real_distribution<double> null(1e-4, 1 - 1e-4);
    for (int trial = 0; trial < 1000; ++trial) {
        const long long n = trials(rng);
        const long long y = std::uniform_int_distribution<long long>(0, n)(rng);
        const auto r = lr_test_proportion(y, n, null(rng));
        EXPECT_GE(r.detail.log_l1, r.detail.log_l0);
        EXPECT_GE(r.test.statistic, 0.0);
    }
}

TEST(WaldCi, CoinExample) {
    const auto ci = wald_ci(3, 10, 0.95);
    EXPECT_NEAR(ci.lower, 0.0159, 5e-4);
    EXPECT_NEAR(ci.upper, 0.5841, 5e-4);
    EXPECT_NEAR(ci.lower, 0.3 - 1.959963984540054 * std::sqrt(0.021), 1e-9);
    EXPECT_NEAR(ci.upper - ci.lower, 2 * ci.critical_value * ci.standard_error, 1e-12);
    EXPECT_NEAR(std::round(ci.lower * 100) / 100, 0.02, 1e-12);
    EXPECT_NEAR(std::round(ci.upper * 100) / 100, 0.58, 1e-12);
    EXPECT_FALSE(ci.degenerate);
    EXPECT_TRUE(ci.contains(0.5));
    EXPECT_FALSE(ci.contains(0.0));
}

TEST(WaldCi, LevelLimitAndFlags) {
    double previous = INFINITY;
    for (double level : {0.5, 0.1, 0.01, 1e-4, 1e-8}) {
        const auto ci = wald_ci(5, 10, level);
        EXPECT_DOUBLE_EQ(0.5 * (ci.lower + ci.upper), 0.5);
        EXPECT_LT(ci.upper - ci.lower, previous);
        previous = ci.upper - ci.lower;
    }
    EXPECT_LT(previous, 1e-8);

    const auto raw = wald_ci(1, 10, 0.95);
    EXPECT_LT(raw.lower, 0.0);
    const auto clipped = wald_ci(1, 10, 0.95, true);
    EXPECT_EQ(clipped.lower, 0.0);
    EXPECT_TRUE(clipped.clipped);

    const auto zero = wald_ci(0, 10, 0.95);
    EXPECT_TRUE(zero.degenerate);
    EXPECT_EQ(zero.lower, zero.upper);
    EXPECT_THROW(wald_ci(3, 10, 1.0), DomainError);
}

TEST(ExpectedFrequencies, Values) {
    const auto t1 = cattab::testing::table1();
    const auto e1 = expected_frequencies(t1, Hypothesis::independence);
    EXPECT_NEAR(e1.values(0, 0), 2990.0 * 253 / 5697, 1e-10);
    EXPECT_NEAR(e1.values(0, 0), 132.784, 5e-4);

    const auto e2 = expected_frequencies(cattab::testing::table2(), Hypothesis::homogeneity);
    EXPECT_NEAR(e2.values(0, 1), 98.0, 1e-10);
    EXPECT_NEAR(e2.values(1, 1), 98.0, 1e-10);
    EXPECT_EQ(e2.hypothesis, Hypothesis::homogeneity);

    const ContingencyTable flat(CountMatrix::Constant(3, 4, 10));
    EXPECT_TRUE(expected_frequencies(flat, Hypothesis::independence).values.isApprox(flat.counts().cast<double>()));
}

TEST(ExpectedFrequencies, PreserveMargins) {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 200; ++trial) {
        const auto t = random_table(rng, 4, 3, 0, 60);
        const auto e = expected_frequencies(t, Hypothesis::independence).values;
        EXPECT_TRUE((e.rowwise().sum() - t.row_totals().cast<double>()).cwiseAbs().maxCoeff() < 1e-9);
        EXPECT_TRUE((e.colwise().sum().transpose() - t.col_totals().cast<double>()).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST(IndependenceTest, Table1) {
    const auto r = independence_test(cattab::testing::table1());
    EXPECT_NEAR(r.pearson.statistic, 20.068, 5e-3);
    EXPECT_NEAR(r.deviance.statistic, 20.137, 5e-3);
    EXPECT_EQ(r.pearson.df, 1);
    EXPECT_EQ(r.deviance.df, 1);
    EXPECT_LT(r.pearson.p_value, 0.01);
    EXPECT_LT(r.deviance.p_value, 0.01);
    EXPECT_FALSE(r.pearson.small_cell_warning);
}

TEST(IndependenceTest, RankOneIsZero) {
    CountMatrix m(2, 3);
    m << 1, 2, 3, 4, 8, 12;
    const auto r = independence_test(ContingencyTable(m));
    EXPECT_NEAR(r.pearson.statistic, 0.0, 1e-12);
    EXPECT_NEAR(r.deviance.statistic, 0.0, 1e-12);
    EXPECT_NEAR(r.pearson.p_value, 1.0, 1e-12);
    EXPECT_TRUE(r.pearson.small_cell_warning);
}

TEST(IndependenceTest, Table6AgainstBruteForce) {
    const auto t = cattab::testing::table6();
    const auto r = independence_test(t);
    const auto [x2, g2] = brute_force_x2_g2(t);
    EXPECT_EQ(r.pearson.df, 16);
    EXPECT_NEAR(r.pearson.statistic, x2, 1e-9 * x2);
    EXPECT_NEAR(r.deviance.statistic, g2, 1e-9 * g2);
    EXPECT_NEAR(r.pearson.p_value, boost_chi2_sf(16, x2), 1e-12);
    EXPECT_TRUE(r.pearson.small_cell_warning);  // the "Poor" row has expected counts below 5
}

TEST(IndependenceTest, ZeroMarginRejected) {
    CountMatrix m(2, 3);
    m << 1, 0, 3, 4, 0, 12;
    EXPECT_THROW(independence_test(ContingencyTable(m)), DomainError);
}

TEST(HomogeneityTest, Table2) {
    const auto t = cattab::testing::table2();
    const auto r = homogeneity_test(t);
    const auto [x2, g2] = brute_force_x2_g2(t);
    EXPECT_NEAR(r.pearson.statistic, 155.47, 5e-2);
    EXPECT_NEAR(r.pearson.statistic, x2, 1e-9);
    EXPECT_NEAR(r.deviance.statistic, g2, 1e-9);
    EXPECT_NEAR(r.deviance.statistic, 187.9798, 5e-4);
    EXPECT_EQ(r.pearson.df, 1);
    EXPECT_LT(r.pearson.p_value, 0.01);
    EXPECT_LT(r.deviance.p_value, 0.01);
    EXPECT_EQ(r.expected.hypothesis, Hypothesis::homogeneity);

    const auto ind = independence_test(t);
    EXPECT_EQ(ind.pearson.statistic, r.pearson.statistic);
    EXPECT_EQ(ind.deviance.statistic, r.deviance.statistic);
}

TEST(HomogeneityTest, IdenticalRowsAndScaling) {
    CountMatrix m(2, 3);
    m << 5, 9, 2, 5, 9, 2;
    const auto same = homogeneity_test(ContingencyTable(m));
    EXPECT_NEAR(same.pearson.statistic, 0.0, 1e-12);
    EXPECT_NEAR(same.deviance.statistic, 0.0, 1e-12);

    const auto t2 = cattab::testing::table2();
    const double base = homogeneity_test(t2).pearson.statistic;
    const double doubled = homogeneity_test(ContingencyTable(t2.counts() * 2)).pearson.statistic;
    EXPECT_NEAR(doubled, 2 * base, 1e-9 * base);

    CountMatrix zero_row(2, 2);
    zero_row << 0, 0, 3, 4;
    EXPECT_THROW(homogeneity_test(ContingencyTable(zero_row)), DomainError);
}

TEST(MantelHaenszel, Table6) {
    const auto t = cattab::testing::table6();
    const auto r = mantel_haenszel_test(t);
    EXPECT_EQ(r.kind, StatisticKind::mantel_haenszel);
    EXPECT_EQ(r.df, 1);
    EXPECT_NEAR(r.statistic, 834.937, 1.0);
    const double corr = pearson_correlation(t, ScoreAssignment::equally_spaced(t));
    EXPECT_NEAR(r.statistic, 2328 * corr * corr, 1e-9);
    EXPECT_LT(r.p_value, 0.01);
}

TEST(MantelHaenszel, ZeroCorrelation) {
    CountMatrix m(3, 3);
    m << 1, 0, 1, 0, 2, 0, 1, 0, 1;
    const ContingencyTable t(m);
    const auto r = mantel_haenszel_test(t, ScoreAssignment::equally_spaced(t));
    EXPECT_NEAR(r.statistic, 0.0, 1e-12);
    EXPECT_NEAR(r.p_value, 1.0, 1e-9);
}

TEST(MantelHaenszel, TwoByTwoMatchesScaledPearson) {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        const auto t = random_table(rng, 2, 2, 1, 800);
        const double m2 = mantel_haenszel_test(t, ScoreAssignment::equally_spaced(t)).statistic;
        const double x2 = independence_test(t).pearson.statistic;
        const double n = double(t.total());
        EXPECT_NEAR(m2, (n - 1) * x2 / n, 1e-9 * std::max(1.0, m2));
    }
}

TEST(MantelHaenszel, NominalAxesNeedScores) {
    EXPECT_THROW(mantel_haenszel_test(cattab::testing::table1()), DomainError);
    const auto ordinal = cattab::testing::table1().with_ordinal(true, true);
    EXPECT_NO_THROW(mantel_haenszel_test(ordinal));
}

TEST(TableTestProperties, Invariants) {
    std::mt19937_64 rng(29);
    std::uniform_int_distribution<int> dim(2, 5);
    for (int trial = 0; trial < 300; ++trial) {
        const Eigen::Index I = dim(rng), J = dim(rng);
        const auto t = random_table(rng, I, J, 0, 50);
        const auto r = independence_test(t);
        EXPECT_GE(r.pearson.statistic, 0.0);
        EXPECT_GE(r.deviance.statistic, 0.0);
        EXPECT_EQ(r.pearson.df, (I - 1) * (J - 1));
        EXPECT_GE(r.pearson.p_value, 0.0);
        EXPECT_LE(r.pearson.p_value, 1.0);
    }
    // Zero iff the table is exactly rank one.
    CountMatrix m(3, 2);
    m << 2, 6, 4, 12, 1, 3;
    auto r = independence_test(ContingencyTable(m));
    EXPECT_NEAR(r.pearson.statistic, 0.0, 1e-12);
    EXPECT_NEAR(r.deviance.statistic, 0.0, 1e-12);
    m(2, 1) = 4;
    r = independence_test(ContingencyTable(m));
    EXPECT_GT(r.pearson.statistic, 0.0);
    EXPECT_GT(r.deviance.statistic, 0.0);
}

TEST(TableTestProperties, PearsonDevianceProximityOnWellFilledFixtures) {
    const auto r1 = independence_test(cattab::testing::table1());
    ASSERT_GE(r1.expected.values.minCoeff(), 10.0);
    EXPECT_LE(std::abs(r1.pearson.statistic - r1.deviance.statistic) / r1.pearson.statistic, 0.2);
    // The vaccine table has expected counts of 98 in the symptomatic column, and there G2 runs well above X2.
    const auto r2 = homogeneity_test(cattab::testing::table2());
    EXPECT_GT(r2.deviance.statistic - r2.pearson.statistic, 30.0);
}

TEST(TableTestProperties, PValueDecreasesWithStatistic) {
    for (int df : {1, 4, 16}) {
        double previous = 1.0;
        for (double x = 0.05; x < 150; x += 0.05) {
            const double p = chi2_sf(double(df), x);
            if (previous < 1.0) EXPECT_LT(p, previous);
            else EXPECT_LE(p, previous);
            previous = p;
        }
    }
}
