#include <riclim/mc.hpp>
#include <riclim/validation.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace riclim;

TEST(SplitMix64, KnownSequence)
{
    // Reference values of the published SplitMix64 for seed 1234567.
    mc::SplitMix64 g(1234567);
    EXPECT_EQ(g(), 6457827717110365317ULL);
    EXPECT_EQ(g(), 3203168211198807973ULL);
}

TEST(SampleExtremeEigs, Deterministic)
{
    const mc::SimSpec spec{12, 0, 4, 10, 42};
    const auto a = mc::sample_extreme_eigs(spec);
    const auto b = mc::sample_extreme_eigs(spec);
    ASSERT_EQ(a.values.size(), 10u);
    for (std::size_t i = 0; i < 10; ++i)
    {
        EXPECT_EQ(a.values[i].lambda_min, b.values[i].lambda_min);
        EXPECT_EQ(a.values[i].lambda_max, b.values[i].lambda_max);
        EXPECT_LE(a.values[i].lambda_min, a.values[i].lambda_max);
    }
}

TEST(SampleExtremeEigs, ThreadCountDoesNotMatter)
{
    mc::SimSpec spec{8, 0, 3, 5000, 9};
    const auto one = mc::sample_extreme_eigs(spec);
    spec.threads = 4;
    const auto four = mc::sample_extreme_eigs(spec);
    for (std::size_t i = 0; i < one.values.size(); ++i)
        ASSERT_EQ(one.values[i].lambda_max, four.values[i].lambda_max) << i;
}

TEST(SampleExtremeEigs, ChiSquareKs)
{
    const long m = 7, trials = 50000;
    const auto smp = mc::sample_extreme_eigs(mc::SimSpec{m, 0, 1, trials, 3}, false);
    for (const auto& v : smp.values)
        ASSERT_EQ(v.lambda_min, v.lambda_max);
    EXPECT_LT(mc::chi2_ks_statistic(smp.values, m), mc::ks_critical(0.01, trials));
}

TEST(SampleExtremeEigs, Validation)
{
    EXPECT_THROW(mc::sample_extreme_eigs(mc::SimSpec{3, 0, 3, 10, 1}), DomainError);
    EXPECT_THROW(mc::sample_extreme_eigs(mc::SimSpec{5, 0, 2, 0, 1}), DomainError);
}

TEST(EmpiricalRic, OrthonormalColumnsAreIsometric)
{
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(6, 6).leftCols(5);
    const auto r = mc::ric_of_matrix(a, 1);
    EXPECT_NEAR(r.sric, 0.0, 1e-15);
    const auto r3 = mc::ric_of_matrix(a, 3);
    EXPECT_NEAR(r3.sric, 0.0, 1e-14);
}

TEST(EmpiricalRic, RayleighProbe)
{
    // n=12, m=8, s=2: random unit s-sparse vectors never beat the enumerated
    // extremes, and the best probe comes within 1e-6 from inside.
    const long m = 8, n = 12, s = 2;
    mc::SplitMix64 gen(mc::trial_seed(17, 0));
    Eigen::MatrixXd a(m, n);
    mc::detail::fill_gaussian(a, gen, 1.0 / std::sqrt(double(m)));
    const auto r = mc::ric_of_matrix(a, s);

    std::mt19937_64 rng(8);
    std::normal_distribution<double> nd;
    double lo = 1e300, hi = -1e300;
    for (long i = 0; i < n; ++i)
        for (long j = i + 1; j < n; ++j)
        {
            Eigen::MatrixXd sub(m, 2);
            sub << a.col(i), a.col(j);
            const Eigen::Matrix2d g = sub.transpose() * sub;
            for (int t = 0; t < 20000; ++t)
            {
                Eigen::Vector2d x(nd(rng), nd(rng));
                x.normalize();
                const double q = x.dot(g * x);
                lo = std::min(lo, q);
                hi = std::max(hi, q);
            }
        }
    EXPECT_LE(1.0 - lo, r.lric + 1e-12);
    EXPECT_LE(hi - 1.0, r.uric + 1e-12);
    EXPECT_NEAR(1.0 - lo, r.lric, 1e-6);
    EXPECT_NEAR(hi - 1.0, r.uric, 1e-6);
}

TEST(EmpiricalRic, SupportLimit)
{
    EXPECT_THROW(mc::empirical_ric(mc::SimSpec{10, 100, 5, 1, 1}), DomainError);
    EXPECT_NO_THROW(mc::empirical_ric(mc::SimSpec{10, 18, 2, 2, 1}));
}

TEST(Statistics, Helpers)
{
    EXPECT_DOUBLE_EQ(mc::empirical_quantile({5.0, 1.0, 3.0, 2.0, 4.0}, 0.4), 2.0);
    EXPECT_DOUBLE_EQ(mc::empirical_cdf({1.0, 2.0, 3.0, 4.0}, 2.5), 0.5);
    EXPECT_DOUBLE_EQ(mc::binomial_se(0.5, 100), 0.05);
    EXPECT_EQ(mc::binomial_upper(10, 10, 0.01), 1.0);
    const double u = mc::binomial_upper(0, 100, 0.05);
    EXPECT_NEAR(u, 1.0 - std::pow(0.025, 0.01), 1e-10);
}

TEST(Csv, SamplesAndQuantiles)
{
    const auto smp = mc::sample_extreme_eigs(mc::SimSpec{6, 0, 2, 4, 1});
    std::ostringstream a, b;
    mc::write_samples_csv(a, smp.values);
    mc::write_quantiles_csv(b, smp.values, {0.5});
    const std::string text = a.str();
    EXPECT_EQ(text.substr(0, 25), "trial,lambda_min,lambda_m");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 5);
    EXPECT_EQ(b.str().substr(0, 20), "q,lambda_min,lambda_");
}

TEST(Validation, GridDeviationShrinks)
{
    // Max grid deviation at 1e5 trials is below 3x its binomial SE and
    // smaller than at 1e4 on the same grid size.
    const auto small = validation::mc_grid_check(WishartDims{6, 2}, 10000, 1);
    const auto big = validation::mc_grid_check(WishartDims{6, 2}, 100000, 1);
    EXPECT_TRUE(small.grid_in_range);
    EXPECT_TRUE(big.pass);
    EXPECT_LT(big.max_abs_dev, small.max_abs_dev + 3.0 * std::sqrt(0.25 / 10000));
    EXPECT_LT(big.max_dev_in_se, 4.0);
}

TEST(Validation, Reproducible)
{
    const auto a = validation::mc_grid_check(WishartDims{6, 2}, 20000, 3);
    const auto b = validation::mc_grid_check(WishartDims{6, 2}, 20000, 3);
    ASSERT_EQ(a.points.size(), b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i)
        EXPECT_EQ(a.points[i].psi_hat, b.points[i].psi_hat);
    EXPECT_EQ(a.max_abs_dev, b.max_abs_dev);
}
