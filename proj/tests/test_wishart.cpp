#include "oracle_values.hpp"

#include <riclim/mc.hpp>
#include <riclim/percentiles.hpp>
#include <riclim/wishart.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace riclim;

namespace
{

QMatrix skew(int n, long bits = 256)
{
    QMatrix q;
    q.order = n;
    q.entries.assign(static_cast<std::size_t>(n) * n, BigFloat(bits));
    return q;
}

void set(QMatrix& q, int i, int j, double v)
{
    q(i, j) = BigFloat(v, q(i, j).precision());
    q(j, i) = BigFloat(-v, q(i, j).precision());
}

} // namespace

TEST(Pfaffian, TwoByTwo)
{
    QMatrix q = skew(2);
    set(q, 0, 1, -3.5);
    EXPECT_NEAR(log_pfaffian_abs(q), std::log(3.5), 1e-15);
    EXPECT_EQ(detail::pfaffian_inplace(q).sign, -1);
}

TEST(Pfaffian, BlockDiagonal)
{
    QMatrix q = skew(4);
    set(q, 0, 1, 0.3);
    set(q, 2, 3, -7.0);
    EXPECT_NEAR(log_pfaffian_abs(q), std::log(2.1), 1e-15);
}

TEST(Pfaffian, SixBySixOracle)
{
    QMatrix q = skew(6);
    int k = 0;
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j)
            set(q, i, j, oracle::pf6_upper[k++]);
    QMatrix c = q;
    EXPECT_NEAR(log_pfaffian_abs(q), std::log(oracle::pf6_abs), 1e-14);
    EXPECT_EQ(detail::pfaffian_inplace(c).sign, 1);
}

TEST(Pfaffian, SingularAndOddOrder)
{
    QMatrix q = skew(4);
    set(q, 0, 1, 1.0);
    EXPECT_EQ(log_pfaffian_abs(q), neg_inf);
    EXPECT_THROW(log_pfaffian_abs(skew(3)), DomainError);
}

TEST(BuildQ, StructureEvenOrder)
{
    const QMatrix q = build_q(WishartDims{6, 2}, SpectralInterval{0.5, 8.0});
    ASSERT_EQ(q.order, 2);
    EXPECT_TRUE(q(0, 0).is_zero());
    EXPECT_TRUE(q(1, 1).is_zero());
    EXPECT_EQ(q(0, 1).to_double(), -q(1, 0).to_double());
}

TEST(BuildQ, OddOrderBorder)
{
    const WishartDims d{8, 3};
    const SpectralInterval iv{1.0, 20.0};
    const QMatrix q = build_q(d, iv);
    ASSERT_EQ(q.order, 4);
    for (int i = 1; i <= 3; ++i)
    {
        const double want = gen_reg_inc_gamma(d.alpha() + i, iv.a / 2, iv.b / 2).p();
        EXPECT_NEAR(q(i - 1, 3).to_double(), want, 1e-15) << i;
        EXPECT_EQ(q(3, i - 1).to_double(), -q(i - 1, 3).to_double());
    }
    for (int i = 0; i < 4; ++i)
        EXPECT_TRUE(q(i, i).is_zero());
}

TEST(BuildQ, FullRangeMatchesNormalization)
{
    // Pf Q(0, inf) = 1/K'
    const WishartDims d{12, 4};
    const long bits = 256;
    QMatrix q = build_q(d, SpectralInterval{0.0, pos_inf});
    const double lpf = log_pfaffian_abs(q);
    EXPECT_NEAR(lpf, -detail::ln_k_prime(d, bits).to_double(), 1e-12);
}

TEST(QEntry, DegenerateInterval)
{
    EXPECT_EQ(q_entry(WishartDims{6, 3}, SpectralInterval{2.0, 2.0}, 1, 2), 0.0);
    EXPECT_THROW(q_entry(WishartDims{6, 3}, SpectralInterval{0.0, 2.0}, 2, 2), DomainError);
}

TEST(QEntry, RecurrenceMatchesQuadrature)
{
    EXPECT_NEAR(q_entry(WishartDims{6, 2}, SpectralInterval{0.5, 8.0}, 1, 2),
                q_entry(WishartDims{6, 2}, SpectralInterval{0.5, 8.0}, 1, 2, {}, QEntryMethod::quadrature), 1e-10);
    const WishartDims d{14, 5};
    for (const SpectralInterval iv : {SpectralInterval{1.0, 12.0}, SpectralInterval{3.0, 40.0},
                                      SpectralInterval{0.0, 25.0}})
        for (int i = 1; i <= 5; ++i)
            for (int j = i + 1; j <= 5; ++j)
                EXPECT_NEAR(q_entry(d, iv, i, j), q_entry(d, iv, i, j, {}, QEntryMethod::quadrature), 1e-10)
                    << iv.a << ' ' << iv.b << ' ' << i << ' ' << j;
}

TEST(QEntry, DiagonalIdentity)
{
    // (P(b)+P(a))(P(b)-P(a)) - 2 int g P = 0 for i = j.
    const WishartDims d{10, 4};
    for (int i = 1; i <= 4; ++i)
        EXPECT_LT(std::abs(detail::q_entry_quadrature(d, SpectralInterval{0.7, 18.0}, i, i)), 1e-10) << i;
}

TEST(Psi, TrivialCases)
{
    EXPECT_EQ(psi(WishartDims{6, 2}, SpectralInterval{5.0, 5.0}).p(), 0.0);
    EXPECT_EQ(psi(WishartDims{6, 2}, SpectralInterval{6.0, 5.0}).p(), 0.0);
    EXPECT_EQ(psi(WishartDims{6, 2}, SpectralInterval{0.0, pos_inf}).p(), 1.0);
    EXPECT_NEAR(psi(WishartDims{4, 1}, SpectralInterval{0.0, 4.0}).p(), oracle::chi2_m4_0_4, 1e-15);
    EXPECT_NEAR(psi(WishartDims{4, 1}, SpectralInterval{1.0, 3.0}).p(), oracle::chi2_m4_1_3, 1e-15);
    EXPECT_THROW(psi(WishartDims{3, 3}, SpectralInterval{0.0, 1.0}), DomainError);
    EXPECT_THROW(psi(WishartDims{5, 2}, SpectralInterval{-1.0, 1.0}), DomainError);
}

TEST(Psi, MatchesDensityIntegrationOracle)
{
    for (const auto& c : oracle::psi_cases)
        EXPECT_NEAR(psi(WishartDims{c.m, c.s}, SpectralInterval{c.a, c.b}).p(), c.psi, 1e-9)
            << c.m << ' ' << c.s << ' ' << c.a << ' ' << c.b;
}

TEST(Psi, ChiSquareReduction)
{
    // s = 1: psi = P(m/2; a/2, b/2).
    for (int m = 2; m <= 20; m += 3)
        for (const auto& [a, b] : {std::pair{0.0, 1.0}, std::pair{1.0, 4.0}, std::pair{3.0, 10.0}, std::pair{0.5, 30.0}})
            EXPECT_NEAR(psi(WishartDims{m, 1}, SpectralInterval{a, b}).p(),
                        gen_reg_inc_gamma(m / 2.0, a / 2.0, b / 2.0).p(), 1e-14)
                << m << ' ' << a << ' ' << b;
}

TEST(Psi, Normalization)
{
    for (const auto& [m, s] : {std::pair{5, 2}, std::pair{10, 3}, std::pair{20, 5}, std::pair{50, 10}})
        EXPECT_LT(std::abs(std::expm1(normalization_residual(WishartDims{m, s}))), 1e-10) << m << ' ' << s;
}

TEST(Psi, QuadratureEntriesAgree)
{
    PsiOptions quad;
    quad.entries = QEntryMethod::quadrature;
    const WishartDims d{12, 4};
    for (const SpectralInterval iv : {SpectralInterval{2.0, 25.0}, SpectralInterval{4.0, 30.0},
                                      SpectralInterval{1.0, 18.0}})
        EXPECT_NEAR(psi(d, iv).p(), psi(d, iv, {}, quad).p(), 1e-9) << iv.a << ' ' << iv.b;
}

TEST(Psi, SelfNormalizedAgrees)
{
    PsiOptions self;
    self.normalization = Normalization::self_normalized;
    const WishartDims d{15, 6};
    const SpectralInterval iv{3.0, 35.0};
    EXPECT_NEAR(psi(d, iv).log_p(), psi(d, iv, {}, self).log_p(), 1e-11);
}

TEST(Psi, MonotoneInEdges)
{
    const WishartDims d{11, 4};
    for (double a : {0.0, 1.0, 2.5})
    {
        double prev = -1.0;
        for (double b = 5.0; b <= 45.0; b += 5.0)
        {
            const double v = psi(d, SpectralInterval{a, b}).p();
            EXPECT_GE(v, prev) << a << ' ' << b;
            prev = v;
        }
    }
    for (double b : {15.0, 30.0})
    {
        double prev = 2.0;
        for (double a = 0.0; a <= 6.0; a += 0.75)
        {
            const double v = psi(d, SpectralInterval{a, b}).p();
            EXPECT_LE(v, prev) << a << ' ' << b;
            prev = v;
        }
    }
}

TEST(Psi, FrechetLowerBound)
{
    const WishartDims d{9, 3};
    for (double a : {0.5, 1.5, 3.0})
        for (double b : {12.0, 18.0, 26.0})
        {
            const double joint = psi(d, SpectralInterval{a, b}).p();
            const double lower = psi(d, SpectralInterval{0.0, b}).p() + psi(d, SpectralInterval{a, pos_inf}).p() - 1.0;
            EXPECT_GE(joint, lower - 1e-14) << a << ' ' << b;
        }
}

TEST(Psi, MonteCarloAgreement)
{
    // m=10, s=3, [1, 30] against 10^6 draws.
    const WishartDims d{10, 3};
    const double v = psi(d, SpectralInterval{1.0, 30.0}).p();
    EXPECT_NEAR(v, oracle::psi_cases[5].psi, 1e-9);
    const auto smp = mc::sample_extreme_eigs(mc::SimSpec{10, 0, 3, 1000000, 99}, false);
    const double hat = mc::empirical_psi(smp.values, 1.0, 30.0);
    EXPECT_LE(std::abs(v - hat), 4.0 * mc::binomial_se(hat, 1000000));
}

TEST(PsiSurvival, Values)
{
    const LogProb all = psi_survival(WishartDims{5, 2}, SpectralInterval{0.0, pos_inf});
    EXPECT_EQ(all.p(), 0.0);
    EXPECT_EQ(all.log_p(), neg_inf);
    const LogProb chi = psi_survival(WishartDims{4, 1}, SpectralInterval{0.0, 4.0});
    EXPECT_NEAR(chi.log_p(), std::log(1.0 - oracle::chi2_m4_0_4), 1e-14);
    // m=2000, s=4: finite and far below double precision's 1 - psi.
    const LogProb t = psi_survival(WishartDims{2000, 4}, SpectralInterval{2000 * 0.7, 2000 * 1.3});
    EXPECT_TRUE(std::isfinite(t.log_p()));
    EXPECT_LT(t.log_p(), std::log(1e-14));
}

TEST(PsiSurvival, FloorCertification)
{
    const WishartDims d{60, 5};
    const SpectralInterval iv{60 * 0.2, 60 * 3.0};
    const double exact = psi_survival(d, iv).log_p();
    const SurvivalEval above = psi_survival_log(d, iv, exact - 5.0);
    EXPECT_FALSE(above.below_floor);
    EXPECT_NEAR(above.log_value, exact, 1e-10 * std::abs(exact));
    const SurvivalEval below = psi_survival_log(d, iv, exact + 5.0);
    if (below.below_floor)
        EXPECT_EQ(below.log_value, exact + 5.0);
    else
        EXPECT_NEAR(below.log_value, exact, 1e-10 * std::abs(exact));
}

TEST(EigPercentiles, StraddleOne)
{
    for (double eta : {1e-10, 1e-3, 0.1, 0.4})
    {
        const auto e = eig_percentiles(WishartDims{120, 12}, eta);
        EXPECT_LT(e.lambda_min_star, 1.0) << eta;
        EXPECT_GT(e.lambda_max_star, 1.0) << eta;
    }
}

TEST(EigPercentiles, Asymmetry)
{
    const auto e = eig_percentiles(WishartDims{400, 40}, 1e-10);
    EXPECT_GT(e.lambda_max_star - 1.0, 1.0 - e.lambda_min_star);
}

TEST(EigPercentiles, DefiningProbabilities)
{
    const WishartDims d{50, 6};
    const double eta = 1e-4;
    const auto e = eig_percentiles(d, eta);
    const double up = psi_survival(d, SpectralInterval{0.0, d.m * e.lambda_max_star}).log_p();
    const double lo = psi_survival(d, SpectralInterval{d.m * e.lambda_min_star, pos_inf}).log_p();
    EXPECT_NEAR(up, std::log(eta), 1e-8);
    EXPECT_NEAR(lo, std::log(eta), 1e-8);
}

TEST(EigPercentiles, MonteCarloQuantiles)
{
    // m=200, s=20, eta=1e-3 against 10^5 normalized draws.
    const WishartDims d{200, 20};
    const double eta = 1e-3;
    const auto e = eig_percentiles(d, eta);
    const long trials = 100000;
    const auto smp = mc::sample_extreme_eigs(mc::SimSpec{200, 0, 20, trials, 2024}, true);
    long below = 0, above = 0;
    for (const auto& v : smp.values)
    {
        below += v.lambda_min <= e.lambda_min_star;
        above += v.lambda_max >= e.lambda_max_star;
    }
    // eta inside the two-sided 99.9% Clopper-Pearson interval of each count.
    for (long k : {below, above})
    {
        const double hi = mc::binomial_upper(k, trials, 1e-3);
        const double lo = k == 0 ? 0.0 : boost::math::ibeta_inv(double(k), double(trials - k + 1), 5e-4);
        EXPECT_LE(lo, eta) << k;
        EXPECT_GE(hi, eta) << k;
    }
}

TEST(WishartDims, Validation)
{
    EXPECT_THROW(WishartDims({4, 4}).validate(), DomainError);
    EXPECT_THROW(WishartDims({4, 0}).validate(), DomainError);
    EXPECT_NO_THROW(WishartDims({5, 4}).validate());
    EXPECT_EQ(WishartDims({9, 3}).q_order(), 4);
}
