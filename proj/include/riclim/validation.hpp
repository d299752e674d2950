#pragma once
///
/// \file validation.hpp
///
/// Self-checks shared by the command-line `validate` suites and the test
/// programs: Monte Carlo agreement of psi, the s = 1 chi-square identity,
/// normalization, and empirical dominance of the RIC CDF bounds.
///
#include "mc.hpp"
#include "numerics.hpp"
#include "ric.hpp"
#include "wishart.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace riclim
{
namespace validation
{

struct McGridPoint
{
    double a = 0.0, b = 0.0;
    double psi = 0.0;     ///< exact
    double psi_hat = 0.0; ///< empirical
    double se = 0.0;      ///< sqrt(psi_hat (1 - psi_hat) / trials)
    bool ok = false;
};

struct McGridReport
{
    WishartDims dims{};
    long trials = 0;
    std::uint64_t seed = 0;
    long retries = 0;
    std::vector<McGridPoint> points;
    double max_abs_dev = 0.0;
    double max_dev_in_se = 0.0;
    bool grid_in_range = true; ///< every exact psi within [0.05, 0.95]
    bool pass = false;
};

/// 5 x 5 (a, b) grid on the unnormalized scale. Grid edges come from
/// quantiles of a separate pilot run so the grid does not depend on the
/// sample under test.
inline McGridReport mc_grid_check(const WishartDims& dims, long trials, std::uint64_t seed, double k_se = 4.0,
                                  const PrecisionConfig& cfg = {})
{
    McGridReport rep;
    rep.dims = dims;
    rep.trials = trials;
    rep.seed = seed;

    mc::SimSpec pilot{dims.m, 0, dims.s, 20000, seed ^ 0x5bd1e995ULL};
    const mc::EigSample pil = mc::sample_extreme_eigs(pilot, false);
    std::vector<double> lo, hi;
    for (const auto& e : pil.values)
    {
        lo.push_back(e.lambda_min);
        hi.push_back(e.lambda_max);
    }
    const std::vector<double> qa = {0.05, 0.1, 0.2, 0.3, 0.4};
    const std::vector<double> qb = {0.6, 0.7, 0.8, 0.9, 0.95};

    mc::SimSpec spec{dims.m, 0, dims.s, trials, seed};
    const mc::EigSample smp = mc::sample_extreme_eigs(spec, false);
    rep.retries = smp.retries;
    for (double pa : qa)
        for (double pb : qb)
        {
            McGridPoint pt;
            pt.a = mc::empirical_quantile(lo, pa);
            pt.b = mc::empirical_quantile(hi, pb);
            pt.psi = psi(dims, SpectralInterval{pt.a, pt.b}, cfg).p();
            pt.psi_hat = mc::empirical_psi(smp.values, pt.a, pt.b);
            pt.se = mc::binomial_se(pt.psi_hat, trials);
            pt.ok = std::abs(pt.psi - pt.psi_hat) <= k_se * pt.se;
            rep.grid_in_range = rep.grid_in_range && pt.psi >= 0.05 && pt.psi <= 0.95;
            rep.max_abs_dev = std::max(rep.max_abs_dev, std::abs(pt.psi - pt.psi_hat));
            if (pt.se > 0.0)
                rep.max_dev_in_se = std::max(rep.max_dev_in_se, std::abs(pt.psi - pt.psi_hat) / pt.se);
            rep.points.push_back(pt);
        }
    rep.pass = rep.grid_in_range && std::all_of(rep.points.begin(), rep.points.end(), [](const auto& p) { return p.ok; });
    return rep;
}

struct Chi2Report
{
    double max_abs_diff = 0.0; ///< max |psi_m1(a,b) - P(m/2; a/2, b/2)|
    int evaluations = 0;
    bool pass = false;
};

inline const std::vector<std::pair<double, double>>& chi2_grid()
{
    static const std::vector<std::pair<double, double>> g = {{0.0, 1.0},  {0.5, 2.0}, {1.0, 4.0}, {2.0, 6.0},
                                                            {3.0, 10.0}, {5.0, 15.0}, {0.1, 3.0}, {4.0, 12.0},
                                                            {8.0, 30.0}, {0.0, pos_inf}};
    return g;
}

/// s = 1 reduction against Boost's double-precision incomplete gamma.
inline Chi2Report chi2_check(int m_lo = 2, int m_hi = 20, double tol = 1e-12, const PrecisionConfig& cfg = {})
{
    Chi2Report rep;
    for (int m = m_lo; m <= m_hi; ++m)
        for (const auto& [a, b] : chi2_grid())
        {
            const double h = 0.5 * m;
            const double pb = std::isinf(b) ? 1.0 : boost::math::gamma_p(h, 0.5 * b);
            const double qa = boost::math::gamma_q(h, 0.5 * a);
            const double ref = pb - (1.0 - qa);
            const double v = psi(WishartDims{m, 1}, SpectralInterval{a, b}, cfg).p();
            rep.max_abs_diff = std::max(rep.max_abs_diff, std::abs(v - ref));
            ++rep.evaluations;
        }
    rep.pass = rep.max_abs_diff < tol;
    return rep;
}

struct NormRow
{
    int m = 0, s = 0;
    double abs_err = 0.0; ///< |psi(0, inf) - 1|
};

struct NormReport
{
    std::vector<NormRow> rows;
    double worst = 0.0;
    bool pass = false;
};

inline NormReport normalization_check(const std::vector<std::pair<int, int>>& dims, double tol = 1e-10,
                                      const PrecisionConfig& cfg = {})
{
    NormReport rep;
    for (const auto& [m, s] : dims)
    {
        const double r = normalization_residual(WishartDims{m, s}, cfg);
        NormRow row{m, s, std::abs(std::expm1(r))};
        rep.worst = std::max(rep.worst, row.abs_err);
        rep.rows.push_back(row);
    }
    rep.pass = rep.worst < tol;
    return rep;
}

struct DominanceRow
{
    RicKind kind = RicKind::symmetric;
    double x = 0.0;
    double bound = 0.0;         ///< lower bound on P{RIC <= x} (0 when vacuous)
    double empirical = 0.0;     ///< fraction of trials with RIC <= x
    double empirical_upper = 0.0; ///< upper end of the Clopper-Pearson interval
    bool ok = false;
};

struct DominanceReport
{
    long m = 0, n = 0, s = 0, trials = 0;
    std::vector<DominanceRow> rows;
    bool pass = false;
};

/// Empirical RIC CDFs (exhaustive supports) against the union lower bounds.
inline DominanceReport ric_dominance_check(long m, long n, long s, long trials, std::uint64_t seed,
                                           double ci_level = 0.99, const PrecisionConfig& cfg = {})
{
    DominanceReport rep{m, n, s, trials, {}, false};
    const std::vector<mc::RicSample> smp = mc::empirical_ric(mc::SimSpec{m, n, s, trials, seed});
    std::vector<double> lric, uric, sric;
    for (const auto& r : smp)
    {
        lric.push_back(r.lric);
        uric.push_back(r.uric);
        sric.push_back(r.sric);
    }
    const ProblemDims dims{m, n, s};
    auto add = [&](RicKind kind, const std::vector<double>& v, double x) {
        DominanceRow row;
        row.kind = kind;
        row.x = x;
        row.bound = ric_cdf_lower_bound(dims, x, kind, cfg).bound().p();
        row.empirical = mc::empirical_cdf(v, x);
        const long k = std::lround(row.empirical * trials);
        row.empirical_upper = mc::binomial_upper(k, trials, 1.0 - ci_level);
        row.ok = row.bound <= row.empirical_upper;
        rep.rows.push_back(row);
    };
    for (double x : {0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99})
        add(RicKind::lower, lric, x);
    for (double x : {0.5, 0.8, 1.0, 1.2, 1.5, 2.0, 2.5, 3.0})
        add(RicKind::upper, uric, x);
    for (double x : {0.6, 0.8, 0.9, 0.95, 0.99})
        add(RicKind::symmetric, sric, x);
    rep.pass = std::all_of(rep.rows.begin(), rep.rows.end(), [](const auto& r) { return r.ok; });
    return rep;
}

} // namespace validation
} // namespace riclim
