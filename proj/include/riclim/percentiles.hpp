#pragma once
///
/// \file percentiles.hpp
///
/// Extreme-eigenvalue percentiles of the normalized Wishart matrix W = M/m.
///
#include "errors.hpp"
#include "root_finding.hpp"
#include "tw.hpp"
#include "wishart.hpp"

#include <algorithm>
#include <cmath>

namespace riclim
{

struct EigPercentiles
{
    double lambda_min_star = 0.0;
    double lambda_max_star = 0.0;
};

namespace detail
{

/// Grows [lo, hi] around a guess until f changes sign, then solves. f must be
/// decreasing when `decreasing`, increasing otherwise. x stays in (x_min, x_max).
template <typename F>
double solve_from_guess(F&& f, double guess, double step, bool decreasing, double x_min, double x_max, double xtol,
                        const char* what)
{
    const double sgn = decreasing ? 1.0 : -1.0;
    auto g = [&](double x) { return sgn * f(x); }; // decreasing in x
    double lo = std::max(x_min, guess - step), hi = std::min(x_max, guess + step);
    double g_lo = g(lo), g_hi = g(hi);
    while (g_lo < 0.0 && lo > x_min)
    {
        hi = lo;
        g_hi = g_lo;
        step *= 2.0;
        lo = std::max(x_min, lo - step);
        g_lo = g(lo);
    }
    while (g_hi > 0.0 && hi < x_max)
    {
        lo = hi;
        g_lo = g_hi;
        step *= 2.0;
        hi = std::min(x_max, hi + step);
        g_hi = g(hi);
    }
    return solve_bracketed(g, lo, hi, g_lo, g_hi, xtol, what);
}

} // namespace detail

/// Percentiles of the extreme eigenvalues of W = M/m:
///   P{lambda_min(W) <= lambda_min_star} = P{lambda_max(W) >= lambda_max_star} = eta.
/// The searches start from the TW estimates.
inline EigPercentiles eig_percentiles(const WishartDims& dims, double eta, const PrecisionConfig& cfg = {})
{
    dims.validate();
    if (!(eta > 0.0 && eta < 1.0))
        throw DomainError("eig_percentiles: eta must lie in (0,1)");
    const double target = std::log(eta);
    const double floor_log = target - 40.0;
    const double m = dims.m;
    const double xtol = 1e-12;

    // ln P{lambda_max(W) > x} - ln eta, decreasing in x.
    auto upper = [&](double x) {
        SurvivalEval e = psi_survival_log(dims, SpectralInterval{0.0, m * x}, floor_log, cfg);
        return (e.below_floor ? floor_log : e.log_value) - target;
    };
    // ln P{lambda_min(W) < x} - ln eta, increasing in x.
    auto lower = [&](double x) {
        SurvivalEval e = psi_survival_log(dims, SpectralInterval{m * x, pos_inf}, floor_log, cfg);
        return (e.below_floor ? floor_log : e.log_value) - target;
    };

    const TWScalings sc = scalings(dims);
    const LogProb p = eta < 0.5 ? LogProb::from_log(target) : LogProb::from_log_complement(std::log1p(-eta));
    const double t = tw::ccdf_inverse(p);
    const double max_guess = std::max(1.0, (sc.mu_ms + sc.sigma_ms * t) / m);
    const double min_guess = std::clamp(std::exp(sc.v_ms - sc.tau_ms * t) / m, 1e-9, 1.0);

    EigPercentiles out;
    out.lambda_max_star = detail::solve_from_guess(upper, max_guess, 0.02 * max_guess, true, 1e-300, 1e6, xtol,
                                                   "eig_percentiles(lambda_max)");
    out.lambda_min_star = detail::solve_from_guess(lower, min_guess, 0.02 * min_guess, false, 0.0, 1e6, xtol,
                                                   "eig_percentiles(lambda_min)");
    return out;
}

} // namespace riclim
