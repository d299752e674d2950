#pragma once
///
/// \file tw.hpp
///
/// Tracy-Widom (beta = 1) CCDF surrogate, Wishart edge scalings and the
/// TW-approximate RIC thresholds. Everything here runs in double precision;
/// far tails are carried as logarithms.
///
/// The bulk of TW1 is modelled as a shifted Gamma(k, theta) variable whose
/// first three moments match TW1. Beyond t_cut the CCDF follows the right-tail
/// form c exp(-2/3 t^{3/2}) t^{-3/4}, with c chosen so the two branches meet.
///
#include "errors.hpp"
#include "log_prob.hpp"
#include "numerics.hpp"
#include "root_finding.hpp"
#include "types.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>

namespace riclim
{
namespace tw
{

inline constexpr double mean = -1.2065335745820;
inline constexpr double variance = 1.6077810345810;
inline constexpr double skewness = 0.2934645240599;
inline constexpr double t_cut = 16.0;

struct GammaSurrogate
{
    double shape; ///< k = (2/skew)^2
    double scale; ///< theta = sqrt(var/k)
    double shift; ///< k*theta - mean, so TW1 ~ Gamma(k, theta) - shift

    static GammaSurrogate from_moments(double mu, double var, double skew)
    {
        const double k = (2.0 / skew) * (2.0 / skew);
        const double theta = std::sqrt(var / k);
        return {k, theta, k * theta - mu};
    }
};

inline const GammaSurrogate& surrogate()
{
    static const GammaSurrogate g = GammaSurrogate::from_moments(mean, variance, skewness);
    return g;
}

namespace detail
{
/// ln Psi from the gamma branch, valid for any t (used up to t_cut).
inline double log_ccdf_gamma(double t)
{
    const auto& g = surrogate();
    const double x = (t + g.shift) / g.scale;
    if (x <= 0.0)
        return 0.0;
    const double q = boost::math::gamma_q(g.shape, x);
    if (q > 0.5)
        return std::log1p(-boost::math::gamma_p(g.shape, x));
    return std::log(q);
}

inline double tail_log_exponent(double t) { return -(2.0 / 3.0) * std::pow(t, 1.5) - 0.75 * std::log(t); }

inline double log_tail_constant()
{
    static const double c = log_ccdf_gamma(t_cut) - tail_log_exponent(t_cut);
    return c;
}

inline double log_ccdf(double t)
{
    if (t <= t_cut)
        return log_ccdf_gamma(t);
    return log_tail_constant() + tail_log_exponent(t);
}
} // namespace detail

/// Psi_TW1(t) = P{TW1 > t}.
inline LogProb ccdf(double t)
{
    if (std::isnan(t))
        throw DomainError("tw1_ccdf: NaN argument");
    if (t == -pos_inf)
        return LogProb::one();
    if (t == pos_inf)
        return LogProb::zero();
    const double lp = std::min(detail::log_ccdf(t), 0.0);
    if (lp > -M_LN2)
    {
        // Store the CDF side directly where it is the small one.
        if (t <= t_cut)
        {
            const auto& g = surrogate();
            const double x = (t + g.shift) / g.scale;
            if (x <= 0.0)
                return LogProb::one();
            return LogProb::from_log_complement(std::log(boost::math::gamma_p(g.shape, x)));
        }
        return LogProb::from_log_complement(log1m_exp(lp));
    }
    return LogProb::from_log(lp);
}

/// Psi^{-1}: the t with Psi(t) = p, p given in log domain (down to ln p ~ -5000
/// and beyond).
inline double ccdf_inverse(const LogProb& p)
{
    const double lp = p.log_p();
    if (!(lp < 0.0) || lp == neg_inf)
        throw DomainError("tw1_ccdf_inverse: p must lie strictly inside (0,1)");
    const auto& g = surrogate();
    const bool use_cdf_side = p.is_complement() || lp > -M_LN2;
    const double lq = p.log_q();
    // Compare on the side that carries the information.
    // Clamped so an underflowed CDF near the support edge stays finite.
    auto f = [&](double t) {
        double v;
        if (use_cdf_side)
            v = lq - ccdf(t).log_q(); // increasing-in-t CDF: positive when t too small
        else
            v = detail::log_ccdf(t) - lp;
        return std::clamp(v, -1e6, 1e6);
    };
    double lo = -g.shift + 1e-12;
    double hi = std::max(t_cut, std::pow(1.5 * -lp, 2.0 / 3.0) + 10.0);
    while (f(hi) > 0.0)
        hi *= 2.0;
    return solve_bracketed(f, lo, hi, 1e-15, "tw1_ccdf_inverse");
}

} // namespace tw

/// Centering/scaling of the extreme eigenvalues of the unnormalized Wishart M.
struct TWScalings
{
    double mu_ms;
    double sigma_ms;
    double tau_ms;
    double v_ms;
    double rho;
};

inline TWScalings scalings(const WishartDims& d)
{
    d.validate();
    const double m = d.m, s = d.s;
    TWScalings out{};
    out.mu_ms = std::pow(std::sqrt(m) + std::sqrt(s), 2.0);
    out.sigma_ms = std::sqrt(out.mu_ms) * std::cbrt(1.0 / std::sqrt(s) + 1.0 / std::sqrt(m));
    const double gap = std::sqrt(m - 0.5) - std::sqrt(s - 0.5);
    out.tau_ms = std::cbrt(1.0 / std::sqrt(s - 0.5) - 1.0 / std::sqrt(m - 0.5)) / gap;
    out.v_ms = 2.0 * std::log(gap) + out.tau_ms * out.tau_ms / 8.0;
    out.rho = s / m;
    return out;
}

/// ln(1 - P~sw(delta)) = ln[Psi((v - ln(m(1-delta)))/tau) + Psi((m(1+delta) - mu)/sigma)].
/// Not clamped: the sum can exceed one for small delta.
inline double psw_tw_log_survival(const ProblemDims& dims, double delta)
{
    const TWScalings sc = scalings(dims.wishart());
    const double m = static_cast<double>(dims.m);
    const double upper = tw::detail::log_ccdf((m * (1.0 + delta) - sc.mu_ms) / sc.sigma_ms);
    double lower = neg_inf;
    if (delta < 1.0)
        lower = tw::detail::log_ccdf((sc.v_ms - std::log(m * (1.0 - delta))) / sc.tau_ms);
    return log_add_exp(lower, upper);
}

/// P~sw(delta) with its survival stored directly.
inline LogProb psw_tw_approx(const ProblemDims& dims, double delta)
{
    dims.validate();
    if (!(delta > 0.0 && delta < 1.0))
        throw DomainError("psw_tw_approx: delta must lie in (0,1)");
    return LogProb::from_log_complement(std::min(psw_tw_log_survival(dims, delta), 0.0));
}

/// TW-approximate RIC thresholds for ln(target) = ln(epsilon) - ln C(n,s).
inline RicThreshold tw_threshold_for_log_target(const ProblemDims& dims, double log_target, RicKind kind,
                                                double epsilon)
{
    dims.validate();
    const TWScalings sc = scalings(dims.wishart());
    const double m = static_cast<double>(dims.m);
    const double rho = sc.rho;
    RicThreshold out;
    out.kind = kind;
    out.epsilon = epsilon;
    out.method = Method::tw;
    if (log_target >= 0.0)
        throw DomainError("tw_threshold: epsilon/C(n,s) must be < 1");
    switch (kind)
    {
    case RicKind::upper:
    {
        const double t = tw::ccdf_inverse(LogProb::from_log(log_target));
        out.value = std::pow(m, -2.0 / 3.0) * std::pow(rho, -1.0 / 6.0) * std::pow(1.0 + std::sqrt(rho), 4.0 / 3.0) * t +
                    rho + 2.0 * std::sqrt(rho);
        break;
    }
    case RicKind::lower:
    {
        const double t = tw::ccdf_inverse(LogProb::from_log(log_target));
        out.value = 1.0 - std::exp(sc.v_ms - sc.tau_ms * t) / m;
        break;
    }
    case RicKind::symmetric:
    {
        auto f = [&](double x) { return psw_tw_log_survival(dims, x) - log_target; };
        out.value = solve_bracketed(f, 1e-12, 4.0, 1e-13, "tw_threshold(symmetric)");
        break;
    }
    }
    out.outside_tw_validity = out.value >= 1.0;
    out.above_one = out.value > 1.0;
    return out;
}

inline RicThreshold tw_thresholds(const ProblemDims& dims, double epsilon, RicKind kind)
{
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw DomainError("tw_thresholds: epsilon must lie in (0,1)");
    dims.validate();
    return tw_threshold_for_log_target(dims, std::log(epsilon) - ln_binomial(dims.n, dims.s), kind, epsilon);
}

} // namespace riclim
