#pragma once
///
/// \file ric.hpp
///
/// Probability that an m x s Gaussian submatrix (entries N(0,1/m)) is well
/// conditioned, union-bound lower bounds on the RIP satisfaction probability
/// and on the CDFs of the lower/upper RICs, and the corresponding thresholds.
///
/// Everything that involves C(n,s) runs on complements in log domain: the
/// quantity 1 - epsilon/C(n,s) is never formed.
///
#include "errors.hpp"
#include "log_prob.hpp"
#include "numerics.hpp"
#include "precision.hpp"
#include "root_finding.hpp"
#include "tw.hpp"
#include "types.hpp"
#include "wishart.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

namespace riclim
{

/// n = round(m / ratio), for sweeps specified by compression ratio m/n.
inline long n_from_ratio(long m, double m_over_n)
{
    if (!(m_over_n > 0.0))
        throw DomainError("m/n must be positive");
    return std::lround(static_cast<double>(m) / m_over_n);
}

/// Exact P_sw(delta) = psi(m(1-delta), m(1+delta)).
inline LogProb psw_exact(const ProblemDims& dims, double delta, const PrecisionConfig& cfg = {})
{
    dims.validate();
    if (!(delta > 0.0 && delta < 1.0))
        throw DomainError("psw_exact: delta must lie in (0,1)");
    const double m = static_cast<double>(dims.m);
    return psi(dims.wishart(), SpectralInterval{m * (1.0 - delta), m * (1.0 + delta)}, cfg);
}

struct ConcentrationBound
{
    double value = 0.0;                ///< 1 - e_upper - e_lower, unclamped
    double log_survival = neg_inf;      ///< ln(e_upper + e_lower)
    bool vacuous = false;               ///< value <= 0
};

/// P_sw(delta) >= 1 - exp(-m/2 [(-1 - sqrt(s/m) + sqrt(1+delta))^+]^2)
///                 - exp(-m/2 [(1 - sqrt(s/m) - sqrt(1-delta))^+]^2)
inline ConcentrationBound psw_concentration_bound(const ProblemDims& dims, double delta)
{
    dims.validate();
    if (!(delta > 0.0 && delta < 1.0))
        throw DomainError("psw_concentration_bound: delta must lie in (0,1)");
    const double m = static_cast<double>(dims.m);
    const double r = std::sqrt(dims.rho());
    const double t_up = std::max(0.0, -1.0 - r + std::sqrt(1.0 + delta));
    const double t_lo = std::max(0.0, 1.0 - r - std::sqrt(1.0 - delta));
    const double l_up = -0.5 * m * t_up * t_up;
    const double l_lo = -0.5 * m * t_lo * t_lo;
    ConcentrationBound out;
    out.log_survival = log_add_exp(l_up, l_lo);
    out.value = 1.0 - std::exp(l_up) - std::exp(l_lo);
    out.vacuous = out.value <= 0.0;
    return out;
}

/// A union bound 1 - C(n,s) * (tail probability), kept as the log of the
/// subtracted term. The bound is vacuous when that term reaches one.
struct UnionBound
{
    double log_complement = neg_inf; ///< ln[C(n,s) * tail]
    Method method = Method::eed;

    bool vacuous() const { return log_complement >= 0.0; }
    /// The bound as a probability (zero when vacuous).
    LogProb bound() const
    {
        return vacuous() ? LogProb::zero() : LogProb::from_log_complement(log_complement);
    }
    double log10_complement() const { return log_complement / M_LN10; }
};

namespace detail
{

inline SpectralInterval survival_interval(RicKind kind, double m, double x)
{
    switch (kind)
    {
    case RicKind::symmetric: return {std::max(0.0, m * (1.0 - x)), m * (1.0 + x)};
    case RicKind::lower: return {std::max(0.0, m * (1.0 - x)), pos_inf};
    case RicKind::upper: return {0.0, m * (1.0 + x)};
    }
    return {};
}

/// ln P{eigenvalue event of `kind` fails at level x} for one s-column
/// submatrix, exact. Values certified below `floor_log` come back as floor_log.
inline double eed_log_survival(const ProblemDims& dims, RicKind kind, double x, const PrecisionConfig& cfg,
                               double floor_log = neg_inf)
{
    const SpectralInterval iv = survival_interval(kind, static_cast<double>(dims.m), x);
    SurvivalEval e = psi_survival_log(dims.wishart(), iv, floor_log, cfg);
    return e.below_floor ? floor_log : e.log_value;
}

/// TW counterpart of eed_log_survival.
inline double tw_log_survival(const ProblemDims& dims, RicKind kind, double x)
{
    const TWScalings sc = scalings(dims.wishart());
    const double m = static_cast<double>(dims.m);
    switch (kind)
    {
    case RicKind::symmetric: return psw_tw_log_survival(dims, x);
    case RicKind::lower:
        return x >= 1.0 ? neg_inf : tw::detail::log_ccdf((sc.v_ms - std::log(m * (1.0 - x))) / sc.tau_ms);
    case RicKind::upper: return tw::detail::log_ccdf((m * (1.0 + x) - sc.mu_ms) / sc.sigma_ms);
    }
    return 0.0;
}

} // namespace detail

/// ln of the per-support failure probability at level x, by method. The
/// concentration method only exists for the symmetric kind.
inline double log_survival(const ProblemDims& dims, RicKind kind, double x, Method method,
                           const PrecisionConfig& cfg = {})
{
    dims.validate();
    switch (method)
    {
    case Method::eed: return detail::eed_log_survival(dims, kind, x, cfg);
    case Method::tw: return detail::tw_log_survival(dims, kind, x);
    case Method::concentration:
        if (kind != RicKind::symmetric)
            throw DomainError("concentration method is defined for the symmetric RIC only");
        return psw_concentration_bound(dims, x).log_survival;
    }
    return 0.0;
}

/// beta(delta) >= 1 - C(n,s) (1 - P_sw(delta)).
inline UnionBound beta_lower_bound(const ProblemDims& dims, double delta, Method method,
                                   const PrecisionConfig& cfg = {})
{
    dims.validate();
    if (!(delta > 0.0 && delta < 1.0))
        throw DomainError("beta_lower_bound: delta must lie in (0,1)");
    UnionBound out;
    out.method = method;
    out.log_complement = ln_binomial(dims.n, dims.s, cfg) + log_survival(dims, RicKind::symmetric, delta, method, cfg);
    return out;
}

/// Lower bound on P{lric <= x} (kind lower) or P{uric <= x} (kind upper).
inline UnionBound aric_cdf_lower_bound(const ProblemDims& dims, double x, RicKind kind, const PrecisionConfig& cfg = {})
{
    dims.validate();
    if (kind == RicKind::lower && !(x > 0.0 && x < 1.0))
        throw DomainError("aric_cdf_lower_bound(lower): x must lie in (0,1)");
    if (kind == RicKind::upper && !(x > 0.0))
        throw DomainError("aric_cdf_lower_bound(upper): x must be > 0");
    UnionBound out;
    out.method = Method::eed;
    out.log_complement = ln_binomial(dims.n, dims.s, cfg) + detail::eed_log_survival(dims, kind, x, cfg);
    return out;
}

/// Same as aric_cdf_lower_bound but for the symmetric RIC (i.e. beta), so
/// all three kinds share one entry point.
inline UnionBound ric_cdf_lower_bound(const ProblemDims& dims, double x, RicKind kind, const PrecisionConfig& cfg = {})
{
    if (kind == RicKind::symmetric)
    {
        dims.validate();
        UnionBound out;
        out.log_complement = ln_binomial(dims.n, dims.s, cfg) + detail::eed_log_survival(dims, kind, x, cfg);
        return out;
    }
    return aric_cdf_lower_bound(dims, x, kind, cfg);
}

/// Exact-distribution threshold solving ln survival(x) = log_target.
inline RicThreshold eed_threshold_for_log_target(const ProblemDims& dims, double log_target, RicKind kind,
                                                 double epsilon, const PrecisionConfig& cfg = {})
{
    dims.validate();
    if (!(log_target < 0.0))
        throw DomainError("ric_threshold: epsilon/C(n,s) must be < 1");
    const double floor_log = log_target - 30.0;
    const double x_max = kind == RicKind::lower ? 1.0 - 1e-12 : 4.0;
    const double x_min = 1e-12;
    auto f = [&](double x) {
        try
        {
            return detail::eed_log_survival(dims, kind, x, cfg, floor_log) - log_target;
        }
        catch (const PrecisionExhausted& e)
        {
            throw PrecisionExhausted("ric_threshold: epsilon/C(n,s) = exp(" + std::to_string(log_target) +
                                         ") is below the reachable precision",
                                     e.max_bits());
        }
    };

    // Start from the TW estimate and grow the bracket geometrically.
    double guess = 0.3;
    try
    {
        guess = tw_threshold_for_log_target(dims, log_target, kind, epsilon).value;
    }
    catch (const std::exception&)
    {
    }
    if (!(guess > x_min && guess < x_max))
        guess = std::min(0.5, 0.5 * x_max);
    double lo = std::max(x_min, guess * 0.9), hi = std::min(x_max, guess * 1.1);
    double f_lo = f(lo), f_hi = f(hi);
    for (int it = 0; f_lo < 0.0 && lo > x_min; ++it)
    {
        hi = lo;
        f_hi = f_lo;
        lo = std::max(x_min, lo * 0.5);
        f_lo = f(lo);
    }
    for (int it = 0; f_hi > 0.0 && hi < x_max; ++it)
    {
        lo = hi;
        f_lo = f_hi;
        hi = std::min(x_max, hi + 2.0 * (hi - lo) + 0.05);
        f_hi = f(hi);
    }
    if (f_lo < 0.0 || f_hi > 0.0)
        throw BracketError("ric_threshold: threshold outside the search range", lo, hi);

    RicThreshold out;
    out.kind = kind;
    out.epsilon = epsilon;
    out.method = Method::eed;
    out.value = solve_bracketed(f, lo, hi, f_lo, f_hi, 1e-13, "ric_threshold");
    out.above_one = out.value > 1.0;
    return out;
}

/// delta* with P{RIC of `kind` <= delta*} >= 1 - epsilon.
inline RicThreshold ric_threshold(const ProblemDims& dims, double epsilon, RicKind kind, Method method,
                                  const PrecisionConfig& cfg = {})
{
    dims.validate();
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw DomainError("ric_threshold: epsilon must lie in (0,1)");
    const double log_target = std::log(epsilon) - ln_binomial(dims.n, dims.s, cfg);
    switch (method)
    {
    case Method::eed: return eed_threshold_for_log_target(dims, log_target, kind, epsilon, cfg);
    case Method::tw: return tw_threshold_for_log_target(dims, log_target, kind, epsilon);
    case Method::concentration: break;
    }
    throw DomainError("ric_threshold: method must be eed or tw");
}

} // namespace riclim
