#pragma once
///
/// \file numerics.hpp
///
/// Gamma-family special functions at arbitrary precision: ln Gamma, the
/// regularized incomplete gamma P(a,x) with its complement, the generalized
/// form P(a; x, y) = P(a,y) - P(a,x), the multivariate gamma and ln C(n,s).
///
#include "bigfloat.hpp"
#include "errors.hpp"
#include "log_prob.hpp"
#include "precision.hpp"

#include <cmath>
#include <vector>
#include <limits>
#include <string>

namespace riclim
{

inline constexpr double pos_inf = std::numeric_limits<double>::infinity();

enum class IncGammaMethod
{
    automatic,         ///< series for x < a+1, continued fraction otherwise
    series,            ///< lower series, valid for every x
    continued_fraction ///< Lentz continued fraction for Q, valid for x > 0
};

namespace detail
{

/// Bits added on top of the caller's precision inside kernels, absorbing the
/// cancellation in a*ln(x) - x - lnGamma(a) for large a.
inline constexpr long guard_bits = 32;

struct IncGammaPair
{
    BigFloat p; ///< P(a,x)
    BigFloat q; ///< Q(a,x) = 1 - P(a,x)
};

/// ln of x^a e^{-x} / Gamma(a), the common prefactor of the series and the
/// continued fraction.
inline BigFloat log_prefactor(const BigFloat& a, const BigFloat& x)
{
    return a * log(x) - x - lgamma(a);
}

/// Gamma(a,1) density at x: x^{a-1} e^{-x} / Gamma(a).
inline BigFloat gamma_density(const BigFloat& a, const BigFloat& x)
{
    if (x.is_inf())
        return BigFloat(x.precision());
    if (x.is_zero())
    {
        if (a > 1.0)
            return BigFloat(x.precision());
        if (a < 1.0)
            return BigFloat::infinity(x.precision());
        return BigFloat(1.0, x.precision());
    }
    return exp((a - 1.0) * log(x) - x - lgamma(a));
}

inline BigFloat inc_gamma_series(const BigFloat& a, const BigFloat& x, long bits)
{
    BigFloat ap = a;
    BigFloat del = 1.0 / a;
    BigFloat sum = del;
    BigFloat eps_big(bits);
    mpfr_set_ui_2exp(eps_big.raw(), 1, -bits, MPFR_RNDN);
    for (long n = 0; n < 10'000'000; ++n)
    {
        ap += 1.0;
        del *= x;
        del /= ap;
        sum += del;
        if (abs(del) < abs(sum) * eps_big)
            return sum * exp(log_prefactor(a, x));
    }
    throw PrecisionExhausted("incomplete gamma series did not converge", bits);
}

/// Returns Q(a,x), or NaN when the fraction fails to settle within the
/// iteration cap.
inline BigFloat inc_gamma_cf(const BigFloat& a, const BigFloat& x, long bits, long max_iter)
{
    BigFloat tiny(bits);
    mpfr_set_ui_2exp(tiny.raw(), 1, -16 * bits, MPFR_RNDN);
    BigFloat eps(bits);
    mpfr_set_ui_2exp(eps.raw(), 1, -bits, MPFR_RNDN);

    BigFloat b = x + 1.0 - a;
    BigFloat c = 1.0 / tiny;
    BigFloat d = 1.0 / b;
    BigFloat h = d;
    for (long i = 1; i <= max_iter; ++i)
    {
        const double di = static_cast<double>(i);
        BigFloat an = (a - di) * di; // -i(i-a)
        b += 2.0;
        d = an * d + b;
        if (abs(d) < tiny)
            d = tiny;
        c = b + an / c;
        if (abs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        BigFloat del = d * c;
        h *= del;
        if (abs(del - 1.0) < eps)
            return exp(log_prefactor(a, x)) * h;
    }
    BigFloat nan(bits);
    mpfr_set_nan(nan.raw());
    return nan;
}

/// P and Q at `bits` of precision (plus guard bits internally). `x` may be +inf.
inline IncGammaPair inc_gamma(const BigFloat& a_in, const BigFloat& x_in, long bits,
                              IncGammaMethod method = IncGammaMethod::automatic)
{
    if (!(a_in > 0.0))
        throw DomainError("incomplete gamma: a must be > 0");
    if (x_in.sign() < 0 || x_in.is_nan())
        throw DomainError("incomplete gamma: x must be >= 0");
    const long wb = bits + guard_bits;
    if (x_in.is_zero())
        return {BigFloat(0.0, bits), BigFloat(1.0, bits)};
    if (x_in.is_inf())
        return {BigFloat(1.0, bits), BigFloat(0.0, bits)};

    BigFloat a(wb), x(wb);
    mpfr_set(a.raw(), a_in.raw(), MPFR_RNDN);
    mpfr_set(x.raw(), x_in.raw(), MPFR_RNDN);

    const bool lower_region = x < a + 1.0;
    IncGammaPair out{BigFloat(wb), BigFloat(wb)};
    if (method == IncGammaMethod::series || (method == IncGammaMethod::automatic && lower_region))
    {
        out.p = inc_gamma_series(a, x, wb);
        out.q = 1.0 - out.p;
    }
    else
    {
        // Slow convergence near x ~ a is possible at very high precision; the
        // series is always convergent, so fall back to it with extra bits.
        const long cap = method == IncGammaMethod::continued_fraction ? 10'000'000 : 200'000;
        BigFloat q = inc_gamma_cf(a, x, wb, cap);
        if (q.is_nan())
        {
            if (method == IncGammaMethod::continued_fraction)
                throw PrecisionExhausted("incomplete gamma continued fraction did not converge", bits);
            BigFloat a2(2 * wb), x2(2 * wb);
            mpfr_set(a2.raw(), a.raw(), MPFR_RNDN);
            mpfr_set(x2.raw(), x.raw(), MPFR_RNDN);
            BigFloat p = inc_gamma_series(a2, x2, 2 * wb);
            q = 1.0 - p;
        }
        out.q = q;
        out.p = 1.0 - q;
    }
    mpfr_prec_round(out.p.raw(), bits, MPFR_RNDN);
    mpfr_prec_round(out.q.raw(), bits, MPFR_RNDN);
    return out;
}

/// P(a; x, y) = P(a,y) - P(a,x) for x <= y <= inf, and its complement
/// P(a,x) + Q(a,y), each formed without subtracting nearly equal numbers.
struct IncGammaDiff
{
    BigFloat value;
    BigFloat complement;
};

inline IncGammaDiff gen_inc_gamma(const BigFloat& a, const BigFloat& x, const BigFloat& y, long bits)
{
    if (x > y)
        throw DomainError("generalized incomplete gamma: x > y");
    IncGammaPair lo = inc_gamma(a, x, bits);
    IncGammaPair hi = inc_gamma(a, y, bits);
    // In the upper region the Q values carry full relative accuracy.
    BigFloat v = (x >= a) ? lo.q - hi.q : hi.p - lo.p;
    if (v.sign() < 0)
        v = BigFloat(bits);
    return {v, lo.p + hi.q};
}

/// P, Q and the density g at shapes a0, a0+1, ..., a0+count-1 for one x,
/// from two incomplete gamma evaluations and the shape recurrence
/// P(a+1,x) = P(a,x) - g_{a+1}(x). P runs downward and Q upward, so every
/// step adds positive terms and no relative accuracy is lost.
struct IncGammaLadder
{
    std::vector<BigFloat> p, q, g;
};

inline IncGammaLadder inc_gamma_ladder(const BigFloat& a0, int count, const BigFloat& x, long bits)
{
    IncGammaLadder out;
    if (count <= 0)
        return out;
    if (x.is_zero() || x.is_inf())
    {
        const double pv = x.is_inf() ? 1.0 : 0.0;
        out.p.assign(count, BigFloat(pv, bits));
        out.q.assign(count, BigFloat(1.0 - pv, bits));
        for (int k = 0; k < count; ++k)
            out.g.push_back(gamma_density(a0 + static_cast<double>(k), x));
        return out;
    }
    const long wb = bits + guard_bits;
    BigFloat a(wb), xx(wb);
    mpfr_set(a.raw(), a0.raw(), MPFR_RNDN);
    mpfr_set(xx.raw(), x.raw(), MPFR_RNDN);
    std::vector<BigFloat> g;
    g.reserve(count);
    g.push_back(gamma_density(a, xx));
    for (int k = 1; k < count; ++k)
        g.push_back(g.back() * xx / (a + static_cast<double>(k - 1)));

    std::vector<BigFloat> p(count, BigFloat(wb)), q(count, BigFloat(wb));
    p[count - 1] = inc_gamma(a + static_cast<double>(count - 1), xx, wb).p;
    for (int k = count - 2; k >= 0; --k)
        p[k] = p[k + 1] + g[k + 1];
    q[0] = inc_gamma(a, xx, wb).q;
    for (int k = 1; k < count; ++k)
        q[k] = q[k - 1] + g[k];

    for (int k = 0; k < count; ++k)
    {
        mpfr_prec_round(p[k].raw(), bits, MPFR_RNDN);
        mpfr_prec_round(q[k].raw(), bits, MPFR_RNDN);
        mpfr_prec_round(g[k].raw(), bits, MPFR_RNDN);
    }
    out.p = std::move(p);
    out.q = std::move(q);
    out.g = std::move(g);
    return out;
}

/// gen_inc_gamma over a ladder of shapes a0 + k; also hands back the ladders.
struct IncGammaDiffLadder
{
    std::vector<BigFloat> value;
    IncGammaLadder lo, hi;
};

inline IncGammaDiffLadder gen_inc_gamma_ladder(const BigFloat& a0, int count, const BigFloat& x, const BigFloat& y,
                                               long bits)
{
    if (x > y)
        throw DomainError("generalized incomplete gamma: x > y");
    IncGammaDiffLadder out;
    out.lo = inc_gamma_ladder(a0, count, x, bits);
    out.hi = inc_gamma_ladder(a0, count, y, bits);
    out.value.reserve(count);
    for (int k = 0; k < count; ++k)
    {
        BigFloat v = (x >= a0 + static_cast<double>(k)) ? out.lo.q[k] - out.hi.q[k] : out.hi.p[k] - out.lo.p[k];
        if (v.sign() < 0)
            v = BigFloat(bits);
        out.value.push_back(std::move(v));
    }
    return out;
}

inline BigFloat big_from(double v, long bits)
{
    if (std::isinf(v))
        return BigFloat::infinity(bits, v > 0 ? 1 : -1);
    return BigFloat(v, bits);
}

inline double safe_log(const BigFloat& v)
{
    if (v.sign() <= 0)
        return neg_inf;
    return log(v).to_double();
}

} // namespace detail

/// ln Gamma(a) for a > 0.
inline double ln_gamma(double a, const PrecisionConfig& cfg = {})
{
    if (!(a > 0.0) || !std::isfinite(a))
        throw DomainError("ln_gamma: a must be a positive finite real, got " + std::to_string(a));
    return adaptive_log_eval(
        cfg, cfg.mantissa_bits,
        [&](long bits) -> Attempt { return lgamma(BigFloat(a, bits)).to_double(); }, "ln_gamma");
}

/// Regularized lower incomplete gamma P(a,x); the smaller of p and 1-p is the
/// stored side so both stay accurate.
inline LogProb reg_inc_gamma_P(double a, double x, const PrecisionConfig& cfg = {},
                               IncGammaMethod method = IncGammaMethod::automatic)
{
    if (!(a > 0.0) || !std::isfinite(a))
        throw DomainError("reg_inc_gamma_P: a must be > 0");
    if (!(x >= 0.0))
        throw DomainError("reg_inc_gamma_P: x must be >= 0");
    if (x == 0.0)
        return LogProb::zero();
    if (std::isinf(x))
        return LogProb::one();
    bool store_complement = false;
    const double lv = adaptive_log_eval(
        cfg, cfg.mantissa_bits,
        [&](long bits) -> Attempt {
            auto r = detail::inc_gamma(BigFloat(a, bits), BigFloat(x, bits), bits, method);
            store_complement = r.p > 0.5;
            return detail::safe_log(store_complement ? r.q : r.p);
        },
        "reg_inc_gamma_P");
    return store_complement ? LogProb::from_log_complement(lv) : LogProb::from_log(lv);
}

/// P(a; x, y) = P(a,y) - P(a,x), y may be +inf.
inline LogProb gen_reg_inc_gamma(double a, double x, double y, const PrecisionConfig& cfg = {})
{
    if (!(a > 0.0) || !std::isfinite(a))
        throw DomainError("gen_reg_inc_gamma: a must be > 0");
    if (!(x >= 0.0) || std::isnan(y))
        throw DomainError("gen_reg_inc_gamma: x must be >= 0");
    if (x > y)
        throw DomainError("gen_reg_inc_gamma: x > y");
    if (x == y)
        return LogProb::zero();
    bool store_complement = false;
    const double lv = adaptive_log_eval(
        cfg, cfg.mantissa_bits,
        [&](long bits) -> Attempt {
            auto d = detail::gen_inc_gamma(BigFloat(a, bits), detail::big_from(x, bits),
                                           detail::big_from(y, bits), bits);
            store_complement = d.value > 0.5;
            return detail::safe_log(store_complement ? d.complement : d.value);
        },
        "gen_reg_inc_gamma");
    return store_complement ? LogProb::from_log_complement(lv) : LogProb::from_log(lv);
}

namespace detail
{
inline BigFloat ln_multivariate_gamma_big(int s, const BigFloat& a)
{
    const long bits = a.precision();
    BigFloat out = log(BigFloat::pi(bits)) * (static_cast<double>(s) * (s - 1) / 4.0);
    for (int i = 1; i <= s; ++i)
        out += lgamma(a - (i - 1) / 2.0);
    return out;
}
} // namespace detail

/// ln Gamma_s(a) = s(s-1)/4 ln(pi) + sum_{i=1..s} ln Gamma(a - (i-1)/2).
inline double ln_multivariate_gamma(int s, double a, const PrecisionConfig& cfg = {})
{
    if (s < 1)
        throw DomainError("ln_multivariate_gamma: s must be >= 1");
    if (!(a > (s - 1) / 2.0))
        throw DomainError("ln_multivariate_gamma: a must exceed (s-1)/2");
    return adaptive_log_eval(
        cfg, cfg.mantissa_bits,
        [&](long bits) -> Attempt { return detail::ln_multivariate_gamma_big(s, BigFloat(a, bits)).to_double(); },
        "ln_multivariate_gamma");
}

/// ln C(n, s). Symmetric in s <-> n-s by construction.
inline double ln_binomial(long n, long s, const PrecisionConfig& cfg = {})
{
    if (n < 0 || s < 0 || s > n)
        throw DomainError("ln_binomial: need 0 <= s <= n");
    const long k = std::min(s, n - s);
    if (k == 0)
        return 0.0;
    return adaptive_log_eval(
        cfg, cfg.mantissa_bits,
        [&](long bits) -> Attempt {
            BigFloat r = lgamma(BigFloat(static_cast<double>(n + 1), bits)) -
                         lgamma(BigFloat(static_cast<double>(k + 1), bits)) -
                         lgamma(BigFloat(static_cast<double>(n - k + 1), bits));
            return r.to_double();
        },
        "ln_binomial");
}

} // namespace riclim
