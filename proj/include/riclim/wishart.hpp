#pragma once
///
/// \file wishart.hpp
///
/// Exact probability that every eigenvalue of the real Wishart matrix
/// M = G^T G (G is m x s with i.i.d. N(0,1) entries) lies in [a, b]:
///
///     psi(a, b) = K' |Pf Q(a, b)|
///
/// where Q is skew-symmetric of even order. Its entries need integrals of the
/// form  int g_{alpha_i}(x) P(alpha_j, x) dx  with g_a the Gamma(a,1) density.
/// Because P(a+1,x) = P(a,x) - g_{a+1}(x) and
///
///     int g_p g_q dx = Gamma(p+q-1) / (Gamma(p) Gamma(q) 2^{p+q-1}) P(p+q-1; 2x1, 2x2),
///
/// every integral collapses to a finite sum of incomplete gamma values, so the
/// entries are exact at any working precision. Adaptive quadrature is kept as
/// an independent second route.
///
#include "bigfloat.hpp"
#include "errors.hpp"
#include "log_prob.hpp"
#include "numerics.hpp"
#include "precision.hpp"
#include "root_finding.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace riclim
{

struct WishartDims
{
    int m = 0; ///< rows of the Gaussian factor
    int s = 0; ///< columns

    void validate() const
    {
        if (s < 1 || m <= s)
            throw DomainError("WishartDims: need m > s >= 1 (m=" + std::to_string(m) + ", s=" + std::to_string(s) +
                              ")");
    }
    double alpha() const { return (m - s - 1) / 2.0; }
    /// Order of Q: s when s is even, s+1 otherwise.
    int q_order() const { return s % 2 == 0 ? s : s + 1; }
};

/// Eigenvalue window [a, b]; b may be +infinity. a >= b is the empty event.
struct SpectralInterval
{
    double a = 0.0;
    double b = pos_inf;

    void validate() const
    {
        if (!(a >= 0.0) || std::isnan(b) || b < 0.0)
            throw DomainError("SpectralInterval: need 0 <= a and b >= 0");
    }
    bool empty() const { return !(a < b); }
    bool is_everything() const { return a == 0.0 && std::isinf(b); }
};

/// Dense skew-symmetric matrix at fixed precision.
struct QMatrix
{
    int order = 0;
    std::vector<BigFloat> entries; ///< row-major, order*order

    BigFloat& operator()(int i, int j) { return entries[static_cast<std::size_t>(i) * order + j]; }
    const BigFloat& operator()(int i, int j) const { return entries[static_cast<std::size_t>(i) * order + j]; }
};

enum class QEntryMethod
{
    recurrence, ///< closed-form telescoping sums (default)
    quadrature  ///< adaptive Gauss-Kronrod at double precision, for cross-checks
};

enum class Normalization
{
    analytic,       ///< K' from Gamma functions
    self_normalized ///< divide by |Pf Q(0, inf)|
};

struct PsiOptions
{
    QEntryMethod entries = QEntryMethod::recurrence;
    Normalization normalization = Normalization::analytic;
};

namespace detail
{

/// Everything in a Q(a,b) entry that depends on one index only, at a fixed
/// working precision. Indices below are 1-based to match alpha_i = alpha + i.
class QBuilder
{
public:
    QBuilder(const WishartDims& dims, const SpectralInterval& iv, long bits)
        : dims_(dims), bits_(bits), alpha_(dims.alpha(), bits), xa_(iv.a / 2.0, bits),
          xb_(big_from(iv.b / 2.0, bits))
    {
        const int s = dims.s;
        IncGammaDiffLadder lad = gen_inc_gamma_ladder(alpha_ + 1.0, s, xa_, xb_, bits);
        diff_.reserve(s + 1);
        dens_sum_.reserve(s + 1);
        diff_.emplace_back(bits);
        dens_sum_.emplace_back(bits);
        for (int i = 1; i <= s; ++i)
        {
            diff_.push_back(lad.value[i - 1]);
            dens_sum_.push_back(lad.lo.g[i - 1] + lad.hi.g[i - 1]);
        }
    }

    /// Recurrence route for 1 <= i < j <= s.
    BigFloat entry(int i, int j)
    {
        ensure_pair_terms();
        BigFloat acc(bits_);
        for (int k = i + 1; k <= j; ++k)
            acc += pair_term(i, k);
        return acc;
    }

    /// Fills the upper triangle row by row with running sums.
    void fill(QMatrix& q)
    {
        ensure_pair_terms();
        const int s = dims_.s;
        for (int i = 1; i <= s; ++i)
        {
            BigFloat acc(bits_);
            for (int j = i + 1; j <= s; ++j)
            {
                acc += pair_term(i, j);
                q(i - 1, j - 1) = acc;
            }
        }
    }

    const BigFloat& interval_mass(int i) const { return diff_[i]; }

private:
    // 2 J_{ik} - P(alpha_i; xa, xb) (g_{alpha_k}(xa) + g_{alpha_k}(xb)), with
    // 2 J_{ik} = w_{i+k} / (Gamma(alpha_i) Gamma(alpha_k)).
    BigFloat pair_term(int i, int k) const
    {
        BigFloat t = pair_w_[i + k] * inv_gamma_[i];
        t *= inv_gamma_[k];
        mpfr_fms(t.raw(), diff_[i].raw(), dens_sum_[k].raw(), t.raw(), MPFR_RNDN);
        return -t;
    }

    void ensure_pair_terms()
    {
        if (!pair_w_.empty())
            return;
        const int s = dims_.s;
        pair_w_.assign(2 * s + 1, BigFloat(bits_));
        inv_gamma_.assign(s + 1, BigFloat(bits_));
        // Products over up to 2s steps: carry a few extra bits.
        const long wb = bits_ + 16;
        BigFloat ig = exp(-lgamma(BigFloat(alpha_.to_double() + 1.0, wb)));
        for (int i = 1; i <= s; ++i)
        {
            if (i > 1)
                ig /= alpha_ + static_cast<double>(i - 1);
            inv_gamma_[i] = ig;
            mpfr_prec_round(inv_gamma_[i].raw(), bits_, MPFR_RNDN);
        }
        if (s < 2)
            return;
        // Shapes 2 alpha + r - 1 for r = 3 .. 2s-1; w = 2 Gamma(shape) 2^{-shape} P(shape; a, b).
        BigFloat shape0 = alpha_ * 2.0 + 2.0;
        BigFloat a_full = xa_ * 2.0;
        BigFloat b_full = xb_.is_inf() ? xb_ : xb_ * 2.0;
        IncGammaDiffLadder lad = gen_inc_gamma_ladder(shape0, 2 * s - 3, a_full, b_full, bits_);
        BigFloat sh(wb);
        mpfr_set(sh.raw(), shape0.raw(), MPFR_RNDN);
        BigFloat w = exp(lgamma(sh) - sh * BigFloat::ln2(wb));
        for (int r = 3; r <= 2 * s - 1; ++r)
        {
            if (r > 3)
            {
                w *= sh * 0.5;
                sh += 1.0;
            }
            pair_w_[r] = w * lad.value[r - 3];
            pair_w_[r] *= 2.0;
        }
    }

    WishartDims dims_;
    long bits_;
    BigFloat alpha_, xa_, xb_;
    std::vector<BigFloat> diff_, dens_sum_;
    std::vector<BigFloat> pair_w_, inv_gamma_;
};

/// Quadrature route, double precision: (P_j(b)+P_j(a)) D_i - 2 int g_i P_j.
inline double q_entry_quadrature(const WishartDims& dims, const SpectralInterval& iv, int i, int j)
{
    const double alpha = dims.alpha();
    const double ai = alpha + i, aj = alpha + j;
    const double xa = iv.a / 2.0, xb = iv.b / 2.0;
    auto P = [](double a, double x) { return std::isinf(x) ? 1.0 : boost::math::gamma_p(a, x); };
    const double lgi = std::lgamma(ai);
    auto integrand = [&](double x) {
        if (x <= 0.0)
            return 0.0;
        const double g = std::exp((ai - 1.0) * std::log(x) - x - lgi);
        return g * P(aj, x);
    };
    double err = 0.0;
    const double h = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, xa, xb, 20, 1e-14, &err);
    const double d = P(ai, xb) - P(ai, xa);
    return (P(aj, xb) + P(aj, xa)) * d - 2.0 * h;
}

struct Pfaffian
{
    BigFloat log_abs; ///< ln |Pf|, -inf when singular
    int sign = 0;     ///< -1, 0 (singular) or +1
};

/// Skew-symmetric Parlett-Reid elimination with partial pivoting. The matrix
/// is consumed; the magnitude is accumulated as a log so nothing over- or
/// underflows regardless of order.
inline Pfaffian pfaffian_inplace(QMatrix& q)
{
    const int n = q.order;
    const long bits = n > 0 ? q(0, 0).precision() : 64;
    Pfaffian out{BigFloat(bits), 1};
    if (n % 2 != 0)
        return {BigFloat::infinity(bits, -1), 0};
    if (n == 0)
        return out;

    // Only the strict upper triangle is read or written; a(r, c) for r > c
    // is -a(c, r).
    BigFloat tmp(bits), absmax(bits), cand(bits);
    std::vector<BigFloat> tau(n, BigFloat(bits));
    for (int k = 0; k + 1 < n; k += 2)
    {
        int kp = k + 1;
        mpfr_abs(absmax.raw(), q(k, k + 1).raw(), MPFR_RNDN);
        for (int i = k + 2; i < n; ++i)
        {
            mpfr_abs(cand.raw(), q(k, i).raw(), MPFR_RNDN);
            if (cand > absmax)
            {
                absmax = cand;
                kp = i;
            }
        }
        if (kp != k + 1)
        {
            // Symmetric swap of indices p = k+1 and kp within the upper triangle.
            const int p = k + 1;
            for (int c = 0; c < p; ++c)
                mpfr_swap(q(c, p).raw(), q(c, kp).raw());
            for (int c = p + 1; c < kp; ++c)
            {
                mpfr_swap(q(p, c).raw(), q(c, kp).raw());
                mpfr_neg(q(p, c).raw(), q(p, c).raw(), MPFR_RNDN);
                mpfr_neg(q(c, kp).raw(), q(c, kp).raw(), MPFR_RNDN);
            }
            for (int c = kp + 1; c < n; ++c)
                mpfr_swap(q(p, c).raw(), q(kp, c).raw());
            mpfr_neg(q(p, kp).raw(), q(p, kp).raw(), MPFR_RNDN);
            out.sign = -out.sign;
        }
        const BigFloat& piv = q(k, k + 1);
        if (piv.is_zero())
            return {BigFloat::infinity(bits, -1), 0};
        out.log_abs += log(abs(piv));
        if (piv.sign() < 0)
            out.sign = -out.sign;

        // a_ij += u_i tau_j - tau_i u_j, u = row k+1, tau = row k / pivot.
        for (int j = k + 2; j < n; ++j)
            mpfr_div(tau[j].raw(), q(k, j).raw(), piv.raw(), MPFR_RNDN);
        for (int i = k + 2; i < n; ++i)
        {
            mpfr_srcptr ti = tau[i].raw();
            mpfr_srcptr ui = q(k + 1, i).raw();
            for (int j = i + 1; j < n; ++j)
            {
                mpfr_fmms(tmp.raw(), ui, tau[j].raw(), ti, q(k + 1, j).raw(), MPFR_RNDN);
                mpfr_add(q(i, j).raw(), q(i, j).raw(), tmp.raw(), MPFR_RNDN);
            }
        }
    }
    return out;
}

/// ln K' = (s^2/2) ln pi - (sm/2) ln 2 - ln Gamma_s(m/2) - ln Gamma_s(s/2)
///         + (alpha s + s(s+1)/2) ln 2 + sum_l ln Gamma(alpha + l)
inline BigFloat ln_k_prime(const WishartDims& dims, long bits)
{
    const double m = dims.m, s = dims.s;
    const BigFloat ln_pi = log(BigFloat::pi(bits));
    const BigFloat ln2 = BigFloat::ln2(bits);
    BigFloat out = ln_pi * (s * s / 2.0);
    out -= ln2 * (s * m / 2.0);
    out -= ln_multivariate_gamma_big(dims.s, BigFloat(m / 2.0, bits));
    out -= ln_multivariate_gamma_big(dims.s, BigFloat(s / 2.0, bits));
    out += ln2 * (dims.alpha() * s + s * (s + 1) / 2.0);
    const BigFloat alpha(dims.alpha(), bits);
    for (int l = 1; l <= dims.s; ++l)
        out += lgamma(alpha + static_cast<double>(l));
    return out;
}

inline QMatrix build_q_big(const WishartDims& dims, const SpectralInterval& iv, long bits,
                           QEntryMethod method = QEntryMethod::recurrence)
{
    QMatrix q;
    q.order = dims.q_order();
    q.entries.assign(static_cast<std::size_t>(q.order) * q.order, BigFloat(bits));
    const int s = dims.s;
    QBuilder builder(dims, iv, bits);
    if (method == QEntryMethod::recurrence)
        builder.fill(q);
    else
        for (int i = 1; i <= s; ++i)
            for (int j = i + 1; j <= s; ++j)
                q(i - 1, j - 1) = BigFloat(q_entry_quadrature(dims, iv, i, j), bits);
    if (s % 2 == 1)
        for (int i = 1; i <= s; ++i)
            q(i - 1, s) = builder.interval_mass(i);
    for (int i = 0; i < q.order; ++i)
        for (int j = i + 1; j < q.order; ++j)
            q(j, i) = -q(i, j);
    return q;
}

/// ln psi at fixed precision; -inf for the empty event.
inline BigFloat log_psi_big(const WishartDims& dims, const SpectralInterval& iv, long bits, const PsiOptions& opt)
{
    if (iv.empty())
        return BigFloat::infinity(bits, -1);
    if (iv.is_everything())
        return BigFloat(bits);
    QMatrix q = build_q_big(dims, iv, bits, opt.entries);
    Pfaffian pf = pfaffian_inplace(q);
    if (pf.sign == 0)
        return BigFloat::infinity(bits, -1);
    if (opt.normalization == Normalization::analytic)
        return ln_k_prime(dims, bits) + pf.log_abs;
    QMatrix q0 = build_q_big(dims, SpectralInterval{0.0, pos_inf}, bits, QEntryMethod::recurrence);
    Pfaffian pf0 = pfaffian_inplace(q0);
    return pf.log_abs - pf0.log_abs;
}

/// Both sides (ln psi, ln(1-psi)) at fixed precision. The complement is
/// nullopt when it is not positive at this precision.
struct PsiPair
{
    double log_psi;
    std::optional<double> log_survival;
    BigFloat log_psi_big;
};

inline PsiPair psi_pair_at(const WishartDims& dims, const SpectralInterval& iv, long bits, const PsiOptions& opt)
{
    BigFloat lp = log_psi_big(dims, iv, bits, opt);
    if (lp.is_inf())
        return {neg_inf, 0.0, lp};
    BigFloat comp = -expm1(lp);
    PsiPair out{lp.to_double(), std::nullopt, lp};
    if (comp.sign() > 0)
        out.log_survival = log(comp).to_double();
    return out;
}

/// ln|v|, -inf for zero, computed without leaving big-float range.
inline double log_abs_big(const BigFloat& v) { return v.is_zero() ? neg_inf : log(abs(v)).to_double(); }

} // namespace detail

/// One upper-triangle entry q_{i,j} (1-based, i < j <= s) at the precision of
/// `cfg.mantissa_bits`, returned as a double.
inline double q_entry(const WishartDims& dims, const SpectralInterval& iv, int i, int j, const PrecisionConfig& cfg = {},
                      QEntryMethod method = QEntryMethod::recurrence)
{
    dims.validate();
    iv.validate();
    if (!(1 <= i && i < j && j <= dims.s))
        throw DomainError("q_entry: need 1 <= i < j <= s (diagonal is identically zero)");
    if (iv.empty())
        return 0.0;
    if (method == QEntryMethod::quadrature)
        return detail::q_entry_quadrature(dims, iv, i, j);
    detail::QBuilder b(dims, iv, cfg.mantissa_bits);
    return b.entry(i, j).to_double();
}

/// Full skew-symmetric Q(a,b) at cfg.mantissa_bits.
inline QMatrix build_q(const WishartDims& dims, const SpectralInterval& iv, const PrecisionConfig& cfg = {},
                       QEntryMethod method = QEntryMethod::recurrence)
{
    dims.validate();
    iv.validate();
    if (iv.empty())
    {
        QMatrix q;
        q.order = dims.q_order();
        q.entries.assign(static_cast<std::size_t>(q.order) * q.order, BigFloat(cfg.mantissa_bits));
        return q;
    }
    return detail::build_q_big(dims, iv, cfg.mantissa_bits, method);
}

/// ln |Pf(Q)| = (1/2) ln det Q. -inf when Q is singular.
inline double log_pfaffian_abs(QMatrix q)
{
    if (q.order % 2 != 0)
        throw DomainError("log_pfaffian_abs: order must be even");
    detail::Pfaffian pf = detail::pfaffian_inplace(q);
    return pf.sign == 0 ? neg_inf : pf.log_abs.to_double();
}

/// ln K' + ln|Pf Q(0, inf)|, evaluated explicitly (psi itself short-circuits
/// the full interval). Zero up to rounding when the constant is right.
inline double normalization_residual(const WishartDims& dims, const PrecisionConfig& cfg = {})
{
    dims.validate();
    return adaptive_log_eval(
        cfg, cfg.mantissa_bits,
        [&](long bits) -> Attempt {
            QMatrix q = detail::build_q_big(dims, SpectralInterval{0.0, pos_inf}, bits);
            detail::Pfaffian pf = detail::pfaffian_inplace(q);
            if (pf.sign == 0)
                return std::nullopt;
            return (detail::ln_k_prime(dims, bits) + pf.log_abs).to_double();
        },
        "normalization_residual");
}

/// P{a <= lambda_min(M), lambda_max(M) <= b}.
inline LogProb psi(const WishartDims& dims, const SpectralInterval& iv, const PrecisionConfig& cfg = {},
                   const PsiOptions& opt = {})
{
    dims.validate();
    iv.validate();
    if (iv.empty())
        return LogProb::zero();
    if (iv.is_everything())
        return LogProb::one();
    // Converge ln psi first; a low-precision look can be wildly off when the
    // Pfaffian loses many bits. The complement side is stored near one.
    const double lp = adaptive_log_eval(
        cfg, cfg.mantissa_bits,
        [&](long bits) -> Attempt {
            detail::PsiPair pr = detail::psi_pair_at(dims, iv, bits, opt);
            return pr.log_psi <= 1e-3 ? Attempt(pr.log_psi) : std::nullopt;
        },
        "psi");
    if (lp <= -M_LN2)
        return LogProb::from_log(lp);
    const double lv = adaptive_log_eval(
        cfg, cfg.mantissa_bits,
        [&](long bits) -> Attempt { return detail::psi_pair_at(dims, iv, bits, opt).log_survival; }, "psi");
    return LogProb::from_log_complement(lv);
}

/// Result of a survival evaluation that may stop early once the value is
/// certified to lie below a caller-supplied floor.
struct SurvivalEval
{
    double log_value = neg_inf; ///< ln(1 - psi); meaningful only if !below_floor
    bool below_floor = false;
};

namespace detail
{
inline SurvivalEval survival_eval(const WishartDims& dims, const SpectralInterval& iv, const PrecisionConfig& cfg,
                                  double floor_log, const PsiOptions& opt)
{
    cfg.validate();
    if (iv.is_everything())
        return {neg_inf, false};
    if (iv.empty())
        return {0.0, false};
    long want = cfg.mantissa_bits;
    const bool has_floor = std::isfinite(floor_log);
    if (has_floor)
        want = static_cast<long>(-floor_log / M_LN2) + 96;
    long bits = cfg.start_bits(want);
    // `bits` is only trusted for the floor test once it clears the floor by
    // a comfortable margin. Below the floor means |ln psi| < e^floor / 2 at
    // both precisions, with the two agreeing to e^floor / 4.
    auto floor_ok = [&](long b) { return has_floor && b >= -floor_log / M_LN2 + 64; };
    auto certified_below = [&](const PsiPair& a, const PsiPair& b) {
        return log_abs_big(a.log_psi_big) < floor_log - M_LN2 && log_abs_big(b.log_psi_big) < floor_log - M_LN2 &&
               log_abs_big(a.log_psi_big - b.log_psi_big) < floor_log - 2.0 * M_LN2;
    };

    PsiPair prev = psi_pair_at(dims, iv, bits, opt);
    while (2 * bits <= cfg.max_mantissa_bits)
    {
        const long prev_bits = bits;
        bits *= 2;
        PsiPair cur = psi_pair_at(dims, iv, bits, opt);
        const auto& a = prev.log_survival;
        const auto& b = cur.log_survival;
        if (a && b && std::abs(*a - *b) <= cfg.rel_tol * std::max(1.0, std::abs(*b)))
            return {*b, false};
        if (floor_ok(prev_bits) && certified_below(prev, cur))
            return {floor_log, true};
        prev = std::move(cur);
    }
    throw PrecisionExhausted("psi_survival: 1-psi not resolved (requested relative accuracy " +
                                 std::to_string(cfg.rel_tol) + ")",
                             cfg.max_mantissa_bits);
}
} // namespace detail

/// 1 - psi(a, b), carried as ln(1-psi) so it stays exact far below 1e-308.
inline LogProb psi_survival(const WishartDims& dims, const SpectralInterval& iv, const PrecisionConfig& cfg = {},
                            const PsiOptions& opt = {})
{
    dims.validate();
    iv.validate();
    SurvivalEval e = detail::survival_eval(dims, iv, cfg, neg_inf, opt);
    return LogProb::from_log(std::min(e.log_value, 0.0));
}

/// ln(1 - psi), stopping early (below_floor) once it is certified < floor_log.
inline SurvivalEval psi_survival_log(const WishartDims& dims, const SpectralInterval& iv, double floor_log,
                                     const PrecisionConfig& cfg = {})
{
    dims.validate();
    iv.validate();
    return detail::survival_eval(dims, iv, cfg, floor_log, {});
}

} // namespace riclim
