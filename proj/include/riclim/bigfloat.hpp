#pragma once
///
/// \file bigfloat.hpp
///
/// Thin value type over an MPFR number whose precision travels with the value.
/// Binary operations produce a result at the larger of the operand precisions,
/// so no process-wide default precision is ever consulted.
///
#include <mpfr.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>

namespace riclim
{

class BigFloat
{
public:
    using prec_t = mpfr_prec_t;

    explicit BigFloat(prec_t bits = 64)
    {
        mpfr_init2(v_, bits);
        mpfr_set_zero(v_, 1);
    }

    BigFloat(double x, prec_t bits)
    {
        mpfr_init2(v_, bits);
        mpfr_set_d(v_, x, MPFR_RNDN);
    }

    BigFloat(long x, prec_t bits)
    {
        mpfr_init2(v_, bits);
        mpfr_set_si(v_, x, MPFR_RNDN);
    }

    BigFloat(const BigFloat& o)
    {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }

    BigFloat(BigFloat&& o) noexcept
    {
        // Steal the limbs; leave `o` as a valid minimal-precision zero.
        *v_ = *o.v_;
        mpfr_init2(o.v_, MPFR_PREC_MIN);
        mpfr_set_zero(o.v_, 1);
    }

    BigFloat& operator=(const BigFloat& o)
    {
        if (this != &o)
        {
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }

    BigFloat& operator=(BigFloat&& o) noexcept
    {
        if (this != &o)
            mpfr_swap(v_, o.v_);
        return *this;
    }

    ~BigFloat() { mpfr_clear(v_); }

    prec_t precision() const { return mpfr_get_prec(v_); }
    mpfr_ptr raw() { return v_; }
    mpfr_srcptr raw() const { return v_; }

    static BigFloat infinity(prec_t bits, int sign = 1)
    {
        BigFloat r(bits);
        mpfr_set_inf(r.v_, sign);
        return r;
    }
    static BigFloat pi(prec_t bits)
    {
        BigFloat r(bits);
        mpfr_const_pi(r.v_, MPFR_RNDN);
        return r;
    }
    static BigFloat ln2(prec_t bits)
    {
        BigFloat r(bits);
        mpfr_const_log2(r.v_, MPFR_RNDN);
        return r;
    }

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    bool is_inf() const { return mpfr_inf_p(v_) != 0; }
    bool is_nan() const { return mpfr_nan_p(v_) != 0; }
    int sign() const { return mpfr_sgn(v_); }
    /// Binary exponent e with 0.5 <= |x|/2^e < 1; meaningless for zero.
    long exponent() const { return static_cast<long>(mpfr_get_exp(v_)); }

    BigFloat& operator+=(const BigFloat& o) { return apply(o, mpfr_add); }
    BigFloat& operator-=(const BigFloat& o) { return apply(o, mpfr_sub); }
    BigFloat& operator*=(const BigFloat& o) { return apply(o, mpfr_mul); }
    BigFloat& operator/=(const BigFloat& o) { return apply(o, mpfr_div); }

    BigFloat& operator+=(double d)
    {
        mpfr_add_d(v_, v_, d, MPFR_RNDN);
        return *this;
    }
    BigFloat& operator-=(double d)
    {
        mpfr_sub_d(v_, v_, d, MPFR_RNDN);
        return *this;
    }
    BigFloat& operator*=(double d)
    {
        mpfr_mul_d(v_, v_, d, MPFR_RNDN);
        return *this;
    }
    BigFloat& operator/=(double d)
    {
        mpfr_div_d(v_, v_, d, MPFR_RNDN);
        return *this;
    }

    BigFloat operator-() const
    {
        BigFloat r(precision());
        mpfr_neg(r.v_, v_, MPFR_RNDN);
        return r;
    }

    friend BigFloat operator+(BigFloat a, const BigFloat& b) { return a += b; }
    friend BigFloat operator-(BigFloat a, const BigFloat& b) { return a -= b; }
    friend BigFloat operator*(BigFloat a, const BigFloat& b) { return a *= b; }
    friend BigFloat operator/(BigFloat a, const BigFloat& b) { return a /= b; }
    friend BigFloat operator+(BigFloat a, double b) { return a += b; }
    friend BigFloat operator-(BigFloat a, double b) { return a -= b; }
    friend BigFloat operator*(BigFloat a, double b) { return a *= b; }
    friend BigFloat operator/(BigFloat a, double b) { return a /= b; }
    friend BigFloat operator+(double a, BigFloat b) { return b += a; }
    friend BigFloat operator*(double a, BigFloat b) { return b *= a; }
    friend BigFloat operator-(double a, const BigFloat& b)
    {
        BigFloat r(b.precision());
        mpfr_d_sub(r.v_, a, b.v_, MPFR_RNDN);
        return r;
    }
    friend BigFloat operator/(double a, const BigFloat& b)
    {
        BigFloat r(b.precision());
        mpfr_d_div(r.v_, a, b.v_, MPFR_RNDN);
        return r;
    }

    friend bool operator<(const BigFloat& a, const BigFloat& b) { return mpfr_less_p(a.v_, b.v_); }
    friend bool operator>(const BigFloat& a, const BigFloat& b) { return mpfr_greater_p(a.v_, b.v_); }
    friend bool operator<=(const BigFloat& a, const BigFloat& b) { return mpfr_lessequal_p(a.v_, b.v_); }
    friend bool operator>=(const BigFloat& a, const BigFloat& b) { return mpfr_greaterequal_p(a.v_, b.v_); }
    friend bool operator<(const BigFloat& a, double b) { return mpfr_cmp_d(a.v_, b) < 0; }
    friend bool operator>(const BigFloat& a, double b) { return mpfr_cmp_d(a.v_, b) > 0; }
    friend bool operator<=(const BigFloat& a, double b) { return mpfr_cmp_d(a.v_, b) <= 0; }
    friend bool operator>=(const BigFloat& a, double b) { return mpfr_cmp_d(a.v_, b) >= 0; }

    friend BigFloat exp(const BigFloat& x) { return unary(x, mpfr_exp); }
    friend BigFloat log(const BigFloat& x) { return unary(x, mpfr_log); }
    friend BigFloat log1p(const BigFloat& x) { return unary(x, mpfr_log1p); }
    friend BigFloat expm1(const BigFloat& x) { return unary(x, mpfr_expm1); }
    friend BigFloat sqrt(const BigFloat& x) { return unary(x, mpfr_sqrt); }
    friend BigFloat abs(const BigFloat& x) { return unary(x, mpfr_abs); }
    friend BigFloat lgamma(const BigFloat& x)
    {
        // mpfr_lngamma is ln|Gamma| for x > 0, which is all callers need.
        return unary(x, mpfr_lngamma);
    }
    friend BigFloat pow(const BigFloat& x, const BigFloat& y)
    {
        BigFloat r(std::max(x.precision(), y.precision()));
        mpfr_pow(r.v_, x.v_, y.v_, MPFR_RNDN);
        return r;
    }

    std::string to_string(int digits = 20) const
    {
        char* buf = nullptr;
        std::string fmt = "%." + std::to_string(digits) + "Rg";
        mpfr_asprintf(&buf, fmt.c_str(), v_);
        std::string out(buf);
        mpfr_free_str(buf);
        return out;
    }

private:
    using binop = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t);
    using unop = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t);

    BigFloat& apply(const BigFloat& o, binop f)
    {
        if (o.precision() > precision())
            mpfr_prec_round(v_, o.precision(), MPFR_RNDN);
        f(v_, v_, o.v_, MPFR_RNDN);
        return *this;
    }

    static BigFloat unary(const BigFloat& x, unop f)
    {
        BigFloat r(x.precision());
        f(r.v_, x.v_, MPFR_RNDN);
        return r;
    }

    mpfr_t v_;
};

inline BigFloat big(double x, BigFloat::prec_t bits) { return BigFloat(x, bits); }

} // namespace riclim
