#pragma once
///
/// \file log_prob.hpp
///
/// Probabilities in log domain with an explicit choice of which side (p or
/// 1-p) is stored. Tail probabilities far below 1e-308 keep their exponent.
///
#include "errors.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace riclim
{

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

/// ln(1 - exp(l)) for l <= 0, accurate on both sides of -ln 2.
inline double log1m_exp(double l)
{
    if (l > 0.0)
        throw DomainError("log1m_exp: argument must be <= 0");
    if (l == 0.0)
        return neg_inf;
    if (l == neg_inf)
        return 0.0;
    return l > -M_LN2 ? std::log(-std::expm1(l)) : std::log1p(-std::exp(l));
}

/// ln(exp(a) + exp(b))
inline double log_add_exp(double a, double b)
{
    if (a == neg_inf)
        return b;
    if (b == neg_inf)
        return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

class LogProb
{
public:
    LogProb() = default;

    static LogProb zero() { return from_log(neg_inf); }
    static LogProb one() { return from_log_complement(neg_inf); }

    static LogProb from_prob(double p)
    {
        if (!(p >= 0.0 && p <= 1.0))
            throw DomainError("LogProb::from_prob: p outside [0,1]");
        return p <= 0.5 ? from_log(std::log(p)) : from_log_complement(std::log1p(-p));
    }

    /// Stores ln p.
    static LogProb from_log(double log_p)
    {
        check(log_p);
        return LogProb(log_p, false);
    }

    /// Stores ln(1-p).
    static LogProb from_log_complement(double log_q)
    {
        check(log_q);
        return LogProb(log_q, true);
    }

    double log_value() const { return log_value_; }
    bool is_complement() const { return is_complement_; }

    double log_p() const { return is_complement_ ? log1m_exp(log_value_) : log_value_; }
    double log_q() const { return is_complement_ ? log_value_ : log1m_exp(log_value_); }
    double p() const { return std::exp(log_p()); }
    double q() const { return std::exp(log_q()); }

    /// Same probability, other representation.
    LogProb flipped() const { return is_complement_ ? from_log(log_p()) : from_log_complement(log_q()); }
    /// The event's complement: 1 - p.
    LogProb complement() const { return LogProb(log_value_, !is_complement_); }

    friend std::ostream& operator<<(std::ostream& os, const LogProb& lp)
    {
        return os << (lp.is_complement_ ? "LogProb{ln(1-p)=" : "LogProb{ln p=") << lp.log_value_ << "}";
    }

private:
    LogProb(double v, bool c) : log_value_(v), is_complement_(c) {}

    static void check(double l)
    {
        if (std::isnan(l) || l > 0.0)
            throw DomainError("LogProb: log value must be <= 0");
    }

    double log_value_ = neg_inf;
    bool is_complement_ = false;
};

} // namespace riclim
