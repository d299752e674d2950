#pragma once
///
/// \file precision.hpp
///
/// Precision configuration and the doubling protocol: evaluate at B bits and
/// at 2B bits, accept when the two agree to rel_tol, otherwise keep doubling up
/// to max_mantissa_bits.
///
#include "errors.hpp"

#include <cmath>
#include <cstdlib>
#include <optional>
#include <string>

namespace riclim
{

struct PrecisionConfig
{
    long mantissa_bits = 256;
    long max_mantissa_bits = 8192;
    double rel_tol = 1e-12;

    void validate() const
    {
        if (mantissa_bits < 64)
            throw DomainError("PrecisionConfig: mantissa_bits must be >= 64");
        if (max_mantissa_bits < mantissa_bits)
            throw DomainError("PrecisionConfig: max_mantissa_bits < mantissa_bits");
        if (!(rel_tol > 0.0 && rel_tol < 1.0))
            throw DomainError("PrecisionConfig: rel_tol must lie in (0,1)");
    }

    /// Smallest bits in the doubling sequence mantissa_bits * 2^k that is >= want.
    long start_bits(long want) const
    {
        long b = mantissa_bits;
        while (b < want && 2 * b <= max_mantissa_bits)
            b *= 2;
        return b;
    }

    /// Defaults, with RIC_LIMITS_MAX_BITS overriding the ceiling when set.
    static PrecisionConfig from_environment()
    {
        PrecisionConfig c;
        if (const char* env = std::getenv("RIC_LIMITS_MAX_BITS"))
        {
            char* end = nullptr;
            long v = std::strtol(env, &end, 10);
            if (end == env || *end != '\0' || v < 64)
                throw DomainError(std::string("RIC_LIMITS_MAX_BITS is not a valid bit count: ") + env);
            c.max_mantissa_bits = v;
            if (c.mantissa_bits > v)
                c.mantissa_bits = v;
        }
        return c;
    }
};

/// Outcome of one evaluation at fixed precision. `value` is a log-domain real;
/// nullopt signals that the precision was too low to produce a meaningful
/// number (e.g. a complement that came out non-positive).
using Attempt = std::optional<double>;

/// Runs `eval(bits)` through the doubling protocol. Two successive values
/// agree when |v1 - v2| <= rel_tol * max(1, |v2|). Infinite values agree only
/// with themselves.
template <typename Eval>
double adaptive_log_eval(const PrecisionConfig& cfg, long first_bits, Eval&& eval, const char* what)
{
    cfg.validate();
    long bits = cfg.start_bits(first_bits);
    Attempt prev = eval(bits);
    while (2 * bits <= cfg.max_mantissa_bits)
    {
        bits *= 2;
        Attempt cur = eval(bits);
        if (prev && cur)
        {
            const double a = *prev, b = *cur;
            if (a == b)
                return b;
            if (std::isfinite(a) && std::isfinite(b) &&
                std::abs(a - b) <= cfg.rel_tol * std::max(1.0, std::abs(b)))
                return b;
        }
        prev = cur;
    }
    throw PrecisionExhausted(std::string(what) + ": no agreement between successive precisions",
                             cfg.max_mantissa_bits);
}

} // namespace riclim
