#pragma once
///
/// \file robustness.hpp
///
/// Robustness (C1) and stability (C2) constants of quadratically constrained
/// l1 minimization under delta_s < 1/3, evaluated at RIC thresholds.
///
/// Each threshold C_i* holds with probability at least 1 - eps_i on its own;
/// nothing is claimed about the two holding jointly.
///
#include "errors.hpp"
#include "ric.hpp"
#include "types.hpp"

#include <cmath>
#include <string>

namespace riclim
{

enum class RobustConstant
{
    c1,
    c2
};

inline RobustConstant parse_constant(std::string_view s)
{
    if (s == "c1")
        return RobustConstant::c1;
    if (s == "c2")
        return RobustConstant::c2;
    throw DomainError("unknown constant: " + std::string(s));
}

namespace detail
{
inline void check_delta(double delta, const char* who)
{
    if (!(delta >= 0.0 && delta < 1.0 / 3.0))
        throw DomainError(std::string(who) + ": need 0 <= delta < 1/3, got " + std::to_string(delta));
}
} // namespace detail

/// C1 = sqrt(8(1+delta)) / (1 - 3 delta)
inline double c1(double delta)
{
    detail::check_delta(delta, "c1");
    return std::sqrt(8.0 * (1.0 + delta)) / (1.0 - 3.0 * delta);
}

/// C2 = sqrt8 [2 delta + sqrt((1 - 3 delta) delta)] / (1 - 3 delta) + 2
inline double c2(double delta)
{
    detail::check_delta(delta, "c2");
    const double d = 1.0 - 3.0 * delta;
    return std::sqrt(8.0) * (2.0 * delta + std::sqrt(d * delta)) / d + 2.0;
}

inline double robust_constant(RobustConstant which, double delta)
{
    return which == RobustConstant::c1 ? c1(delta) : c2(delta);
}

struct RobustnessThresholds
{
    double c1_star = 0.0;
    double c2_star = 0.0;
    double epsilon1 = 0.0;
    double epsilon2 = 0.0;
    double delta_star_1 = 0.0; ///< symmetric RIC threshold at epsilon1
    double delta_star_2 = 0.0; ///< symmetric RIC threshold at epsilon2
};

/// C_i* = C_i(delta*_s(m, n, eps_i)).
inline RobustnessThresholds robustness_thresholds(const ProblemDims& dims, double eps1, double eps2,
                                                  Method method = Method::eed, const PrecisionConfig& cfg = {})
{
    RobustnessThresholds out;
    out.epsilon1 = eps1;
    out.epsilon2 = eps2;
    out.delta_star_1 = ric_threshold(dims, eps1, RicKind::symmetric, method, cfg).value;
    out.delta_star_2 = eps2 == eps1 ? out.delta_star_1 : ric_threshold(dims, eps2, RicKind::symmetric, method, cfg).value;
    for (double d : {out.delta_star_1, out.delta_star_2})
        if (!(d < 1.0 / 3.0))
            throw Infeasible("robustness_thresholds: delta* = " + std::to_string(d) + " is not below 1/3; reduce s", d);
    out.c1_star = c1(out.delta_star_1);
    out.c2_star = c2(out.delta_star_2);
    return out;
}

/// C_i* at one s, or +inf when delta* >= 1/3.
inline double constant_star(long m, long n, long s, RobustConstant which, double epsilon, Method method,
                            const PrecisionConfig& cfg = {})
{
    const double d = ric_threshold(ProblemDims{m, n, s}, epsilon, RicKind::symmetric, method, cfg).value;
    return d < 1.0 / 3.0 ? robust_constant(which, d) : std::numeric_limits<double>::infinity();
}

/// Largest s with C_i(delta*_s(m, n, eps)) <= target, by ascent from s = 1.
inline long max_sparsity_for_constant(long m, long n, RobustConstant which, double target, double epsilon,
                                      Method method = Method::eed, const PrecisionConfig& cfg = {})
{
    const double floor_value = robust_constant(which, 0.0);
    if (!(target > floor_value))
        return 0;
    long s = 0;
    while (s + 1 < m && s + 1 <= n)
    {
        if (!(constant_star(m, n, s + 1, which, epsilon, method, cfg) <= target))
            break;
        ++s;
    }
    return s;
}

/// A point on the level set C_i* = level at fixed (m, s): the largest n in
/// [n_lo, n_hi] with C_i* <= level (C_i* grows with n). Returns 0 when even
/// n_lo exceeds the level.
inline long level_set_n(long m, long s, RobustConstant which, double level, double epsilon, long n_lo, long n_hi,
                        Method method = Method::eed, const PrecisionConfig& cfg = {})
{
    auto ok = [&](long n) { return constant_star(m, n, s, which, epsilon, method, cfg) <= level; };
    if (!ok(n_lo))
        return 0;
    if (ok(n_hi))
        return n_hi;
    while (n_hi - n_lo > 1)
    {
        const long mid = n_lo + (n_hi - n_lo) / 2;
        (ok(mid) ? n_lo : n_hi) = mid;
    }
    return n_lo;
}

} // namespace riclim
