#pragma once
///
/// \file root_finding.hpp
///
/// Bracketed root search for monotone scalar functions, plus bracket growth.
///
#include "errors.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>

namespace riclim
{

/// Root of f on [lo, hi] where f(lo) and f(hi) have opposite signs (or one is
/// zero). Terminates when the bracket width is below xtol*max(1,|x|).
template <typename F>
double solve_bracketed(F&& f, double lo, double hi, double f_lo, double f_hi, double xtol,
                       const std::string& what)
{
    if (f_lo == 0.0)
        return lo;
    if (f_hi == 0.0)
        return hi;
    if ((f_lo > 0.0) == (f_hi > 0.0))
        throw BracketError(what + ": root not bracketed", lo, hi);
    auto tol = [xtol](double a, double b) { return std::abs(b - a) <= xtol * std::max(1.0, std::abs(a)); };
    std::uintmax_t max_iter = 200;
    auto r = boost::math::tools::toms748_solve(f, lo, hi, f_lo, f_hi, tol, max_iter);
    return 0.5 * (r.first + r.second);
}

template <typename F>
double solve_bracketed(F&& f, double lo, double hi, double xtol, const std::string& what)
{
    return solve_bracketed(f, lo, hi, f(lo), f(hi), xtol, what);
}

/// Plain bisection. Used where the function is only trustworthy in sign.
template <typename F>
double bisect(F&& f, double lo, double hi, double xtol, const std::string& what)
{
    double f_lo = f(lo), f_hi = f(hi);
    if (f_lo == 0.0)
        return lo;
    if (f_hi == 0.0)
        return hi;
    if ((f_lo > 0.0) == (f_hi > 0.0))
        throw BracketError(what + ": root not bracketed", lo, hi);
    for (int it = 0; it < 400 && std::abs(hi - lo) > xtol * std::max(1.0, std::abs(lo)); ++it)
    {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0)
            return mid;
        if ((fm > 0.0) == (f_lo > 0.0))
        {
            lo = mid;
            f_lo = fm;
        }
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace riclim
