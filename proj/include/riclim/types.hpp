#pragma once
#include "errors.hpp"
#include "wishart.hpp"

#include <string>
#include <string_view>

namespace riclim
{

/// Measurement matrix shape m x n and sparsity order s.
struct ProblemDims
{
    long m = 0;
    long n = 0;
    long s = 0;

    /// s < m, and s <= n (n == s is the single-support case).
    void validate() const
    {
        if (s < 1 || m <= s)
            throw DomainError("ProblemDims: need m > s >= 1 (m=" + std::to_string(m) + ", s=" + std::to_string(s) + ")");
        if (n < s)
            throw DomainError("ProblemDims: need n >= s (n=" + std::to_string(n) + ", s=" + std::to_string(s) + ")");
    }
    WishartDims wishart() const { return {static_cast<int>(m), static_cast<int>(s)}; }
    double rho() const { return static_cast<double>(s) / static_cast<double>(m); }
};

enum class RicKind
{
    symmetric,
    lower,
    upper
};

enum class Method
{
    eed,          ///< exact eigenvalue distribution
    tw,           ///< Tracy-Widom approximation
    concentration ///< concentration-of-measure benchmark
};

inline std::string_view to_string(RicKind k)
{
    switch (k)
    {
    case RicKind::symmetric: return "symmetric";
    case RicKind::lower: return "lower";
    case RicKind::upper: return "upper";
    }
    return "?";
}

inline std::string_view to_string(Method m)
{
    switch (m)
    {
    case Method::eed: return "eed";
    case Method::tw: return "tw";
    case Method::concentration: return "concentration";
    }
    return "?";
}

inline RicKind parse_kind(std::string_view s)
{
    if (s == "symmetric" || s == "sym")
        return RicKind::symmetric;
    if (s == "lower")
        return RicKind::lower;
    if (s == "upper")
        return RicKind::upper;
    throw DomainError("unknown RIC kind: " + std::string(s));
}

inline Method parse_method(std::string_view s)
{
    if (s == "eed")
        return Method::eed;
    if (s == "tw")
        return Method::tw;
    if (s == "concentration")
        return Method::concentration;
    throw DomainError("unknown method: " + std::string(s));
}

/// A RIC value not exceeded with probability at least 1 - epsilon.
struct RicThreshold
{
    RicKind kind = RicKind::symmetric;
    double value = 0.0;
    double epsilon = 0.0;
    Method method = Method::eed;
    bool above_one = false;          ///< legal for upper kind; flagged
    bool outside_tw_validity = false; ///< TW value >= 1
};

} // namespace riclim
