#pragma once
#include <stdexcept>
#include <string>

namespace riclim
{

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// The adaptive precision protocol hit max_mantissa_bits without two
/// successive evaluations agreeing.
class PrecisionExhausted : public std::runtime_error
{
public:
    PrecisionExhausted(const std::string& what, long max_bits)
        : std::runtime_error(what + " (max_mantissa_bits=" + std::to_string(max_bits) +
                             "; raise RIC_LIMITS_MAX_BITS or --max-bits)"),
          max_bits_(max_bits)
    {
    }
    long max_bits() const { return max_bits_; }

private:
    long max_bits_;
};

/// A root search whose bracket does not straddle the target.
class BracketError : public std::runtime_error
{
public:
    BracketError(const std::string& what, double lo, double hi)
        : std::runtime_error(what + " [bracket " + std::to_string(lo) + ", " + std::to_string(hi) + "]"),
          lo_(lo),
          hi_(hi)
    {
    }
    double lo() const { return lo_; }
    double hi() const { return hi_; }

private:
    double lo_, hi_;
};

/// A requested configuration has no solution (e.g. k*s >= m, or delta* >= 1/3
/// where a robustness constant is requested).
class Infeasible : public std::runtime_error
{
public:
    Infeasible(const std::string& what, double value)
        : std::runtime_error(what), value_(value)
    {
    }
    double value() const { return value_; }

private:
    double value_;
};

} // namespace riclim
