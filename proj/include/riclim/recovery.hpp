#pragma once
///
/// \file recovery.hpp
///
/// RIC-based sufficient conditions for uniform sparse recovery and the
/// largest sparsity order they certify with a given probability.
///
/// A symmetric condition reads delta_{ks} < bound. An asymmetric condition
/// reads f(x_1, ..., x_N) < 1 where each x_i is a lower or upper RIC at order
/// k_i s and f is nondecreasing in every argument. The failure probability
/// eta is shared equally by the N one-sided events (eta/2 each for the usual
/// pair).
///
#include "errors.hpp"
#include "log_prob.hpp"
#include "ric.hpp"
#include "root_finding.hpp"
#include "types.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace riclim
{

enum class ConditionForm
{
    symmetric,
    asymmetric
};

/// One argument of an asymmetric condition: the lower or upper RIC at order
/// multiplier * s.
struct RicArgument
{
    RicKind kind = RicKind::lower;
    int multiplier = 1;
};

struct RecoveryCondition
{
    using Test = std::function<double(const std::vector<double>&)>;

    std::string name;
    ConditionForm form = ConditionForm::symmetric;
    std::string description;

    int k = 1;          ///< symmetric: order multiplier
    double bound = 0.0; ///< symmetric: delta_{ks} < bound

    std::vector<RicArgument> args; ///< asymmetric arguments
    Test f;                        ///< asymmetric test value; passes when < 1

    static RecoveryCondition symmetric(std::string name, int k, double bound, std::string description = {})
    {
        RecoveryCondition c;
        c.name = std::move(name);
        c.form = ConditionForm::symmetric;
        c.k = k;
        c.bound = bound;
        c.description = std::move(description);
        return c;
    }

    /// The two-argument class f(lric_{k1 s}, uric_{k2 s}) < 1.
    static RecoveryCondition asymmetric(std::string name, int k1, int k2, std::function<double(double, double)> f2,
                                        std::string description = {})
    {
        RecoveryCondition c;
        c.name = std::move(name);
        c.form = ConditionForm::asymmetric;
        c.args = {{RicKind::lower, k1}, {RicKind::upper, k2}};
        c.f = [f2 = std::move(f2)](const std::vector<double>& x) { return f2(x[0], x[1]); };
        c.description = std::move(description);
        return c;
    }

    /// Largest order multiplier involved.
    int max_multiplier() const
    {
        if (form == ConditionForm::symmetric)
            return k;
        int out = 1;
        for (const auto& a : args)
            out = std::max(out, a.multiplier);
        return out;
    }

    double value(const std::vector<double>& x) const
    {
        if (x.size() != args.size())
            throw DomainError("condition " + name + ": expected " + std::to_string(args.size()) + " arguments");
        return f(x);
    }

    bool passes(const std::vector<double>& x) const { return value(x) < 1.0; }
    bool passes(double delta) const { return delta < bound; }

    /// Field checks plus, for asymmetric conditions, a finite-difference
    /// monotonicity probe over [0,1)^N.
    void validate() const
    {
        if (form == ConditionForm::symmetric)
        {
            if (k < 1)
                throw DomainError("condition " + name + ": multiplier must be a positive integer");
            if (!(bound > 0.0 && bound < 1.0))
                throw DomainError("condition " + name + ": bound must lie in (0,1)");
            return;
        }
        if (args.empty() || !f)
            throw DomainError("condition " + name + ": asymmetric condition needs arguments and a test");
        for (const auto& a : args)
            if (a.multiplier < 1 || a.kind == RicKind::symmetric)
                throw DomainError("condition " + name + ": arguments must be lower/upper RICs at positive orders");
        const std::vector<double> zero(args.size(), 0.0);
        if (!(value(zero) < 1.0))
            throw DomainError("condition " + name + ": f(0,...,0) must be < 1");
        if (!probe_monotone())
            throw DomainError("condition " + name + ": f must be nondecreasing in every argument");
    }

    bool probe_monotone(int grid = 12) const
    {
        const std::size_t n = args.size();
        std::vector<int> idx(n, 0);
        const double h = 1e-4;
        for (;;)
        {
            std::vector<double> x(n);
            for (std::size_t d = 0; d < n; ++d)
                x[d] = 0.95 * idx[d] / (grid - 1);
            const double base = value(x);
            for (std::size_t d = 0; d < n; ++d)
            {
                std::vector<double> y = x;
                y[d] += h;
                const double v = value(y);
                if (std::isfinite(base) && v < base - 1e-12 * std::max(1.0, std::abs(base)))
                    return false;
            }
            std::size_t d = 0;
            while (d < n && ++idx[d] == grid)
                idx[d++] = 0;
            if (d == n)
                return true;
        }
    }
};

/// The built-in conditions, constants as published.
inline const std::vector<RecoveryCondition>& builtin_catalog()
{
    static const std::vector<RecoveryCondition> catalog = [] {
        std::vector<RecoveryCondition> c;
        c.push_back(RecoveryCondition::symmetric("ctz13", 1, 1.0 / 3.0, "l1: delta_s < 1/3"));
        c.push_back(RecoveryCondition::symmetric("fr-2s", 2, 0.6246, "l1: delta_2s < 0.6246"));
        c.push_back(RecoveryCondition::symmetric("iht-3s", 3, 0.5773, "IHT: delta_3s < 0.5773"));
        c.push_back(RecoveryCondition::symmetric("cosamp-4s", 4, 0.4782, "CoSaMP: delta_4s < 0.4782"));
        c.push_back(RecoveryCondition::symmetric("omp-13s", 13, 0.1666, "OMP: delta_13s < 0.1666"));
        c.push_back(RecoveryCondition::asymmetric(
            "ecg", 1, 1, [](double l, double u) { return 2.0 * l + u; }, "l1: 2 lric_s + uric_s < 1"));
        c.push_back(RecoveryCondition::asymmetric(
            "fl", 2, 2,
            [](double l, double u) {
                if (l >= 1.0)
                    return std::numeric_limits<double>::infinity();
                return (1.0 + std::sqrt(2.0)) / 4.0 * ((1.0 + u) / (1.0 - l) - 1.0);
            },
            "l1: (1+sqrt2)/4 ((1+uric_2s)/(1-lric_2s) - 1) < 1"));
        {
            RecoveryCondition bt;
            bt.name = "bt";
            bt.form = ConditionForm::asymmetric;
            bt.args = {{RicKind::lower, 2}, {RicKind::lower, 6}, {RicKind::upper, 6}};
            bt.f = [](const std::vector<double>& x) { return x[0] + (x[1] + x[2]) / 4.0; };
            bt.description = "l1: lric_2s + (lric_6s + uric_6s)/4 < 1";
            c.push_back(std::move(bt));
        }
        c.push_back(RecoveryCondition::asymmetric(
            "bctt", 3, 3,
            [](double l, double u) { return 2.0 * std::sqrt(2.0) * (u + l) / (2.0 + u - l); },
            "IHT: 2 sqrt2 (uric_3s + lric_3s)/(2 + uric_3s - lric_3s) < 1"));
        return c;
    }();
    return catalog;
}

inline std::optional<RecoveryCondition> find_condition(const std::string& name)
{
    for (const auto& c : builtin_catalog())
        if (c.name == name)
            return c;
    return std::nullopt;
}

inline std::vector<std::string> catalog_names()
{
    std::vector<std::string> out;
    for (const auto& c : builtin_catalog())
        out.push_back(c.name);
    return out;
}

namespace detail
{

inline void check_order(const ProblemDims& dims, long order, const std::string& who)
{
    if (order >= dims.m || order > dims.n)
        throw Infeasible(who + ": order " + std::to_string(order) + " is not below m=" + std::to_string(dims.m) +
                             " (and at most n)",
                         static_cast<double>(order));
}

/// Thresholds of every argument of an asymmetric condition at a per-event
/// failure probability exp(log_eps_each).
inline std::vector<double> condition_thresholds(const ProblemDims& dims, const RecoveryCondition& cond,
                                                double log_eps_each, Method method, const PrecisionConfig& cfg)
{
    std::vector<double> x;
    x.reserve(cond.args.size());
    for (const auto& a : cond.args)
    {
        ProblemDims d{dims.m, dims.n, dims.s * a.multiplier};
        const double log_target = log_eps_each - ln_binomial(d.n, d.s, cfg);
        const double eps = std::exp(log_eps_each);
        RicThreshold t = method == Method::tw ? tw_threshold_for_log_target(d, log_target, a.kind, eps)
                                              : eed_threshold_for_log_target(d, log_target, a.kind, eps, cfg);
        x.push_back(t.value);
    }
    return x;
}

} // namespace detail

/// Certified recovery probability P_PR >= bound. Symmetric conditions defer to
/// beta_lower_bound at order k s; asymmetric ones report 1 - eta for the
/// smallest eta (equal split across arguments) at which the test still passes.
inline UnionBound recovery_probability_bound(const ProblemDims& dims, const RecoveryCondition& cond,
                                             Method method = Method::eed, const PrecisionConfig& cfg = {})
{
    cond.validate();
    UnionBound out;
    out.method = method;
    if (dims.s == 0)
        return out;
    for (const long order : {dims.s * static_cast<long>(cond.max_multiplier())})
        detail::check_order(dims, order, "recovery_probability_bound(" + cond.name + ")");
    if (cond.form == ConditionForm::symmetric)
        return beta_lower_bound(ProblemDims{dims.m, dims.n, dims.s * cond.k}, cond.bound, method, cfg);

    const double log_n = std::log(static_cast<double>(cond.args.size()));
    // g(ln eta) = f(thresholds at eta/N) - 1, nonincreasing in eta.
    auto g = [&](double log_eta) {
        return cond.value(detail::condition_thresholds(dims, cond, log_eta - log_n, method, cfg)) - 1.0;
    };
    const double hi = -1e-9;
    const double g_hi = g(hi);
    if (g_hi >= 0.0)
    {
        out.log_complement = 0.0; // no eta < 1 works
        return out;
    }
    double lo = -8.0;
    double g_lo = g(lo);
    double top = hi, g_top = g_hi;
    while (g_lo < 0.0 && lo > -700.0)
    {
        top = lo;
        g_top = g_lo;
        lo = std::max(-700.0, lo * 2.0);
        g_lo = g(lo);
    }
    if (g_lo < 0.0)
    {
        out.log_complement = lo; // passes even at eta = e^-700
        return out;
    }
    out.log_complement = solve_bracketed(g, lo, top, g_lo, g_top, 1e-9, "recovery_probability_bound");
    return out;
}

/// Per-s record of the certification test.
struct SparsityStep
{
    long s = 0;
    bool passed = false;
    double statistic = 0.0;          ///< symmetric: ln(C * survival); asymmetric: f value
    std::vector<double> thresholds;  ///< asymmetric argument thresholds
    std::string note;                ///< why the order failed, when not a plain test failure
};

struct SparsityResult
{
    long s_star = 0;
    double eta = 0.0;
    RecoveryCondition condition;
    Method method = Method::eed;
    std::optional<SparsityStep> at_s_star;
    std::optional<SparsityStep> at_next; ///< first failing s = s_star + 1
};

/// The certification test for one s.
inline SparsityStep certify_sparsity(long m, long n, long s, double eta, const RecoveryCondition& cond, Method method,
                                     const PrecisionConfig& cfg = {})
{
    SparsityStep st;
    st.s = s;
    const long top = s * cond.max_multiplier();
    if (top >= m || top > n)
    {
        st.note = "order " + std::to_string(top) + " out of range";
        return st;
    }
    try
    {
        if (cond.form == ConditionForm::symmetric)
        {
            UnionBound b = beta_lower_bound(ProblemDims{m, n, s * cond.k}, cond.bound, method, cfg);
            st.statistic = b.log_complement;
            st.passed = b.log_complement <= std::log(eta);
        }
        else
        {
            const double log_each = std::log(eta) - std::log(static_cast<double>(cond.args.size()));
            st.thresholds = detail::condition_thresholds(ProblemDims{m, n, s}, cond, log_each, method, cfg);
            st.statistic = cond.value(st.thresholds);
            st.passed = st.statistic < 1.0;
        }
    }
    catch (const BracketError& e)
    {
        st.note = e.what();
    }
    catch (const DomainError& e)
    {
        st.note = e.what();
    }
    return st;
}

/// s* by linear ascent from s = 1; stops at the first failing s.
inline SparsityResult max_sparsity(long m, long n, double eta, const RecoveryCondition& cond, Method method = Method::eed,
                                   const PrecisionConfig& cfg = {})
{
    if (!(eta > 0.0 && eta < 1.0))
        throw DomainError("max_sparsity: eta must lie in (0,1)");
    if (method == Method::concentration && cond.form == ConditionForm::asymmetric)
        throw DomainError("max_sparsity: concentration method covers symmetric conditions only");
    cond.validate();
    SparsityResult out;
    out.eta = eta;
    out.condition = cond;
    out.method = method;
    std::optional<SparsityStep> last_pass;
    for (long s = 1;; ++s)
    {
        SparsityStep st = certify_sparsity(m, n, s, eta, cond, method, cfg);
        if (!st.passed)
        {
            out.s_star = s - 1;
            out.at_s_star = last_pass;
            out.at_next = st;
            return out;
        }
        last_pass = std::move(st);
    }
}

} // namespace riclim
