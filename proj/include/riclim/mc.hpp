#pragma once
///
/// \file mc.hpp
///
/// Monte Carlo oracle: extreme eigenvalues of sampled Wishart matrices and
/// brute-force RICs of small Gaussian matrices.
///
/// Trial t draws from its own generator seeded by mixing (seed, t), so the
/// output depends only on the SimSpec, not on how trials are scheduled.
///
#include "errors.hpp"
#include "numerics.hpp"
#include "types.hpp"
#include "wishart.hpp"

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/random/normal_distribution.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <thread>
#include <vector>

namespace riclim
{
namespace mc
{

/// SplitMix64: one 64-bit word of state, used both to derive per-trial seeds
/// and as the per-trial bit generator.
class SplitMix64
{
public:
    using result_type = std::uint64_t;
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()()
    {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

inline std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial, std::uint64_t attempt = 0)
{
    SplitMix64 a(seed);
    const std::uint64_t base = a();
    SplitMix64 b(base ^ (trial * 0xd1b54a32d192ed03ULL) ^ (attempt * 0x8cb92ba72f3d8dd7ULL));
    b();
    return b();
}

struct SimSpec
{
    long m = 0;
    long n = 0; ///< only used by empirical_ric
    long s = 0;
    long trials = 1;
    std::uint64_t seed = 0;
    unsigned threads = 1;

    void validate() const
    {
        if (trials < 1)
            throw DomainError("SimSpec: trials must be >= 1");
        if (s < 1 || m <= s)
            throw DomainError("SimSpec: need m > s >= 1");
    }
};

struct ExtremeEigs
{
    double lambda_min = 0.0;
    double lambda_max = 0.0;
};

struct EigSample
{
    std::vector<ExtremeEigs> values;
    long retries = 0; ///< trials redrawn after an eigensolver failure
};

namespace detail
{

template <typename Gen>
void fill_gaussian(Eigen::MatrixXd& a, Gen& gen, double sd)
{
    boost::random::normal_distribution<double> nd(0.0, sd);
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            a(i, j) = nd(gen);
}

/// Runs body(t) for t in [0, trials) on `threads` workers, static partition.
template <typename Body>
void for_trials(long trials, unsigned threads, Body&& body)
{
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::min<long>(trials, 1024))));
    if (threads == 1)
    {
        for (long t = 0; t < trials; ++t)
            body(t, 0u);
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w)
        pool.emplace_back([&, w] {
            for (long t = w; t < trials; t += threads)
                body(t, w);
        });
    for (auto& th : pool)
        th.join();
}

} // namespace detail

/// Extreme eigenvalues of G^T G for m x s Gaussian G. Entries are N(0,1/m)
/// when `normalized` (W), N(0,1) otherwise (M, unnormalized).
inline EigSample sample_extreme_eigs(const SimSpec& spec, bool normalized = true)
{
    spec.validate();
    EigSample out;
    out.values.resize(spec.trials);
    std::vector<long> retries(std::max(1u, spec.threads), 0);
    const double sd = normalized ? 1.0 / std::sqrt(static_cast<double>(spec.m)) : 1.0;
    detail::for_trials(spec.trials, spec.threads, [&](long t, unsigned w) {
        Eigen::MatrixXd g(spec.m, spec.s);
        for (std::uint64_t attempt = 0;; ++attempt)
        {
            SplitMix64 gen(trial_seed(spec.seed, static_cast<std::uint64_t>(t), attempt));
            detail::fill_gaussian(g, gen, sd);
            if (spec.s == 1)
            {
                const double v = g.col(0).squaredNorm();
                out.values[t] = {v, v};
                return;
            }
            Eigen::MatrixXd gram = g.transpose() * g;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
            if (es.info() == Eigen::Success)
            {
                out.values[t] = {es.eigenvalues()(0), es.eigenvalues()(spec.s - 1)};
                return;
            }
            ++retries[w];
        }
    });
    for (long r : retries)
        out.retries += r;
    return out;
}

/// Fraction of samples with a <= lambda_min and lambda_max <= b.
inline double empirical_psi(const std::vector<ExtremeEigs>& v, double a, double b)
{
    long hit = 0;
    for (const auto& e : v)
        hit += (a <= e.lambda_min && e.lambda_max <= b) ? 1 : 0;
    return static_cast<double>(hit) / static_cast<double>(v.size());
}

/// Binomial standard error of an empirical proportion.
inline double binomial_se(double p, long trials) { return std::sqrt(p * (1.0 - p) / static_cast<double>(trials)); }

/// Empirical q-quantile (order statistic at ceil(q N)).
inline double empirical_quantile(std::vector<double> x, double q)
{
    if (x.empty())
        throw DomainError("empirical_quantile: no samples");
    const auto k = static_cast<std::size_t>(std::clamp(std::ceil(q * x.size()) - 1.0, 0.0, x.size() - 1.0));
    std::nth_element(x.begin(), x.begin() + k, x.end());
    return x[k];
}

/// Kolmogorov-Smirnov statistic of samples against a continuous CDF.
template <typename Cdf>
double ks_statistic(std::vector<double> x, Cdf&& cdf)
{
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        const double f = cdf(x[i]);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    return d;
}

/// Asymptotic KS critical value sqrt(-ln(alpha/2)/2)/sqrt(N).
inline double ks_critical(double alpha, long n) { return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(double(n)); }

/// s = 1 check: lambda of the unnormalized M is chi-square(m).
inline double chi2_ks_statistic(const std::vector<ExtremeEigs>& v, long m)
{
    std::vector<double> x;
    x.reserve(v.size());
    for (const auto& e : v)
        x.push_back(e.lambda_max);
    boost::math::chi_squared dist(static_cast<double>(m));
    return ks_statistic(std::move(x), [&](double t) { return boost::math::cdf(dist, t); });
}

struct RicSample
{
    double lric = 0.0;
    double uric = 0.0;
    double sric = 0.0;
};

/// Exact RICs of a given matrix by enumerating every support of size s.
inline RicSample ric_of_matrix(const Eigen::MatrixXd& a, long s)
{
    const long n = a.cols();
    if (s < 1 || s > n)
        throw DomainError("ric_of_matrix: need 1 <= s <= n");
    const Eigen::MatrixXd gram = a.transpose() * a;
    std::vector<long> idx(s);
    for (long i = 0; i < s; ++i)
        idx[i] = i;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    Eigen::MatrixXd sub(s, s);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
    for (;;)
    {
        for (long i = 0; i < s; ++i)
            for (long j = 0; j < s; ++j)
                sub(i, j) = gram(idx[i], idx[j]);
        es.compute(sub, Eigen::EigenvaluesOnly);
        lo = std::min(lo, es.eigenvalues()(0));
        hi = std::max(hi, es.eigenvalues()(s - 1));
        long k = s - 1;
        while (k >= 0 && idx[k] == n - s + k)
            --k;
        if (k < 0)
            break;
        ++idx[k];
        for (long i = k + 1; i < s; ++i)
            idx[i] = idx[i - 1] + 1;
    }
    RicSample r;
    r.lric = 1.0 - lo;
    r.uric = hi - 1.0;
    r.sric = std::max(r.lric, r.uric);
    return r;
}

inline constexpr double max_supports = 1e6;

/// Per trial: A with N(0,1/m) entries, RICs over all C(n,s) supports.
inline std::vector<RicSample> empirical_ric(const SimSpec& spec)
{
    spec.validate();
    if (spec.n < spec.s)
        throw DomainError("empirical_ric: need n >= s");
    const double log_supports = ln_binomial(spec.n, spec.s);
    if (log_supports > std::log(max_supports) + 1e-9)
        throw DomainError("empirical_ric: C(n,s) = " + std::to_string(std::exp(log_supports)) +
                          " supports exceeds the exhaustive-enumeration limit of 1e6");
    std::vector<RicSample> out(spec.trials);
    const double sd = 1.0 / std::sqrt(static_cast<double>(spec.m));
    detail::for_trials(spec.trials, spec.threads, [&](long t, unsigned) {
        SplitMix64 gen(trial_seed(spec.seed, static_cast<std::uint64_t>(t)));
        Eigen::MatrixXd a(spec.m, spec.n);
        detail::fill_gaussian(a, gen, sd);
        out[t] = ric_of_matrix(a, spec.s);
    });
    return out;
}

/// Fraction of samples with value <= x.
inline double empirical_cdf(const std::vector<double>& v, double x)
{
    long k = 0;
    for (double e : v)
        k += e <= x ? 1 : 0;
    return static_cast<double>(k) / static_cast<double>(v.size());
}

/// Upper end of the two-sided (1-alpha) Clopper-Pearson interval.
inline double binomial_upper(long successes, long trials, double alpha)
{
    if (successes >= trials)
        return 1.0;
    return boost::math::ibeta_inv(static_cast<double>(successes + 1), static_cast<double>(trials - successes),
                                  1.0 - alpha / 2.0);
}

inline void write_samples_csv(std::ostream& os, const std::vector<ExtremeEigs>& v)
{
    os << "trial,lambda_min,lambda_max\n";
    os.precision(17);
    for (std::size_t t = 0; t < v.size(); ++t)
        os << t << ',' << v[t].lambda_min << ',' << v[t].lambda_max << '\n';
}

inline void write_quantiles_csv(std::ostream& os, const std::vector<ExtremeEigs>& v, const std::vector<double>& qs)
{
    std::vector<double> lo, hi;
    for (const auto& e : v)
    {
        lo.push_back(e.lambda_min);
        hi.push_back(e.lambda_max);
    }
    os << "q,lambda_min,lambda_max\n";
    os.precision(17);
    for (double q : qs)
        os << q << ',' << empirical_quantile(lo, q) << ',' << empirical_quantile(hi, q) << '\n';
}

} // namespace mc
} // namespace riclim

