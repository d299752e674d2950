// ric-limits: command-line front end for the riclim library.
#include <riclim/riclim.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

using namespace riclim;
using json = nlohmann::ordered_json;

namespace
{

// ---------------------------------------------------------------------------
// Output

using Cell = std::variant<std::string, double, long>;

std::string format_double(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json cell_json(const Cell& c)
{
    if (auto* s = std::get_if<std::string>(&c))
        return *s;
    if (auto* l = std::get_if<long>(&c))
        return *l;
    const double d = std::get<double>(c);
    if (!std::isfinite(d))
        return format_double(d); // JSON has no inf/nan literals
    return d;
}

std::string cell_csv(const Cell& c)
{
    if (auto* s = std::get_if<std::string>(&c))
        return *s;
    if (auto* l = std::get_if<long>(&c))
        return std::to_string(*l);
    return format_double(std::get<double>(c));
}

/// A list of flat records sharing one column order.
struct Table
{
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    json extra = json::object(); ///< JSON-only metadata

    void add_row(std::vector<Cell> r) { rows.push_back(std::move(r)); }

    void write_csv(std::ostream& os) const
    {
        for (std::size_t i = 0; i < columns.size(); ++i)
            os << (i ? "," : "") << columns[i];
        os << '\n';
        for (const auto& r : rows)
        {
            for (std::size_t i = 0; i < r.size(); ++i)
                os << (i ? "," : "") << cell_csv(r[i]);
            os << '\n';
        }
    }

    json to_json() const
    {
        auto record = [&](const std::vector<Cell>& r) {
            json o = json::object();
            for (std::size_t i = 0; i < columns.size(); ++i)
                o[columns[i]] = cell_json(r[i]);
            return o;
        };
        json out;
        if (rows.size() == 1 && extra.empty())
            return record(rows[0]);
        out["rows"] = json::array();
        for (const auto& r : rows)
            out["rows"].push_back(record(r));
        for (auto it = extra.begin(); it != extra.end(); ++it)
            out[it.key()] = it.value();
        return out;
    }
};

/// A single record built column by column.
struct Record
{
    Table t;
    std::vector<Cell> row;
    void put(const std::string& k, Cell v)
    {
        t.columns.push_back(k);
        row.push_back(std::move(v));
    }
    /// Decimal (null when it underflows), log10, log10 of the complement.
    void put_prob(const std::string& k, const LogProb& p)
    {
        const double l10 = p.log_p() / M_LN10;
        const double l10c = p.log_q() / M_LN10;
        const double v = p.p();
        put(k, (v > 0.0 || p.log_p() == neg_inf) ? Cell(v) : Cell(std::string("null")));
        put(k + "_log10", l10);
        put(k + "_log10_complement", l10c);
    }
    Table done()
    {
        t.add_row(row);
        return std::move(t);
    }
};

struct OutputOptions
{
    std::string out_path;
    std::string format = "auto";
};

void emit(const Table& t, const OutputOptions& o, bool csv_default)
{
    const bool csv = o.format == "csv" || (o.format == "auto" && (csv_default || !o.out_path.empty()));
    std::ostringstream ss;
    if (csv)
        t.write_csv(ss);
    else
        ss << t.to_json().dump(2) << '\n';
    if (o.out_path.empty())
        std::cout << ss.str();
    else
    {
        std::ofstream f(o.out_path, std::ios::binary);
        if (!f)
            throw DomainError("cannot open output file " + o.out_path);
        f << ss.str();
    }
}

// ---------------------------------------------------------------------------
// Parallel map in deterministic order

template <typename F>
auto parallel_map(std::size_t count, unsigned threads, F&& f) -> std::vector<decltype(f(std::size_t{}))>
{
    using R = decltype(f(std::size_t{}));
    std::vector<std::optional<R>> tmp(count);
    std::vector<std::exception_ptr> errs(count);
    auto work = [&](std::size_t i) {
        try
        {
            tmp[i] = f(i);
        }
        catch (...)
        {
            errs[i] = std::current_exception();
        }
    };
    threads = std::max(1u, threads);
    if (threads == 1 || count < 2)
        for (std::size_t i = 0; i < count; ++i)
            work(i);
    else
    {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < threads; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < count; i += threads)
                    work(i);
            });
        for (auto& t : pool)
            t.join();
    }
    std::vector<R> out;
    for (std::size_t i = 0; i < count; ++i)
    {
        if (errs[i])
            std::rethrow_exception(errs[i]);
        out.push_back(std::move(*tmp[i]));
    }
    return out;
}

std::vector<double> linspace(double a, double b, int n)
{
    if (n < 2)
        throw DomainError("grid counts must be >= 2");
    std::vector<double> v;
    for (int i = 0; i < n; ++i)
        v.push_back(a + (b - a) * i / (n - 1));
    return v;
}

std::vector<double> logspace(double a, double b, int n)
{
    if (!(a > 0.0 && b > 0.0))
        throw DomainError("log axes need positive endpoints");
    std::vector<double> v;
    for (double t : linspace(std::log(a), std::log(b), n))
        v.push_back(std::exp(t));
    return v;
}

double parse_real(const std::string& s)
{
    if (s == "inf" || s == "+inf" || s == "infinity")
        return pos_inf;
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size())
        throw DomainError("not a number: " + s);
    return v;
}

RecoveryCondition condition_or_throw(const std::string& name)
{
    if (auto c = find_condition(name))
        return *c;
    std::string msg = "unknown condition '" + name + "'; available:";
    for (const auto& c : builtin_catalog())
        msg += "\n  " + c.name + "  " + c.description;
    throw DomainError(msg);
}

long ratio_to_n(long m, std::optional<long> n, std::optional<double> ratio, json* note = nullptr)
{
    if (n)
        return *n;
    if (!ratio)
        throw DomainError("give --n or --ratio (m/n)");
    const long nn = n_from_ratio(m, *ratio);
    if (note)
        (*note)["n_rounded_from_ratio"] = nn;
    return nn;
}

// ---------------------------------------------------------------------------
// Presets

struct SweepOptions
{
    std::string preset;
    std::string op;
    std::vector<std::string> axes;
    std::vector<std::string> sets;
    std::vector<long> ms;
    std::optional<long> n;
    std::optional<double> ratio;
    std::optional<double> eps;
    std::optional<double> eta;
    std::vector<double> ratios;
    std::vector<std::string> conditions;
    std::vector<std::string> methods;
    int count = 0;
    double lo = 0.0, hi = 0.0;
    unsigned threads = 1;
};

Table preset_fig1(const SweepOptions& o, const PrecisionConfig& cfg)
{
    const std::vector<long> ms = o.ms.empty() ? std::vector<long>{200, 300, 400} : o.ms;
    const double eta = o.eta.value_or(1e-10);
    const auto grid = linspace(o.lo > 0 ? o.lo : 0.05, o.hi > 0 ? o.hi : 0.5, o.count ? o.count : 10);
    struct Pt
    {
        long m, s;
    };
    std::vector<Pt> pts;
    for (long m : ms)
        for (double r : grid)
            pts.push_back({m, std::max(1L, std::lround(r * m))});
    auto res = parallel_map(pts.size(), o.threads, [&](std::size_t i) {
        return eig_percentiles(WishartDims{static_cast<int>(pts[i].m), static_cast<int>(pts[i].s)}, eta, cfg);
    });
    Table t{{"s_over_m", "m", "lambda_min_star", "lambda_max_star"}, {}, json::object()};
    for (std::size_t i = 0; i < pts.size(); ++i)
        t.add_row({double(pts[i].s) / pts[i].m, pts[i].m, res[i].lambda_min_star, res[i].lambda_max_star});
    return t;
}

Table preset_fig2(const SweepOptions& o, const PrecisionConfig& cfg)
{
    const long n = o.n.value_or(30000);
    const long m = n_from_ratio(n, 1.0 / o.ratio.value_or(0.4)); // m = round(ratio * n)
    const double delta = 1.0 / 3.0;
    const auto grid = linspace(o.lo > 0 ? o.lo : 1e-4, o.hi > 0 ? o.hi : 4e-3, o.count ? o.count : 12);
    const std::vector<std::string> methods =
        o.methods.empty() ? std::vector<std::string>{"eed", "tw", "concentration"} : o.methods;
    struct Pt
    {
        long s;
        Method method;
        std::string name;
    };
    std::vector<Pt> pts;
    for (double r : grid)
        for (const auto& mname : methods)
            pts.push_back({std::max(1L, std::lround(r * n)), parse_method(mname), mname});
    auto res = parallel_map(pts.size(), o.threads, [&](std::size_t i) {
        return beta_lower_bound(ProblemDims{m, n, pts[i].s}, delta, pts[i].method, cfg).log10_complement();
    });
    Table t{{"s_over_n", "method", "log10_complement_beta"}, {}, json::object()};
    for (std::size_t i = 0; i < pts.size(); ++i)
        t.add_row({double(pts[i].s) / n, pts[i].name, res[i]});
    return t;
}

/// fig3 / fig6 share a (m/n, s/m) grid.
struct PlaneGrid
{
    std::vector<double> ratios;
    std::vector<long> ss;
};

PlaneGrid plane_grid(const SweepOptions& o, long m, double s_lo, double s_hi, int s_count,
                     const std::vector<double>& default_ratios)
{
    PlaneGrid g;
    g.ratios = o.ratios.empty() ? default_ratios : o.ratios;
    std::vector<long> ss;
    for (double r : linspace(o.lo > 0 ? o.lo : s_lo, o.hi > 0 ? o.hi : s_hi, o.count ? o.count : s_count))
    {
        const long s = std::max(1L, std::lround(r * m));
        if (ss.empty() || ss.back() != s)
            ss.push_back(s);
    }
    g.ss = ss;
    return g;
}

Table preset_fig3(const SweepOptions& o, const PrecisionConfig& cfg)
{
    const long m = o.ms.empty() ? 4000 : o.ms.front();
    const double eps = o.eps.value_or(1e-3);
    const PlaneGrid g = plane_grid(o, m, 0.0025, 0.05, 6, {0.05, 0.1, 0.2, 0.4, 0.6, 0.8, 1.0});
    const std::vector<std::string> methods = o.methods.empty() ? std::vector<std::string>{"eed", "tw"} : o.methods;
    struct Pt
    {
        double ratio;
        long s;
        std::string method;
    };
    std::vector<Pt> pts;
    for (double r : g.ratios)
        for (long s : g.ss)
            for (const auto& me : methods)
                pts.push_back({r, s, me});
    auto res = parallel_map(pts.size(), o.threads, [&](std::size_t i) {
        const ProblemDims d{m, n_from_ratio(m, pts[i].ratio), pts[i].s};
        return ric_threshold(d, eps, RicKind::upper, parse_method(pts[i].method), cfg).value;
    });
    Table t{{"m_over_n", "s_over_m", "method", "uric_threshold"}, {}, json::object()};
    for (std::size_t i = 0; i < pts.size(); ++i)
        t.add_row({pts[i].ratio, double(pts[i].s) / m, pts[i].method, res[i]});
    return t;
}

Table preset_smax(const SweepOptions& o, const PrecisionConfig& cfg, double default_eta,
                  const std::vector<std::string>& default_conditions)
{
    const long m = o.ms.empty() ? 4000 : o.ms.front();
    const double eta = o.eta.value_or(default_eta);
    const std::vector<double> ratios =
        o.ratios.empty() ? std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9} : o.ratios;
    const std::vector<std::string> names = o.conditions.empty() ? default_conditions : o.conditions;
    const Method method = o.methods.empty() ? Method::eed : parse_method(o.methods.front());
    struct Pt
    {
        double ratio;
        RecoveryCondition cond;
    };
    std::vector<Pt> pts;
    for (double r : ratios)
        for (const auto& name : names)
            pts.push_back({r, condition_or_throw(name)});
    auto res = parallel_map(pts.size(), o.threads, [&](std::size_t i) {
        return max_sparsity(m, n_from_ratio(m, pts[i].ratio), eta, pts[i].cond, method, cfg).s_star;
    });
    Table t{{"m_over_n", "condition", "s_star", "s_over_m"}, {}, json::object()};
    for (std::size_t i = 0; i < pts.size(); ++i)
        t.add_row({pts[i].ratio, pts[i].cond.name, res[i], double(res[i]) / m});
    return t;
}

Table preset_fig6(const SweepOptions& o, const PrecisionConfig& cfg)
{
    const long m = o.ms.empty() ? 20000 : o.ms.front();
    const double eps = o.eps.value_or(1e-3);
    const PlaneGrid g = plane_grid(o, m, 5e-5, 1e-3, 6, {0.05, 0.1, 0.2, 0.4, 0.6, 0.8, 1.0});
    const Method method = o.methods.empty() ? Method::eed : parse_method(o.methods.front());
    struct Pt
    {
        double ratio;
        long s;
    };
    std::vector<Pt> pts;
    for (double r : g.ratios)
        for (long s : g.ss)
            pts.push_back({r, s});
    auto res = parallel_map(pts.size(), o.threads, [&](std::size_t i) {
        const ProblemDims d{m, n_from_ratio(m, pts[i].ratio), pts[i].s};
        const double delta = ric_threshold(d, eps, RicKind::symmetric, method, cfg).value;
        const bool ok = delta < 1.0 / 3.0;
        return std::make_pair(ok ? c1(delta) : pos_inf, ok ? c2(delta) : pos_inf);
    });
    Table t{{"m_over_n", "s_over_m", "c1_star", "c2_star"}, {}, json::object()};
    for (std::size_t i = 0; i < pts.size(); ++i)
        t.add_row({pts[i].ratio, double(pts[i].s) / m, res[i].first, res[i].second});
    return t;
}

// Generic sweep: --op with --axis name:start:stop:count[:log] and --set name=value.
struct Axis
{
    std::string name;
    std::vector<double> values;
};

Axis parse_axis(const std::string& spec)
{
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string p; std::getline(ss, p, ':');)
        parts.push_back(p);
    if (parts.size() != 4 && parts.size() != 5)
        throw DomainError("axis must be name:start:stop:count[:log|lin], got " + spec);
    const int count = std::stoi(parts[3]);
    const bool log = parts.size() == 5 && parts[4] == "log";
    if (parts.size() == 5 && parts[4] != "log" && parts[4] != "lin")
        throw DomainError("axis scale must be log or lin");
    const double a = parse_real(parts[1]), b = parse_real(parts[2]);
    return {parts[0], log ? logspace(a, b, count) : linspace(a, b, count)};
}

Table generic_sweep(const SweepOptions& o, const PrecisionConfig& cfg)
{
    if (o.axes.empty())
        throw DomainError("sweep needs --preset or at least one --axis");
    std::vector<Axis> axes;
    for (const auto& a : o.axes)
        axes.push_back(parse_axis(a));
    std::map<std::string, std::string> fixed;
    for (const auto& s : o.sets)
    {
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw DomainError("--set expects name=value, got " + s);
        fixed[s.substr(0, eq)] = s.substr(eq + 1);
    }
    static const std::vector<std::string> known = {"m",     "n",   "s",     "delta",    "eps",      "eta",
                                                   "m_over_n", "s_over_m", "s_over_n", "x"};
    for (const auto& a : axes)
        if (std::find(known.begin(), known.end(), a.name) == known.end())
            throw DomainError("unknown sweep parameter: " + a.name);

    // Cartesian product in axis order (last axis fastest).
    std::vector<std::vector<double>> pts{{}};
    for (const auto& a : axes)
    {
        std::vector<std::vector<double>> next;
        for (const auto& p : pts)
            for (double v : a.values)
            {
                auto q = p;
                q.push_back(v);
                next.push_back(q);
            }
        pts = std::move(next);
    }

    const std::string op = o.op.empty() ? "beta" : o.op;
    auto get = [&](const std::vector<double>& p, const std::string& k) -> std::optional<double> {
        for (std::size_t i = 0; i < axes.size(); ++i)
            if (axes[i].name == k)
                return p[i];
        if (auto it = fixed.find(k); it != fixed.end())
            return parse_real(it->second);
        return std::nullopt;
    };
    auto str = [&](const std::string& k, const std::string& def) {
        auto it = fixed.find(k);
        return it == fixed.end() ? def : it->second;
    };
    struct Dims3
    {
        long m, n, s;
    };
    auto dims_of = [&](const std::vector<double>& p) {
        auto m = get(p, "m");
        if (!m)
            throw DomainError("sweep: m is required");
        Dims3 d{std::lround(*m), 0, 0};
        if (auto n = get(p, "n"))
            d.n = std::lround(*n);
        else if (auto r = get(p, "m_over_n"))
            d.n = n_from_ratio(d.m, *r);
        if (auto s = get(p, "s"))
            d.s = std::lround(*s);
        else if (auto r = get(p, "s_over_m"))
            d.s = std::max(1L, std::lround(*r * d.m));
        else if (auto r = get(p, "s_over_n"))
            d.s = std::max(1L, std::lround(*r * d.n));
        return d;
    };

    Table t;
    for (const auto& a : axes)
        t.columns.push_back(a.name);
    for (const char* c : {"m", "n", "s"})
        t.columns.push_back(c);
    const Method method = parse_method(str("method", "eed"));
    const RicKind kind = parse_kind(str("kind", "symmetric"));
    std::vector<std::string> result_cols;
    if (op == "psw")
        result_cols = {"psw_log10_complement"};
    else if (op == "beta")
        result_cols = {"log10_complement_beta", "vacuous"};
    else if (op == "threshold")
        result_cols = {"threshold", "above_one"};
    else if (op == "eigq")
        result_cols = {"lambda_min_star", "lambda_max_star"};
    else if (op == "cdf")
        result_cols = {"log10_complement_bound"};
    else
        throw DomainError("sweep --op must be psw, beta, threshold, eigq or cdf");
    for (const auto& c : result_cols)
        t.columns.push_back(c);

    auto res = parallel_map(pts.size(), o.threads, [&](std::size_t i) -> std::vector<Cell> {
        const auto& p = pts[i];
        const Dims3 d = dims_of(p);
        if (op == "eigq")
        {
            const auto e = eig_percentiles(WishartDims{int(d.m), int(d.s)}, get(p, "eta").value_or(1e-10), cfg);
            return {e.lambda_min_star, e.lambda_max_star};
        }
        const ProblemDims pd{d.m, d.n, d.s};
        if (op == "psw")
        {
            const double delta = get(p, "delta").value_or(1.0 / 3.0);
            return {log_survival(pd, RicKind::symmetric, delta, method, cfg) / M_LN10};
        }
        if (op == "beta")
        {
            const auto b = beta_lower_bound(pd, get(p, "delta").value_or(1.0 / 3.0), method, cfg);
            return {b.log10_complement(), std::string(b.vacuous() ? "true" : "false")};
        }
        if (op == "cdf")
        {
            const auto x = get(p, "x");
            if (!x)
                throw DomainError("sweep --op cdf needs x");
            return {ric_cdf_lower_bound(pd, *x, kind, cfg).log10_complement()};
        }
        const auto th = ric_threshold(pd, get(p, "eps").value_or(1e-3), kind, method, cfg);
        return {th.value, std::string(th.above_one ? "true" : "false")};
    });
    for (std::size_t i = 0; i < pts.size(); ++i)
    {
        const Dims3 d = dims_of(pts[i]);
        std::vector<Cell> row;
        for (double v : pts[i])
            row.push_back(v);
        row.push_back(d.m);
        row.push_back(d.n);
        row.push_back(d.s);
        for (auto& c : res[i])
            row.push_back(c);
        t.add_row(std::move(row));
    }
    return t;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Restricted isometry constants of Gaussian matrices: exact bounds, thresholds and sweeps"};
    app.require_subcommand(1);

    long bits = 0, max_bits = 0;
    double rel_tol = 0.0;
    OutputOptions out;
    app.add_option("--bits", bits, "Starting mantissa bits (default 256)");
    app.add_option("--max-bits", max_bits, "Maximum mantissa bits (default 8192, or RIC_LIMITS_MAX_BITS)");
    app.add_option("--rel-tol", rel_tol, "Relative agreement tolerance (default 1e-12)");
    app.add_option("--out", out.out_path, "Write CSV to this file instead of JSON to stdout");
    app.add_option("--format", out.format, "auto, json or csv")->check(CLI::IsMember({"auto", "json", "csv"}));

    // Shared problem options.
    long m = 0, s = 0;
    std::optional<long> n;
    std::optional<double> ratio;
    std::string a_str = "0", b_str = "inf", kind = "symmetric", method = "eed", condition, which = "c1";
    double delta = 1.0 / 3.0, eps = 1e-2, eta = 1e-3, eps2 = -1.0, target = 0.0;
    long trials = 0;
    std::uint64_t seed = 7;
    std::string suite;
    bool list = false;

    auto add_mns = [&](CLI::App* c, bool need_n) {
        c->add_option("--m", m, "Number of measurements")->required();
        c->add_option("--s", s, "Sparsity order")->required();
        if (need_n)
        {
            c->add_option("--n", n, "Signal dimension");
            c->add_option("--ratio", ratio, "Compression ratio m/n (n rounded to nearest)");
        }
    };

    auto* cmd_psi = app.add_subcommand("psi", "P{a <= lambda_min(M), lambda_max(M) <= b}, M = unnormalized Wishart");
    add_mns(cmd_psi, false);
    cmd_psi->add_option("--a", a_str, "Lower edge (default 0)");
    cmd_psi->add_option("--b", b_str, "Upper edge (default inf)");

    auto* cmd_psw = app.add_subcommand("psw", "Probability that an s-column submatrix is well conditioned");
    add_mns(cmd_psw, true);
    cmd_psw->add_option("--delta", delta, "Isometry constant");
    cmd_psw->add_option("--method", method, "eed, tw or concentration");

    auto* cmd_beta = app.add_subcommand("beta", "Union lower bound on P{RIC <= delta}");
    add_mns(cmd_beta, true);
    cmd_beta->add_option("--delta", delta, "Isometry constant");
    cmd_beta->add_option("--method", method, "eed, tw or concentration");

    auto* cmd_thr = app.add_subcommand("threshold", "RIC threshold not exceeded with probability >= 1 - eps");
    add_mns(cmd_thr, true);
    cmd_thr->add_option("--eps", eps, "Excess probability");
    cmd_thr->add_option("--kind", kind, "symmetric, lower or upper");
    cmd_thr->add_option("--method", method, "eed or tw");

    auto* cmd_eigq = app.add_subcommand("eigq", "Extreme-eigenvalue percentiles of W = M/m");
    add_mns(cmd_eigq, false);
    cmd_eigq->add_option("--eta", eta, "Exceeding probability");

    auto* cmd_smax = app.add_subcommand("smax", "Maximum sparsity order certified by a recovery condition");
    cmd_smax->add_option("--m", m, "Number of measurements");
    cmd_smax->add_option("--n", n, "Signal dimension");
    cmd_smax->add_option("--ratio", ratio, "Compression ratio m/n");
    cmd_smax->add_option("--eta", eta, "Failure probability (P_PR >= 1 - eta)");
    cmd_smax->add_option("--condition", condition, "Condition name (see --list)");
    cmd_smax->add_option("--method", method, "eed or tw");
    cmd_smax->add_flag("--list", list, "List the condition catalog");

    auto* cmd_rob = app.add_subcommand("robust", "Robustness/stability thresholds C1*, C2*");
    cmd_rob->add_option("--m", m, "Number of measurements")->required();
    cmd_rob->add_option("--s", s, "Sparsity order (omit with --target to search s*)");
    cmd_rob->add_option("--n", n, "Signal dimension");
    cmd_rob->add_option("--ratio", ratio, "Compression ratio m/n");
    cmd_rob->add_option("--eps1", eps, "Excess probability for C1 (and C2 unless --eps2)");
    cmd_rob->add_option("--eps2", eps2, "Excess probability for C2");
    cmd_rob->add_option("--method", method, "eed or tw");
    cmd_rob->add_option("--target", target, "With --which: largest s with C* <= target");
    cmd_rob->add_option("--which", which, "c1 or c2");

    auto* cmd_val = app.add_subcommand("validate", "Self-checks against Monte Carlo and identities");
    cmd_val->add_option("--suite", suite, "mc, chi2, norm or ric")->required();
    cmd_val->add_option("--m", m, "Rows");
    cmd_val->add_option("--s", s, "Columns / sparsity");
    cmd_val->add_option("--n", n, "Signal dimension (ric suite)");
    cmd_val->add_option("--trials", trials, "Monte Carlo trials");
    cmd_val->add_option("--seed", seed, "Seed");

    auto* cmd_t1 = app.add_subcommand("table1", "RIC thresholds at m=2000, s=4, eps=1e-2 (EED and TW)");
    long t1_m = 2000, t1_s = 4;
    double t1_eps = 1e-2;
    cmd_t1->add_option("--m", t1_m, "Measurements");
    cmd_t1->add_option("--s", t1_s, "Sparsity");
    cmd_t1->add_option("--eps", t1_eps, "Excess probability");

    SweepOptions sw;
    auto* cmd_sweep = app.add_subcommand("sweep", "Grid sweeps (presets fig1..fig6 or generic axes)");
    cmd_sweep->add_option("--preset", sw.preset, "fig1, fig2, fig3, fig4, fig5 or fig6");
    cmd_sweep->add_option("--op", sw.op, "Generic sweep operation: psw, beta, threshold, eigq, cdf");
    cmd_sweep->add_option("--axis", sw.axes, "name:start:stop:count[:log]");
    cmd_sweep->add_option("--set", sw.sets, "name=value fixed parameter (also method=, kind=)");
    cmd_sweep->add_option("--m", sw.ms, "Measurements (fig1 accepts several)");
    cmd_sweep->add_option("--n", sw.n, "Signal dimension (fig2)");
    cmd_sweep->add_option("--ratio", sw.ratio, "m/n (fig2)");
    cmd_sweep->add_option("--ratios", sw.ratios, "m/n grid (fig3..fig6)");
    cmd_sweep->add_option("--eps", sw.eps, "Excess probability");
    cmd_sweep->add_option("--eta", sw.eta, "Exceeding/failure probability");
    cmd_sweep->add_option("--conditions", sw.conditions, "Recovery conditions (fig4, fig5)");
    cmd_sweep->add_option("--methods", sw.methods, "Methods");
    cmd_sweep->add_option("--count", sw.count, "Grid points on the s axis");
    cmd_sweep->add_option("--lo", sw.lo, "Lower end of the s axis (as a ratio)");
    cmd_sweep->add_option("--hi", sw.hi, "Upper end of the s axis (as a ratio)");
    cmd_sweep->add_option("--threads", sw.threads, "Worker threads");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e)
    {
        app.exit(e);
        return 2;
    }

    try
    {
        PrecisionConfig cfg = PrecisionConfig::from_environment();
        if (bits)
            cfg.mantissa_bits = bits;
        if (max_bits)
            cfg.max_mantissa_bits = max_bits;
        if (rel_tol > 0.0)
            cfg.rel_tol = rel_tol;
        cfg.validate();

        if (cmd_psi->parsed())
        {
            const double a = parse_real(a_str), b = parse_real(b_str);
            Record r;
            r.put("m", m);
            r.put("s", s);
            r.put("a", a);
            r.put("b", b);
            r.put_prob("psi", psi(WishartDims{int(m), int(s)}, SpectralInterval{a, b}, cfg));
            emit(r.done(), out, false);
        }
        else if (cmd_psw->parsed() || cmd_beta->parsed())
        {
            json note;
            const ProblemDims d{m, ratio_to_n(m, n, ratio, &note), s};
            const Method me = parse_method(method);
            Record r;
            r.put("m", d.m);
            r.put("n", d.n);
            r.put("s", d.s);
            r.put("delta", delta);
            r.put("method", method);
            if (cmd_psw->parsed())
            {
                if (me == Method::eed)
                    r.put_prob("psw", psw_exact(d, delta, cfg));
                else if (me == Method::tw)
                    r.put_prob("psw", psw_tw_approx(d, delta));
                else
                {
                    const auto c = psw_concentration_bound(d, delta);
                    r.put("psw", c.value);
                    r.put("psw_log10_complement", c.log_survival / M_LN10);
                    r.put("vacuous", std::string(c.vacuous ? "true" : "false"));
                }
            }
            else
            {
                const auto b = beta_lower_bound(d, delta, me, cfg);
                r.put_prob("beta", b.bound());
                r.put("log10_complement_beta", b.log10_complement());
                r.put("vacuous", std::string(b.vacuous() ? "true" : "false"));
            }
            emit(r.done(), out, false);
        }
        else if (cmd_thr->parsed())
        {
            const ProblemDims d{m, ratio_to_n(m, n, ratio), s};
            const auto th = ric_threshold(d, eps, parse_kind(kind), parse_method(method), cfg);
            Record r;
            r.put("m", d.m);
            r.put("n", d.n);
            r.put("s", d.s);
            r.put("eps", eps);
            r.put("kind", std::string(to_string(th.kind)));
            r.put("method", std::string(to_string(th.method)));
            r.put("threshold", th.value);
            r.put("above_one", std::string(th.above_one ? "true" : "false"));
            r.put("outside_tw_validity", std::string(th.outside_tw_validity ? "true" : "false"));
            emit(r.done(), out, false);
        }
        else if (cmd_eigq->parsed())
        {
            const auto e = eig_percentiles(WishartDims{int(m), int(s)}, eta, cfg);
            Record r;
            r.put("m", m);
            r.put("s", s);
            r.put("eta", eta);
            r.put("lambda_min_star", e.lambda_min_star);
            r.put("lambda_max_star", e.lambda_max_star);
            emit(r.done(), out, false);
        }
        else if (cmd_smax->parsed())
        {
            if (list)
            {
                Table t{{"name", "form", "description"}, {}, json::object()};
                for (const auto& c : builtin_catalog())
                    t.add_row({c.name, std::string(c.form == ConditionForm::symmetric ? "symmetric" : "asymmetric"),
                               c.description});
                emit(t, out, false);
                return 0;
            }
            if (condition.empty())
                throw DomainError("smax: --condition is required (see --list)");
            const RecoveryCondition c = condition_or_throw(condition);
            if (m <= 0)
                throw DomainError("smax: --m is required");
            const long nn = ratio_to_n(m, n, ratio);
            const auto res = max_sparsity(m, nn, eta, c, parse_method(method), cfg);
            Record r;
            r.put("m", m);
            r.put("n", nn);
            r.put("eta", eta);
            r.put("condition", c.name);
            r.put("s_star", res.s_star);
            r.put("s_over_m", double(res.s_star) / m);
            const auto& nx = res.at_next;
            r.put("next_statistic", nx ? Cell(nx->statistic) : Cell(std::string("")));
            r.put("next_note", nx ? nx->note : std::string(""));
            emit(r.done(), out, false);
        }
        else if (cmd_rob->parsed())
        {
            const long nn = ratio_to_n(m, n, ratio);
            const Method me = parse_method(method);
            Record r;
            r.put("m", m);
            r.put("n", nn);
            if (target > 0.0)
            {
                const auto w = parse_constant(which);
                r.put("which", which);
                r.put("target", target);
                r.put("eps", eps);
                r.put("s_star", max_sparsity_for_constant(m, nn, w, target, eps, me, cfg));
            }
            else
            {
                const auto rt = robustness_thresholds(ProblemDims{m, nn, s}, eps, eps2 > 0 ? eps2 : eps, me, cfg);
                r.put("s", s);
                r.put("eps1", rt.epsilon1);
                r.put("eps2", rt.epsilon2);
                r.put("delta_star_1", rt.delta_star_1);
                r.put("delta_star_2", rt.delta_star_2);
                r.put("c1_star", rt.c1_star);
                r.put("c2_star", rt.c2_star);
            }
            emit(r.done(), out, false);
        }
        else if (cmd_val->parsed())
        {
            bool pass = false;
            Table t;
            if (suite == "mc")
            {
                const auto rep = validation::mc_grid_check(WishartDims{int(m ? m : 10), int(s ? s : 3)},
                                                           trials ? trials : 1000000, seed, 4.0, cfg);
                t.columns = {"a", "b", "psi", "psi_hat", "se", "ok"};
                for (const auto& p : rep.points)
                    t.add_row({p.a, p.b, p.psi, p.psi_hat, p.se, std::string(p.ok ? "true" : "false")});
                t.extra["suite"] = "mc";
                t.extra["m"] = rep.dims.m;
                t.extra["s"] = rep.dims.s;
                t.extra["trials"] = rep.trials;
                t.extra["seed"] = rep.seed;
                t.extra["max_abs_deviation"] = rep.max_abs_dev;
                t.extra["max_deviation_in_se"] = rep.max_dev_in_se;
                t.extra["eigensolver_retries"] = rep.retries;
                pass = rep.pass;
            }
            else if (suite == "chi2")
            {
                const auto rep = validation::chi2_check(2, 20, 1e-12, cfg);
                const long mm = m ? m : 10, tt = trials ? trials : 100000;
                const auto smp = mc::sample_extreme_eigs(mc::SimSpec{mm, 0, 1, tt, seed}, false);
                const double ks = mc::chi2_ks_statistic(smp.values, mm);
                const double crit = mc::ks_critical(0.01, tt);
                t.columns = {"check", "value", "limit"};
                t.add_row({std::string("max_abs_diff_chi2_identity"), rep.max_abs_diff, 1e-12});
                t.add_row({std::string("ks_statistic_s1"), ks, crit});
                t.extra["suite"] = "chi2";
                pass = rep.pass && ks < crit;
            }
            else if (suite == "norm")
            {
                std::vector<std::pair<int, int>> dims = {{5, 2}, {10, 3}, {20, 5}, {50, 10}, {200, 20}};
                if (m && s)
                    dims = {{int(m), int(s)}};
                const auto rep = validation::normalization_check(dims, 1e-10, cfg);
                t.columns = {"m", "s", "abs_err"};
                for (const auto& r : rep.rows)
                    t.add_row({long(r.m), long(r.s), r.abs_err});
                t.extra["suite"] = "norm";
                pass = rep.pass;
            }
            else if (suite == "ric")
            {
                const auto rep = validation::ric_dominance_check(m ? m : 10, n.value_or(18), s ? s : 2,
                                                                 trials ? trials : 200, seed, 0.99, cfg);
                t.columns = {"kind", "x", "bound", "empirical_cdf", "empirical_upper_99", "ok"};
                for (const auto& r : rep.rows)
                    t.add_row({std::string(to_string(r.kind)), r.x, r.bound, r.empirical, r.empirical_upper,
                               std::string(r.ok ? "true" : "false")});
                t.extra["suite"] = "ric";
                pass = rep.pass;
            }
            else
                throw DomainError("unknown suite: " + suite + " (mc, chi2, norm, ric)");
            t.extra["verdict"] = pass ? "PASS" : "FAIL";
            emit(t, out, false);
            std::cerr << (pass ? "PASS" : "FAIL") << " validate --suite " << suite << '\n';
            return pass ? 0 : 1;
        }
        else if (cmd_t1->parsed())
        {
            Table t{{"m_over_n", "kind", "eed", "tw"}, {}, json::object()};
            for (double r : {0.4, 0.6, 0.8})
            {
                const ProblemDims d{t1_m, n_from_ratio(t1_m, r), t1_s};
                for (RicKind k : {RicKind::upper, RicKind::lower})
                    t.add_row({r, std::string(to_string(k)), ric_threshold(d, t1_eps, k, Method::eed, cfg).value,
                               ric_threshold(d, t1_eps, k, Method::tw, cfg).value});
            }
            emit(t, out, true);
        }
        else if (cmd_sweep->parsed())
        {
            Table t;
            if (sw.preset == "fig1")
                t = preset_fig1(sw, cfg);
            else if (sw.preset == "fig2")
                t = preset_fig2(sw, cfg);
            else if (sw.preset == "fig3")
                t = preset_fig3(sw, cfg);
            else if (sw.preset == "fig4")
                t = preset_smax(sw, cfg, 1e-3, catalog_names());
            else if (sw.preset == "fig5")
                t = preset_smax(sw, cfg, 0.5, {"bt", "fr-2s"});
            else if (sw.preset == "fig6")
                t = preset_fig6(sw, cfg);
            else if (sw.preset.empty())
                t = generic_sweep(sw, cfg);
            else
                throw DomainError("unknown preset: " + sw.preset);
            emit(t, out, true);
        }
        return 0;
    }
    catch (const PrecisionExhausted& e)
    {
        std::cerr << "error: " << e.what() << "\n(raise --max-bits or RIC_LIMITS_MAX_BITS; now "
                  << e.max_bits() << ")\n";
        return 3;
    }
    catch (const DomainError& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    catch (const Infeasible& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    catch (const BracketError& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
