#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "asode/analysis.hpp"
#include "asode/coefficients.hpp"
#include "asode/errors.hpp"
#include "asode/problem.hpp"
#include "asode/reference_rk.hpp"
#include "asode/stepper.hpp"

namespace asode::cli {

namespace {

// Usage problems detected after parsing (bad combinations, unreadable files).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot open '" + path + "' for writing");
    return f;
}

const std::vector<std::string> kMethods = {"asode3", "merson", "rkf45"};

// ---------------------------------------------------------------------------
// Tolerances

struct TolOptions {
    double tol = 1e-4;
    std::optional<double> atol;
    std::optional<double> rtol;
    std::string file;

    void add_to(CLI::App& cmd) {
        auto* t = cmd.add_option("--tol", tol, "Atol = Rtol for every component")->capture_default_str();
        cmd.add_option("--atol", atol, "Absolute tolerance (overrides --tol)");
        cmd.add_option("--rtol", rtol, "Relative tolerance (overrides --tol)");
        cmd.add_option("--tol-file", file,
                       "Per-component tolerances, one line per component: 'tol' or 'atol rtol'")
            ->excludes(t);
    }

    [[nodiscard]] Tolerances build(std::size_t n) const {
        if (file.empty()) return Tolerances::uniform(n, atol.value_or(tol), rtol.value_or(tol));
        std::ifstream in(file);
        if (!in) throw ConfigError("cannot read tolerance file '" + file + "'");
        Tolerances out;
        std::string line;
        while (std::getline(in, line)) {
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            std::istringstream fields(line);
            std::vector<double> vals;
            double v = 0.0;
            while (fields >> v) vals.push_back(v);
            if (!fields.eof()) throw ConfigError("tolerance file '" + file + "': unparsable line '" + line + "'");
            if (vals.empty()) continue;
            if (vals.size() > 2) throw ConfigError("tolerance file '" + file + "': expected 1 or 2 values per line");
            out.atol.push_back(atol.value_or(vals[0]));
            out.rtol.push_back(rtol.value_or(vals.size() == 2 ? vals[1] : vals[0]));
        }
        if (out.atol.size() != n) {
            throw ConfigError("tolerance file '" + file + "' has " + std::to_string(out.atol.size()) +
                              " entries, problem has " + std::to_string(n) + " components");
        }
        return out;
    }
};

// ---------------------------------------------------------------------------
// Running one method

IntegrationResult run_method(const std::string& method, const SplitProblem& p, const Tolerances& tol,
                             bool stability_control, const StepObserver& observer = {}) {
    if (method == "asode3") {
        ControllerConfig cfg;
        cfg.stability_control = stability_control;
        return integrate(p, tol, AdditiveMethod::standard(), cfg, observer);
    }
    RkConfig cfg;
    cfg.stability_control = stability_control;
    return rk_integrate(tableau_by_name(method), p, tol, cfg, observer);
}

void print_stats(std::ostream& out, const RunStatistics& s) {
    out << "phi_evals: " << s.phi_evals << '\n'
        << "g_evals: " << s.g_evals << '\n'
        << "jacobian_evals: " << s.jacobian_evals << '\n'
        << "factorizations: " << s.factorizations << '\n'
        << "linear_solves: " << s.linear_solves << '\n'
        << "steps_accepted: " << s.steps_accepted << '\n'
        << "steps_rejected: " << s.steps_rejected << '\n';
}

// ---------------------------------------------------------------------------
// solve

struct SolveOptions {
    std::string problem;
    std::string method = "asode3";
    TolOptions tol;
    bool no_stability_control = false;
    std::string trace;
    std::optional<double> t_end;
};

int cmd_solve(const SolveOptions& o, std::ostream& out) {
    SplitProblem p = builtin(o.problem);
    if (o.t_end) {
        if (!(*o.t_end >= p.t0)) throw ConfigError("--t-end must not precede the initial time");
        p.t_end = *o.t_end;
    }
    const Tolerances tol = o.tol.build(p.dimension);

    std::ofstream trace;
    StepObserver observer;
    if (!o.trace.empty()) {
        trace = open_output(o.trace);
        trace << "t,h,err,v";
        for (std::size_t i = 1; i <= p.dimension; ++i) trace << ",y" << i;
        trace << '\n';
        observer = [&trace](const TraceRow& r) {
            trace << num(r.t) << ',' << num(r.h) << ',' << num(r.err) << ',' << num(r.v);
            for (double y : r.y) trace << ',' << num(y);
            trace << '\n';
        };
    }

    const IntegrationResult res = run_method(o.method, p, tol, !o.no_stability_control, observer);
    out << "problem: " << p.name << '\n' << "method: " << o.method << '\n' << "t: " << num(res.t) << '\n';
    for (std::size_t i = 0; i < res.y.size(); ++i) out << 'y' << i + 1 << ": " << num(res.y[i]) << '\n';
    print_stats(out, res.stats);
    return kOk;
}

// ---------------------------------------------------------------------------
// bench

struct BenchOptions {
    std::string csv;
};

struct BenchCell {
    std::string problem;
    double tol = 0.0;
    std::string method;  // asode3, asode3-nosc, merson, rkf45
    std::optional<RunStatistics> stats;
    std::string failure;
};

// Fixed-step halving ratio of the global error on y' = -y at t = 1.
double halving_ratio(const ExplicitTableau& t) {
    const SplitProblem p = linear_decay();
    const double exact = std::exp(-1.0);
    const double e1 = std::abs(rk_integrate_fixed(t, p, 10).y[0] - exact);
    const double e2 = std::abs(rk_integrate_fixed(t, p, 20).y[0] - exact);
    return e1 / e2;
}

// Both comparators must be order-verified before any count is reported.
bool verify_comparators(std::ostream& err) {
    bool ok = true;
    for (const ExplicitTableau* t : {&merson_tableau(), &fehlberg_tableau()}) {
        const TableauCheck check = verify_tableau(*t);
        const double expected = std::ldexp(1.0, t->order);
        const double ratio = halving_ratio(*t);
        if (!check.ok() || std::abs(ratio / expected - 1.0) > 0.125) {
            err << "comparator '" << t->name << "' failed verification (order residual "
                << check.max_order_residual << ", halving ratio " << ratio << ")\n";
            ok = false;
        }
    }
    return ok;
}

unsigned bench_threads() {
    if (const char* env = std::getenv("ASODE_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1) throw ConfigError("ASODE_THREADS must be a positive integer");
        return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void run_cell(BenchCell& cell) {
    try {
        const SplitProblem p = builtin(cell.problem);
        const Tolerances tol = Tolerances::uniform(p.dimension, cell.tol);
        const bool nosc = cell.method == "asode3-nosc";
        cell.stats = run_method(nosc ? "asode3" : cell.method, p, tol, !nosc).stats;
    } catch (const Error& e) {
        cell.failure = e.what();
    }
}

int cmd_bench(const BenchOptions& o, std::ostream& out, std::ostream& err) {
    std::ofstream csv;
    if (!o.csv.empty()) csv = open_output(o.csv);
    const unsigned threads = bench_threads();
    if (!verify_comparators(err)) return kSolverFailure;

    std::vector<BenchCell> cells;
    for (const char* problem : {"example1", "example2", "example3", "example4"}) {
        for (double tol : {1e-2, 1e-4}) {
            for (const char* method : {"asode3", "asode3-nosc", "merson", "rkf45"}) {
                cells.push_back(BenchCell{problem, tol, method, std::nullopt, {}});
            }
        }
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) run_cell(cells[i]);
    };
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < std::min<std::size_t>(threads, cells.size()); ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    const char* header[] = {"problem", "tol", "method", "phi_evals", "g_evals",
                            "factorizations", "solves", "steps_acc", "steps_rej"};
    std::vector<std::vector<std::string>> rows;
    bool any_failed = false;
    for (const BenchCell& c : cells) {
        std::vector<std::string> row = {c.problem, num(c.tol), c.method};
        if (c.stats) {
            for (std::uint64_t v : {c.stats->phi_evals, c.stats->g_evals, c.stats->factorizations,
                                    c.stats->linear_solves, c.stats->steps_accepted, c.stats->steps_rejected}) {
                row.push_back(std::to_string(v));
            }
        } else {
            any_failed = true;
            row.insert(row.end(), 6, "FAIL");
            err << c.problem << " tol=" << num(c.tol) << ' ' << c.method << ": " << c.failure << '\n';
        }
        rows.push_back(std::move(row));
    }

    std::vector<std::size_t> width(std::size(header));
    for (std::size_t j = 0; j < width.size(); ++j) {
        width[j] = std::string(header[j]).size();
        for (const auto& r : rows) width[j] = std::max(width[j], r[j].size());
    }
    auto print_row = [&](auto&& cell_at) {
        for (std::size_t j = 0; j < width.size(); ++j) {
            if (j > 0) out << "  ";
            if (j < 3) out << std::left; else out << std::right;
            out << std::setw(static_cast<int>(width[j])) << cell_at(j);
        }
        out << std::left << '\n';
    };
    print_row([&](std::size_t j) { return std::string(header[j]); });
    for (const auto& r : rows) print_row([&](std::size_t j) { return r[j]; });

    if (csv.is_open()) {
        for (std::size_t j = 0; j < std::size(header); ++j) csv << (j ? "," : "") << header[j];
        csv << '\n';
        for (const auto& r : rows) {
            for (std::size_t j = 0; j < r.size(); ++j) csv << (j ? "," : "") << r[j];
            csv << '\n';
        }
    }
    return any_failed ? kSolverFailure : kOk;
}

// ---------------------------------------------------------------------------
// order-study

struct OrderOptions {
    std::string problem = "smooth";
    std::string method = "asode3";
    std::size_t steps = 0;  // 0: 160 for asode3, 8 for the explicit methods
    int levels = 4;
    std::optional<std::string> split;
    std::optional<double> stiffness;
    bool slow_manifold = false;
    std::optional<double> t_end;
    std::string csv;
};

// Least-squares slope of log(err) against log(h); NaN if any error is not
// positive and finite.
double fitted_slope(const std::vector<double>& h, const std::vector<double>& e) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (!(e[i] > 0.0) || !std::isfinite(e[i])) return std::numeric_limits<double>::quiet_NaN();
        const double x = std::log(h[i]);
        const double y = std::log(e[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

SplitProblem order_problem(const OrderOptions& o) {
    const bool smooth_extras = o.split || o.stiffness || o.slow_manifold;
    if (o.problem != "smooth") {
        if (smooth_extras) throw ConfigError("--split, --stiffness and --slow-manifold apply to the smooth problem only");
        SplitProblem p = builtin(o.problem);
        if (o.t_end) p.t_end = *o.t_end;
        return p;
    }
    static const std::map<std::string, JacobianChoice> choices = {{"exact", JacobianChoice::Exact},
                                                                   {"zero", JacobianChoice::Zero},
                                                                   {"diagonal", JacobianChoice::Diagonal},
                                                                   {"frozen", JacobianChoice::FrozenAtStart}};
    const auto it = choices.find(o.split.value_or("exact"));
    if (it == choices.end()) throw ConfigError("--split must be exact, zero, diagonal or frozen");
    // Explicit methods get a non-stiff default so their nonlinear order shows.
    const double stiffness = o.stiffness.value_or(o.method == "asode3" ? 20.0 : 1.0);
    return smooth_problem(stiffness, it->second, o.t_end.value_or(1.0), o.slow_manifold);
}

Vector reference_solution(const SplitProblem& p) {
    if (p.exact) return (*p.exact)(p.t_end);
    try {
        ControllerConfig cfg;
        cfg.max_rejects_per_step = 100;
        return integrate(p, Tolerances::uniform(p.dimension, 1e-10), AdditiveMethod::standard(), cfg).y;
    } catch (const Error& e) {
        throw ReferenceUnavailable("no reference solution for '" + p.name + "': " + e.what());
    }
}

int cmd_order_study(const OrderOptions& o, std::ostream& out) {
    if (o.levels < 2) throw ConfigError("need --levels >= 2");
    if (std::find(kMethods.begin(), kMethods.end(), o.method) == kMethods.end()) {
        throw ConfigError("unknown method '" + o.method + "'");
    }
    std::ofstream csv;
    if (!o.csv.empty()) csv = open_output(o.csv);
    const SplitProblem p = order_problem(o);
    const Vector ref = reference_solution(p);
    const bool additive = o.method == "asode3";
    const std::size_t base = o.steps != 0 ? o.steps : (additive ? 160 : 8);

    std::vector<double> hs, errs, gaps;
    std::vector<std::size_t> ns;
    for (int k = 0; k < o.levels; ++k) {
        const std::size_t n = base << k;
        Vector y;
        double gap = std::numeric_limits<double>::quiet_NaN();
        if (additive) {
            FixedStepResult r = integrate_fixed(p, n);
            y = std::move(r.y);
            gap = r.max_embedded_gap;
        } else {
            y = rk_integrate_fixed(tableau_by_name(o.method), p, n).y;
        }
        double e = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) e = std::max(e, std::abs(y[i] - ref[i]));
        ns.push_back(n);
        hs.push_back((p.t_end - p.t0) / static_cast<double>(n));
        errs.push_back(e);
        gaps.push_back(gap);
    }

    out << "problem: " << p.name << "  method: " << o.method << "  t_end: " << num(p.t_end) << '\n';
    out << std::setw(8) << "steps" << std::setw(14) << "h" << std::setw(14) << "error" << std::setw(8) << "rate";
    if (additive) out << std::setw(14) << "embedded_gap" << std::setw(8) << "rate";
    out << '\n';
    auto rate = [](const std::vector<double>& v, std::size_t i) {
        if (i == 0) return std::string("-");
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", std::log2(v[i - 1] / v[i]));
        return std::string(buf);
    };
    for (std::size_t i = 0; i < ns.size(); ++i) {
        std::ostringstream line;
        line << std::setw(8) << ns[i] << std::setw(14) << std::setprecision(4) << hs[i] << std::setw(14) << errs[i]
             << std::setw(8) << rate(errs, i);
        if (additive) line << std::setw(14) << gaps[i] << std::setw(8) << rate(gaps, i);
        out << line.str() << '\n';
    }
    out << "slope: " << num(fitted_slope(hs, errs)) << '\n';
    if (additive) out << "embedded_slope: " << num(fitted_slope(hs, gaps)) << '\n';

    if (csv.is_open()) {
        csv << "steps,h,error,embedded_gap\n";
        for (std::size_t i = 0; i < ns.size(); ++i) {
            csv << ns[i] << ',' << num(hs[i]) << ',' << num(errs[i]) << ',' << num(gaps[i]) << '\n';
        }
    }
    return kOk;
}

// ---------------------------------------------------------------------------
// stability-region

struct RegionOptions {
    double x_min = -3.0, x_max = 0.0;
    double z_min = -10.0, z_max = 0.0;
    int nx = 31, nz = 21;
    std::string x_axis = "real", z_axis = "real";
    std::string target = "main";
    double a = kDefaultA;
    std::string csv;
    std::string mask;
};

std::vector<Complex> axis_grid(double lo, double hi, int n, const std::string& axis) {
    std::vector<Complex> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double v = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
        g[static_cast<std::size_t>(i)] = axis == "imag" ? Complex(0.0, v) : Complex(v, 0.0);
    }
    return g;
}

std::string axis_label(Complex v) { return num(v.imag() != 0.0 ? v.imag() : v.real()); }

void write_grid(std::ostream& f, const StabilityScan& scan, bool mask) {
    f << "z\\x";
    for (Complex x : scan.x_grid) f << ',' << axis_label(x);
    f << '\n';
    for (std::size_t zi = 0; zi < scan.z_grid.size(); ++zi) {
        f << axis_label(scan.z_grid[zi]);
        for (std::size_t xi = 0; xi < scan.x_grid.size(); ++xi) {
            f << ',';
            if (mask) f << (scan.stable(zi, xi) ? 1 : 0); else f << num(scan.at(zi, xi));
        }
        f << '\n';
    }
}

int cmd_stability_region(const RegionOptions& o, std::ostream& out) {
    if (o.nx < 1 || o.nz < 1) throw ConfigError("--nx and --nz must be positive");
    const SchemeCoefficients c = derive_scheme(o.a);
    const EmbeddedCoefficients e = derive_embedded(c);
    const auto xs = axis_grid(o.x_min, o.x_max, o.nx, o.x_axis);
    const auto zs = axis_grid(o.z_min, o.z_max, o.nz, o.z_axis);
    const StabilityScan scan = stability_region_scan(
        xs, zs, o.target == "embedded" ? StabilityTarget::Embedded : StabilityTarget::Main, c, e);
    if (o.csv.empty()) {
        write_grid(out, scan, false);
    } else {
        std::ofstream f = open_output(o.csv);
        write_grid(f, scan, false);
    }
    if (!o.mask.empty()) {
        std::ofstream f = open_output(o.mask);
        write_grid(f, scan, true);
    }
    return kOk;
}

// ---------------------------------------------------------------------------
// coeffs

struct CoeffOptions {
    double a = kDefaultA;
    std::string csv;
};

int cmd_coeffs(const CoeffOptions& o, std::ostream& out) {
    std::ofstream csv;
    if (!o.csv.empty()) csv = open_output(o.csv);
    const SchemeCoefficients c = derive_scheme(o.a);
    const EmbeddedCoefficients e = derive_embedded(c);
    const QuarticRoots roots = solve_design_quartic();

    std::vector<std::pair<std::string, double>> values = {{"a", c.a}};
    for (std::size_t i = 0; i < 6; ++i) values.emplace_back("p" + std::to_string(i + 1), c.p[i]);
    for (std::size_t i = 0; i < 3; ++i) values.emplace_back("alpha4" + std::to_string(i + 1), c.alpha4[i]);
    for (std::size_t i = 0; i < 3; ++i) values.emplace_back("beta4" + std::to_string(i + 1), c.beta4[i]);
    for (std::size_t i = 0; i < 5; ++i) values.emplace_back("beta6" + std::to_string(i + 1), c.beta6[i]);
    values.emplace_back("gamma", c.gamma);
    for (std::size_t i = 0; i < 4; ++i) values.emplace_back("aux_beta" + std::to_string(i + 1), c.aux[i]);
    for (std::size_t i = 0; i < 5; ++i) values.emplace_back("r" + std::to_string(i + 1), e.r[i]);
    for (std::size_t i = 0; i < 4; ++i) values.emplace_back("quartic_root" + std::to_string(i + 1), roots.roots[i]);

    ResidualReport report = verify_order_conditions(c);
    const ResidualReport embedded = verify_embedded_conditions(c, e);
    report.residuals.insert(report.residuals.end(), embedded.residuals.begin(), embedded.residuals.end());

    out << "coefficients\n";
    for (const auto& [name, v] : values) out << "  " << std::left << std::setw(16) << name << num(v) << '\n';
    out << "residuals\n";
    for (const auto& r : report.residuals) out << "  " << std::left << std::setw(24) << r.group << num(r.value) << '\n';
    out << "max |residual|: " << num(std::max(report.max_abs, embedded.max_abs)) << '\n';

    if (csv.is_open()) {
        csv << "name,value,residual_group\n";
        for (const auto& [name, v] : values) csv << name << ',' << num(v) << ",\n";
        for (const auto& r : report.residuals) csv << "residual," << num(r.value) << ',' << r.group << '\n';
    }
    return kOk;
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Additive third-order L-stable ODE solver"};
    app.set_config("--config", "", "key=value file; command line flags override it");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.require_subcommand(1);

    SolveOptions solve;
    auto* s = app.add_subcommand("solve", "Integrate one named problem");
    s->add_option("--problem", solve.problem, "Problem name")->required();
    s->add_option("--method", solve.method, "asode3, merson or rkf45")
        ->check(CLI::IsMember(kMethods))
        ->capture_default_str();
    solve.tol.add_to(*s);
    s->add_flag("--no-stability-control", solve.no_stability_control, "Disable the explicit-part stability limit");
    s->add_option("--trace", solve.trace, "CSV log of accepted steps");
    s->add_option("--t-end", solve.t_end, "Override the final time");

    BenchOptions bench;
    auto* b = app.add_subcommand("bench", "Cost table for the four examples");
    b->add_option("--csv", bench.csv, "Also write the table as CSV");

    OrderOptions order;
    auto* o = app.add_subcommand("order-study", "Fixed-step convergence study");
    o->add_option("--problem", order.problem)->capture_default_str();
    o->add_option("--method", order.method)->check(CLI::IsMember(kMethods))->capture_default_str();
    o->add_option("--steps", order.steps, "Steps on the coarsest level (default 160 for asode3, 8 otherwise)");
    o->add_option("--levels", order.levels, "Number of halvings plus one")->capture_default_str();
    o->add_option("--split", order.split, "smooth problem: exact, zero, diagonal or frozen B");
    o->add_option("--stiffness", order.stiffness, "smooth problem: stiff rate (default 20 for asode3, 1 otherwise)");
    o->add_flag("--slow-manifold", order.slow_manifold, "smooth problem: start without the fast transient");
    o->add_option("--t-end", order.t_end, "Override the final time");
    o->add_option("--csv", order.csv, "Also write the error table as CSV");

    RegionOptions region;
    auto* r = app.add_subcommand("stability-region", "|R| on a grid of x = lambda1 h, z = lambda2 h");
    r->add_option("--x-min", region.x_min)->capture_default_str();
    r->add_option("--x-max", region.x_max)->capture_default_str();
    r->add_option("--nx", region.nx)->capture_default_str();
    r->add_option("--z-min", region.z_min)->capture_default_str();
    r->add_option("--z-max", region.z_max)->capture_default_str();
    r->add_option("--nz", region.nz)->capture_default_str();
    r->add_option("--x-axis", region.x_axis)->check(CLI::IsMember({"real", "imag"}))->capture_default_str();
    r->add_option("--z-axis", region.z_axis)->check(CLI::IsMember({"real", "imag"}))->capture_default_str();
    r->add_option("--target", region.target)->check(CLI::IsMember({"main", "embedded"}))->capture_default_str();
    r->add_option("--a", region.a, "Free parameter");
    r->add_option("--csv", region.csv, "Output file (default stdout)");
    r->add_option("--mask", region.mask, "Also write the 0/1 mask of |R| <= 1");

    CoeffOptions coeffs;
    auto* c = app.add_subcommand("coeffs", "Derived coefficients and residuals");
    c->add_option("--a", coeffs.a, "Free parameter");
    c->add_option("--csv", coeffs.csv, "Also write name,value,residual_group CSV");

    try {
        std::reverse(args.begin(), args.end());
        if (!args.empty()) args.pop_back();  // program name
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kOk : kConfigError;
    }

    try {
        if (s->parsed()) return cmd_solve(solve, out);
        if (b->parsed()) return cmd_bench(bench, out, err);
        if (o->parsed()) return cmd_order_study(order, out);
        if (r->parsed()) return cmd_stability_region(region, out);
        return cmd_coeffs(coeffs, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const UnknownProblem& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const DegenerateParameter& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const Error& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kSolverFailure;
    }
}

}  // namespace asode::cli
