#include "asode/reference_rk.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "asode/errors.hpp"

namespace asode {

namespace {

ExplicitTableau make_merson() {
    ExplicitTableau t;
    t.name = "merson";
    t.c = {0.0, 1.0 / 3.0, 1.0 / 3.0, 0.5, 1.0};
    t.a = {{},
           {1.0 / 3.0},
           {1.0 / 6.0, 1.0 / 6.0},
           {1.0 / 8.0, 0.0, 3.0 / 8.0},
           {0.5, 0.0, -1.5, 2.0}};
    t.b = {1.0 / 6.0, 0.0, 0.0, 2.0 / 3.0, 1.0 / 6.0};
    t.b_hat = {0.1, 0.0, 0.3, 0.4, 0.2};
    t.order = 4;
    t.embedded_order = 3;
    return t;
}

ExplicitTableau make_fehlberg() {
    ExplicitTableau t;
    t.name = "rkf45";
    t.c = {0.0, 0.25, 3.0 / 8.0, 12.0 / 13.0, 1.0, 0.5};
    t.a = {{},
           {0.25},
           {3.0 / 32.0, 9.0 / 32.0},
           {1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0},
           {439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0},
           {-8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0}};
    t.b = {16.0 / 135.0, 0.0, 6656.0 / 12825.0, 28561.0 / 56430.0, -9.0 / 50.0, 2.0 / 55.0};
    t.b_hat = {25.0 / 216.0, 0.0, 1408.0 / 2565.0, 2197.0 / 4104.0, -0.2, 0.0};
    t.order = 5;
    t.embedded_order = 4;
    return t;
}

// A rooted tree is a root plus a multiset of child trees, stored as indices
// into the list of previously generated trees (non-decreasing).
struct Tree {
    int order = 1;
    std::vector<int> children;
    double gamma = 1.0;  // density
};

std::vector<Tree> trees_up_to(int max_order) {
    std::vector<Tree> trees;
    trees.push_back(Tree{});
    for (int n = 2; n <= max_order; ++n) {
        const int known = static_cast<int>(trees.size());
        std::vector<int> picked;
        std::function<void(int, int)> extend = [&](int first, int budget) {
            if (budget == 0) {
                Tree t;
                t.order = n;
                t.children = picked;
                t.gamma = n;
                for (int ci : picked) t.gamma *= trees[ci].gamma;
                trees.push_back(std::move(t));
                return;
            }
            for (int i = first; i < known; ++i) {
                if (trees[i].order > budget) continue;
                picked.push_back(i);
                extend(i, budget - trees[i].order);
                picked.pop_back();
            }
        };
        extend(0, n - 1);
    }
    return trees;
}

// Stage values of the elementary weight: G(root)_i = 1,
// G([t1..tm])_i = prod_k (A G(tk))_i.
std::vector<std::vector<double>> stage_weights(const ExplicitTableau& t, const std::vector<Tree>& trees) {
    const std::size_t s = t.stages();
    std::vector<std::vector<double>> g(trees.size(), std::vector<double>(s, 1.0));
    std::vector<std::vector<double>> ag(trees.size(), std::vector<double>(s, 0.0));
    for (std::size_t ti = 0; ti < trees.size(); ++ti) {
        for (int ci : trees[ti].children) {
            for (std::size_t i = 0; i < s; ++i) g[ti][i] *= ag[ci][i];
        }
        for (std::size_t i = 0; i < s; ++i) {
            double sum = 0.0;
            for (std::size_t j = 0; j < i; ++j) sum += t.a[i][j] * g[ti][j];
            ag[ti][i] = sum;
        }
    }
    return g;
}

double max_condition_residual(const std::vector<double>& w, int order, const std::vector<Tree>& trees,
                              const std::vector<std::vector<double>>& g, int& count) {
    double worst = 0.0;
    for (std::size_t ti = 0; ti < trees.size(); ++ti) {
        if (trees[ti].order > order) continue;
        double phi = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) phi += w[i] * g[ti][i];
        worst = std::max(worst, std::abs(phi - 1.0 / trees[ti].gamma));
        ++count;
    }
    return worst;
}

// Stage storage for one explicit integration.
class RkWorkspace {
public:
    RkWorkspace(const ExplicitTableau& t, std::size_t n) : k_(t.stages(), Vector(n)), arg_(n) {}

    // Writes y_next and the error estimate; returns number of f evaluations.
    std::size_t step(const ExplicitTableau& t, const RhsFn& f, std::span<const double> y, double h,
                     std::span<double> y_next, std::span<double> est) {
        const std::size_t n = y.size();
        const std::size_t s = t.stages();
        for (std::size_t st = 0; st < s; ++st) {
            for (std::size_t i = 0; i < n; ++i) {
                double acc = 0.0;
                for (std::size_t j = 0; j < st; ++j) acc += t.a[st][j] * k_[j][i];
                arg_[i] = y[i] + h * acc;
            }
            f(arg_, k_[st]);
        }
        for (std::size_t i = 0; i < n; ++i) {
            double hi = 0.0;
            double diff = 0.0;
            for (std::size_t st = 0; st < s; ++st) {
                hi += t.b[st] * k_[st][i];
                diff += (t.b[st] - t.b_hat[st]) * k_[st][i];
            }
            y_next[i] = y[i] + h * hi;
            est[i] = h * diff;
        }
        return s;
    }

    // Power-method estimate of h |lambda_max| from the first three stages.
    // For linear f, k2 - k1 = h a21 J k1 and
    // k3 - k1 - (c3/c2)(k2 - k1) = h^2 a32 a21 J^2 k1, so the ratio of their
    // max norms divided by a32 is one power iteration on hJ.
    double spectral_estimate(const ExplicitTableau& t) const {
        const double ratio_c = t.c[2] / t.c[1];
        double num = 0.0;
        double den = 0.0;
        for (std::size_t i = 0; i < arg_.size(); ++i) {
            const double d1 = k_[1][i] - k_[0][i];
            num = std::max(num, std::abs(k_[2][i] - k_[0][i] - ratio_c * d1));
            den = std::max(den, std::abs(d1));
        }
        if (!(den > 0.0) || !std::isfinite(num)) return 0.0;
        return num / (den * std::abs(t.a[2][1]));
    }

private:
    std::vector<Vector> k_;
    Vector arg_;
};

constexpr double kLandingSlack = 1.0001;

}  // namespace

const ExplicitTableau& merson_tableau() {
    static const ExplicitTableau t = make_merson();
    return t;
}

const ExplicitTableau& fehlberg_tableau() {
    static const ExplicitTableau t = make_fehlberg();
    return t;
}

const ExplicitTableau& tableau_by_name(std::string_view name) {
    if (name == "merson") return merson_tableau();
    if (name == "rkf45") return fehlberg_tableau();
    throw InvalidArgument("unknown explicit method '" + std::string(name) + "'");
}

double stability_polynomial(const ExplicitTableau& t, double z) {
    const std::size_t s = t.stages();
    std::vector<double> g(s);
    double r = 1.0;
    for (std::size_t i = 0; i < s; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < i; ++j) acc += t.a[i][j] * g[j];
        g[i] = 1.0 + z * acc;
        r += z * t.b[i] * g[i];
    }
    return r;
}

double real_stability_interval(const ExplicitTableau& t) {
    constexpr double step = 1e-3;
    constexpr double limit = 100.0;
    double inside = 0.0;
    for (double x = step; x <= limit; x += step) {
        if (std::abs(stability_polynomial(t, -x)) > 1.0) {
            double lo = inside;
            double hi = x;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                (std::abs(stability_polynomial(t, -mid)) > 1.0 ? hi : lo) = mid;
            }
            return lo;
        }
        inside = x;
    }
    throw InvalidArgument("tableau '" + t.name + "': no bounded real stability interval found");
}

int rooted_tree_count(int order) {
    const auto trees = trees_up_to(order);
    return static_cast<int>(std::count_if(trees.begin(), trees.end(),
                                          [order](const Tree& t) { return t.order == order; }));
}

TableauCheck verify_tableau(const ExplicitTableau& t) {
    TableauCheck out;
    const std::size_t s = t.stages();
    if (t.c.size() != s || t.a.size() != s || t.b_hat.size() != s) {
        throw InvalidArgument("tableau '" + t.name + "': inconsistent stage count");
    }
    for (std::size_t i = 0; i < s; ++i) {
        if (t.a[i].size() != i) throw InvalidArgument("tableau '" + t.name + "': A must be strictly lower triangular");
        double row = 0.0;
        for (double v : t.a[i]) row += v;
        out.max_row_sum_residual = std::max(out.max_row_sum_residual, std::abs(row - t.c[i]));
    }
    const auto trees = trees_up_to(std::max(t.order, t.embedded_order));
    const auto g = stage_weights(t, trees);
    out.max_order_residual = max_condition_residual(t.b, t.order, trees, g, out.conditions_checked);
    out.max_embedded_order_residual =
        max_condition_residual(t.b_hat, t.embedded_order, trees, g, out.conditions_checked);
    return out;
}

RkStepResult rk_step(const ExplicitTableau& t, const RhsFn& f, std::span<const double> y, double h) {
    RkWorkspace ws(t, y.size());
    RkStepResult out{Vector(y.size()), Vector(y.size())};
    ws.step(t, f, y, h, out.y_next, out.error_estimate);
    if (!all_finite(out.y_next)) throw NonFiniteState("explicit step produced a non-finite state");
    return out;
}

IntegrationResult rk_integrate(const ExplicitTableau& t, const SplitProblem& problem, const Tolerances& tol,
                               const RkConfig& cfg, const StepObserver& observer) {
    problem.validate();
    tol.validate(problem.dimension);

    IntegrationResult res;
    res.y = problem.y0;
    res.t = problem.t0;
    if (problem.t_end == problem.t0) return res;

    const std::size_t n = problem.dimension;
    const double h_max = problem.t_end - problem.t0;
    const double h_min = std::min(cfg.h_min, h_max);
    const double exponent = -1.0 / (t.embedded_order + 1.0);
    RkWorkspace ws(t, n);
    Vector y_next(n), est(n), y_low(n);
    const bool probe = cfg.stability_control && t.stages() >= 3 && t.c[1] != 0.0 && t.a[2][1] != 0.0;
    const double interval = probe ? real_stability_interval(t) : 0.0;
    double h = std::clamp(problem.h0, h_min, h_max);
    int rejects_in_row = 0;

    while (res.t < problem.t_end) {
        const double remaining = problem.t_end - res.t;
        const bool last = h * kLandingSlack >= remaining;
        const double h_step = last ? remaining : h;

        const std::size_t evals = ws.step(t, problem.full, res.y, h_step, y_next, est);
        res.stats.phi_evals += evals;
        res.stats.g_evals += evals;

        double err = std::numeric_limits<double>::infinity();
        if (all_finite(y_next) && all_finite(est)) {
            for (std::size_t i = 0; i < n; ++i) y_low[i] = y_next[i] - est[i];
            err = error_norm(y_next, y_low, tol);
            if (std::isnan(err)) err = std::numeric_limits<double>::infinity();
        }

        if (err <= 1.0) {
            ++res.stats.steps_accepted;
            rejects_in_row = 0;
            res.t = last ? problem.t_end : res.t + h_step;
            std::swap(res.y, y_next);
            const double v = probe ? ws.spectral_estimate(t) : std::numeric_limits<double>::quiet_NaN();
            if (observer) observer(TraceRow{res.t, h_step, err, v, res.y});
            const double fac = err > 0.0 ? cfg.safety * std::pow(err, exponent) : cfg.fac_max;
            double h_new = h_step * std::clamp(fac, cfg.fac_min, cfg.fac_max);
            if (probe && v > 0.0) h_new = std::min(h_new, cfg.safety * interval * h_step / v);
            h = std::clamp(h_new, h_min, h_max);
            continue;
        }

        ++res.stats.steps_rejected;
        ++rejects_in_row;
        const bool finite = std::isfinite(err);
        if (rejects_in_row > cfg.max_rejects_per_step) {
            std::ostringstream msg;
            msg << t.name << ": step at t=" << res.t << " rejected " << rejects_in_row << " times in a row";
            if (!finite) throw NonFiniteState(msg.str());
            throw MaxRejectsExceeded(msg.str());
        }
        if (h_step <= h_min) {
            std::ostringstream msg;
            msg << t.name << ": step size underflow at t=" << res.t << " (h=" << h_step << ")";
            throw StepsizeUnderflow(msg.str());
        }
        const double fac = finite ? std::clamp(cfg.safety * std::pow(err, exponent), cfg.fac_min, 1.0)
                                  : cfg.fac_min;
        h = std::max(h_step * fac, h_min);
    }
    return res;
}

IntegrationResult rk_integrate_fixed(const ExplicitTableau& t, const SplitProblem& problem, std::size_t steps) {
    problem.validate();
    if (steps == 0) throw InvalidArgument("rk_integrate_fixed: need at least one step");
    IntegrationResult res;
    res.y = problem.y0;
    res.t = problem.t0;
    const double h = (problem.t_end - problem.t0) / static_cast<double>(steps);
    RkWorkspace ws(t, problem.dimension);
    Vector y_next(problem.dimension), est(problem.dimension);
    for (std::size_t s = 0; s < steps; ++s) {
        const std::size_t evals = ws.step(t, problem.full, res.y, h, y_next, est);
        res.stats.phi_evals += evals;
        res.stats.g_evals += evals;
        ++res.stats.steps_accepted;
        std::swap(res.y, y_next);
    }
    if (!all_finite(res.y)) throw NonFiniteState("fixed-step explicit run produced a non-finite state");
    res.t = problem.t_end;
    return res;
}

}  // namespace asode
