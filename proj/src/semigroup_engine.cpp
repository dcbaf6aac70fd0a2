#include "stickygraph/semigroup_engine.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include "stickygraph/errors.hpp"
#include "stickygraph/limit_dynamics.hpp"

namespace sticky {

std::string to_string(StepMethod method) {
    return method == StepMethod::BackwardEuler ? "backward-euler" : "crank-nicolson";
}

namespace {

bool is_identically_one(const GraphFunction &u) {
    for (const auto &f : u.edges()) {
        for (double v : f.values()) {
            if (v != 1.0) {
                return false;
            }
        }
    }
    return true;
}

double distance_to_one(const GraphFunction &u) {
    double s = 0.0;
    for (const auto &f : u.edges()) {
        for (double v : f.values()) {
            s = std::max(s, std::abs(v - 1.0));
        }
    }
    return s;
}

GraphFunction scale(const GraphFunction &u, double a) {
    std::vector<GridFunction1D> edges;
    for (const auto &f : u.edges()) {
        std::vector<double> v(f.values().begin(), f.values().end());
        for (double &x : v) {
            x *= a;
        }
        edges.emplace_back(std::move(v));
    }
    return GraphFunction(std::move(edges));
}

// 2 a R u - u
GraphFunction reflect(const GraphFunction &resolved, double a, const GraphFunction &u) {
    std::vector<GridFunction1D> edges;
    for (std::size_t e = 0; e < u.edge_count(); ++e) {
        std::vector<double> v(u.grid_size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            v[i] = 2.0 * a * resolved[e][i] - u[e][i];
        }
        edges.emplace_back(std::move(v));
    }
    return GraphFunction(std::move(edges));
}

} // namespace

EvolutionResult evolve(const MetricGraph &g, double eps, double t, std::size_t n, const GraphFunction &u0,
                       StepMethod method) {
    if (!(t > 0.0) || !std::isfinite(t)) {
        throw DomainError("evolution time must be positive");
    }
    if (n == 0) {
        throw DomainError("step count must be at least 1");
    }
    if (!(eps > 0.0 && eps <= 1.0)) {
        throw DomainError("eps must lie in (0,1]");
    }
    if (u0.edge_count() != g.edge_count()) {
        throw DomainError("initial condition does not match the graph");
    }
    const double rate = static_cast<double>(n) / t;
    const double lambda = method == StepMethod::BackwardEuler ? rate : 2.0 * rate;
    const ResolventPlan plan(g, lambda, OperatorScaling::a_eps(eps), u0.grid_size());

    GraphFunction u = u0;
    for (std::size_t k = 0; k < n; ++k) {
        const GraphFunction resolved = plan.apply_sampled(u);
        u = method == StepMethod::BackwardEuler ? scale(resolved, lambda) : reflect(resolved, lambda, u);
    }

    EvolutionResult out;
    out.t = t;
    out.steps = n;
    out.method = method;
    out.diagnostics.min_value = u.min();
    out.diagnostics.positivity_violation = std::max(0.0, -out.diagnostics.min_value);
    const double norm0 = u0.sup_norm();
    out.diagnostics.growth = norm0 > 0.0 ? u.sup_norm() / norm0 : 0.0;
    out.diagnostics.conservativity_defect =
        is_identically_one(u0) ? distance_to_one(u) : std::numeric_limits<double>::quiet_NaN();
    out.u_t = std::move(u);
    return out;
}

FellerReport feller_check(const MetricGraph &g, const EvolutionResult &result, const GraphFunction &u0) {
    FellerReport report;
    report.min_value = result.u_t.min();
    const double norm0 = u0.sup_norm();
    report.norm_ratio = norm0 > 0.0 ? result.u_t.sup_norm() / norm0 : 0.0;
    if (u0.min() >= 0.0) {
        report.positivity_ok = report.min_value >= -kFellerTol;
    }
    report.contraction_ok = report.norm_ratio <= 1.0 + kFellerTol;
    if (is_identically_one(u0)) {
        report.conservativity_defect = distance_to_one(result.u_t);
        if (is_conservative(g)) {
            report.conservative_ok = *report.conservativity_defect <= kFellerTol;
        }
    }
    return report;
}

namespace {

ConvergenceRow converge_one(const MetricGraph &g, double t, double eps, const GraphFunction &u0,
                            const GraphFunction &limit, const ConvergenceOptions &options) {
    auto error_at = [&](std::size_t n) { return sup_distance(evolve(g, eps, t, n, u0).u_t, limit); };

    if (options.fixed_steps) {
        return {eps, *options.fixed_steps, error_at(*options.fixed_steps), false};
    }
    std::size_t n = std::max<std::size_t>(1, options.initial_steps);
    double err = 0.0;
    // Small step counts may put lambda = n/t below the invertibility threshold.
    for (;;) {
        try {
            err = error_at(n);
            break;
        } catch (const NumericError &) {
            if (n >= options.max_steps) {
                throw;
            }
            n *= 2;
        }
    }
    while (n < options.max_steps) {
        const std::size_t next = 2 * n;
        const double next_err = error_at(next);
        const bool stable = std::abs(next_err - err) < options.stability * next_err;
        n = next;
        err = next_err;
        if (stable) {
            return {eps, n, err, false};
        }
    }
    return {eps, n, err, true};
}

} // namespace

ConvergenceTable convergence_experiment(const MetricGraph &g, double t, const std::vector<double> &eps_list,
                                        const GraphFunction &u0, const ConvergenceOptions &options) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw DomainError("t must be nonnegative");
    }
    if (u0.edge_count() != g.edge_count()) {
        throw DomainError("initial condition does not match the graph");
    }
    const std::size_t m = u0.grid_size();
    const LimitCoordinates projected = project_P(g, u0);
    const GraphFunction limit = lift(exp_tQ(g, t, projected), m);

    ConvergenceTable table;
    table.t = t;
    table.initial_err = sup_distance(u0, lift(projected, m));

    if (t == 0.0) {
        for (double eps : eps_list) {
            table.rows.push_back({eps, 0, table.initial_err, false});
        }
    } else if (options.parallel && eps_list.size() > 1) {
        std::vector<std::future<ConvergenceRow>> jobs;
        for (double eps : eps_list) {
            jobs.push_back(std::async(std::launch::async, converge_one, std::cref(g), t, eps, std::cref(u0),
                                      std::cref(limit), std::cref(options)));
        }
        for (auto &job : jobs) {
            table.rows.push_back(job.get());
        }
    } else {
        for (double eps : eps_list) {
            table.rows.push_back(converge_one(g, t, eps, u0, limit, options));
        }
    }

    if (!table.rows.empty() && table.rows.front().err > 0.0) {
        table.decay_ratio = table.rows.back().err / table.rows.front().err;
    }
    if (table.rows.size() >= 2) {
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        std::size_t count = 0;
        for (const auto &row : table.rows) {
            if (row.err > 0.0 && row.eps > 0.0) {
                const double x = std::log(row.eps), y = std::log(row.err);
                sx += x;
                sy += y;
                sxx += x * x;
                sxy += x * y;
                ++count;
            }
        }
        const double denom = static_cast<double>(count) * sxx - sx * sx;
        if (count >= 2 && denom != 0.0) {
            table.fitted_slope = (static_cast<double>(count) * sxy - sx * sy) / denom;
        }
    }
    return table;
}

} // namespace sticky
