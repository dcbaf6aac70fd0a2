#include "stickygraph/cli.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "stickygraph/errors.hpp"
#include "stickygraph/fd_oracle.hpp"
#include "stickygraph/graph_model.hpp"
#include "stickygraph/graph_operator.hpp"
#include "stickygraph/inputs.hpp"
#include "stickygraph/limit_dynamics.hpp"
#include "stickygraph/semigroup_engine.hpp"

namespace sticky::cli {

namespace {

constexpr std::size_t kAdaptiveStart = 64;
constexpr std::size_t kAdaptiveCap = std::size_t{1} << 14;
constexpr double kAdaptiveTol = 1e-3;

const char *command_name(Command c) {
    switch (c) {
    case Command::Validate: return "validate";
    case Command::Resolvent: return "resolvent";
    case Command::Evolve: return "evolve";
    case Command::Limit: return "limit";
    case Command::Converge: return "converge";
    case Command::Oracle: return "oracle";
    }
    return "?";
}

class Output {
  public:
    Output(const RunConfig &config, std::ostream &fallback) {
        if (config.out_path.empty()) {
            stream_ = &fallback;
        } else {
            file_ = std::make_unique<std::ofstream>(config.out_path);
            if (!*file_) {
                throw ParseError("cannot open output file '" + config.out_path + "'");
            }
            stream_ = file_.get();
        }
        *stream_ << std::setprecision(17);
        if (config.header) {
            *stream_ << "# stickygraph " << command_name(config.command) << " graph=" << config.graph_path
                     << " input=" << config.input << " eps=" << config.eps << " grid=" << config.grid;
            if (config.lambda) {
                *stream_ << " lambda=" << *config.lambda;
            }
            if (config.t) {
                *stream_ << " t=" << *config.t;
            }
            *stream_ << '\n';
        }
    }

    std::ostream &stream() { return *stream_; }

  private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream *stream_ = nullptr;
};

struct Logger {
    LogLevel level;
    std::ostream &err;

    void info(const std::string &msg) const {
        if (level != LogLevel::Quiet) {
            err << msg << '\n';
        }
    }
    void debug(const std::string &msg) const {
        if (level == LogLevel::Debug) {
            err << msg << '\n';
        }
    }
};

StepMethod parse_method(const std::string &name) {
    if (name == "be" || name == "backward-euler") {
        return StepMethod::BackwardEuler;
    }
    if (name == "cn" || name == "crank-nicolson") {
        return StepMethod::CrankNicolson;
    }
    throw ParseError("unknown step method '" + name + "' (use be or cn)");
}

double require(const std::optional<double> &v, const char *flag) {
    if (!v) {
        throw ParseError(std::string("missing required flag ") + flag);
    }
    return *v;
}

// Fixed step count, or doubling from 64 until successive results agree to
// 1e-3 ||u0|| (capped at 2^14 steps).
EvolutionResult evolve_with_steps(const MetricGraph &g, const RunConfig &config, double t, const GraphFunction &u0,
                                  const Logger &log) {
    const StepMethod method = parse_method(config.method);
    if (config.steps) {
        return evolve(g, config.eps, t, *config.steps, u0, method);
    }
    const double scale = std::max(u0.sup_norm(), std::numeric_limits<double>::min());
    EvolutionResult current = evolve(g, config.eps, t, kAdaptiveStart, u0, method);
    while (current.steps < kAdaptiveCap) {
        EvolutionResult next = evolve(g, config.eps, t, 2 * current.steps, u0, method);
        const double change = sup_distance(next.u_t, current.u_t);
        log.debug("steps " + std::to_string(next.steps) + ": change " + std::to_string(change));
        current = std::move(next);
        if (change <= kAdaptiveTol * scale) {
            return current;
        }
    }
    log.info("warning: step cap " + std::to_string(kAdaptiveCap) + " reached before the evolution stabilised");
    return current;
}

int run_validate(const RunConfig &config, std::ostream &out) {
    const MetricGraph g = load_graph(config.graph_path);
    out << "edges: " << g.edge_count() << '\n';
    out << "vertices: " << g.vertices().size() << '\n';
    out << "conservative: " << (is_conservative(g) ? "true" : "false") << '\n';
    return kExitOk;
}

int run_resolvent(const RunConfig &config, std::ostream &out) {
    const MetricGraph g = load_graph(config.graph_path);
    const GraphFunction v = load_input(g, config.input, config.grid);
    const double lambda = require(config.lambda, "--lambda");
    const GraphResolvent res = resolvent_A_eps(g, lambda, config.eps, v);

    Output csv(config, out);
    auto &s = csv.stream();
    s << "edge_id,s,value,residual_ode,residual_boundary\n";
    const std::size_t m = res.u.grid_size();
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        for (std::size_t i = 0; i < m; ++i) {
            double boundary = 0.0;
            if (i == 0) {
                boundary = res.boundary_residuals.left(e);
            } else if (i + 1 == m) {
                boundary = res.boundary_residuals.right(e);
            }
            s << g.edge(e).id << ',' << res.u[e].x(i) << ',' << res.u[e][i] << ',' << res.node_residuals[e][i] << ','
              << boundary << '\n';
        }
    }
    if (!config.out_path.empty()) {
        out << "max_residual_ode: " << res.residual_ode << '\n';
        out << "max_residual_boundary: " << res.residual_boundary << '\n';
        out << "condition: " << res.condition << '\n';
    }
    return kExitOk;
}

int run_evolve(const RunConfig &config, std::ostream &out, const Logger &log) {
    const MetricGraph g = load_graph(config.graph_path);
    const GraphFunction u0 = load_input(g, config.input, config.grid);
    const double t = require(config.t, "--t");
    const EvolutionResult result = evolve_with_steps(g, config, t, u0, log);
    Output csv(config, out);
    write_function_csv(csv.stream(), g, result.u_t);
    if (!config.out_path.empty()) {
        const FellerReport report = feller_check(g, result, u0);
        out << "steps: " << result.steps << '\n';
        out << "method: " << to_string(result.method) << '\n';
        out << "min: " << report.min_value << '\n';
        out << "norm_ratio: " << report.norm_ratio << '\n';
        if (report.conservativity_defect) {
            out << "conservativity_defect: " << *report.conservativity_defect << '\n';
        }
    }
    return kExitOk;
}

int run_limit(const RunConfig &config, std::ostream &out) {
    const MetricGraph g = load_graph(config.graph_path);
    const GraphFunction u = load_input(g, config.input, config.grid);
    if (config.t.has_value() == config.lambda.has_value()) {
        throw ParseError("limit needs exactly one of --t or --lambda");
    }
    const LimitCoordinates coords =
        config.t ? exp_tQ(g, *config.t, project_P(g, u)) : limit_resolvent(g, *config.lambda, u);
    Output csv(config, out);
    write_function_csv(csv.stream(), g, lift(coords, u.grid_size()));
    if (!config.out_path.empty()) {
        const Eigen::MatrixXd q = build_Q_matrix(g);
        out << "dimension: " << q.rows() << '\n';
        const Eigen::IOFormat fmt(Eigen::FullPrecision, 0, ", ", "\n", "  [", "]");
        out << "Q:\n" << q.format(fmt) << '\n';
    }
    return kExitOk;
}

int run_converge(const RunConfig &config, std::ostream &out, const Logger &log) {
    const MetricGraph g = load_graph(config.graph_path);
    const GraphFunction u0 = load_input(g, config.input, config.grid);
    const double t = require(config.t, "--t");
    if (config.eps_list.empty()) {
        throw ParseError("missing required flag --eps-list");
    }
    for (double eps : config.eps_list) {
        if (!(eps > 0.0 && eps <= 1.0)) {
            throw DomainError("every eps in --eps-list must lie in (0,1]");
        }
    }
    ConvergenceOptions options;
    options.fixed_steps = config.steps;
    const ConvergenceTable table = convergence_experiment(g, t, config.eps_list, u0, options);
    for (const auto &row : table.rows) {
        if (row.capped) {
            log.info("warning: eps = " + std::to_string(row.eps) + " hit the step cap before stabilising");
        }
    }
    Output csv(config, out);
    auto &s = csv.stream();
    s << "eps,n_steps,err_sup\n";
    for (const auto &row : table.rows) {
        s << row.eps << ',' << row.steps << ',' << row.err << '\n';
    }
    if (!config.out_path.empty()) {
        out << "initial_err: " << table.initial_err << '\n';
        out << "decay_ratio: " << table.decay_ratio << '\n';
        out << "fitted_slope: " << table.fitted_slope << '\n';
    }
    return kExitOk;
}

int run_oracle(const RunConfig &config, std::ostream &out, const Logger &log) {
    const MetricGraph g = load_graph(config.graph_path);
    const GraphFunction v = load_input(g, config.input, config.grid);
    if (config.t.has_value() == config.lambda.has_value()) {
        throw ParseError("oracle needs exactly one of --t or --lambda");
    }
    const DiscreteGenerator gen = build_generator(g, config.eps, v.grid_size());
    GraphFunction analytic, oracle;
    if (config.lambda) {
        analytic = resolvent_A_eps(g, *config.lambda, config.eps, v).u;
        oracle = oracle_resolvent(gen, *config.lambda, v);
    } else {
        analytic = evolve_with_steps(g, config, *config.t, v, log).u_t;
        oracle = oracle_evolve(gen, *config.t, v);
    }
    Output csv(config, out);
    auto &s = csv.stream();
    s << "edge_id,s,value,analytic,abs_diff\n";
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        for (std::size_t i = 0; i < v.grid_size(); ++i) {
            s << g.edge(e).id << ',' << oracle[e].x(i) << ',' << oracle[e][i] << ',' << analytic[e][i] << ','
              << std::abs(oracle[e][i] - analytic[e][i]) << '\n';
        }
    }
    if (!config.out_path.empty()) {
        out << "max_abs_diff: " << sup_distance(oracle, analytic) << '\n';
    }
    return kExitOk;
}

} // namespace

int run(const RunConfig &config, std::ostream &out, std::ostream &err) {
    const Logger log{config.log_level, err};
    try {
        switch (config.command) {
        case Command::Validate: return run_validate(config, out);
        case Command::Resolvent: return run_resolvent(config, out);
        case Command::Evolve: return run_evolve(config, out, log);
        case Command::Limit: return run_limit(config, out);
        case Command::Converge: return run_converge(config, out, log);
        case Command::Oracle: return run_oracle(config, out, log);
        }
    } catch (const NumericError &e) {
        err << "error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const ParseError &e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const ValidationError &e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const DomainError &e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitValidation;
}

int main(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Sticky semipermeable diffusion on metric graphs"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "Optional TOML/INI file; command-line flags take precedence");

    RunConfig config;
    std::string log_level = "info";
    app.add_option("--log-level", log_level, "quiet, info or debug")
        ->envname("STICKYGRAPH_LOG")
        ->check(CLI::IsMember({"quiet", "info", "debug"}));

    auto common = [&](CLI::App *sub) {
        sub->add_option("--grid", config.grid, "Grid points per edge")->check(CLI::Range(3, 100000));
        sub->add_option("--input", config.input, "preset:<name> or CSV path (edge_id,s,value)");
        sub->add_option("--out", config.out_path, "Output CSV path (default stdout)");
        sub->add_flag("--no-header", [&](std::int64_t) { config.header = false; }, "Omit the commented header line");
    };

    auto *validate = app.add_subcommand("validate", "Check a graph document and report conservativity");
    validate->add_option("graph", config.graph_path, "Graph JSON file")->required();

    auto *resolvent = app.add_subcommand("resolvent", "Resolvent (lambda - A_eps)^{-1} applied to the input");
    resolvent->add_option("--graph", config.graph_path)->required();
    resolvent->add_option("--lambda", config.lambda)->required();
    resolvent->add_option("--eps", config.eps)->check(CLI::Range(0.0, 1.0));
    common(resolvent);

    auto *evolve_cmd = app.add_subcommand("evolve", "Evolve the input under e^{t A_eps}");
    evolve_cmd->add_option("--graph", config.graph_path)->required();
    evolve_cmd->add_option("--t", config.t)->required();
    evolve_cmd->add_option("--eps", config.eps)->check(CLI::Range(0.0, 1.0));
    evolve_cmd->add_option("--steps", config.steps, "Resolvent steps (default adaptive)");
    evolve_cmd->add_option("--method", config.method, "be (default) or cn");
    common(evolve_cmd);

    auto *limit_cmd = app.add_subcommand("limit", "Limit dynamics e^{tQ}P u or (lambda - Q)^{-1} P u");
    limit_cmd->add_option("--graph", config.graph_path)->required();
    limit_cmd->add_option("--t", config.t);
    limit_cmd->add_option("--lambda", config.lambda);
    common(limit_cmd);

    auto *converge = app.add_subcommand("converge", "Error table of e^{t A_eps} u against e^{tQ} P u");
    converge->add_option("--graph", config.graph_path)->required();
    converge->add_option("--t", config.t)->required();
    converge->add_option("--eps-list", config.eps_list, "Comma-separated eps values")->delimiter(',')->required();
    converge->add_option("--steps", config.steps, "Fixed step count (default adaptive)");
    common(converge);

    auto *oracle = app.add_subcommand("oracle", "Compare against the finite-difference discretisation");
    oracle->add_option("--graph", config.graph_path)->required();
    oracle->add_option("--eps", config.eps)->check(CLI::Range(0.0, 1.0));
    oracle->add_option("--lambda", config.lambda);
    oracle->add_option("--t", config.t);
    oracle->add_option("--steps", config.steps);
    oracle->add_option("--method", config.method);
    common(oracle);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitValidation;
    }

    if (validate->parsed()) {
        config.command = Command::Validate;
    } else if (resolvent->parsed()) {
        config.command = Command::Resolvent;
    } else if (evolve_cmd->parsed()) {
        config.command = Command::Evolve;
    } else if (limit_cmd->parsed()) {
        config.command = Command::Limit;
    } else if (converge->parsed()) {
        config.command = Command::Converge;
    } else {
        config.command = Command::Oracle;
    }
    config.log_level = log_level == "quiet" ? LogLevel::Quiet : log_level == "debug" ? LogLevel::Debug : LogLevel::Info;
    return run(config, out, err);
}

} // namespace sticky::cli
