#ifndef STICKYGRAPH_SEMIGROUP_ENGINE_HPP
#define STICKYGRAPH_SEMIGROUP_ENGINE_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "stickygraph/graph_model.hpp"
#include "stickygraph/graph_operator.hpp"

namespace sticky {

/// Time stepping through the resolvent. BackwardEuler is u <- (n/t) R(n/t) u,
/// which preserves positivity and contraction exactly; CrankNicolson is
/// u <- 2 (2n/t) R(2n/t) u - u, second order but without a positivity guarantee.
enum class StepMethod { BackwardEuler, CrankNicolson };

std::string to_string(StepMethod method);

struct EvolutionDiagnostics {
    double min_value = 0.0;
    double positivity_violation = 0.0;  // max(0, -min u_t)
    double growth = 0.0;                // ||u_t|| / ||u0||
    double conservativity_defect = 0.0; // ||u_t - 1||; NaN unless u0 == 1
};

struct EvolutionResult {
    double t = 0.0;
    GraphFunction u_t;
    std::size_t steps = 0;
    StepMethod method = StepMethod::BackwardEuler;
    EvolutionDiagnostics diagnostics;
};

/// Approximates e^{t A_eps} u0 with n resolvent steps. Throws NumericError if
/// the boundary-space system is ill-conditioned at the step's lambda (raise n).
EvolutionResult evolve(const MetricGraph &g, double eps, double t, std::size_t n, const GraphFunction &u0,
                       StepMethod method = StepMethod::BackwardEuler);

struct FellerReport {
    double min_value = 0.0;
    double norm_ratio = 0.0;
    std::optional<double> conservativity_defect;  // set when u0 == 1
    bool positivity_ok = true;                    // vacuous unless u0 >= 0
    bool contraction_ok = true;
    bool conservative_ok = true;                  // vacuous unless u0 == 1 on a conservative graph
};

inline constexpr double kFellerTol = 1e-6;

FellerReport feller_check(const MetricGraph &g, const EvolutionResult &result, const GraphFunction &u0);

struct ConvergenceOptions {
    std::size_t initial_steps = 64;
    std::size_t max_steps = std::size_t{1} << 14;
    double stability = 0.1;      // stop doubling when successive errors differ by less than this fraction
    std::optional<std::size_t> fixed_steps;  // disables adaptivity
    bool parallel = true;
};

struct ConvergenceRow {
    double eps = 0.0;
    std::size_t steps = 0;
    double err = 0.0;
    bool capped = false;  // hit max_steps before the error stabilised
};

struct ConvergenceTable {
    double t = 0.0;
    std::vector<ConvergenceRow> rows;
    double initial_err = 0.0;  // ||u0 - P u0||: the t = 0 error, zero iff u0 is in the limit space
    double decay_ratio = 0.0;  // err(last eps) / err(first eps)
    double fitted_slope = 0.0; // least-squares slope of log err against log eps
};

/// Sup distance between the eps-evolution and the limit evolution e^{tQ} P u0
/// for each eps. t = 0 compares u0 with P u0 directly.
ConvergenceTable convergence_experiment(const MetricGraph &g, double t, const std::vector<double> &eps_list,
                                        const GraphFunction &u0, const ConvergenceOptions &options = {});

} // namespace sticky

#endif
