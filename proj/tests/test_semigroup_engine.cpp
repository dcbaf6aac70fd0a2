#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "stickygraph/errors.hpp"
#include "stickygraph/fd_oracle.hpp"
#include "stickygraph/limit_dynamics.hpp"
#include "stickygraph/semigroup_engine.hpp"
#include "stickygraph/sticky_edge.hpp"

using namespace sticky;
using doctest::Approx;

namespace {

constexpr std::size_t kM = 201;
constexpr double kPi = std::numbers::pi;

GraphFunction sin_input(std::size_t n, std::size_t m = kM) {
    return GraphFunction::sample(n, m, [](std::size_t e, double s) { return (1.0 + 0.5 * e) * std::sin(kPi * s); });
}

GraphFunction random_nonnegative(fixtures::Gen &gen, std::size_t n) {
    std::vector<GridFunction1D> edges;
    for (std::size_t e = 0; e < n; ++e) {
        edges.push_back(gen.nonnegative(kM));
    }
    return GraphFunction(std::move(edges));
}

} // namespace

TEST_CASE("constants are preserved on conservative graphs") {
    for (const auto &g : {fixtures::star3(), fixtures::mixed_star()}) {
        const auto ones = GraphFunction::constant(3, kM, 1.0);
        const auto r = evolve(g, 0.3, 2.0, 40, ones);
        CHECK(sup_distance(r.u_t, ones) <= 1e-6);
        CHECK(r.diagnostics.conservativity_defect <= 1e-6);
    }
    const auto r = evolve(fixtures::star3(), 1.0, 1.0, 10, sin_input(3));
    CHECK(std::isnan(r.diagnostics.conservativity_defect));
}

TEST_CASE("Neumann eigenfunction decay") {
    const auto g = fixtures::single_edge(0.0, 0.0);
    const auto u0 = GraphFunction::sample(1, kM, [](std::size_t, double s) { return std::cos(kPi * s); });
    const double t = 0.1;
    const auto r = evolve(g, 1.0, t, 512, u0);
    double err = 0.0;
    for (std::size_t i = 0; i < kM; ++i) {
        err = std::max(err, std::abs(r.u_t[0][i] - std::exp(-kPi * kPi * t) * u0[0][i]));
    }
    CHECK(err / std::exp(-kPi * kPi * t) <= 2e-2);
}

TEST_CASE("long-time limit on one edge is the projection") {
    const StickyParams pr(0.3, 0.6);
    const auto g = fixtures::single_edge(pr.p, pr.q);
    const auto u0 = GraphFunction::sample(1, kM, [](std::size_t, double s) { return s + std::cos(3 * s); });
    const auto r = evolve(g, 1.0, 20.0, 512, u0);
    CHECK(sup_distance(r.u_t[0], projection_P(pr, u0[0])) < 1e-3);
}

TEST_CASE("Feller diagnostics") {
    fixtures::Gen gen(1);
    for (const auto &g : {fixtures::star3(), fixtures::mixed_star(), fixtures::star3(0.3, 0.3, {1, 2, 0.5}, 0.7)}) {
        const auto u0 = random_nonnegative(gen, 3);
        const auto r = evolve(g, 1.0, 1.0, 64, u0);
        const auto report = feller_check(g, r, u0);
        CHECK(report.min_value >= -1e-6);
        CHECK(report.norm_ratio <= 1.0 + 1e-6);
        CHECK(report.positivity_ok);
        CHECK(report.contraction_ok);
        CHECK_FALSE(report.conservativity_defect.has_value());
    }
    const auto leaky = fixtures::star3(0.3, 0.3, {1, 2, 0.5}, 0.7);
    const auto ones = GraphFunction::constant(3, kM, 1.0);
    const auto r = evolve(leaky, 1.0, 1.0, 64, ones);
    const auto report = feller_check(leaky, r, ones);
    CHECK(report.norm_ratio < 1.0);
    CHECK(r.u_t.sup_norm() < 1.0);
}

TEST_CASE("first-order step halving") {
    const auto g = fixtures::star3();
    const auto u0 = sin_input(3);
    const auto a = evolve(g, 1.0, 0.5, 32, u0).u_t;
    const auto b = evolve(g, 1.0, 0.5, 64, u0).u_t;
    const auto c = evolve(g, 1.0, 0.5, 128, u0).u_t;
    const double ratio = sup_distance(a, b) / sup_distance(b, c);
    CHECK(ratio >= 1.5);
    CHECK(ratio <= 3.0);
}

TEST_CASE("Crank-Nicolson is more accurate on smooth data") {
    const auto g = fixtures::single_edge(0.0, 0.0);
    const auto u0 = GraphFunction::sample(1, kM, [](std::size_t, double s) { return std::cos(kPi * s); });
    const double exact = std::exp(-kPi * kPi * 0.1);
    const auto be = evolve(g, 1.0, 0.1, 64, u0, StepMethod::BackwardEuler);
    const auto cn = evolve(g, 1.0, 0.1, 64, u0, StepMethod::CrankNicolson);
    CHECK(std::abs(cn.u_t[0][0] - exact) < std::abs(be.u_t[0][0] - exact));
    CHECK(to_string(cn.method) == "crank-nicolson");
}

TEST_CASE("semigroup property") {
    const auto g = fixtures::mixed_star();
    const auto u0 = sin_input(3);
    const std::size_t n = 1024;
    const auto whole = evolve(g, 0.5, 1.0, 2 * n, u0).u_t;
    const auto half = evolve(g, 0.5, 0.5, n, u0).u_t;
    const auto twice = evolve(g, 0.5, 0.5, n, half).u_t;
    CHECK(sup_distance(whole, twice) <= 1e-8);
    const auto uneven = evolve(g, 0.5, 0.7, 700, evolve(g, 0.5, 0.3, 300, u0).u_t).u_t;
    CHECK(sup_distance(whole, uneven) <= 2e-3);
}

TEST_CASE("agreement with the oracle evolution") {
    const auto g = fixtures::star3();
    const auto u0 = sin_input(3);
    for (double eps : {1.0, 0.1}) {
        const auto r = evolve(g, eps, 1.0, 4096, u0).u_t;
        const auto fd = oracle_evolve(build_generator(g, eps, kM), 1.0, u0);
        CHECK(sup_distance(r, fd) <= 5e-3);
    }
}

TEST_CASE("convergence experiment: limit-space data at t = 0") {
    const auto g = fixtures::mixed_star();
    Eigen::VectorXd raw(4);
    raw << 0.3, 1.0, -0.5, 0.8;
    const auto u0 = lift(LimitCoordinates(g, raw), kM);
    const auto table = convergence_experiment(g, 0.0, {1e-1, 1e-2}, u0);
    CHECK(table.initial_err <= 1e-8);
    for (const auto &row : table.rows) {
        CHECK(row.err <= 1e-8);
    }
}

TEST_CASE("convergence experiment: insulated graph equilibrates") {
    auto edges = fixtures::star3().edges();
    for (auto &e : edges) {
        e.l = e.r = 0.0;
        e.l_out.clear();
        e.r_out.clear();
    }
    const auto g = MetricGraph::build(edges);
    const auto table = convergence_experiment(g, 0.05, {1.0, 1e-1, 1e-2}, sin_input(3));
    REQUIRE(table.rows.size() == 3);
    CHECK(table.rows[1].err < table.rows[0].err);
    CHECK(table.rows[2].err < table.rows[1].err);
    CHECK(table.initial_err > 0.1);
}

TEST_CASE("fixed step count and sequential mode agree with parallel mode") {
    const auto g = fixtures::star3();
    ConvergenceOptions serial;
    serial.fixed_steps = 128;
    serial.parallel = false;
    ConvergenceOptions parallel = serial;
    parallel.parallel = true;
    const auto a = convergence_experiment(g, 0.5, {0.5, 0.05}, sin_input(3), serial);
    const auto b = convergence_experiment(g, 0.5, {0.5, 0.05}, sin_input(3), parallel);
    for (std::size_t k = 0; k < 2; ++k) {
        CHECK(a.rows[k].steps == 128);
        CHECK(a.rows[k].err == b.rows[k].err);
    }
}

TEST_CASE("argument validation") {
    const auto g = fixtures::star3();
    CHECK_THROWS_AS(evolve(g, 1.0, 0.0, 10, sin_input(3)), DomainError);
    CHECK_THROWS_AS(evolve(g, 1.0, 1.0, 0, sin_input(3)), DomainError);
    CHECK_THROWS_AS(evolve(g, 0.0, 1.0, 10, sin_input(3)), DomainError);
}

TEST_CASE("convergence experiment: non-trivial limit dynamics") {
    const auto g = fixtures::star3();
    const auto u0 = GraphFunction::sample(3, 51, [](std::size_t e, double) { return e == 0 ? 1.0 : 0.0; });
    const auto table = convergence_experiment(g, 1.0, {1e-1, 1e-2, 1e-3}, u0);
    REQUIRE(table.rows.size() == 3);
    CHECK(table.rows[1].err < table.rows[0].err);
    CHECK(table.rows[2].err < table.rows[1].err);
    CHECK(table.rows[0].err > 1e-3);
    CHECK(table.fitted_slope > 0.5);
    CHECK(table.decay_ratio < 0.1);
}
