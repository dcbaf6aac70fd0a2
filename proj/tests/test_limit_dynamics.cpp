#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "stickygraph/graph_operator.hpp"
#include "stickygraph/limit_dynamics.hpp"

using namespace sticky;
using doctest::Approx;

namespace {

constexpr std::size_t kM = 201;

GraphFunction random_input(fixtures::Gen &gen, std::size_t n) {
    std::vector<GridFunction1D> edges;
    for (std::size_t e = 0; e < n; ++e) {
        edges.push_back(gen.smooth(kM));
    }
    return GraphFunction(std::move(edges));
}

MetricGraph insulated_mixed() {
    auto edges = fixtures::mixed_star().edges();
    for (auto &e : edges) {
        e.l = e.r = 0.0;
        e.l_out.clear();
        e.r_out.clear();
    }
    return MetricGraph::build(edges);
}

} // namespace

TEST_CASE("edge classes and dimension") {
    const auto g = fixtures::mixed_star();
    CHECK(edge_class(g.edge(0)) == EdgeClass::Constant);
    CHECK(edge_class(g.edge(1)) == EdgeClass::Affine);
    CHECK(edge_class(g.edge(2)) == EdgeClass::Constant);
    CHECK(limit_dimension(g) == 4);
    CHECK(limit_dimension(fixtures::star3()) == 3);
}

TEST_CASE("project_P examples") {
    const auto g = fixtures::mixed_star();
    const auto ones = project_P(g, GraphFunction::constant(3, kM, 1.0));
    CHECK((ones.values().array() - 1.0).abs().maxCoeff() < 1e-14);

    const auto reflecting = fixtures::single_edge(0.0, 0.0);
    const auto cosine =
        GraphFunction::sample(1, kM, [](std::size_t, double s) { return std::cos(std::numbers::pi * s); });
    CHECK(std::abs(project_P(reflecting, cosine).values()(0)) < 1e-12);

    fixtures::Gen gen(1);
    for (int k = 0; k < 10; ++k) {
        const auto u = random_input(gen, 3);
        const auto x = project_P(g, u);
        const auto again = project_P(g, lift(x, kM));
        CHECK((again.values() - x.values()).cwiseAbs().maxCoeff() < 1e-14);
        CHECK(x.at(1, End::Left) == u[1].front());
        CHECK(x.at(1, End::Right) == u[1].back());
    }
}

TEST_CASE("lift then extract is the identity") {
    const auto g = fixtures::mixed_star();
    Eigen::VectorXd raw(4);
    raw << 0.5, -1.0, 2.0, 3.0;
    const LimitCoordinates x(g, raw);
    const auto u = lift(x, kM);
    CHECK(u[1][kM / 2] == Approx(0.5));
    CHECK((project_P(g, u).values() - raw).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("Q matrix examples") {
    CHECK(build_Q_matrix(insulated_mixed()).cwiseAbs().maxCoeff() == 0.0);

    Eigen::Matrix2d expected;
    expected << -1, 1, 1, -1;
    CHECK((build_Q_matrix(fixtures::two_edge(0.0, 0.0)) - expected).cwiseAbs().maxCoeff() < 1e-15);

    for (const auto &g : {fixtures::star3(), fixtures::mixed_star(), fixtures::star3(0.9, 0.1, {3, 1, 0.2})}) {
        const Eigen::MatrixXd q = build_Q_matrix(g);
        CHECK(q.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-12);
        for (Eigen::Index i = 0; i < q.rows(); ++i) {
            for (Eigen::Index j = 0; j < q.cols(); ++j) {
                if (i != j) {
                    CHECK(q(i, j) >= -1e-12);
                }
            }
        }
    }
}

TEST_CASE("Q matrix for the star: constant-class closed form") {
    const auto g = fixtures::star3(0.3, 0.3, {1.0, 2.0, 0.5});
    const Eigen::MatrixXd q = build_Q_matrix(g);
    const double sig[3] = {1.0, 2.0, 0.5};
    for (int e = 0; e < 3; ++e) {
        const double factor = sig[e] * 0.7 / (1.0 - 0.09);
        for (int f = 0; f < 3; ++f) {
            CHECK(q(e, f) == Approx(e == f ? -2.0 * factor : factor).epsilon(1e-14));
        }
    }
}

TEST_CASE("exp_tQ examples") {
    const auto g = fixtures::mixed_star();
    Eigen::VectorXd raw(4);
    raw << 0.1, 0.2, 0.3, 0.4;
    const LimitCoordinates x(g, raw);
    CHECK((exp_tQ(g, 0.0, x).values() - raw).cwiseAbs().maxCoeff() == 0.0);

    const LimitCoordinates ones(g, Eigen::VectorXd::Ones(4));
    for (double t : {0.5, 3.0, 10.0}) {
        CHECK((exp_tQ(g, t, ones).values().array() - 1.0).abs().maxCoeff() < 1e-12);
        const Eigen::MatrixXd m = exp_tQ_matrix(g, t);
        CHECK((m.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-10);
        CHECK(m.minCoeff() >= -1e-10);
    }

    const auto two = fixtures::two_edge(0.0, 0.0);
    const auto y = exp_tQ(two, 1.0, LimitCoordinates(two, Eigen::Vector2d(1.0, 0.0)));
    CHECK(std::abs(y.values()(0) - oracle::kExpT1First) <= 1e-10);
    CHECK(std::abs(y.values()(1) - oracle::kExpT1Second) <= 1e-10);
    CHECK(y.values()(0) == Approx(0.5676676).epsilon(1e-7));
}

TEST_CASE("exp_tQ semigroup property") {
    const auto g = fixtures::mixed_star();
    const Eigen::MatrixXd a = exp_tQ_matrix(g, 0.7);
    const Eigen::MatrixXd b = exp_tQ_matrix(g, 1.6);
    CHECK((a * b - exp_tQ_matrix(g, 2.3)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("limit_resolvent examples") {
    const auto g = fixtures::mixed_star();
    const auto ones = limit_resolvent(g, 4.0, GraphFunction::constant(3, kM, 1.0));
    CHECK((ones.values().array() - 0.25).abs().maxCoeff() < 1e-14);

    fixtures::Gen gen(2);
    const auto iso = insulated_mixed();
    const auto u = random_input(gen, 3);
    CHECK((limit_resolvent(iso, 2.0, u).values() - project_P(iso, u).values() / 2.0).cwiseAbs().maxCoeff() < 1e-14);

    const auto two = fixtures::two_edge(0.0, 0.0);
    const auto step = GraphFunction::sample(2, kM, [](std::size_t e, double) { return e == 0 ? 1.0 : 0.0; });
    const auto r = limit_resolvent(two, 1.0, step);
    CHECK(r.values()(0) == Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(r.values()(1) == Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("lift of eps Phi converges to lambda^-1 Q: constant and affine edges") {
    const auto g = fixtures::mixed_star();
    fixtures::Gen gen(3);
    const double lambda = 5.0;
    for (int k = 0; k < 5; ++k) {
        const auto u = random_input(gen, 3);
        const auto flux = phi(g, u);
        const auto target = lift(q_action(g, u), kM);
        auto deviation = [&](double eps) {
            Eigen::VectorXd scaled = eps * flux.data();
            auto v = harmonic_lift(g, lambda, eps, BoundaryVector(scaled)).sample(kM);
            double worst = 0.0;
            for (std::size_t e = 0; e < 3; ++e) {
                for (std::size_t i = 0; i < kM; ++i) {
                    worst = std::max(worst, std::abs(v[e][i] - target[e][i] / lambda));
                }
            }
            return worst;
        };
        CHECK(deviation(1e-4) <= 1e-3 * (1.0 + u.sup_norm()));
        CHECK(deviation(1e-4) < deviation(1e-1));
    }
}

TEST_CASE("q_action agrees with the Q matrix on limit functions") {
    const auto g = fixtures::mixed_star();
    Eigen::VectorXd raw(4);
    raw << 0.3, -0.2, 1.1, 0.6;
    const auto u = lift(LimitCoordinates(g, raw), kM);
    CHECK((q_action(g, u).values() - build_Q_matrix(g) * raw).cwiseAbs().maxCoeff() < 1e-13);
}
