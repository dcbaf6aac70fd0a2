#include "stickygraph/limit_dynamics.hpp"

#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "stickygraph/errors.hpp"
#include "stickygraph/sticky_edge.hpp"

namespace sticky {

EdgeClass edge_class(const EdgeSpec &spec) {
    return spec.p * spec.q == 1.0 ? EdgeClass::Affine : EdgeClass::Constant;
}

std::size_t limit_dimension(const MetricGraph &g) {
    std::size_t dim = 0;
    for (const EdgeSpec &spec : g.edges()) {
        dim += edge_class(spec) == EdgeClass::Affine ? 2 : 1;
    }
    return dim;
}

LimitCoordinates::LimitCoordinates(const MetricGraph &g)
    : LimitCoordinates(g, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(limit_dimension(g)))) {}

LimitCoordinates::LimitCoordinates(const MetricGraph &g, Eigen::VectorXd values) : values_(std::move(values)) {
    std::size_t offset = 0;
    for (const EdgeSpec &spec : g.edges()) {
        classes_.push_back(sticky::edge_class(spec));
        offsets_.push_back(offset);
        offset += classes_.back() == EdgeClass::Affine ? 2 : 1;
    }
    if (offset != static_cast<std::size_t>(values_.size())) {
        throw DomainError("limit coordinate vector has the wrong dimension");
    }
}

double LimitCoordinates::at(std::size_t e, End end) const {
    const auto k = static_cast<Eigen::Index>(offsets_[e]);
    if (classes_[e] == EdgeClass::Constant) {
        return values_(k);
    }
    return end == End::Left ? values_(k) : values_(k + 1);
}

double LimitCoordinates::at(std::size_t e, double s) const {
    const auto k = static_cast<Eigen::Index>(offsets_[e]);
    if (classes_[e] == EdgeClass::Constant) {
        return values_(k);
    }
    return (1.0 - s) * values_(k) + s * values_(k + 1);
}

LimitCoordinates project_P(const MetricGraph &g, const GraphFunction &u) {
    if (u.edge_count() != g.edge_count()) {
        throw DomainError("graph function does not match the graph");
    }
    LimitCoordinates out(g);
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        const EdgeSpec &spec = g.edge(e);
        const GridFunction1D projected = projection_P(StickyParams(spec.p, spec.q), u[e]);
        const auto k = static_cast<Eigen::Index>(out.offset(e));
        out.values()(k) = projected.front();
        if (out.edge_class(e) == EdgeClass::Affine) {
            out.values()(k + 1) = projected.back();
        }
    }
    return out;
}

GraphFunction lift(const LimitCoordinates &x, std::size_t m) {
    return GraphFunction::sample(x.edge_count(), m, [&x](std::size_t e, double s) { return x.at(e, s); });
}

LimitCoordinates q_action_from_endpoints(const MetricGraph &g, const BoundaryVector &ends) {
    const BoundaryVector flux = phi_from_endpoints(g, ends);
    LimitCoordinates out(g);
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        const EdgeSpec &spec = g.edge(e);
        const auto k = static_cast<Eigen::Index>(out.offset(e));
        if (out.edge_class(e) == EdgeClass::Affine) {
            out.values()(k) = spec.sigma * flux.left(e);
            out.values()(k + 1) = spec.sigma * flux.right(e);
        } else {
            out.values()(k) =
                spec.sigma * ((1.0 - spec.q) * flux.left(e) + (1.0 - spec.p) * flux.right(e)) / (1.0 - spec.p * spec.q);
        }
    }
    return out;
}

LimitCoordinates q_action(const MetricGraph &g, const GraphFunction &u) {
    if (u.edge_count() != g.edge_count()) {
        throw DomainError("graph function does not match the graph");
    }
    return q_action_from_endpoints(g, endpoint_values(u));
}

Eigen::MatrixXd build_Q_matrix(const MetricGraph &g) {
    const std::size_t dim = limit_dimension(g);
    Eigen::MatrixXd m(dim, dim);
    LimitCoordinates basis(g);
    for (std::size_t j = 0; j < dim; ++j) {
        basis.values().setZero();
        basis.values()(static_cast<Eigen::Index>(j)) = 1.0;
        BoundaryVector ends(g.edge_count());
        for (std::size_t e = 0; e < g.edge_count(); ++e) {
            ends.at(e, End::Left) = basis.at(e, End::Left);
            ends.at(e, End::Right) = basis.at(e, End::Right);
        }
        m.col(static_cast<Eigen::Index>(j)) = q_action_from_endpoints(g, ends).values();
    }
    return m;
}

Eigen::MatrixXd exp_tQ_matrix(const MetricGraph &g, double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw DomainError("t must be nonnegative");
    }
    const Eigen::MatrixXd m = build_Q_matrix(g);
    if (t == 0.0) {
        return Eigen::MatrixXd::Identity(m.rows(), m.cols());
    }
    return (t * m).exp();
}

LimitCoordinates exp_tQ(const MetricGraph &g, double t, const LimitCoordinates &x) {
    const Eigen::MatrixXd e = exp_tQ_matrix(g, t);
    return LimitCoordinates(g, e * x.values());
}

LimitCoordinates limit_resolvent(const MetricGraph &g, double lambda, const GraphFunction &u) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw DomainError("lambda must be a positive real");
    }
    const Eigen::MatrixXd m = build_Q_matrix(g);
    const Eigen::MatrixXd shifted = lambda * Eigen::MatrixXd::Identity(m.rows(), m.cols()) - m;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(shifted);
    if (!lu.isInvertible() || lu.rcond() < 1e-14) {
        std::ostringstream msg;
        msg << "lambda = " << lambda << " is (numerically) an eigenvalue of the limit generator";
        throw NumericError(msg.str());
    }
    const LimitCoordinates pu = project_P(g, u);
    return LimitCoordinates(g, lu.solve(pu.values()));
}

} // namespace sticky
