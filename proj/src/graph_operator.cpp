#include "stickygraph/graph_operator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "stickygraph/errors.hpp"

namespace sticky {

GraphFunction::GraphFunction(std::vector<GridFunction1D> edges) : edges_(std::move(edges)) {
    for (const auto &f : edges_) {
        if (f.size() != edges_.front().size()) {
            throw DomainError("graph function edges must share one grid size");
        }
    }
}

GraphFunction GraphFunction::constant(std::size_t edge_count, std::size_t m, double value) {
    return GraphFunction(std::vector<GridFunction1D>(edge_count, GridFunction1D(m, value)));
}

GraphFunction GraphFunction::sample(std::size_t edge_count, std::size_t m,
                                    const std::function<double(std::size_t, double)> &fn) {
    std::vector<GridFunction1D> edges;
    edges.reserve(edge_count);
    for (std::size_t e = 0; e < edge_count; ++e) {
        edges.push_back(GridFunction1D::sample(m, [&](double x) { return fn(e, x); }));
    }
    return GraphFunction(std::move(edges));
}

double GraphFunction::sup_norm() const {
    double s = 0.0;
    for (const auto &f : edges_) {
        s = std::max(s, f.sup_norm());
    }
    return s;
}

double GraphFunction::min() const {
    double s = edges_.front().min();
    for (const auto &f : edges_) {
        s = std::min(s, f.min());
    }
    return s;
}

double sup_distance(const GraphFunction &a, const GraphFunction &b) {
    if (a.edge_count() != b.edge_count()) {
        throw DomainError("graph function edge count mismatch");
    }
    double s = 0.0;
    for (std::size_t e = 0; e < a.edge_count(); ++e) {
        s = std::max(s, sup_distance(a[e], b[e]));
    }
    return s;
}

BoundaryVector::BoundaryVector(Eigen::VectorXd data) : data_(std::move(data)) {
    if (data_.size() % 2 != 0) {
        throw DomainError("boundary vector length must be even");
    }
}

BoundaryVector endpoint_values(const GraphFunction &u) {
    BoundaryVector out(u.edge_count());
    for (std::size_t e = 0; e < u.edge_count(); ++e) {
        out.at(e, End::Left) = u[e].front();
        out.at(e, End::Right) = u[e].back();
    }
    return out;
}

Eigen::MatrixXd phi_matrix(const MetricGraph &g) {
    const std::size_t n = g.edge_count();
    Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (std::size_t e = 0; e < n; ++e) {
        const EdgeSpec &spec = g.edge(e);
        for (End side : {End::Left, End::Right}) {
            const Eigen::Index row = BoundaryVector::index(e, side);
            for (const Coupling &c : g.couplings(e, side)) {
                phi(row, BoundaryVector::index(c.target.edge, c.target.end)) += c.rate;
            }
            phi(row, row) -= side == End::Left ? spec.l : spec.r;
        }
    }
    return phi;
}

BoundaryVector phi_from_endpoints(const MetricGraph &g, const BoundaryVector &ends) {
    if (ends.edge_count() != g.edge_count()) {
        throw DomainError("boundary vector does not match the graph");
    }
    BoundaryVector out(g.edge_count());
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        const EdgeSpec &spec = g.edge(e);
        for (End side : {End::Left, End::Right}) {
            double sum = 0.0;
            for (const Coupling &c : g.couplings(e, side)) {
                sum += c.rate * ends.at(c.target.edge, c.target.end);
            }
            sum -= (side == End::Left ? spec.l : spec.r) * ends.at(e, side);
            out.at(e, side) = sum;
        }
    }
    return out;
}

BoundaryVector phi(const MetricGraph &g, const GraphFunction &u) {
    if (u.edge_count() != g.edge_count()) {
        throw DomainError("graph function does not match the graph");
    }
    return phi_from_endpoints(g, endpoint_values(u));
}

OperatorScaling OperatorScaling::a_eps(double eps) { return {1.0 / eps, eps}; }
OperatorScaling OperatorScaling::scaled_a_eps(double eps) { return {1.0, eps}; }
OperatorScaling OperatorScaling::base(double eps) { return {1.0 / eps, 0.0}; }

double HarmonicLift::value(std::size_t e, double s) const {
    const EdgeTerm &t = terms_[e];
    return t.c_scaled * std::exp(t.gamma * (s - 1.0)) + t.d * std::exp(-t.gamma * s);
}

double HarmonicLift::value(std::size_t e, End end) const {
    const EdgeTerm &t = terms_[e];
    const double decay = std::exp(-t.gamma);
    return end == End::Left ? t.c_scaled * decay + t.d : t.c_scaled + t.d * decay;
}

double HarmonicLift::derivative(std::size_t e, End end) const {
    const EdgeTerm &t = terms_[e];
    const double decay = std::exp(-t.gamma);
    return end == End::Left ? t.gamma * (t.c_scaled * decay - t.d) : t.gamma * (t.c_scaled - t.d * decay);
}

double HarmonicLift::second_derivative(std::size_t e, End end) const {
    return terms_[e].gamma * terms_[e].gamma * value(e, end);
}

BoundaryVector HarmonicLift::endpoint_values() const {
    BoundaryVector out(terms_.size());
    for (std::size_t e = 0; e < terms_.size(); ++e) {
        out.at(e, End::Left) = value(e, End::Left);
        out.at(e, End::Right) = value(e, End::Right);
    }
    return out;
}

GraphFunction HarmonicLift::sample(std::size_t m) const {
    return GraphFunction::sample(terms_.size(), m, [this](std::size_t e, double s) { return value(e, s); });
}

namespace {

void require_positive_lambda(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw DomainError("lambda must be a positive real");
    }
}

void require_eps(double eps) {
    if (!(eps > 0.0 && eps <= 1.0)) {
        throw DomainError("eps must lie in (0,1]");
    }
}

HarmonicLift::EdgeTerm lift_term(double gamma, const StickyParams &params, double a, double b) {
    const ScaledCoefficients s = solve_boundary_system_scaled(gamma, params, a / gamma, b / gamma);
    return {gamma, s.c_scaled.real(), s.d.real()};
}

} // namespace

HarmonicLift harmonic_lift_scaled(const MetricGraph &g, double lambda, double diffusion_scale,
                                  const BoundaryVector &data) {
    require_positive_lambda(lambda);
    if (data.edge_count() != g.edge_count()) {
        throw DomainError("boundary data does not match the graph");
    }
    std::vector<HarmonicLift::EdgeTerm> terms;
    terms.reserve(g.edge_count());
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        const EdgeSpec &spec = g.edge(e);
        const double gamma = std::sqrt(lambda / (diffusion_scale * spec.sigma));
        terms.push_back(lift_term(gamma, StickyParams(spec.p, spec.q), data.left(e), data.right(e)));
    }
    return HarmonicLift(std::move(terms));
}

HarmonicLift harmonic_lift(const MetricGraph &g, double lambda, double eps, const BoundaryVector &data) {
    require_eps(eps);
    return harmonic_lift_scaled(g, lambda, 1.0 / eps, data);
}

GraphFunction BaseResolvent::sample() const {
    std::vector<GridFunction1D> out;
    out.reserve(edges.size());
    for (const auto &rep : edges) {
        out.push_back(rep.real_part());
    }
    return GraphFunction(std::move(out));
}

BoundaryVector BaseResolvent::endpoint_values() const {
    BoundaryVector out(edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e) {
        out.at(e, End::Left) = edges[e].value(End::Left).real();
        out.at(e, End::Right) = edges[e].value(End::Right).real();
    }
    return out;
}

BaseResolvent resolvent_base(const MetricGraph &g, double lambda, double eps, const GraphFunction &v) {
    require_positive_lambda(lambda);
    require_eps(eps);
    if (v.edge_count() != g.edge_count()) {
        throw DomainError("graph function does not match the graph");
    }
    BaseResolvent out;
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        const EdgeSpec &spec = g.edge(e);
        out.edges.push_back(edge_resolvent(lambda, StickyParams(spec.p, spec.q), v[e], spec.sigma / eps));
    }
    return out;
}

ResolventPlan::ResolventPlan(const MetricGraph &g, double lambda, OperatorScaling scaling, std::size_t m)
    : lambda_(lambda), scaling_(scaling), m_(m) {
    require_positive_lambda(lambda);
    if (!(scaling.diffusion_scale > 0.0) || !(scaling.coupling >= 0.0)) {
        throw DomainError("invalid operator scaling");
    }
    const std::size_t n = g.edge_count();
    const double h = 1.0 / static_cast<double>(m - 1);
    kernels_.reserve(n);
    for (std::size_t e = 0; e < n; ++e) {
        const EdgeSpec &spec = g.edge(e);
        kernels_.emplace_back(lambda, StickyParams(spec.p, spec.q), scaling.diffusion_scale * spec.sigma, m);
        const double gamma = kernels_.back().mu().real();
        gammas_.push_back(gamma);
        std::vector<double> rising(m), falling(m);
        for (std::size_t i = 0; i < m; ++i) {
            const double s = static_cast<double>(i) * h;
            rising[i] = std::exp(gamma * (s - 1.0));
            falling[i] = std::exp(-gamma * s);
        }
        rising_.push_back(std::move(rising));
        falling_.push_back(std::move(falling));
    }

    phi_ = phi_matrix(g);
    // Column j holds the endpoint values of the lift of the j-th unit boundary vector.
    lift_ends_ = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (std::size_t e = 0; e < n; ++e) {
        const double decay = std::exp(-gammas_[e]);
        for (End side : {End::Left, End::Right}) {
            const double a = side == End::Left ? 1.0 : 0.0;
            const HarmonicLift::EdgeTerm t = lift_term(gammas_[e], kernels_[e].params(), a, 1.0 - a);
            const Eigen::Index col = BoundaryVector::index(e, side);
            lift_ends_(BoundaryVector::index(e, End::Left), col) = t.c_scaled * decay + t.d;
            lift_ends_(BoundaryVector::index(e, End::Right), col) = t.c_scaled + t.d * decay;
        }
    }

    const Eigen::MatrixXd system =
        Eigen::MatrixXd::Identity(2 * n, 2 * n) - scaling.coupling * phi_ * lift_ends_;
    system_.compute(system);
    const Eigen::MatrixXd inverse = system_.inverse();
    const double norm = system.cwiseAbs().colwise().sum().maxCoeff();
    const double inv_norm = inverse.cwiseAbs().colwise().sum().maxCoeff();
    condition_ = std::isfinite(inv_norm) ? norm * inv_norm : std::numeric_limits<double>::infinity();
    if (!(condition_ < kMaxCondition)) {
        std::ostringstream msg;
        msg << "boundary-space system is ill-conditioned at lambda = " << lambda << " (condition estimate "
            << condition_ << "); raise lambda";
        throw NumericError(msg.str());
    }
}

BaseResolvent ResolventPlan::resolve_base(const GraphFunction &v) const {
    if (v.edge_count() != kernels_.size() || v.grid_size() != m_) {
        throw DomainError("graph function does not match the resolvent plan");
    }
    BaseResolvent out;
    out.edges.reserve(kernels_.size());
    for (std::size_t e = 0; e < kernels_.size(); ++e) {
        out.edges.push_back(kernels_[e].resolve(v[e]));
    }
    return out;
}

BoundaryVector ResolventPlan::solve_flux(const BoundaryVector &base_ends) const {
    const Eigen::VectorXd rhs = phi_ * base_ends.data();
    return BoundaryVector(Eigen::VectorXd(system_.solve(rhs)));
}

HarmonicLift ResolventPlan::lift(const BoundaryVector &flux) const {
    std::vector<HarmonicLift::EdgeTerm> terms;
    terms.reserve(kernels_.size());
    const double k = scaling_.coupling;
    for (std::size_t e = 0; e < kernels_.size(); ++e) {
        terms.push_back(lift_term(gammas_[e], kernels_[e].params(), k * flux.left(e), k * flux.right(e)));
    }
    return HarmonicLift(std::move(terms));
}

GraphResolvent ResolventPlan::apply(const GraphFunction &v) const {
    BaseResolvent base = resolve_base(v);
    const BoundaryVector flux = solve_flux(base.endpoint_values());
    HarmonicLift correction = lift(flux);

    const std::size_t n = kernels_.size();
    std::vector<GridFunction1D> edges;
    edges.reserve(n);
    double residual_ode = 0.0;
    std::vector<std::vector<double>> node_residuals(n, std::vector<double>(m_, 0.0));
    for (std::size_t e = 0; e < n; ++e) {
        const auto &t = correction.term(e);
        const EdgeResolventRep &rep = base.edges[e];
        const double diffusion = kernels_[e].diffusion();
        std::vector<double> values(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            const double lifted = t.c_scaled * rising_[e][i] + t.d * falling_[e][i];
            values[i] = rep.samples()[i].real() + lifted;
            const double curvature = rep.second_derivative_at(i).real() + t.gamma * t.gamma * lifted;
            node_residuals[e][i] = std::abs(lambda_ * values[i] - diffusion * curvature - v[e][i]);
            if (i > 0 && i + 1 < m_) {
                residual_ode = std::max(residual_ode, node_residuals[e][i]);
            }
        }
        edges.emplace_back(std::move(values));
    }

    // Domain membership: L u = coupling * Phi u, with everything evaluated analytically.
    BoundaryVector ends(n);
    for (std::size_t e = 0; e < n; ++e) {
        for (End side : {End::Left, End::Right}) {
            ends.at(e, side) = base.edges[e].value(side).real() + correction.value(e, side);
        }
    }
    const Eigen::VectorXd phi_u = phi_ * ends.data();
    double residual_boundary = 0.0;
    BoundaryVector boundary_residuals(n);
    for (std::size_t e = 0; e < n; ++e) {
        const StickyParams &params = kernels_[e].params();
        const EdgeResolventRep &rep = base.edges[e];
        const double d2_left = rep.second_derivative(End::Left).real() + correction.second_derivative(e, End::Left);
        const double d1_left = rep.derivative(End::Left).real() + correction.derivative(e, End::Left);
        const double d2_right = rep.second_derivative(End::Right).real() + correction.second_derivative(e, End::Right);
        const double d1_right = rep.derivative(End::Right).real() + correction.derivative(e, End::Right);
        const double l_left = params.p * d2_left - params.p_star() * d1_left;
        const double l_right = params.q * d2_right + params.q_star() * d1_right;
        boundary_residuals.at(e, End::Left) =
            std::abs(l_left - scaling_.coupling * phi_u(BoundaryVector::index(e, End::Left)));
        boundary_residuals.at(e, End::Right) =
            std::abs(l_right - scaling_.coupling * phi_u(BoundaryVector::index(e, End::Right)));
        residual_boundary =
            std::max({residual_boundary, boundary_residuals.left(e), boundary_residuals.right(e)});
    }

    GraphResolvent out{GraphFunction(std::move(edges)),
                       std::move(base),
                       std::move(correction),
                       BoundaryVector(phi_u),
                       condition_,
                       residual_ode,
                       residual_boundary,
                       std::move(node_residuals),
                       std::move(boundary_residuals)};
    return out;
}

GraphFunction ResolventPlan::apply_sampled(const GraphFunction &v) const {
    const BaseResolvent base = resolve_base(v);
    const BoundaryVector flux = solve_flux(base.endpoint_values());
    const HarmonicLift correction = lift(flux);
    std::vector<GridFunction1D> edges;
    edges.reserve(kernels_.size());
    for (std::size_t e = 0; e < kernels_.size(); ++e) {
        const auto &t = correction.term(e);
        const auto &samples = base.edges[e].samples();
        std::vector<double> values(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            values[i] = samples[i].real() + t.c_scaled * rising_[e][i] + t.d * falling_[e][i];
        }
        edges.emplace_back(std::move(values));
    }
    return GraphFunction(std::move(edges));
}

GraphResolvent resolvent_coupled(const MetricGraph &g, double lambda, OperatorScaling scaling,
                                 const GraphFunction &v) {
    if (v.edge_count() != g.edge_count()) {
        throw DomainError("graph function does not match the graph");
    }
    const ResolventPlan plan(g, lambda, scaling, v.grid_size());
    GraphResolvent out = plan.apply(v);
    const double budget = 1e-7 * v.sup_norm() + 1e-300;
    if (!(out.residual_ode <= budget) || !(out.residual_boundary <= budget)) {
        std::ostringstream msg;
        msg << "resolvent postcondition failed: ODE residual " << out.residual_ode << ", boundary residual "
            << out.residual_boundary << " (budget " << budget << ")";
        throw NumericError(msg.str());
    }
    return out;
}

GraphResolvent resolvent_A_eps(const MetricGraph &g, double lambda, double eps, const GraphFunction &v) {
    require_eps(eps);
    return resolvent_coupled(g, lambda, OperatorScaling::a_eps(eps), v);
}

} // namespace sticky
