#ifndef STICKYGRAPH_GRAPH_OPERATOR_HPP
#define STICKYGRAPH_GRAPH_OPERATOR_HPP

#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "stickygraph/graph_model.hpp"
#include "stickygraph/grid.hpp"
#include "stickygraph/sticky_edge.hpp"

namespace sticky {

/// A function on the disjoint union of the edge intervals, one grid per edge.
class GraphFunction {
  public:
    GraphFunction() = default;
    explicit GraphFunction(std::vector<GridFunction1D> edges);

    static GraphFunction constant(std::size_t edge_count, std::size_t m, double value);
    static GraphFunction sample(std::size_t edge_count, std::size_t m,
                                const std::function<double(std::size_t, double)> &fn);

    std::size_t edge_count() const { return edges_.size(); }
    std::size_t grid_size() const { return edges_.empty() ? 0 : edges_.front().size(); }
    const GridFunction1D &operator[](std::size_t e) const { return edges_[e]; }
    GridFunction1D &operator[](std::size_t e) { return edges_[e]; }
    const std::vector<GridFunction1D> &edges() const { return edges_; }

    double sup_norm() const;
    double min() const;

  private:
    std::vector<GridFunction1D> edges_;
};

double sup_distance(const GraphFunction &a, const GraphFunction &b);

/// Element of R^{2|E|}: (left, right) per edge in graph edge order.
class BoundaryVector {
  public:
    explicit BoundaryVector(std::size_t edge_count) : data_(Eigen::VectorXd::Zero(2 * edge_count)) {}
    explicit BoundaryVector(Eigen::VectorXd data);

    std::size_t edge_count() const { return static_cast<std::size_t>(data_.size()) / 2; }
    double at(std::size_t e, End end) const { return data_(index(e, end)); }
    double &at(std::size_t e, End end) { return data_(index(e, end)); }
    double left(std::size_t e) const { return at(e, End::Left); }
    double right(std::size_t e) const { return at(e, End::Right); }
    const Eigen::VectorXd &data() const { return data_; }
    double sup_norm() const { return data_.size() == 0 ? 0.0 : data_.cwiseAbs().maxCoeff(); }

    static Eigen::Index index(std::size_t e, End end) {
        return static_cast<Eigen::Index>(2 * e + (end == End::Left ? 0 : 1));
    }

  private:
    Eigen::VectorXd data_;
};

/// (u(e^-), u(e^+)) per edge.
BoundaryVector endpoint_values(const GraphFunction &u);

/// Matrix of the membrane functional acting on endpoint values, so that
/// phi(u) = phi_matrix(g) * endpoint_values(u).
Eigen::MatrixXd phi_matrix(const MetricGraph &g);

/// Per edge: left = sum_f l_{e,f} u(f_e^-) - l_e u(e^-),
///           right = sum_f r_{e,f} u(f_e^+) - r_e u(e^+).
BoundaryVector phi(const MetricGraph &g, const GraphFunction &u);
BoundaryVector phi_from_endpoints(const MetricGraph &g, const BoundaryVector &ends);

/// Which member of the operator family to resolve: on edge e the diffusion
/// coefficient is diffusion_scale * sigma_e and the domain condition is
/// L u = coupling * Phi u.
///
///   A_eps:         diffusion_scale = 1/eps, coupling = eps
///   eps * A_eps:   diffusion_scale = 1,     coupling = eps
///   base (Phi=0):  diffusion_scale = 1/eps, coupling = 0
struct OperatorScaling {
    double diffusion_scale = 1.0;
    double coupling = 1.0;

    static OperatorScaling a_eps(double eps);
    static OperatorScaling scaled_a_eps(double eps);
    static OperatorScaling base(double eps);
};

/// Element of ker(lambda - D d^2/dx^2): c_e e^{g_e s} + d_e e^{-g_e s} per edge.
class HarmonicLift {
  public:
    struct EdgeTerm {
        double gamma;
        double c_scaled;  // coefficient of e^{gamma (s - 1)}
        double d;
    };

    explicit HarmonicLift(std::vector<EdgeTerm> terms) : terms_(std::move(terms)) {}

    std::size_t edge_count() const { return terms_.size(); }
    const EdgeTerm &term(std::size_t e) const { return terms_[e]; }
    double c(std::size_t e) const { return terms_[e].c_scaled * std::exp(-terms_[e].gamma); }
    double d(std::size_t e) const { return terms_[e].d; }

    double value(std::size_t e, double s) const;
    double value(std::size_t e, End end) const;
    double derivative(std::size_t e, End end) const;
    double second_derivative(std::size_t e, End end) const;
    BoundaryVector endpoint_values() const;
    GraphFunction sample(std::size_t m) const;

  private:
    std::vector<EdgeTerm> terms_;
};

/// Inverse of L restricted to ker(lambda - eps^{-1} sigma d^2/dx^2):
/// gamma_e = sqrt(lambda eps / sigma_e), and (c_e, d_e) solve the sticky boundary
/// system with right-hand side (a_e / gamma_e, b_e / gamma_e).
HarmonicLift harmonic_lift(const MetricGraph &g, double lambda, double eps, const BoundaryVector &data);
HarmonicLift harmonic_lift_scaled(const MetricGraph &g, double lambda, double diffusion_scale,
                                  const BoundaryVector &data);

/// Edgewise resolvent with homogeneous boundary data L w = 0.
struct BaseResolvent {
    std::vector<EdgeResolventRep> edges;

    GraphFunction sample() const;
    BoundaryVector endpoint_values() const;
};

BaseResolvent resolvent_base(const MetricGraph &g, double lambda, double eps, const GraphFunction &v);

struct GraphResolvent {
    GraphFunction u;
    BaseResolvent base;
    HarmonicLift correction;
    BoundaryVector flux;  // Phi u
    double condition = 1.0;
    double residual_ode = 0.0;       // max over interior nodes of |lambda u - D u'' - v|
    double residual_boundary = 0.0;  // max |L u - coupling Phi u|
    std::vector<std::vector<double>> node_residuals;  // |lambda u - D u'' - v| per edge and node
    BoundaryVector boundary_residuals{0};             // |L u - coupling Phi u| per edge end
};

/// Reusable solver for one (graph, lambda, scaling, grid) combination: the
/// edge kernels and the boundary-space system are factored once.
class ResolventPlan {
  public:
    ResolventPlan(const MetricGraph &g, double lambda, OperatorScaling scaling, std::size_t m);

    double lambda() const { return lambda_; }
    const OperatorScaling &scaling() const { return scaling_; }
    std::size_t grid_size() const { return m_; }
    /// 1-norm condition number of I - coupling * Phi * L_lambda.
    double condition() const { return condition_; }

    /// Full solve with residual diagnostics; does not throw on residuals.
    GraphResolvent apply(const GraphFunction &v) const;
    /// Same solution, sampled only.
    GraphFunction apply_sampled(const GraphFunction &v) const;

  private:
    BaseResolvent resolve_base(const GraphFunction &v) const;
    BoundaryVector solve_flux(const BoundaryVector &base_ends) const;
    HarmonicLift lift(const BoundaryVector &flux) const;

    double lambda_;
    OperatorScaling scaling_;
    std::size_t m_;
    std::vector<EdgeKernel> kernels_;
    std::vector<double> gammas_;
    Eigen::MatrixXd phi_;
    Eigen::MatrixXd lift_ends_;  // endpoint values of the lift of unit data, per column
    Eigen::PartialPivLU<Eigen::MatrixXd> system_;
    double condition_ = 1.0;
    std::vector<std::vector<double>> rising_;   // e^{gamma (s_i - 1)}
    std::vector<std::vector<double>> falling_;  // e^{-gamma s_i}
};

/// Largest condition number accepted for the boundary-space system.
inline constexpr double kMaxCondition = 1e8;

/// (lambda - A)^{-1} v for the member of the family selected by scaling.
/// Throws NumericError when the boundary-space system is ill-conditioned or a
/// residual postcondition fails (ODE or boundary residual above 1e-7 ||v||).
GraphResolvent resolvent_coupled(const MetricGraph &g, double lambda, OperatorScaling scaling,
                                 const GraphFunction &v);

/// (lambda - A_eps)^{-1} v.
GraphResolvent resolvent_A_eps(const MetricGraph &g, double lambda, double eps, const GraphFunction &v);

} // namespace sticky

#endif
