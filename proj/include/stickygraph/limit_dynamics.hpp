#ifndef STICKYGRAPH_LIMIT_DYNAMICS_HPP
#define STICKYGRAPH_LIMIT_DYNAMICS_HPP

// Fast-diffusion / weak-membrane limit. Each edge equilibrates instantly to
// its sticky projection: a constant when p_e q_e != 1, an affine profile when
// both ends are absorbing. The remaining slow motion is a finite Markov
// generator acting on those coordinates.

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "stickygraph/graph_model.hpp"
#include "stickygraph/graph_operator.hpp"

namespace sticky {

enum class EdgeClass { Constant, Affine };

EdgeClass edge_class(const EdgeSpec &spec);

/// Coordinates of an element of the range of the limit projection. Constant
/// edges carry one value, Affine edges carry (left, right) endpoint values.
class LimitCoordinates {
  public:
    explicit LimitCoordinates(const MetricGraph &g);
    LimitCoordinates(const MetricGraph &g, Eigen::VectorXd values);

    std::size_t dimension() const { return static_cast<std::size_t>(values_.size()); }
    std::size_t edge_count() const { return classes_.size(); }
    EdgeClass edge_class(std::size_t e) const { return classes_[e]; }
    std::size_t offset(std::size_t e) const { return offsets_[e]; }

    /// Value of the lifted function at the given end of edge e.
    double at(std::size_t e, End end) const;
    /// Value of the lifted function at s in [0,1] on edge e.
    double at(std::size_t e, double s) const;

    const Eigen::VectorXd &values() const { return values_; }
    Eigen::VectorXd &values() { return values_; }

  private:
    std::vector<EdgeClass> classes_;
    std::vector<std::size_t> offsets_;
    Eigen::VectorXd values_;
};

/// |E| + number of doubly absorbing edges.
std::size_t limit_dimension(const MetricGraph &g);

/// Edgewise sticky projection of u, in coordinates.
LimitCoordinates project_P(const MetricGraph &g, const GraphFunction &u);

/// Constant or affine function per edge.
GraphFunction lift(const LimitCoordinates &x, std::size_t m);

/// Action of the limit generator on a general u: per edge the constant
///   sigma_e (q*_e Phi_e^- u + p*_e Phi_e^+ u) / (1 - p_e q_e)
/// or the affine profile with endpoint values sigma_e Phi_e^- u, sigma_e Phi_e^+ u.
LimitCoordinates q_action(const MetricGraph &g, const GraphFunction &u);
LimitCoordinates q_action_from_endpoints(const MetricGraph &g, const BoundaryVector &ends);

/// Matrix of the limit generator on limit coordinates.
Eigen::MatrixXd build_Q_matrix(const MetricGraph &g);

/// e^{tM} x via scaling and squaring with a degree-13 Pade core.
LimitCoordinates exp_tQ(const MetricGraph &g, double t, const LimitCoordinates &x);
Eigen::MatrixXd exp_tQ_matrix(const MetricGraph &g, double t);

/// (lambda - M)^{-1} applied to the coordinates of P u.
LimitCoordinates limit_resolvent(const MetricGraph &g, double lambda, const GraphFunction &u);

} // namespace sticky

#endif
