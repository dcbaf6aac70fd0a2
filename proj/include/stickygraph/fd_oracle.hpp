#ifndef STICKYGRAPH_FD_ORACLE_HPP
#define STICKYGRAPH_FD_ORACLE_HPP

// Finite-difference discretisation of the graph generator, used only to
// cross-check the analytic resolvent and the stepping engine.
//
// Interior nodes use the three-point Laplacian. At an edge end the sticky
// condition p u'' - p* u' = eps Phi u is discretised on the half cell
// [0, h/2]: the flux balance there gives
//
//   (p + p* h/2) du/dt(0) = D p* (u_1 - u_0) / h + sigma Phi^- u,   D = sigma/eps,
//
// which is the ghost-node Robin row for p = 0 and pure membrane exchange for
// p = 1. All off-diagonal entries stay nonnegative, so the matrix is a
// sub-Markov generator.

#include <cstddef>

#include <Eigen/Sparse>

#include "stickygraph/graph_model.hpp"
#include "stickygraph/graph_operator.hpp"

namespace sticky {

struct DiscreteGenerator {
    std::size_t edge_count = 0;
    std::size_t m = 0;
    double h = 0.0;
    Eigen::SparseMatrix<double> matrix;

    Eigen::Index index(std::size_t edge, std::size_t node) const {
        return static_cast<Eigen::Index>(edge * m + node);
    }
    Eigen::VectorXd flatten(const GraphFunction &u) const;
    GraphFunction unflatten(const Eigen::VectorXd &x) const;
};

DiscreteGenerator build_generator(const MetricGraph &g, double eps, std::size_t m);

/// Solves (lambda - matrix) u = v with a sparse LU factorisation.
GraphFunction oracle_resolvent(const DiscreteGenerator &gen, double lambda, const GraphFunction &v);

/// e^{t matrix} u0: dense scaling and squaring up to dimension 5000, 4096
/// Crank-Nicolson steps above that.
GraphFunction oracle_evolve(const DiscreteGenerator &gen, double t, const GraphFunction &u0);

inline constexpr std::size_t kDenseExpLimit = 5000;

} // namespace sticky

#endif
