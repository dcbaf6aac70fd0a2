#include "stickygraph/fd_oracle.hpp"

#include <cmath>
#include <vector>

#include <Eigen/SparseLU>
#include <unsupported/Eigen/MatrixFunctions>

#include "stickygraph/errors.hpp"

namespace sticky {

Eigen::VectorXd DiscreteGenerator::flatten(const GraphFunction &u) const {
    if (u.edge_count() != edge_count || u.grid_size() != m) {
        throw DomainError("graph function does not match the discrete generator");
    }
    Eigen::VectorXd x(static_cast<Eigen::Index>(edge_count * m));
    for (std::size_t e = 0; e < edge_count; ++e) {
        for (std::size_t i = 0; i < m; ++i) {
            x(index(e, i)) = u[e][i];
        }
    }
    return x;
}

GraphFunction DiscreteGenerator::unflatten(const Eigen::VectorXd &x) const {
    std::vector<GridFunction1D> edges;
    for (std::size_t e = 0; e < edge_count; ++e) {
        std::vector<double> values(m);
        for (std::size_t i = 0; i < m; ++i) {
            values[i] = x(index(e, i));
        }
        edges.emplace_back(std::move(values));
    }
    return GraphFunction(std::move(edges));
}

DiscreteGenerator build_generator(const MetricGraph &g, double eps, std::size_t m) {
    if (m < 3) {
        throw DomainError("finite-difference grid needs at least 3 points");
    }
    if (!(eps > 0.0 && eps <= 1.0)) {
        throw DomainError("eps must lie in (0,1]");
    }
    DiscreteGenerator gen;
    gen.edge_count = g.edge_count();
    gen.m = m;
    gen.h = 1.0 / static_cast<double>(m - 1);
    const double h = gen.h;

    std::vector<Eigen::Triplet<double>> entries;
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        const EdgeSpec &spec = g.edge(e);
        const double diffusion = spec.sigma / eps;
        const double interior = diffusion / (h * h);
        for (std::size_t i = 1; i + 1 < m; ++i) {
            const auto row = gen.index(e, i);
            entries.emplace_back(row, gen.index(e, i - 1), interior);
            entries.emplace_back(row, row, -2.0 * interior);
            entries.emplace_back(row, gen.index(e, i + 1), interior);
        }
        for (End side : {End::Left, End::Right}) {
            const double stick = side == End::Left ? spec.p : spec.q;
            const double denom = stick + (1.0 - stick) * h / 2.0;
            const std::size_t node = side == End::Left ? 0 : m - 1;
            const std::size_t neighbour = side == End::Left ? 1 : m - 2;
            const auto row = gen.index(e, node);
            const double drift = diffusion * (1.0 - stick) / h / denom;
            entries.emplace_back(row, gen.index(e, neighbour), drift);
            entries.emplace_back(row, row, -drift);
            // Membrane exchange, scaled by eps^{-1} sigma * eps = sigma.
            const double total = side == End::Left ? spec.l : spec.r;
            entries.emplace_back(row, row, -spec.sigma * total / denom);
            for (const Coupling &c : g.couplings(e, side)) {
                const std::size_t target_node = c.target.end == End::Left ? 0 : m - 1;
                entries.emplace_back(row, gen.index(c.target.edge, target_node), spec.sigma * c.rate / denom);
            }
        }
    }
    const auto dim = static_cast<Eigen::Index>(g.edge_count() * m);
    gen.matrix.resize(dim, dim);
    gen.matrix.setFromTriplets(entries.begin(), entries.end());
    return gen;
}

GraphFunction oracle_resolvent(const DiscreteGenerator &gen, double lambda, const GraphFunction &v) {
    if (!(lambda > 0.0)) {
        throw DomainError("lambda must be positive");
    }
    const auto dim = gen.matrix.rows();
    Eigen::SparseMatrix<double> identity(dim, dim);
    identity.setIdentity();
    Eigen::SparseMatrix<double> system = lambda * identity - gen.matrix;
    system.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(system);
    if (lu.info() != Eigen::Success) {
        throw NumericError("oracle resolvent: singular system");
    }
    const Eigen::VectorXd x = lu.solve(gen.flatten(v));
    if (lu.info() != Eigen::Success) {
        throw NumericError("oracle resolvent: solve failed");
    }
    return gen.unflatten(x);
}

GraphFunction oracle_evolve(const DiscreteGenerator &gen, double t, const GraphFunction &u0) {
    if (!(t >= 0.0)) {
        throw DomainError("t must be nonnegative");
    }
    if (t == 0.0) {
        return u0;
    }
    const Eigen::VectorXd x0 = gen.flatten(u0);
    const auto dim = gen.matrix.rows();
    if (static_cast<std::size_t>(dim) <= kDenseExpLimit) {
        const Eigen::MatrixXd dense = Eigen::MatrixXd(gen.matrix) * t;
        const Eigen::MatrixXd propagator = dense.exp();
        return gen.unflatten(propagator * x0);
    }

    constexpr int kSteps = 4096;
    const double dt = t / kSteps;
    Eigen::SparseMatrix<double> identity(dim, dim);
    identity.setIdentity();
    Eigen::SparseMatrix<double> implicit = identity - 0.5 * dt * gen.matrix;
    Eigen::SparseMatrix<double> explicit_part = identity + 0.5 * dt * gen.matrix;
    implicit.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(implicit);
    if (lu.info() != Eigen::Success) {
        throw NumericError("oracle evolution: Crank-Nicolson system is singular");
    }
    Eigen::VectorXd x = x0;
    for (int k = 0; k < kSteps; ++k) {
        x = lu.solve(explicit_part * x);
    }
    return gen.unflatten(x);
}

} // namespace sticky
