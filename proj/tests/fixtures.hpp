#ifndef STICKYGRAPH_TESTS_FIXTURES_HPP
#define STICKYGRAPH_TESTS_FIXTURES_HPP

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "stickygraph/graph_model.hpp"
#include "stickygraph/graph_operator.hpp"
#include "stickygraph/grid.hpp"

namespace fixtures {

using sticky::EdgeSpec;
using sticky::MetricGraph;

// Path a - b - c; e1.right feeds e2.left and back.
inline MetricGraph two_edge(double p = 0.0, double q = 0.0, double sigma = 1.0) {
    EdgeSpec e1{"e1", "a", "b", sigma, p, q, 0.0, 1.0, {}, {{"e2", 1.0}}};
    EdgeSpec e2{"e2", "b", "c", sigma, p, q, 1.0, 0.0, {{"e1", 1.0}}, {}};
    return MetricGraph::build({e1, e2});
}

// Three edges leaving a common centre; each left end sends unit rate to the other two.
inline MetricGraph star3(double p = 0.3, double q = 0.3, std::array<double, 3> sigma = {1.0, 2.0, 0.5},
                         double leak = 0.0) {
    std::vector<EdgeSpec> edges;
    const std::array<const char *, 3> ids{"e1", "e2", "e3"};
    const std::array<const char *, 3> tips{"a", "b", "d"};
    for (int i = 0; i < 3; ++i) {
        EdgeSpec e{ids[i], "c", tips[i], sigma[i], p, q, 2.0 + leak, 0.0, {}, {}};
        for (int j = 0; j < 3; ++j) {
            if (j != i) {
                e.l_out[ids[j]] = 1.0;
            }
        }
        edges.push_back(e);
    }
    return MetricGraph::build(edges);
}

inline MetricGraph single_edge(double p, double q, double sigma = 1.0) {
    return MetricGraph::build({EdgeSpec{"e", "a", "b", sigma, p, q, 0.0, 0.0, {}, {}}});
}

// Star mixing constant and doubly absorbing edges.
inline MetricGraph mixed_star() {
    EdgeSpec e1{"e1", "c", "a", 1.0, 0.3, 0.6, 2.0, 0.0, {{"e2", 1.0}, {"e3", 1.0}}, {}};
    EdgeSpec e2{"e2", "c", "b", 1.5, 1.0, 1.0, 1.0, 0.0, {{"e1", 0.5}, {"e3", 0.5}}, {}};
    EdgeSpec e3{"e3", "d", "c", 0.7, 0.2, 1.0, 0.0, 3.0, {}, {{"e1", 2.0}, {"e2", 1.0}}};
    return MetricGraph::build({e1, e2, e3});
}

inline sticky::GridFunction1D sample(std::size_t m, double (*fn)(double)) {
    return sticky::GridFunction1D::sample(m, fn);
}

// Hand-rolled generators for property tests.
class Gen {
  public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

    // p, q drawn with extra mass on the endpoints 0 and 1.
    double stickiness() {
        const int k = integer(0, 5);
        return k == 0 ? 0.0 : k == 1 ? 1.0 : uniform(0.0, 1.0);
    }

    // Random trigonometric polynomial with sup norm at most 1.
    sticky::GridFunction1D smooth(std::size_t m) {
        std::array<double, 4> a{};
        std::array<double, 4> phase{};
        double total = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) {
            a[k] = uniform(-1.0, 1.0);
            phase[k] = uniform(0.0, 2.0 * std::numbers::pi);
            total += std::abs(a[k]);
        }
        return sticky::GridFunction1D::sample(m, [&](double x) {
            double s = 0.0;
            for (std::size_t k = 0; k < a.size(); ++k) {
                s += a[k] * std::cos(std::numbers::pi * static_cast<double>(k) * x + phase[k]);
            }
            return s / total;
        });
    }

    sticky::GridFunction1D nonnegative(std::size_t m) {
        auto f = smooth(m);
        for (auto &v : f.mutable_values()) {
            v = std::abs(v);
        }
        return f;
    }

  private:
    std::mt19937_64 rng_;
};

} // namespace fixtures

namespace oracle {

using cplx = std::complex<double>;

// Generic Cramer solve of the 2x2 boundary system, written out from the
// boundary conditions of c e^{mu x} + d e^{-mu x}.
inline std::pair<cplx, cplx> boundary_2x2(cplx mu, double p, double q, cplx a, cplx b) {
    const double ps = 1.0 - p;
    const double qs = 1.0 - q;
    const cplx a11 = p * mu - ps;
    const cplx a12 = p * mu + ps;
    const cplx a21 = std::exp(mu) * (q * mu + qs);
    const cplx a22 = std::exp(-mu) * (q * mu - qs);
    const cplx det = a11 * a22 - a12 * a21;
    return {(a * a22 - a12 * b) / det, (a11 * b - a21 * a) / det};
}

// Particular solution for f == 1, diffusion 1.
inline double h_const_one(double lambda, double x) {
    const double s = std::sqrt(lambda);
    return (2.0 - std::exp(-s * x) - std::exp(-s * (1.0 - x))) / (2.0 * s * s);
}

// 4x4 determinant by cofactor expansion.
inline double det4(const std::array<std::array<double, 4>, 4> &a) {
    auto det3 = [&](int skip) {
        std::array<std::array<double, 3>, 3> b{};
        for (int i = 1; i < 4; ++i) {
            int col = 0;
            for (int j = 0; j < 4; ++j) {
                if (j != skip) {
                    b[i - 1][col++] = a[i][j];
                }
            }
        }
        return b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0]) +
               b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    };
    double d = 0.0;
    for (int j = 0; j < 4; ++j) {
        d += (j % 2 == 0 ? 1.0 : -1.0) * a[0][j] * det3(j);
    }
    return d;
}

// Brute-force Phi: loop over every ordered edge pair and check shared vertices directly.
inline double phi_brute(const sticky::MetricGraph &g, const std::vector<double> &left,
                        const std::vector<double> &right, std::size_t e, sticky::End side) {
    const auto &spec = g.edge(e);
    const std::string &vertex = side == sticky::End::Left ? spec.init : spec.term;
    const auto &rates = side == sticky::End::Left ? spec.l_out : spec.r_out;
    double sum = -(side == sticky::End::Left ? spec.l * left[e] : spec.r * right[e]);
    for (std::size_t f = 0; f < g.edge_count(); ++f) {
        const auto it = rates.find(g.edge(f).id);
        if (it == rates.end()) {
            continue;
        }
        if (g.edge(f).init == vertex) {
            sum += it->second * left[f];
        } else if (g.edge(f).term == vertex) {
            sum += it->second * right[f];
        }
    }
    return sum;
}

// Frozen values.
inline const double kAbsorbingC = -1.0 / (std::exp(2.0) - 1.0);             // -0.1565176...
inline const double kAbsorbingD = std::exp(2.0) / (std::exp(2.0) - 1.0);    //  1.1565176...
inline const double kExpT1First = (1.0 + std::exp(-2.0)) / 2.0;         //  0.5676676...
inline const double kExpT1Second = (1.0 - std::exp(-2.0)) / 2.0;        //  0.4323324...

} // namespace oracle

#endif
