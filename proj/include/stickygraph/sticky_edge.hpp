#ifndef STICKYGRAPH_STICKY_EDGE_HPP
#define STICKYGRAPH_STICKY_EDGE_HPP

// One-dimensional sticky diffusion on [0,1]:
//
//   lambda g - D g'' = f,   p g''(0) - (1-p) g'(0) = 0,   q g''(1) + (1-q) g'(1) = 0.
//
// Solutions are written as c e^{mu x} + d e^{-mu x} + h(x) with mu = sqrt(lambda/D)
// on the principal branch. The particular part h is the free-space Green's
// function convolved with the monotone cubic interpolant of the sampled f;
// the kernel moments are integrated in closed form so h is exact for that
// interpolant at every grid node, whatever |mu| h is.

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

#include "stickygraph/graph_model.hpp"
#include "stickygraph/grid.hpp"

namespace sticky {

using cplx = std::complex<double>;

struct StickyParams {
    double p = 0.0;
    double q = 0.0;

    StickyParams() = default;
    StickyParams(double p_, double q_);

    double p_star() const { return 1.0 - p; }
    double q_star() const { return 1.0 - q; }
    /// Both ends absorbing; the projection onto the equilibria is then affine.
    bool doubly_absorbing() const { return p * q == 1.0; }
};

/// Coefficients of c e^{mu x} + d e^{-mu x}.
struct BoundaryCoefficients {
    cplx c;
    cplx d;
};

/// Coefficients in the basis e^{mu (x-1)}, e^{-mu x}; c_scaled = c e^{mu}.
/// Never overflows for Re mu > 0.
struct ScaledCoefficients {
    cplx c_scaled;
    cplx d;
};

/// Determinant of the 2x2 boundary system
///   [ p mu - p*             p mu + p*            ] [c]   [a]
///   [ e^{mu}(q mu + q*)     e^{-mu}(q mu - q*)   ] [d] = [b].
cplx boundary_determinant(cplx mu, const StickyParams &params);

/// Closed-form (Cramer) solution of the system above. Requires Re mu > 0.
/// For Re mu > 30 the scaled solution is computed first and c recovered as
/// c_scaled e^{-mu}.
BoundaryCoefficients solve_boundary_system(cplx mu, const StickyParams &params, cplx a, cplx b);
ScaledCoefficients solve_boundary_system_scaled(cplx mu, const StickyParams &params, cplx a, cplx b);

/// (r z - 1 + r) / (r z + 1 - r); maps the right half-plane into the unit disc.
cplx mobius_h(double r, cplx z);

/// Principal square root of lambda / diffusion; throws DomainError on the cut.
cplx resolvent_exponent(cplx lambda, double diffusion);

/// Particular solution h of lambda h - D h'' = f on the grid.
struct ParticularSolution {
    cplx mu;
    double diffusion = 1.0;
    std::vector<cplx> value;
    std::vector<cplx> slope;
    std::vector<cplx> curvature;

    cplx at(End end) const { return end == End::Left ? value.front() : value.back(); }
    cplx slope_at(End end) const { return end == End::Left ? slope.front() : slope.back(); }
    cplx curvature_at(End end) const { return end == End::Left ? curvature.front() : curvature.back(); }
};

/// g = c e^{mu x} + d e^{-mu x} + h, stored with the scaled coefficient.
class EdgeResolventRep {
  public:
    EdgeResolventRep(cplx mu, ScaledCoefficients coeffs, ParticularSolution particular, std::vector<cplx> samples);

    cplx mu() const { return mu_; }
    double scale() const { return particular_.diffusion; }
    cplx c() const { return coeffs_.c_scaled * std::exp(-mu_); }
    cplx c_scaled() const { return coeffs_.c_scaled; }
    cplx d() const { return coeffs_.d; }
    const ParticularSolution &particular() const { return particular_; }

    cplx value(End end) const;
    cplx derivative(End end) const;
    cplx second_derivative(End end) const;

    std::size_t size() const { return samples_.size(); }
    const std::vector<cplx> &samples() const { return samples_; }
    /// g'' at grid node i.
    cplx second_derivative_at(std::size_t i) const;
    /// Real parts of the samples; the imaginary parts vanish for real lambda.
    GridFunction1D real_part() const;

    /// p g''(0) - p* g'(0) and q g''(1) + q* g'(1).
    std::pair<cplx, cplx> boundary_residuals(const StickyParams &params) const;

  private:
    cplx mu_;
    ScaledCoefficients coeffs_;
    ParticularSolution particular_;
    std::vector<cplx> samples_;
};

/// Precomputed per-(lambda, D, p, q, m) data. Reuse it when resolving many
/// right-hand sides with the same parameters.
class EdgeKernel {
  public:
    EdgeKernel(cplx lambda, const StickyParams &params, double diffusion, std::size_t m);

    cplx lambda() const { return lambda_; }
    cplx mu() const { return mu_; }
    double diffusion() const { return diffusion_; }
    const StickyParams &params() const { return params_; }
    std::size_t grid_size() const { return m_; }

    ParticularSolution particular(const GridFunction1D &f) const;
    EdgeResolventRep resolve(const GridFunction1D &f) const;

    /// e^{mu (x_i - 1)} and e^{-mu x_i}.
    const std::vector<cplx> &rising() const { return rising_; }
    const std::vector<cplx> &falling() const { return falling_; }

  private:
    cplx lambda_;
    StickyParams params_;
    double diffusion_;
    std::size_t m_;
    cplx mu_;
    cplx step_decay_;  // e^{-mu h}
    std::array<cplx, 4> weights_;  // int_0^1 e^{-z t} H(t) dt for the Hermite basis, z = mu h
    std::vector<cplx> rising_;
    std::vector<cplx> falling_;
};

ParticularSolution h_lambda(const GridFunction1D &f, cplx lambda, double diffusion);

/// Resolvent of D d^2/dx^2 with sticky boundary conditions applied to f.
EdgeResolventRep edge_resolvent(cplx lambda, const StickyParams &params, const GridFunction1D &f,
                                double diffusion = 1.0);

/// Projection onto the equilibria of the sticky edge: the long-time limit of
/// the semigroup and the lambda -> 0 limit of lambda R(lambda).
GridFunction1D projection_P(const StickyParams &params, const GridFunction1D &f);

/// f(x) = a0 e^{-g x} + b0 e^{-g^2 x} + a1 e^{-g(1-x)} + b1 e^{-g^2(1-x)}
/// matching prescribed first and second derivatives at both ends.
struct FGammaInterpolant {
    double gamma = 0.0;
    double alpha0 = 0.0;
    double beta0 = 0.0;
    double alpha1 = 0.0;
    double beta1 = 0.0;

    double operator()(double x) const;
    double derivative(double x) const;
    double second_derivative(double x) const;
    GridFunction1D sample(std::size_t m) const;
};

/// Solves for f_gamma with f'(0)=a0, f''(0)=b0, f'(1)=a1, f''(1)=b1.
/// Throws NumericError when the 4x4 system is numerically singular.
FGammaInterpolant interpolant_fgamma(double a0, double b0, double a1, double b1, double gamma);

/// Determinant of the 4x4 endpoint-derivative system for f_gamma.
double fgamma_determinant(double gamma);

} // namespace sticky

#endif
