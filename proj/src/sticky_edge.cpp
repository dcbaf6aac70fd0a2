#include "stickygraph/sticky_edge.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "stickygraph/errors.hpp"

namespace sticky {

namespace {

constexpr double kScaledThreshold = 30.0;

void require_right_half_plane(cplx mu) {
    if (!(mu.real() > 0.0)) {
        throw DomainError("boundary system requires Re(mu) > 0");
    }
}

// Integrals of e^{-z t} against the cubic Hermite basis on [0,1]:
// H00 = 1 - 3t^2 + 2t^3, H01 = 3t^2 - 2t^3, H10 = t (1-t)^2, H11 = -t^2 (1-t).
std::array<cplx, 4> hermite_weights(cplx z) {
    std::array<cplx, 4> n{};  // n[k] = int_0^1 t^k e^{-z t} dt
    if (std::abs(z) < 1.0) {
        cplx power = 1.0;  // (-z)^j / j!
        for (int j = 0; j < 30; ++j) {
            for (int k = 0; k < 4; ++k) {
                n[k] += power / static_cast<double>(k + j + 1);
            }
            power *= -z / static_cast<double>(j + 1);
        }
    } else {
        const cplx e = std::exp(-z);
        n[0] = (1.0 - e) / z;
        for (int k = 1; k < 4; ++k) {
            n[k] = (static_cast<double>(k) * n[k - 1] - e) / z;
        }
    }
    return {n[0] - 3.0 * n[2] + 2.0 * n[3], 3.0 * n[2] - 2.0 * n[3], n[1] - 2.0 * n[2] + n[3], n[3] - n[2]};
}

} // namespace

StickyParams::StickyParams(double p_, double q_) : p(p_), q(q_) {
    if (!(p >= 0.0 && p <= 1.0) || !(q >= 0.0 && q <= 1.0)) {
        throw DomainError("stickiness coefficients must lie in [0,1]");
    }
}

cplx boundary_determinant(cplx mu, const StickyParams &params) {
    const double p = params.p, ps = params.p_star();
    const double q = params.q, qs = params.q_star();
    return (p * mu - ps) * std::exp(-mu) * (q * mu - qs) - (p * mu + ps) * std::exp(mu) * (q * mu + qs);
}

ScaledCoefficients solve_boundary_system_scaled(cplx mu, const StickyParams &params, cplx a, cplx b) {
    require_right_half_plane(mu);
    const double p = params.p, ps = params.p_star();
    const double q = params.q, qs = params.q_star();
    const cplx decay = std::exp(-mu);
    // Numerator and denominator of the Cramer formulas divided by e^{mu}.
    const cplx den = (p * mu + ps) * (q * mu + qs) - decay * decay * (p * mu - ps) * (q * mu - qs);
    const cplx c_scaled = ((p * mu + ps) * b - decay * (q * mu - qs) * a) / den;
    const cplx d = ((q * mu + qs) * a - decay * (p * mu - ps) * b) / den;
    return {c_scaled, d};
}

BoundaryCoefficients solve_boundary_system(cplx mu, const StickyParams &params, cplx a, cplx b) {
    require_right_half_plane(mu);
    if (mu.real() > kScaledThreshold) {
        const ScaledCoefficients s = solve_boundary_system_scaled(mu, params, a, b);
        return {s.c_scaled * std::exp(-mu), s.d};
    }
    const double p = params.p, ps = params.p_star();
    const double q = params.q, qs = params.q_star();
    const cplx grow = std::exp(mu);
    const cplx decay = std::exp(-mu);
    const cplx den = grow * (p * mu + ps) * (q * mu + qs) - decay * (p * mu - ps) * (q * mu - qs);
    const cplx c = ((p * mu + ps) * b - decay * (q * mu - qs) * a) / den;
    const cplx d = (grow * (q * mu + qs) * a - (p * mu - ps) * b) / den;
    return {c, d};
}

cplx mobius_h(double r, cplx z) { return (r * z - 1.0 + r) / (r * z + 1.0 - r); }

cplx resolvent_exponent(cplx lambda, double diffusion) {
    if (!(diffusion > 0.0) || !std::isfinite(diffusion)) {
        throw DomainError("diffusion coefficient must be positive");
    }
    if (lambda.imag() == 0.0 && lambda.real() <= 0.0) {
        throw DomainError("lambda on the cut (-inf, 0]");
    }
    if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag())) {
        throw DomainError("lambda must be finite");
    }
    const cplx mu = std::sqrt(lambda / diffusion);
    if (!(mu.real() > 0.0)) {
        throw DomainError("lambda too close to the cut (-inf, 0]");
    }
    return mu;
}

EdgeResolventRep::EdgeResolventRep(cplx mu, ScaledCoefficients coeffs, ParticularSolution particular,
                                   std::vector<cplx> samples)
    : mu_(mu), coeffs_(coeffs), particular_(std::move(particular)), samples_(std::move(samples)) {}

cplx EdgeResolventRep::value(End end) const {
    const cplx decay = std::exp(-mu_);
    const cplx hom = end == End::Left ? coeffs_.c_scaled * decay + coeffs_.d : coeffs_.c_scaled + coeffs_.d * decay;
    return hom + particular_.at(end);
}

cplx EdgeResolventRep::derivative(End end) const {
    const cplx decay = std::exp(-mu_);
    const cplx hom = end == End::Left ? mu_ * (coeffs_.c_scaled * decay - coeffs_.d)
                                      : mu_ * (coeffs_.c_scaled - coeffs_.d * decay);
    return hom + particular_.slope_at(end);
}

cplx EdgeResolventRep::second_derivative(End end) const {
    const cplx decay = std::exp(-mu_);
    const cplx hom = end == End::Left ? coeffs_.c_scaled * decay + coeffs_.d : coeffs_.c_scaled + coeffs_.d * decay;
    return mu_ * mu_ * hom + particular_.curvature_at(end);
}

cplx EdgeResolventRep::second_derivative_at(std::size_t i) const {
    return mu_ * mu_ * (samples_[i] - particular_.value[i]) + particular_.curvature[i];
}

GridFunction1D EdgeResolventRep::real_part() const {
    std::vector<double> out(samples_.size());
    std::transform(samples_.begin(), samples_.end(), out.begin(), [](cplx z) { return z.real(); });
    return GridFunction1D(std::move(out));
}

std::pair<cplx, cplx> EdgeResolventRep::boundary_residuals(const StickyParams &params) const {
    return {params.p * second_derivative(End::Left) - params.p_star() * derivative(End::Left),
            params.q * second_derivative(End::Right) + params.q_star() * derivative(End::Right)};
}

EdgeKernel::EdgeKernel(cplx lambda, const StickyParams &params, double diffusion, std::size_t m)
    : lambda_(lambda), params_(params), diffusion_(diffusion), m_(m) {
    if (m < 2) {
        throw DomainError("grid needs at least 2 points");
    }
    mu_ = resolvent_exponent(lambda, diffusion);
    const double h = 1.0 / static_cast<double>(m - 1);
    step_decay_ = std::exp(-mu_ * h);
    weights_ = hermite_weights(mu_ * h);
    rising_.resize(m);
    falling_.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double x = static_cast<double>(i) * h;
        rising_[i] = std::exp(mu_ * (x - 1.0));
        falling_[i] = std::exp(-mu_ * x);
    }
}

ParticularSolution EdgeKernel::particular(const GridFunction1D &f) const {
    if (f.size() != m_) {
        throw DomainError("grid size mismatch: kernel built for " + std::to_string(m_) + " points");
    }
    const double h = 1.0 / static_cast<double>(m_ - 1);
    // left[i]  = int_0^{x_i} e^{-mu (x_i - y)} f(y) dy
    // right[i] = int_{x_i}^1 e^{-mu (y - x_i)} f(y) dy
    const std::vector<double> d = f.slopes();
    const auto [w00, w01, w10, w11] = weights_;
    std::vector<cplx> left(m_), right(m_);
    left[0] = 0.0;
    for (std::size_t i = 0; i + 1 < m_; ++i) {
        const cplx cell = f[i] * w01 + f[i + 1] * w00 - h * (d[i] * w11 + d[i + 1] * w10);
        left[i + 1] = step_decay_ * left[i] + h * cell;
    }
    right[m_ - 1] = 0.0;
    for (std::size_t i = m_ - 1; i-- > 0;) {
        const cplx cell = f[i] * w00 + f[i + 1] * w01 + h * (d[i] * w10 + d[i + 1] * w11);
        right[i] = step_decay_ * right[i + 1] + h * cell;
    }

    ParticularSolution out;
    out.mu = mu_;
    out.diffusion = diffusion_;
    out.value.resize(m_);
    out.slope.resize(m_);
    out.curvature.resize(m_);
    const cplx value_scale = 1.0 / (2.0 * mu_ * diffusion_);
    const double slope_scale = -1.0 / (2.0 * diffusion_);
    for (std::size_t i = 0; i < m_; ++i) {
        out.value[i] = value_scale * (left[i] + right[i]);
        out.slope[i] = slope_scale * (left[i] - right[i]);
        out.curvature[i] = (lambda_ * out.value[i] - f[i]) / diffusion_;
    }
    return out;
}

EdgeResolventRep EdgeKernel::resolve(const GridFunction1D &f) const {
    ParticularSolution part = particular(f);
    const double p = params_.p, ps = params_.p_star();
    const double q = params_.q, qs = params_.q_star();
    // Right-hand side of the boundary system for the rescaled source f / D.
    const cplx a = p * (f.front() / diffusion_) / mu_ - part.at(End::Left) * (p * mu_ - ps);
    const cplx b = q * (f.back() / diffusion_) / mu_ - part.at(End::Right) * (q * mu_ - qs);
    const ScaledCoefficients coeffs = solve_boundary_system_scaled(mu_, params_, a, b);

    std::vector<cplx> samples(m_);
    for (std::size_t i = 0; i < m_; ++i) {
        samples[i] = coeffs.c_scaled * rising_[i] + coeffs.d * falling_[i] + part.value[i];
    }
    EdgeResolventRep rep(mu_, coeffs, std::move(part), std::move(samples));

    const auto [left, right] = rep.boundary_residuals(params_);
    const double budget = 1e-6 * (1.0 + f.sup_norm() / diffusion_) * (1.0 + std::abs(mu_));
    if (!(std::abs(left) <= budget && std::abs(right) <= budget)) {
        throw NumericError("edge resolvent violates its boundary conditions (residuals " +
                           std::to_string(std::abs(left)) + ", " + std::to_string(std::abs(right)) + ")");
    }
    return rep;
}

ParticularSolution h_lambda(const GridFunction1D &f, cplx lambda, double diffusion) {
    return EdgeKernel(lambda, StickyParams{}, diffusion, f.size()).particular(f);
}

EdgeResolventRep edge_resolvent(cplx lambda, const StickyParams &params, const GridFunction1D &f, double diffusion) {
    return EdgeKernel(lambda, params, diffusion, f.size()).resolve(f);
}

GridFunction1D projection_P(const StickyParams &params, const GridFunction1D &f) {
    const std::size_t m = f.size();
    if (params.doubly_absorbing()) {
        const double f0 = f.front(), f1 = f.back();
        return GridFunction1D::sample(m, [=](double x) { return (1.0 - x) * f0 + x * f1; });
    }
    const double p = params.p, ps = params.p_star();
    const double q = params.q, qs = params.q_star();
    const double value =
        (p * qs * f.front() + ps * q * f.back() + ps * qs * f.integral()) / (p * qs + ps * q + ps * qs);
    return GridFunction1D(m, value);
}

double FGammaInterpolant::operator()(double x) const {
    const double g = gamma, g2 = gamma * gamma;
    return alpha0 * std::exp(-g * x) + beta0 * std::exp(-g2 * x) + alpha1 * std::exp(-g * (1.0 - x)) +
           beta1 * std::exp(-g2 * (1.0 - x));
}

double FGammaInterpolant::derivative(double x) const {
    const double g = gamma, g2 = gamma * gamma;
    return -g * alpha0 * std::exp(-g * x) - g2 * beta0 * std::exp(-g2 * x) + g * alpha1 * std::exp(-g * (1.0 - x)) +
           g2 * beta1 * std::exp(-g2 * (1.0 - x));
}

double FGammaInterpolant::second_derivative(double x) const {
    const double g = gamma, g2 = gamma * gamma;
    return g2 * alpha0 * std::exp(-g * x) + g2 * g2 * beta0 * std::exp(-g2 * x) +
           g2 * alpha1 * std::exp(-g * (1.0 - x)) + g2 * g2 * beta1 * std::exp(-g2 * (1.0 - x));
}

GridFunction1D FGammaInterpolant::sample(std::size_t m) const {
    return GridFunction1D::sample(m, [this](double x) { return (*this)(x); });
}

namespace {

Eigen::Matrix4d fgamma_system(double gamma) {
    const double g = gamma, g2 = g * g, g4 = g2 * g2;
    const double e1 = std::exp(-g), e2 = std::exp(-g2);
    Eigen::Matrix4d m;
    m << -g, -g2, g * e1, g2 * e2,
        g2, g4, g2 * e1, g4 * e2,
        -g * e1, -g2 * e2, g, g2,
        g2 * e1, g4 * e2, g2, g4;
    return m;
}

} // namespace

double fgamma_determinant(double gamma) { return fgamma_system(gamma).determinant(); }

FGammaInterpolant interpolant_fgamma(double a0, double b0, double a1, double b1, double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw DomainError("gamma must be positive");
    }
    const Eigen::Matrix4d system = fgamma_system(gamma);
    // Equilibrate rows so the rank test is scale free.
    Eigen::Vector4d rhs(a0, b0, a1, b1);
    Eigen::Matrix4d scaled = system;
    for (int r = 0; r < 4; ++r) {
        const double s = scaled.row(r).cwiseAbs().maxCoeff();
        scaled.row(r) /= s;
        rhs(r) /= s;
    }
    Eigen::PartialPivLU<Eigen::Matrix4d> lu(scaled);
    if (!(lu.rcond() > 1e-13)) {
        throw NumericError("f_gamma system is numerically singular at gamma = " + std::to_string(gamma) +
                           "; retry with a larger gamma");
    }
    const Eigen::Vector4d coeffs = lu.solve(rhs);
    return {gamma, coeffs(0), coeffs(1), coeffs(2), coeffs(3)};
}

} // namespace sticky
