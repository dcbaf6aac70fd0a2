#include "stickygraph/grid.hpp"

#include <algorithm>
#include <cmath>

#include "stickygraph/errors.hpp"

namespace sticky {

GridFunction1D::GridFunction1D(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 2) {
        throw DomainError("grid function needs at least 2 points");
    }
    for (double v : values_) {
        if (!std::isfinite(v)) {
            throw DomainError("grid function values must be finite");
        }
    }
}

GridFunction1D::GridFunction1D(std::size_t m, double fill) : GridFunction1D(std::vector<double>(m, fill)) {}

GridFunction1D GridFunction1D::sample(std::size_t m, const std::function<double(double)> &fn) {
    if (m < 2) {
        throw DomainError("grid function needs at least 2 points");
    }
    std::vector<double> values(m);
    const double step = 1.0 / static_cast<double>(m - 1);
    for (std::size_t i = 0; i < m; ++i) {
        values[i] = fn(static_cast<double>(i) * step);
    }
    return GridFunction1D(std::move(values));
}

double GridFunction1D::sup_norm() const {
    double s = 0.0;
    for (double v : values_) {
        s = std::max(s, std::abs(v));
    }
    return s;
}

double GridFunction1D::min() const { return *std::min_element(values_.begin(), values_.end()); }

double GridFunction1D::max() const { return *std::max_element(values_.begin(), values_.end()); }

std::vector<double> GridFunction1D::slopes() const {
    const std::size_t m = values_.size();
    const double h = spacing();
    std::vector<double> delta(m - 1);
    for (std::size_t i = 0; i + 1 < m; ++i) {
        delta[i] = (values_[i + 1] - values_[i]) / h;
    }
    std::vector<double> d(m, 0.0);
    if (m == 2) {
        d[0] = d[1] = delta[0];
        return d;
    }
    for (std::size_t i = 1; i + 1 < m; ++i) {
        const double a = delta[i - 1];
        const double b = delta[i];
        if (a * b > 0.0) {
            d[i] = 2.0 * a * b / (a + b);
        }
    }
    auto edge = [](double d0, double d1) {
        double s = 0.5 * (3.0 * d0 - d1);
        if (s * d0 <= 0.0) {
            return 0.0;
        }
        if (d0 * d1 <= 0.0 && std::abs(s) > 3.0 * std::abs(d0)) {
            s = 3.0 * d0;
        }
        return s;
    };
    d[0] = edge(delta[0], delta[1]);
    d[m - 1] = edge(delta[m - 2], delta[m - 3]);
    return d;
}

double GridFunction1D::integral() const {
    const std::vector<double> d = slopes();
    const double h = spacing();
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < values_.size(); ++i) {
        sum += 0.5 * (values_[i] + values_[i + 1]) + h * (d[i] - d[i + 1]) / 12.0;
    }
    return sum * h;
}

double sup_distance(const GridFunction1D &a, const GridFunction1D &b) {
    if (a.size() != b.size()) {
        throw DomainError("grid size mismatch");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s = std::max(s, std::abs(a[i] - b[i]));
    }
    return s;
}

} // namespace sticky
