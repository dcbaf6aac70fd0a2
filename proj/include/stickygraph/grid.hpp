#ifndef STICKYGRAPH_GRID_HPP
#define STICKYGRAPH_GRID_HPP

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace sticky {

/// Samples of a function on [0,1] at the uniform points x_i = i/(m-1).
class GridFunction1D {
  public:
    GridFunction1D() = default;
    explicit GridFunction1D(std::vector<double> values);
    GridFunction1D(std::size_t m, double fill);

    static GridFunction1D sample(std::size_t m, const std::function<double(double)> &fn);

    std::size_t size() const { return values_.size(); }
    double spacing() const { return 1.0 / static_cast<double>(values_.size() - 1); }
    double x(std::size_t i) const { return static_cast<double>(i) * spacing(); }

    double operator[](std::size_t i) const { return values_[i]; }
    double &operator[](std::size_t i) { return values_[i]; }
    double front() const { return values_.front(); }
    double back() const { return values_.back(); }

    std::span<const double> values() const { return values_; }
    std::vector<double> &mutable_values() { return values_; }

    double sup_norm() const;
    double min() const;
    double max() const;
    // Node derivatives of the monotone cubic (PCHIP) interpolant. On each cell
    // the interpolant stays between its two node values.
    std::vector<double> slopes() const;
    // Exact integral of that interpolant.
    double integral() const;

  private:
    std::vector<double> values_;
};

double sup_distance(const GridFunction1D &a, const GridFunction1D &b);

} // namespace sticky

#endif
