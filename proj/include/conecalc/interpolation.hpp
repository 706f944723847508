#pragma once

#include <Eigen/Core>

namespace conecalc {

/// Shape-preserving cubic (Fritsch-Carlson) through (x_i, y_i), x strictly
/// increasing. Used by tabulated densities in log-log coordinates.
class PchipInterpolant {
  public:
    PchipInterpolant() = default;
    PchipInterpolant(Eigen::ArrayXd x, Eigen::ArrayXd y);

    double operator()(double x) const;  // clamped to the knot range
    double derivative(double x) const;
    const Eigen::ArrayXd& knots_x() const { return x_; }
    const Eigen::ArrayXd& knots_y() const { return y_; }

  private:
    Eigen::ArrayXd x_, y_, d_;  // knot derivatives
    int segment(double x) const;
};

}  // namespace conecalc
