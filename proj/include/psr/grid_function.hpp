#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace psr {

enum class Interp { Linear, CubicMonotone };

// Node values on [nodes.front(), nodes.back()] with an interpolation rule.
class GridFunction {
 public:
  GridFunction(std::vector<double> nodes, std::vector<double> values,
               Interp interp = Interp::CubicMonotone);

  static GridFunction sample(std::vector<double> nodes, const std::function<double(double)>& f,
                             Interp interp = Interp::CubicMonotone);

  double lo() const noexcept { return nodes_.front(); }
  double hi() const noexcept { return nodes_.back(); }
  std::size_t size() const noexcept { return nodes_.size(); }
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& values() const noexcept { return values_; }
  Interp interp() const noexcept { return interp_; }

  // Throws DomainError outside [lo, hi].
  double operator()(double x) const;

  double sup_norm() const;

 private:
  std::vector<double> nodes_;
  std::vector<double> values_;
  std::vector<double> slopes_;
  Interp interp_;
};

// Index c with nodes[c] <= x <= nodes[c+1]; x must lie in the node range.
std::size_t locate_cell(std::span<const double> nodes, double x);

// Fritsch-Carlson style monotone slopes for piecewise cubic Hermite data.
void monotone_slopes(std::span<const double> x, std::span<const double> y, std::span<double> d);

// Cubic Hermite on one cell, t in [0, 1].
inline double hermite(double y0, double y1, double d0, double d1, double h, double t) {
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * y1 +
         (t3 - t2) * h * d1;
}

// Nodes on [lo, hi] with spacing about (hi - lo)/(points - 1), containing every
// break point that falls strictly inside.
std::vector<double> make_grid(double lo, double hi, std::span<const double> breaks, int points);

}  // namespace psr
