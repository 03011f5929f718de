#include "psr/grid_function.hpp"

#include <algorithm>
#include <cmath>

#include "psr/errors.hpp"

namespace psr {

std::size_t locate_cell(std::span<const double> nodes, double x) {
  const auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
  std::size_t i = static_cast<std::size_t>(it - nodes.begin());
  if (i == 0) return 0;
  return std::min(i - 1, nodes.size() - 2);
}

void monotone_slopes(std::span<const double> x, std::span<const double> y, std::span<double> d) {
  const std::size_t n = x.size();
  if (n == 2) {
    d[0] = d[1] = (y[1] - y[0]) / (x[1] - x[0]);
    return;
  }
  auto delta = [&](std::size_t k) { return (y[k + 1] - y[k]) / (x[k + 1] - x[k]); };
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double h0 = x[k] - x[k - 1], h1 = x[k + 1] - x[k];
    const double m0 = delta(k - 1), m1 = delta(k);
    if (m0 * m1 <= 0.0) {
      d[k] = 0.0;
    } else {
      const double w1 = 2.0 * h1 + h0, w2 = h1 + 2.0 * h0;
      d[k] = (w1 + w2) / (w1 / m0 + w2 / m1);
    }
  }
  auto end_slope = [](double h0, double h1, double m0, double m1) {
    double d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if (d * m0 <= 0.0) return 0.0;
    if (m0 * m1 <= 0.0 && std::abs(d) > std::abs(3.0 * m0)) return 3.0 * m0;
    return d;
  };
  d[0] = end_slope(x[1] - x[0], x[2] - x[1], delta(0), delta(1));
  d[n - 1] = end_slope(x[n - 1] - x[n - 2], x[n - 2] - x[n - 3], delta(n - 2), delta(n - 3));
}

GridFunction::GridFunction(std::vector<double> nodes, std::vector<double> values, Interp interp)
    : nodes_(std::move(nodes)), values_(std::move(values)), interp_(interp) {
  if (nodes_.size() < 2) throw DomainError("grid function needs at least two nodes");
  if (nodes_.size() != values_.size()) throw DomainError("grid function: size mismatch");
  for (std::size_t i = 0; i + 1 < nodes_.size(); ++i)
    if (!(nodes_[i + 1] > nodes_[i])) throw DomainError("grid function: nodes must increase");
  if (interp_ == Interp::CubicMonotone) {
    slopes_.resize(nodes_.size());
    monotone_slopes(nodes_, values_, slopes_);
  }
}

GridFunction GridFunction::sample(std::vector<double> nodes,
                                  const std::function<double(double)>& f, Interp interp) {
  std::vector<double> v(nodes.size());
  std::transform(nodes.begin(), nodes.end(), v.begin(), f);
  return GridFunction(std::move(nodes), std::move(v), interp);
}

double GridFunction::operator()(double x) const {
  if (!(x >= lo() && x <= hi())) throw DomainError("grid function evaluated outside its range");
  const std::size_t c = locate_cell(nodes_, x);
  const double h = nodes_[c + 1] - nodes_[c];
  const double t = (x - nodes_[c]) / h;
  if (interp_ == Interp::Linear) return values_[c] + t * (values_[c + 1] - values_[c]);
  return hermite(values_[c], values_[c + 1], slopes_[c], slopes_[c + 1], h, t);
}

double GridFunction::sup_norm() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

std::vector<double> make_grid(double lo, double hi, std::span<const double> breaks, int points) {
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi))
    throw DomainError("make_grid: need finite lo < hi");
  if (points < 2) throw DomainError("make_grid: need at least two points");
  std::vector<double> cuts{lo, hi};
  const double tiny = 1e-12 * (hi - lo);
  for (double b : breaks)
    if (b > lo + tiny && b < hi - tiny) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [&](double u, double v) { return std::abs(u - v) <= tiny; }),
             cuts.end());
  const double h = (hi - lo) / (points - 1);
  std::vector<double> nodes;
  nodes.reserve(points + cuts.size());
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double a = cuts[s], b = cuts[s + 1];
    const int n = std::max(1, static_cast<int>(std::ceil((b - a) / h - 1e-9)));
    for (int i = 0; i < n; ++i) nodes.push_back(a + (b - a) * i / n);
  }
  nodes.push_back(hi);
  return nodes;
}

}  // namespace psr
