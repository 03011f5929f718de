#pragma once

#include <cmath>
#include <numbers>
#include <vector>

namespace psr {

// n-point Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> x, w;
  explicit GaussRule(int n) : x(n), w(n) {
    for (int i = 0; i < n; ++i) {
      double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 1.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = z;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (z * p1 - p0) / (z * z - 1.0);
        const double dz = p1 / dp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      x[i] = z;
      w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
  }

  // Composite rule over [a, b] with equal panels.
  template <class F>
  double integrate(F&& f, double a, double b, int panels = 1) const {
    if (!(b > a)) return 0.0;
    const double hp = (b - a) / panels;
    double s = 0.0;
    for (int q = 0; q < panels; ++q) {
      const double mid = a + (q + 0.5) * hp;
      for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * f(mid + 0.5 * hp * x[i]);
    }
    return 0.5 * hp * s;
  }
};

}  // namespace psr
