#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "psr/grid_function.hpp"
#include "psr/kernels.hpp"

namespace psr {

enum class Quadrature { Trapezoid, Simpson };

struct SolveConfig {
  int grid_points = 2049;
  Quadrature quadrature = Quadrature::Simpson;
  // Sup-norm tolerance on successive iterates, relative to max(1, sup|h|).
  double picard_tol = 1e-10;
  int max_iter = 200;
  // Kernel tail mass allowed beyond a truncated half line.
  double truncation_eps = 1e-10;
  Interp interp = Interp::CubicMonotone;
  // Multiplies the truncated length of half-line domains (node spacing kept).
  double truncation_scale = 1.0;

  void validate() const;
};

// Values of f(p y) when p y leaves the range of f.
struct Extension {
  double below = 0.0;
  double above = 0.0;
};

struct FixedPointResult {
  GridFunction g;
  int iterations = 0;
  double residual = 0.0;
  // |gamma| * max_x mass(k, x, u1, u2): a priori contraction ratio.
  double contraction_bound = 0.0;
  // Largest ratio of successive Picard increments while above roundoff; 0 if
  // fewer than two such increments were seen.
  double observed_factor = 0.0;
  // |gamma| >= kernel rate, the stricter textbook condition fails.
  bool literal_condition_violated = false;
  std::vector<double> history;
};

// (A f)(x) = h(x) + gamma * int_{u1}^{u2} r(x, y) f(p y) dy on the nodes of h.
GridFunction apply_operator(const KernelHandle& k, const GridFunction& h, const GridFunction& f,
                            double gamma, double p, double u1, double u2,
                            Quadrature quad = Quadrature::Simpson,
                            std::optional<Extension> ext = std::nullopt);

FixedPointResult solve_fixed_point(const KernelHandle& k, const GridFunction& h, double gamma,
                                   double p, double u1, double u2, const SolveConfig& cfg = {},
                                   std::optional<Extension> ext = std::nullopt,
                                   const GridFunction* initial = nullptr);

// h + sum_{k <= K} gamma^k int V_k(x, y) h(p y) dy by nested Gauss-Legendre
// quadrature, evaluated at xs. Test oracle; K <= 4.
std::vector<double> series_sum(const KernelHandle& k, const std::function<double(double)>& h,
                               double gamma, double p, double u1, double u2, int K,
                               std::span<const double> xs, int panels = 4, int order = 8);

GridFunction series_sum(const KernelHandle& k, const GridFunction& h, double gamma, double p,
                        double u1, double u2, int K);

// Tail bound (|gamma|/q)^{K+1} sup|h| / (1 - |gamma|/q) of the truncated series.
double series_tail_bound(double gamma, double q, double sup_h, int K);

}  // namespace psr
