#pragma once

#include <functional>
#include <vector>

#include "psr/grid_function.hpp"
#include "psr/scale_fn.hpp"

namespace psr {

// w_n(x) = p^n W(p^n x), 0 for x < 0.
double w_n(const ScaleContext& ctx, double p, int n, double x);
double w_n(const ProcessSpec& spec, double q, double p, int n, double x);

// Levels [w_0 * ... * w_n] on a uniform grid of [0, x_max], n = 0..n_max.
class ConvTable {
 public:
  ConvTable(const ProcessSpec& spec, double q, double p, double x_max, int n_max = 25,
            int intervals = 8192);

  const ScaleContext& ctx() const noexcept { return ctx_; }
  double q() const noexcept { return ctx_.q(); }
  double p() const noexcept { return p_; }
  double x_max() const noexcept { return x_max_; }
  int n_max() const noexcept { return static_cast<int>(levels_.size()) - 1; }

  // Throws DomainError for x outside [0, x_max] or n outside [0, n_max].
  double level(int n, double x) const;
  // Integral of level n over [0, x].
  double level_integral(int n, double x) const;

 private:
  void check(int n, double x) const;

  ScaleContext ctx_;
  double p_, x_max_;
  std::vector<GridFunction> levels_;
  std::vector<GridFunction> cumulative_;
};

double conv_level(const ConvTable& table, int n, double x);

// sum_k gamma^k int_0^{x - u p^-k} h(p^k (x - y) - z) [w_0 * ... * w_{k-1}](y) dy,
// the k = 0 term being h(x - z). Finite for u > 0; for u = 0 summed until the
// remaining terms are below 1e-12 relative.
double G_operator(const ConvTable& table, const std::function<double(double)>& h, double gamma,
                  double x, double u, double z);

struct ConvOptions {
  int n_max = 25;
  int intervals = 8192;
};

// Two-sided exits for a > b >= 0 through the convolution representation.
double conv_exit_up(const ProcessSpec& spec, double q, double lambda, double p, double b, double a,
                    double x, const ConvOptions& opts = {});
double conv_exit_down(const ProcessSpec& spec, double q, double lambda, double p, double b,
                      double a, double x, const ConvOptions& opts = {});

}  // namespace psr
