#pragma once

#include <array>

#include "psr/levy_model.hpp"

namespace psr {

// q-scale functions at a fixed rate q > 0. For both supported families
// W(x) = A1 e^{r1 x} + A2 e^{r2 x} on x >= 0 with r1 = Phi_q > 0 > r2.
class ScaleContext {
 public:
  ScaleContext(const ProcessSpec& spec, double q);

  const ProcessSpec& spec() const noexcept { return spec_; }
  double q() const noexcept { return q_; }
  double phi() const noexcept { return rates_[0]; }
  // r1 = Phi_q, r2 < 0.
  const std::array<double, 2>& rates() const noexcept { return rates_; }
  const std::array<double, 2>& coefs() const noexcept { return coefs_; }
  // W(0+): 0 for Brownian motion, 1/c for Cramer-Lundberg.
  double w0() const noexcept { return w0_; }

  double psi_q(double theta) const { return laplace_exponent(spec_, theta) - q_; }

  double W(double x) const;
  double Z(double x) const;
  // Z(x, theta); e^{theta x} for x <= 0.
  double Z_biv(double x, double theta) const;
  // Integral of W over [0, x]; 0 for x <= 0.
  double int_W(double x) const;
  // Z(x) - (q/Phi) W(x) without cancellation: the downward first passage
  // transform E_x[e^{-q tau_0^-}].
  double Z_minus_ratio_W(double x) const;
  // W(L) e^{-Phi L} for L >= 0, bounded for large L.
  double W_damped(double L) const;

 private:
  ProcessSpec spec_;
  double q_;
  std::array<double, 2> rates_{};
  std::array<double, 2> coefs_{};
  double w0_ = 0.0;
};

double W(const ScaleContext& ctx, double x);
double Z(const ScaleContext& ctx, double x);
double Z_biv(const ScaleContext& ctx, double x, double theta);

// Two-sided exit transforms of the unreset process from [b, a].
double classical_exit_up(const ScaleContext& ctx, double b, double a, double x);
double classical_exit_down(const ScaleContext& ctx, double b, double a, double x);

// (e^{k x} - 1)/k, equal to x at k = 0.
double expint(double k, double x);

}  // namespace psr
