#pragma once

#include <array>
#include <cstddef>

#include "psr/scale_fn.hpp"

namespace psr {

enum class KernelKind { TwoSided, OneSidedUp, OneSidedDown };

// coef * exp(kappa + rate * (y - x)); kappa is kept apart from coef so that
// products of large and small exponentials never overflow.
struct ExpTerm {
  double coef = 0.0;
  double kappa = 0.0;
  double rate = 0.0;
};

// A kernel row r(x, .) as exponential terms: `lower` holds on y <= x,
// `upper` on y > x.
struct KernelRow {
  std::array<ExpTerm, 5> lower{};
  std::array<ExpTerm, 4> upper{};
  std::size_t n_lower = 0;
  std::size_t n_upper = 0;
};

// Killed potential density r(x, y) for the interval [b, a], the half line
// (-inf, a] or the half line [b, inf).
class KernelHandle {
 public:
  static KernelHandle two_sided(const ScaleContext& ctx, double b, double a);
  static KernelHandle one_sided_up(const ScaleContext& ctx, double a);
  static KernelHandle one_sided_down(const ScaleContext& ctx, double b);

  KernelKind kind() const noexcept { return kind_; }
  const ScaleContext& ctx() const noexcept { return ctx_; }
  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  // Natural domain; infinite on the open side of one-sided kernels.
  double lo() const noexcept;
  double hi() const noexcept;

  double eval(double x, double y) const;
  double mass(double x, double u1, double u2) const;
  KernelRow row(double x) const;

 private:
  KernelHandle(KernelKind kind, const ScaleContext& ctx, double b, double a);
  void check_point(double v, const char* what) const;

  KernelKind kind_;
  ScaleContext ctx_;
  double b_;
  double a_;
};

double eval(const KernelHandle& k, double x, double y);
double mass(const KernelHandle& k, double x, double u1, double u2);

// Integral of exp(kappa + rate * t) over t in [t1, t2]; t1 may be -inf and
// t2 may be +inf when the integrand decays there.
double exp_term_integral(double kappa, double rate, double t1, double t2);

}  // namespace psr
