#include "psr/scale_fn.hpp"

#include <cmath>

#include "psr/errors.hpp"

namespace psr {

double expint(double k, double x) {
  const double kx = k * x;
  if (kx == 0.0) return x;
  return std::expm1(kx) / k;
}

ScaleContext::ScaleContext(const ProcessSpec& spec, double q) : spec_(spec), q_(q) {
  spec_.validate();
  if (!(q > 0.0) || !std::isfinite(q)) throw DomainError("scale functions need q > 0");
  const double r1 = psr::phi(spec_, q);
  if (spec_.family == Family::BrownianDrift) {
    const double s2 = spec_.sigma * spec_.sigma;
    const double r2 = -r1 - 2.0 * spec_.mu / s2;
    const double a1 = 1.0 / (s2 * r1 + spec_.mu);
    rates_ = {r1, r2};
    coefs_ = {a1, -a1};
    w0_ = 0.0;
  } else {
    const double beta = spec_.jump_mean_inv;
    const double c = spec_.c;
    // Roots of c t^2 + (c beta - eta - q) t - q beta = 0; product is -q beta / c.
    const double r2 = spec_.eta == 0.0 ? -beta : -q * beta / (c * r1);
    rates_ = {r1, r2};
    const double a1 = (beta + r1) / (c * (r1 - r2));
    const double a2 = spec_.eta == 0.0 ? 0.0 : (beta + r2) / (c * (r2 - r1));
    coefs_ = {a1, a2};
    w0_ = 1.0 / c;
  }
}

double ScaleContext::W(double x) const {
  if (x < 0.0) return 0.0;
  return w0_ + coefs_[0] * std::expm1(rates_[0] * x) + coefs_[1] * std::expm1(rates_[1] * x);
}

double ScaleContext::int_W(double x) const {
  if (x <= 0.0) return 0.0;
  // W - w0 is A1 expm1(r1 x) + A2 expm1(r2 x); integrate each piece.
  double s = w0_ * x;
  for (int i = 0; i < 2; ++i) s += coefs_[i] * (expint(rates_[i], x) - x);
  return s;
}

double ScaleContext::Z(double x) const {
  if (x <= 0.0) return 1.0;
  return 1.0 + q_ * int_W(x);
}

double ScaleContext::Z_biv(double x, double theta) const {
  if (!(theta >= 0.0)) throw DomainError("Z_biv: theta must be >= 0");
  if (x <= 0.0) return std::exp(theta * x);
  if (theta == 0.0) return Z(x);
  // e^{theta x} - psi_q(theta) sum_i A_i int_0^x e^{theta (x - y)} e^{r_i y} dy
  const double pq = psi_q(theta);
  double s = 0.0;
  for (int i = 0; i < 2; ++i) s += coefs_[i] * std::exp(theta * x) * expint(rates_[i] - theta, x);
  return std::exp(theta * x) - pq * s;
}

double ScaleContext::Z_minus_ratio_W(double x) const {
  if (x < 0.0) return 1.0;
  const auto [r1, r2] = rates_;
  return q_ * coefs_[1] * (1.0 / r2 - 1.0 / r1) * std::exp(r2 * x);
}

double ScaleContext::W_damped(double L) const {
  if (L < 0.0) return 0.0;
  const double d = rates_[1] - rates_[0];
  return w0_ + coefs_[1] * std::expm1(d * L);
}

double W(const ScaleContext& ctx, double x) { return ctx.W(x); }
double Z(const ScaleContext& ctx, double x) { return ctx.Z(x); }
double Z_biv(const ScaleContext& ctx, double x, double theta) { return ctx.Z_biv(x, theta); }

namespace {
void check_interval(double b, double a, double x) {
  if (!(a > b)) throw DomainError("exit: need a > b");
  if (!(x >= b && x <= a)) throw DomainError("exit: x must lie in [b, a]");
}
}  // namespace

double classical_exit_up(const ScaleContext& ctx, double b, double a, double x) {
  check_interval(b, a, x);
  const double s = x - b, L = a - b;
  const auto [r1, r2] = ctx.rates();
  const auto [a1, a2] = ctx.coefs();
  if (s == L) return 1.0;
  // W(s)/W(L) with the common factor e^{r1 L} removed.
  const double num = ctx.w0() == 0.0
                         ? -a1 * std::exp(r1 * (s - L)) * std::expm1((r2 - r1) * s)
                         : a1 * std::exp(r1 * (s - L)) + a2 * std::exp(r2 * s - r1 * L);
  return num / ctx.W_damped(L);
}

double classical_exit_down(const ScaleContext& ctx, double b, double a, double x) {
  check_interval(b, a, x);
  const double s = x - b, L = a - b;
  const auto [r1, r2] = ctx.rates();
  const auto [a1, a2] = ctx.coefs();
  // Z(s)W(L) - W(s)Z(L) = q A1 A2 (1/r2 - 1/r1) (e^{r2 s + r1 L} - e^{r1 s + r2 L}).
  const double k = ctx.q() * a1 * a2 * (1.0 / r2 - 1.0 / r1);
  return -k * std::exp(r2 * s) * std::expm1((r1 - r2) * (s - L)) / ctx.W_damped(L);
}

}  // namespace psr
