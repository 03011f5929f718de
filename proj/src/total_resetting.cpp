#include "psr/total_resetting.hpp"

#include <cmath>
#include <limits>

#include "psr/errors.hpp"

namespace psr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_rates(double q, double lambda) {
  if (!(q > 0.0) || !std::isfinite(q)) throw DomainError("q must be > 0");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be >= 0");
}

void check_x(const TotalResetContext& c, double x) {
  if (!(x >= c.b && x <= c.a)) throw DomainError("x must lie in [b, a]");
}

// Reset lands strictly inside (b, a] or on b = 0, where it does not count as exit.
bool straddles(const TotalResetContext& c) { return c.b <= 0.0 && c.a > 0.0; }

}  // namespace

void TotalResetContext::validate() const {
  spec.validate();
  check_rates(q, lambda);
  if (!std::isfinite(a) || !std::isfinite(b) || !(a > b)) throw DomainError("need finite a > b");
}

double ratio_R(const TotalResetContext& c, double x) {
  c.validate();
  check_x(c, x);
  if (!(c.b <= 0.0 && c.a >= 0.0)) throw DomainError("ratio_R needs b <= 0 <= a");
  if (c.lambda == 0.0) return 0.0;
  const ScaleContext ctx(c.spec, c.q + c.lambda);
  const auto k = KernelHandle::two_sided(ctx, c.b, c.a);
  return c.lambda * k.mass(x, c.b, c.a) / (1.0 - c.lambda * k.mass(0.0, c.b, c.a));
}

ExitValue total_exit_up(const TotalResetContext& c, double x) {
  c.validate();
  check_x(c, x);
  const ScaleContext ctx(c.spec, c.q + c.lambda);
  ExitValue v;
  v.region = region_of(c.b, c.a);
  if (straddles(c)) {
    const double R = ratio_R(c, x), Ra = ratio_R(c, c.a);
    const double w0 = ctx.W(-c.b);
    v.value = (ctx.W(x - c.b) + w0 * R) / (ctx.W(c.a - c.b) + w0 * Ra);
    return v;
  }
  v.value = classical_exit_up(ctx, c.b, c.a, x);
  if (c.a <= 0.0 && c.lambda > 0.0) {
    const auto k = KernelHandle::two_sided(ctx, c.b, c.a);
    v.correction = c.lambda * k.mass(x, c.b, c.a);
    v.value += v.correction;
  }
  return v;
}

ExitValue total_exit_down(const TotalResetContext& c, double x) {
  c.validate();
  check_x(c, x);
  const ScaleContext ctx(c.spec, c.q + c.lambda);
  ExitValue v;
  v.region = region_of(c.b, c.a);
  if (straddles(c)) {
    const double R = ratio_R(c, x), Ra = ratio_R(c, c.a);
    const double w0 = ctx.W(-c.b), z0 = ctx.Z(-c.b);
    const double Wx = ctx.W(x - c.b) + w0 * R, Wa = ctx.W(c.a - c.b) + w0 * Ra;
    const double Zx = ctx.Z(x - c.b) + z0 * R, Za = ctx.Z(c.a - c.b) + z0 * Ra;
    v.value = Zx - Wx / Wa * Za;
    return v;
  }
  v.value = classical_exit_down(ctx, c.b, c.a, x);
  if (c.b >= 0.0 && c.lambda > 0.0) {
    const auto k = KernelHandle::two_sided(ctx, c.b, c.a);
    v.correction = c.lambda * k.mass(x, c.b, c.a);
    v.value += v.correction;
  }
  return v;
}

ExitValue total_exit_one_sided_up(const ProcessSpec& spec, double q, double lambda, double a,
                                  double x) {
  spec.validate();
  check_rates(q, lambda);
  if (!std::isfinite(a) || !std::isfinite(x) || !(x <= a)) throw DomainError("need x <= a");
  const ScaleContext ctx(spec, q + lambda);
  const double phi = ctx.phi();
  ExitValue v;
  v.region = a <= 0.0 ? Region::NegNeg : Region::PosNeg;
  v.value = std::exp(-phi * (a - x));
  if (lambda == 0.0) return v;
  const auto k = KernelHandle::one_sided_up(ctx, a);
  const double mx = lambda * k.mass(x, -kInf, a);
  if (a < 0.0) {
    v.correction = mx;
  } else {
    v.correction = std::exp(-phi * a) * mx / (1.0 - lambda * k.mass(0.0, -kInf, a));
  }
  v.value += v.correction;
  return v;
}

ExitValue total_exit_one_sided_down(const ProcessSpec& spec, double q, double lambda, double b,
                                    double x, TotalOneSidedForm form) {
  spec.validate();
  check_rates(q, lambda);
  if (!std::isfinite(b) || !std::isfinite(x) || !(x >= b)) throw DomainError("need x >= b");
  const ScaleContext ctx(spec, q + lambda);
  ExitValue v;
  v.region = b >= 0.0 ? Region::PosPos : Region::PosNeg;
  v.value = ctx.Z_minus_ratio_W(x - b);
  if (lambda == 0.0) return v;
  const auto k = KernelHandle::one_sided_down(ctx, b);
  const double mx = lambda * k.mass(x, b, kInf);
  if (b > 0.0) {
    v.correction = mx;
  } else if (form == TotalOneSidedForm::Derived || b == 0.0) {
    v.correction = ctx.Z_minus_ratio_W(-b) * mx / (1.0 - lambda * k.mass(0.0, b, kInf));
  } else {
    v.correction = ctx.Z(-b) * mx / (lambda * k.mass(0.0, b, kInf));
  }
  v.value += v.correction;
  return v;
}

}  // namespace psr
