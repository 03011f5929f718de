#include "psr/kernels.hpp"

#include <cmath>
#include <limits>

#include "psr/errors.hpp"

namespace psr {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double slack(double v) { return 1e-12 * (1.0 + std::abs(v)); }
}  // namespace

KernelHandle::KernelHandle(KernelKind kind, const ScaleContext& ctx, double b, double a)
    : kind_(kind), ctx_(ctx), b_(b), a_(a) {}

KernelHandle KernelHandle::two_sided(const ScaleContext& ctx, double b, double a) {
  if (!(a > b) || !std::isfinite(a) || !std::isfinite(b))
    throw DomainError("two-sided kernel needs finite a > b");
  return {KernelKind::TwoSided, ctx, b, a};
}

KernelHandle KernelHandle::one_sided_up(const ScaleContext& ctx, double a) {
  if (!std::isfinite(a)) throw DomainError("one-sided kernel needs finite a");
  return {KernelKind::OneSidedUp, ctx, -kInf, a};
}

KernelHandle KernelHandle::one_sided_down(const ScaleContext& ctx, double b) {
  if (!std::isfinite(b)) throw DomainError("one-sided kernel needs finite b");
  return {KernelKind::OneSidedDown, ctx, b, kInf};
}

double KernelHandle::lo() const noexcept { return b_; }
double KernelHandle::hi() const noexcept { return a_; }

void KernelHandle::check_point(double v, const char* what) const {
  if (std::isnan(v) || v < b_ - slack(b_) || v > a_ + slack(a_))
    throw DomainError(std::string("kernel: ") + what + " outside the kernel domain");
}

KernelRow KernelHandle::row(double x) const {
  check_point(x, "x");
  if (!std::isfinite(x)) throw DomainError("kernel: x must be finite");
  const auto [r1, r2] = ctx_.rates();
  const auto [a1, a2] = ctx_.coefs();
  KernelRow row;
  auto lower = [&](double c, double k, double r) { row.lower[row.n_lower++] = {c, k, r}; };
  auto upper = [&](double c, double k, double r) { row.upper[row.n_upper++] = {c, k, r}; };
  switch (kind_) {
    case KernelKind::TwoSided: {
      const double L = a_ - b_;
      const double s = std::min(std::max(x - b_, 0.0), L);
      const double d = ctx_.W_damped(L);
      const double c12 = a1 * a2 / d;
      // Diagonal-free form of W(s)W(L-t)/W(L) - W(s-t) with t = y - b.
      lower(-c12, (r2 - r1) * L, -r1);
      lower(c12, (r1 - r2) * (s - L), -r2);
      lower(c12, (r2 - r1) * s, -r1);
      lower(a2 * a2 / d, (r2 - r1) * L, -r2);
      lower(-a2, 0.0, -r2);
      upper(a1 * a1 / d, 0.0, -r1);
      upper(c12, (r1 - r2) * (s - L), -r2);
      upper(c12, (r2 - r1) * s, -r1);
      upper(a2 * a2 / d, (r2 - r1) * L, -r2);
      break;
    }
    case KernelKind::OneSidedUp: {
      const double u = std::max(a_ - x, 0.0);
      lower(a2, (r2 - r1) * u, -r2);
      lower(-a2, 0.0, -r2);
      upper(a1, 0.0, -r1);
      upper(a2, (r2 - r1) * u, -r2);
      break;
    }
    case KernelKind::OneSidedDown: {
      const double s = std::max(x - b_, 0.0);
      lower(a2, (r2 - r1) * s, -r1);
      lower(-a2, 0.0, -r2);
      upper(a1, 0.0, -r1);
      upper(a2, (r2 - r1) * s, -r1);
      break;
    }
  }
  return row;
}

double KernelHandle::eval(double x, double y) const {
  check_point(y, "y");
  if (!std::isfinite(y)) throw DomainError("kernel: y must be finite");
  const KernelRow r = row(x);
  const double t = y - x;
  double v = 0.0;
  if (t <= 0.0) {
    for (std::size_t i = 0; i < r.n_lower; ++i)
      v += r.lower[i].coef * std::exp(r.lower[i].kappa + r.lower[i].rate * t);
  } else {
    for (std::size_t i = 0; i < r.n_upper; ++i)
      v += r.upper[i].coef * std::exp(r.upper[i].kappa + r.upper[i].rate * t);
  }
  return v;
}

double exp_term_integral(double kappa, double rate, double t1, double t2) {
  if (!(t2 > t1)) return 0.0;
  if (rate == 0.0) {
    if (!std::isfinite(t2 - t1)) throw DomainError("kernel mass: divergent integral");
    return std::exp(kappa) * (t2 - t1);
  }
  // Anchor at the end where the exponential is largest.
  if (rate > 0.0) {
    if (t2 == kInf) throw DomainError("kernel mass: divergent integral");
    const double len = t2 - t1;
    return std::exp(kappa + rate * t2) * -std::expm1(-rate * len) / rate;
  }
  if (t1 == -kInf) throw DomainError("kernel mass: divergent integral");
  const double len = t2 - t1;
  return std::exp(kappa + rate * t1) * -std::expm1(rate * len) / -rate;
}

double KernelHandle::mass(double x, double u1, double u2) const {
  if (std::isnan(u1) || std::isnan(u2)) throw DomainError("kernel mass: NaN bound");
  if (u1 > u2) throw DomainError("kernel mass: inverted interval");
  if (u1 < b_ - slack(b_) || u2 > a_ + slack(a_))
    throw DomainError("kernel mass: interval outside the kernel domain");
  const KernelRow r = row(x);
  if (u1 == u2) return 0.0;
  const double t1 = u1 - x, t2 = u2 - x;
  double m = 0.0;
  if (t1 < 0.0) {
    const double e = std::min(t2, 0.0);
    for (std::size_t i = 0; i < r.n_lower; ++i)
      m += r.lower[i].coef * exp_term_integral(r.lower[i].kappa, r.lower[i].rate, t1, e);
  }
  if (t2 > 0.0) {
    const double s = std::max(t1, 0.0);
    for (std::size_t i = 0; i < r.n_upper; ++i)
      m += r.upper[i].coef * exp_term_integral(r.upper[i].kappa, r.upper[i].rate, s, t2);
  }
  return m;
}

double eval(const KernelHandle& k, double x, double y) { return k.eval(x, y); }
double mass(const KernelHandle& k, double x, double u1, double u2) { return k.mass(x, u1, u2); }

}  // namespace psr
