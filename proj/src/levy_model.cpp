#include "psr/levy_model.hpp"

#include <cmath>
#include <limits>

#include "psr/errors.hpp"

namespace psr {

ProcessSpec ProcessSpec::brownian(double mu, double sigma) {
  ProcessSpec s;
  s.family = Family::BrownianDrift;
  s.mu = mu;
  s.sigma = sigma;
  s.validate();
  return s;
}

ProcessSpec ProcessSpec::cramer_lundberg(double c, double eta, double jump_mean_inv) {
  ProcessSpec s;
  s.family = Family::CramerLundbergExp;
  s.c = c;
  s.eta = eta;
  s.jump_mean_inv = jump_mean_inv;
  s.validate();
  return s;
}

void ProcessSpec::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (family == Family::BrownianDrift) {
    if (!finite(mu)) throw DomainError("mu must be finite");
    if (!(sigma > 0.0) || !finite(sigma)) throw DomainError("sigma must be > 0");
  } else {
    if (!(c > 0.0) || !finite(c)) throw DomainError("c must be > 0");
    if (!(eta >= 0.0) || !finite(eta)) throw DomainError("eta must be >= 0");
    if (!(jump_mean_inv > 0.0) || !finite(jump_mean_inv))
      throw DomainError("jump rate must be > 0");
  }
}

bool ProcessSpec::is_pure_drift() const noexcept {
  return family == Family::CramerLundbergExp && eta == 0.0;
}

std::string family_name(Family f) {
  return f == Family::BrownianDrift ? "bm" : "cl";
}

double laplace_exponent(const ProcessSpec& spec, double theta) {
  if (!(theta >= 0.0)) throw DomainError("laplace_exponent: theta must be >= 0");
  if (spec.family == Family::BrownianDrift)
    return spec.mu * theta + 0.5 * spec.sigma * spec.sigma * theta * theta;
  return spec.c * theta - spec.eta * theta / (spec.jump_mean_inv + theta);
}

double laplace_exponent_derivative(const ProcessSpec& spec, double theta) {
  if (!(theta >= 0.0)) throw DomainError("laplace_exponent: theta must be >= 0");
  if (spec.family == Family::BrownianDrift)
    return spec.mu + spec.sigma * spec.sigma * theta;
  const double d = spec.jump_mean_inv + theta;
  return spec.c - spec.eta * spec.jump_mean_inv / (d * d);
}

double phi(const ProcessSpec& spec, double q) {
  if (!(q >= 0.0) || !std::isfinite(q)) throw DomainError("phi: q must be >= 0");
  spec.validate();
  if (q == 0.0 && laplace_exponent_derivative(spec, 0.0) >= 0.0) return 0.0;

  double hi = 1.0;
  while (laplace_exponent(spec, hi) <= q) {
    hi *= 2.0;
    if (hi > 1e300) throw DomainError("phi: no root found");
  }
  // Lower end of the bracket: a point with psi < q when one is known.
  double lo = 0.0;
  if (q == 0.0) {
    // psi'(0) < 0: bisect psi' for the minimiser, psi < 0 there.
    double l = 0.0, h = hi;
    for (int i = 0; i < 200 && h - l > 1e-15 * h; ++i) {
      const double m = 0.5 * (l + h);
      (laplace_exponent_derivative(spec, m) < 0.0 ? l : h) = m;
    }
    lo = h;
  }

  // Newton from the right is monotone for convex psi; bisection guards rounding.
  const double tol = 1e-12 * std::max(1.0, q);
  double t = hi;
  for (int it = 0; it < 500; ++it) {
    const double f = laplace_exponent(spec, t) - q;
    if (std::abs(f) <= tol * 1e-2) return t;
    if (f > 0.0) hi = t; else lo = t;
    const double d = laplace_exponent_derivative(spec, t);
    double next = d > 0.0 ? t - f / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == t || hi - lo <= 4 * std::numeric_limits<double>::epsilon() * hi) {
      t = next;
      break;
    }
    t = next;
  }
  if (std::abs(laplace_exponent(spec, t) - q) > tol)
    throw ConvergenceError("phi: root residual above tolerance");
  return t;
}

}  // namespace psr
