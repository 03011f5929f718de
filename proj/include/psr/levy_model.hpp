#pragma once

#include <string>

namespace psr {

enum class Family { BrownianDrift, CramerLundbergExp };

// Spectrally negative Levy process. Brownian motion with drift uses mu and
// sigma; the Cramer-Lundberg model uses premium rate c, jump intensity eta and
// exponential claims with mean 1/jump_mean_inv.
struct ProcessSpec {
  Family family = Family::BrownianDrift;
  double mu = 0.0;
  double sigma = 1.0;
  double c = 1.0;
  double eta = 0.0;
  double jump_mean_inv = 1.0;

  static ProcessSpec brownian(double mu, double sigma);
  static ProcessSpec cramer_lundberg(double c, double eta, double jump_mean_inv);

  // Throws DomainError on invalid parameters.
  void validate() const;
  // eta == 0 Cramer-Lundberg: deterministic drift, only meant for simulator checks.
  bool is_pure_drift() const noexcept;

  bool operator==(const ProcessSpec&) const = default;
};

std::string family_name(Family f);

double laplace_exponent(const ProcessSpec& spec, double theta);
double laplace_exponent_derivative(const ProcessSpec& spec, double theta);

// Largest root of psi(theta) = q.
double phi(const ProcessSpec& spec, double q);

}  // namespace psr
