#pragma once

#include "psr/kernels.hpp"
#include "psr/psr_exit.hpp"

namespace psr {

// Resetting to the origin (the p -> 0 limit), killed-kernel rate q + lambda.
struct TotalResetContext {
  ProcessSpec spec;
  double q = 1.0;
  double lambda = 0.0;
  double b = -1.0;
  double a = 1.0;

  void validate() const;
};

enum class TotalOneSidedForm { Derived, Literal };

// lambda m(x) / (1 - lambda m(0)), m(x) the two-sided kernel mass over [b, a].
// Needs b <= 0 <= a.
double ratio_R(const TotalResetContext& ctx, double x);

ExitValue total_exit_up(const TotalResetContext& ctx, double x);
ExitValue total_exit_down(const TotalResetContext& ctx, double x);

ExitValue total_exit_one_sided_up(const ProcessSpec& spec, double q, double lambda, double a,
                                  double x);
// For b <= 0 the derived form renews at the origin:
//   V0(x) + V0(0) lambda m(x) / (1 - lambda m(0)),  V0 = Z - ((q+lambda)/Phi) W.
// Literal replaces V0(0) by Z(-b) and drops the "1 -".
ExitValue total_exit_one_sided_down(const ProcessSpec& spec, double q, double lambda, double b,
                                    double x, TotalOneSidedForm form = TotalOneSidedForm::Derived);

}  // namespace psr
