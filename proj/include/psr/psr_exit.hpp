#pragma once

#include <string>

#include "psr/levy_model.hpp"
#include "psr/resolvent_engine.hpp"

namespace psr {

enum class Side { UpTwoSided, DownTwoSided, UpOneSided, DownOneSided };
enum class Region { PosPos, PosNeg, NegNeg };

// Laplace transform query for the process reset to p U at rate lambda.
// One-sided queries ignore the unused barrier.
struct ExitQuery {
  ProcessSpec spec;
  double q = 1.0;
  double lambda = 0.0;
  double p = 0.5;
  double b = 0.0;
  double a = 1.0;
  double x = 0.5;
  Side side = Side::UpTwoSided;
};

struct ExitValue {
  double value = 0.0;
  // Reset-crossing term (H upward in NegNeg, K downward in PosPos), else 0.
  double correction = 0.0;
  double solver_residual = 0.0;
  Region region = Region::PosNeg;
  int iterations = 0;
  double contraction_bound = 0.0;
  double observed_factor = 0.0;
};

enum class Method { Resolvent, Direct };
// Rate of the inner kernel of the H and K terms.
enum class CorrectionRate { Shifted, Literal };
// Downward one-sided: fixed point of the renewal equation, or the variant with
// an extra lambda in front of the resolvent integral.
enum class OneSidedForm { FixedPoint, LiteralExtraLambda };

struct PsrOptions {
  SolveConfig solve{};
  Method method = Method::Resolvent;
  CorrectionRate correction_rate = CorrectionRate::Shifted;
  OneSidedForm one_sided_form = OneSidedForm::FixedPoint;
};

// b >= 0: PosPos; a <= 0: NegNeg; otherwise PosNeg.
Region region_of(double b, double a);
std::string region_name(Region r);
std::string side_name(Side s);

// Integration range [b v (a ^ b/p), a ^ (a/p v b)] of the resetting terms.
std::pair<double, double> reset_interval(double b, double a, double p);

double scale_W_p(const ProcessSpec& spec, double q, double lambda, double p, double b, double a,
                 double x, const SolveConfig& cfg = {});
double scale_Z_p(const ProcessSpec& spec, double q, double lambda, double p, double b, double a,
                 double x, const SolveConfig& cfg = {});

ExitValue exit_up_two_sided(const ExitQuery& query, const PsrOptions& opts = {});
ExitValue exit_down_two_sided(const ExitQuery& query, const PsrOptions& opts = {});
ExitValue exit_down_one_sided(const ProcessSpec& spec, double q, double lambda, double p, double b,
                              double x, const PsrOptions& opts = {});
ExitValue exit_up_one_sided(const ProcessSpec& spec, double q, double lambda, double p, double a,
                            double x, const PsrOptions& opts = {});

// Dispatch on query.side.
ExitValue evaluate_exit(const ExitQuery& query, const PsrOptions& opts = {});

void validate_query(const ExitQuery& query);

}  // namespace psr
