#include "psr/psr_exit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "psr/errors.hpp"

namespace psr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_common(double q, double lambda, double p) {
  if (!(q > 0.0) || !std::isfinite(q)) throw DomainError("q must be > 0");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be >= 0");
  if (!(p > 0.0 && p < 1.0)) throw DomainError("p must lie in (0, 1)");
}

void check_two_sided(double b, double a, double x) {
  if (!std::isfinite(a) || !std::isfinite(b) || !(a > b)) throw DomainError("need finite a > b");
  if (!(x >= b && x <= a)) throw DomainError("x must lie in [b, a]");
}

// Everything a two-sided solve shares: kernel at rate q + lambda on [b, a],
// the resetting interval and a grid holding all break points.
struct TwoSided {
  ScaleContext ctx;
  KernelHandle k;
  double b, a, u1, u2;
  std::vector<double> nodes;
  Region region;

  TwoSided(const ProcessSpec& spec, double q, double lambda, double p, double b_, double a_,
           double x, const SolveConfig& cfg)
      : ctx(spec, q + lambda),
        k(KernelHandle::two_sided(ctx, b_, a_)),
        b(b_),
        a(a_),
        region(region_of(b_, a_)) {
    std::tie(u1, u2) = reset_interval(b, a, p);
    const std::vector<double> breaks{u1, u2, b / p, a / p, 0.0, x};
    nodes = make_grid(b, a, breaks, cfg.grid_points);
  }
};

struct Accum {
  ExitValue v;
  void add(const FixedPointResult& r) {
    v.solver_residual = std::max(v.solver_residual, r.residual);
    v.iterations += r.iterations;
    v.contraction_bound = std::max(v.contraction_bound, r.contraction_bound);
    v.observed_factor = std::max(v.observed_factor, r.observed_factor);
  }
};

FixedPointResult solve_on(const KernelHandle& k, const std::vector<double>& nodes,
                          const std::function<double(double)>& h, double gamma, double p,
                          double u1, double u2, const SolveConfig& cfg,
                          std::optional<Extension> ext = std::nullopt) {
  const auto hg = GridFunction::sample(nodes, h, cfg.interp);
  return solve_fixed_point(k, hg, gamma, p, u1, u2, cfg, ext);
}

// Fixed point with right-hand side lambda * int_{v1}^{v2} r(., z) dz, where the
// inner kernel is at rate q + lambda (or q for the literal variant).
double correction_term(const TwoSided& s, const ProcessSpec& spec, double q, double lambda,
                       double p, double v1, double v2, double x, const PsrOptions& opts,
                       Accum& acc) {
  if (lambda == 0.0 || v1 >= v2) return 0.0;
  const auto& cfg = opts.solve;
  auto J = [&](double y) { return lambda * s.k.mass(y, v1, v2); };
  if (opts.correction_rate == CorrectionRate::Shifted) {
    const auto r = solve_on(s.k, s.nodes, J, lambda, p, s.u1, s.u2, cfg);
    acc.add(r);
    return r.g(x);
  }
  const ScaleContext cq(spec, q);
  const auto kq = KernelHandle::two_sided(cq, s.b, s.a);
  auto Jq = [&](double y) { return lambda * kq.mass(y, v1, v2); };
  const auto r = solve_on(s.k, s.nodes, Jq, lambda, p, s.u1, s.u2, cfg);
  acc.add(r);
  return J(x) + r.g(x) - Jq(x);
}

}  // namespace

Region region_of(double b, double a) {
  if (b >= 0.0) return Region::PosPos;
  if (a <= 0.0) return Region::NegNeg;
  return Region::PosNeg;
}

std::string region_name(Region r) {
  switch (r) {
    case Region::PosPos: return "PosPos";
    case Region::PosNeg: return "PosNeg";
    case Region::NegNeg: return "NegNeg";
  }
  return "?";
}

std::string side_name(Side s) {
  switch (s) {
    case Side::UpTwoSided: return "up";
    case Side::DownTwoSided: return "down";
    case Side::UpOneSided: return "up1";
    case Side::DownOneSided: return "down1";
  }
  return "?";
}

std::pair<double, double> reset_interval(double b, double a, double p) {
  return {std::max(b, std::min(a, b / p)), std::min(a, std::max(a / p, b))};
}

void validate_query(const ExitQuery& qy) {
  qy.spec.validate();
  check_common(qy.q, qy.lambda, qy.p);
  switch (qy.side) {
    case Side::UpTwoSided:
    case Side::DownTwoSided: check_two_sided(qy.b, qy.a, qy.x); break;
    case Side::UpOneSided:
      if (!std::isfinite(qy.a) || !std::isfinite(qy.x) || !(qy.x <= qy.a))
        throw DomainError("need x <= a");
      break;
    case Side::DownOneSided:
      if (!std::isfinite(qy.b) || !std::isfinite(qy.x) || !(qy.x >= qy.b))
        throw DomainError("need x >= b");
      break;
  }
}

double scale_W_p(const ProcessSpec& spec, double q, double lambda, double p, double b, double a,
                 double x, const SolveConfig& cfg) {
  check_common(q, lambda, p);
  check_two_sided(b, a, x);
  const TwoSided s(spec, q, lambda, p, b, a, x, cfg);
  return solve_on(s.k, s.nodes, [&](double y) { return s.ctx.W(y - b); }, lambda, p, s.u1, s.u2,
                  cfg)
      .g(x);
}

double scale_Z_p(const ProcessSpec& spec, double q, double lambda, double p, double b, double a,
                 double x, const SolveConfig& cfg) {
  check_common(q, lambda, p);
  check_two_sided(b, a, x);
  const TwoSided s(spec, q, lambda, p, b, a, x, cfg);
  return solve_on(s.k, s.nodes, [&](double y) { return s.ctx.Z(y - b); }, lambda, p, s.u1, s.u2,
                  cfg)
      .g(x);
}

ExitValue exit_up_two_sided(const ExitQuery& qy, const PsrOptions& opts) {
  validate_query(qy);
  if (qy.side != Side::UpTwoSided && qy.side != Side::DownTwoSided)
    throw DomainError("two-sided query expected");
  const auto& cfg = opts.solve;
  const TwoSided s(qy.spec, qy.q, qy.lambda, qy.p, qy.b, qy.a, qy.x, cfg);
  Accum acc;
  acc.v.region = s.region;
  if (opts.method == Method::Direct) {
    auto h = [&](double y) { return classical_exit_up(s.ctx, s.b, s.a, y); };
    const auto r = solve_on(s.k, s.nodes, h, qy.lambda, qy.p, s.b, s.a, cfg, Extension{0.0, 1.0});
    acc.add(r);
    acc.v.value = r.g(qy.x);
    return acc.v;
  }
  const auto wp = solve_on(s.k, s.nodes, [&](double y) { return s.ctx.W(y - s.b); }, qy.lambda,
                           qy.p, s.u1, s.u2, cfg);
  acc.add(wp);
  acc.v.value = wp.g(qy.x) / wp.g(qy.a);
  if (s.region == Region::NegNeg) {
    const double v1 = std::max(qy.a / qy.p, qy.b);
    acc.v.correction =
        correction_term(s, qy.spec, qy.q, qy.lambda, qy.p, v1, qy.a, qy.x, opts, acc);
    acc.v.value += acc.v.correction;
  }
  return acc.v;
}

ExitValue exit_down_two_sided(const ExitQuery& qy, const PsrOptions& opts) {
  validate_query(qy);
  if (qy.side != Side::UpTwoSided && qy.side != Side::DownTwoSided)
    throw DomainError("two-sided query expected");
  const auto& cfg = opts.solve;
  const TwoSided s(qy.spec, qy.q, qy.lambda, qy.p, qy.b, qy.a, qy.x, cfg);
  Accum acc;
  acc.v.region = s.region;
  if (opts.method == Method::Direct) {
    auto h = [&](double y) { return classical_exit_down(s.ctx, s.b, s.a, y); };
    const auto r = solve_on(s.k, s.nodes, h, qy.lambda, qy.p, s.b, s.a, cfg, Extension{1.0, 0.0});
    acc.add(r);
    acc.v.value = r.g(qy.x);
    return acc.v;
  }
  const auto wp = solve_on(s.k, s.nodes, [&](double y) { return s.ctx.W(y - s.b); }, qy.lambda,
                           qy.p, s.u1, s.u2, cfg);
  const auto zp = solve_on(s.k, s.nodes, [&](double y) { return s.ctx.Z(y - s.b); }, qy.lambda,
                           qy.p, s.u1, s.u2, cfg);
  acc.add(wp);
  acc.add(zp);
  acc.v.value = zp.g(qy.x) - wp.g(qy.x) / wp.g(qy.a) * zp.g(qy.a);
  if (s.region == Region::PosPos) {
    const double v2 = std::min(qy.a, qy.b / qy.p);
    acc.v.correction =
        correction_term(s, qy.spec, qy.q, qy.lambda, qy.p, qy.b, v2, qy.x, opts, acc);
    acc.v.value += acc.v.correction;
  }
  return acc.v;
}

namespace {

// Truncated length L of a half-line domain such that lambda times the kernel
// mass beyond the reach of the truncated equation stays below eps.
template <class Tail>
double truncation_length(double L0, double lambda, double eps, Tail tail) {
  double L = L0;
  if (lambda == 0.0) return L;
  for (int i = 0; i < 40; ++i, L *= 2.0)
    if (lambda * tail(L) <= eps) return L;
  throw DomainError("one-sided truncation failed: kernel tail mass does not vanish");
}

int scaled_points(const SolveConfig& cfg) {
  const int n = static_cast<int>(std::lround((cfg.grid_points - 1) * cfg.truncation_scale)) + 1;
  return n % 2 == 0 ? n + 1 : n;
}

}  // namespace

ExitValue exit_down_one_sided(const ProcessSpec& spec, double q, double lambda, double p, double b,
                              double x, const PsrOptions& opts) {
  validate_query({spec, q, lambda, p, b, b + 1.0, x, Side::DownOneSided});
  const auto& cfg = opts.solve;
  cfg.validate();
  const ScaleContext ctx(spec, q + lambda);
  const auto k = KernelHandle::one_sided_down(ctx, b);
  const double phi = ctx.phi();
  const double u1 = std::max(b, b / p);
  const double L0 = std::max(x - b, u1 - b) + 8.0 / phi;
  double L = truncation_length(L0, lambda, cfg.truncation_eps, [&](double len) {
    const double T = b + len;
    return k.mass(T, T / p, kInf);
  });
  L *= cfg.truncation_scale;
  const double T = b + L;
  const auto nodes = make_grid(b, T, std::vector<double>{u1, x, 0.0, b / p}, scaled_points(cfg));

  ExitValue v;
  v.region = b >= 0.0 ? Region::PosPos : Region::PosNeg;
  auto record = [&](const FixedPointResult& r) {
    v.solver_residual = r.residual;
    v.iterations = r.iterations;
    v.contraction_bound = r.contraction_bound;
    v.observed_factor = r.observed_factor;
  };
  if (opts.method == Method::Direct) {
    auto h = [&](double y) { return ctx.Z_minus_ratio_W(y - b); };
    const auto r = solve_on(k, nodes, h, lambda, p, b, T / p, cfg, Extension{1.0, 0.0});
    record(r);
    v.value = r.g(x);
    return v;
  }
  auto V = [&](double y) { return ctx.Z_minus_ratio_W(y - b) + lambda * k.mass(y, b, u1); };
  const auto r = solve_on(k, nodes, V, lambda, p, u1, T / p, cfg);
  record(r);
  v.value = r.g(x);
  if (opts.one_sided_form == OneSidedForm::LiteralExtraLambda) v.value = V(x) + lambda * (r.g(x) - V(x));
  return v;
}

ExitValue exit_up_one_sided(const ProcessSpec& spec, double q, double lambda, double p, double a,
                            double x, const PsrOptions& opts) {
  validate_query({spec, q, lambda, p, a - 1.0, a, x, Side::UpOneSided});
  const auto& cfg = opts.solve;
  cfg.validate();
  const ScaleContext ctx(spec, q + lambda);
  const auto k = KernelHandle::one_sided_up(ctx, a);
  const double phi = ctx.phi();
  const double u2 = std::min(a, a / p);
  const double L0 = std::max(a - x, a - u2) + 8.0 / phi;
  double L = truncation_length(L0, lambda, cfg.truncation_eps, [&](double len) {
    const double T = a - len;
    return k.mass(T, -kInf, T / p);
  });
  L *= cfg.truncation_scale;
  const double T = a - L;
  const auto nodes = make_grid(T, a, std::vector<double>{u2, x, 0.0, a / p}, scaled_points(cfg));

  ExitValue v;
  v.region = a <= 0.0 ? Region::NegNeg : Region::PosNeg;
  auto record = [&](const FixedPointResult& r) {
    v.solver_residual = r.residual;
    v.iterations = r.iterations;
    v.contraction_bound = r.contraction_bound;
    v.observed_factor = r.observed_factor;
  };
  if (opts.method == Method::Direct) {
    auto h = [&](double y) { return std::exp(-phi * (a - y)); };
    const auto r = solve_on(k, nodes, h, lambda, p, T / p, a, cfg, Extension{0.0, 1.0});
    record(r);
    v.value = r.g(x);
    return v;
  }
  auto U = [&](double y) { return std::exp(-phi * (a - y)) + lambda * k.mass(y, u2, a); };
  const auto r = solve_on(k, nodes, U, lambda, p, T / p, u2, cfg);
  record(r);
  v.value = r.g(x);
  return v;
}

ExitValue evaluate_exit(const ExitQuery& qy, const PsrOptions& opts) {
  switch (qy.side) {
    case Side::UpTwoSided: return exit_up_two_sided(qy, opts);
    case Side::DownTwoSided: return exit_down_two_sided(qy, opts);
    case Side::UpOneSided: return exit_up_one_sided(qy.spec, qy.q, qy.lambda, qy.p, qy.a, qy.x, opts);
    case Side::DownOneSided:
      return exit_down_one_sided(qy.spec, qy.q, qy.lambda, qy.p, qy.b, qy.x, opts);
  }
  throw DomainError("unknown side");
}

}  // namespace psr
