#include <doctest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "psr/errors.hpp"
#include "psr/resolvent_engine.hpp"

using namespace psr;

namespace {
const ProcessSpec kBm = ProcessSpec::brownian(0.0, 1.0);
const ProcessSpec kCl = ProcessSpec::cramer_lundberg(2.0, 1.0, 1.0);

double sup_diff(const GridFunction& a, const GridFunction& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

// int_{u1}^{u2} r(x, y) f(p y) dy by adaptive quadrature split at the diagonal.
double quad_row(const KernelHandle& k, const std::function<double(double)>& f, double x, double p,
                double u1, double u2) {
  const double e = std::clamp(x, u1, u2);
  auto lower = [&](double y) { return k.eval(x, std::min(y, x)) * f(p * y); };
  auto upper = [&](double y) {
    return k.eval(x, std::max(y, std::nextafter(x, std::numeric_limits<double>::infinity()))) *
           f(p * y);
  };
  return oracle::integrate(lower, u1, e, 1e-13) + oracle::integrate(upper, e, u2, 1e-13);
}

SolveConfig config(int points = 1025) {
  SolveConfig c;
  c.grid_points = points;
  return c;
}
}  // namespace

TEST_CASE("apply_operator trivial cases") {
  const ScaleContext ctx(kBm, 0.6);
  const auto k = KernelHandle::two_sided(ctx, 0.0, 2.0);
  const auto nodes = make_grid(0.0, 2.0, {}, 65);
  const auto h = GridFunction::sample(nodes, [](double x) { return std::sin(x) + 2.0; });
  const auto f = GridFunction::sample(nodes, [](double x) { return std::cos(x); });
  const auto zero = GridFunction::sample(nodes, [](double) { return 0.0; });
  CHECK(sup_diff(apply_operator(k, h, f, 0.0, 0.5, 0.0, 2.0), h) == 0.0);
  CHECK(sup_diff(apply_operator(k, h, zero, 0.1, 0.5, 0.0, 2.0), h) == 0.0);
  const auto Af = apply_operator(k, h, f, 0.1, 0.5, 0.0, 2.0);
  CHECK(std::abs(Af.values().back() - h.values().back()) < 1e-15);
  CHECK_THROWS_AS(apply_operator(k, h, f, 0.1, 0.5, -1.0, 2.0), DomainError);
  // [p u1, p u2] escapes [0, 2] when p = 1 and u2 beyond... use a narrower B.
  const auto nodes2 = make_grid(1.0, 2.0, {}, 33);
  const auto h2 = GridFunction::sample(nodes2, [](double) { return 1.0; });
  CHECK_THROWS_AS(apply_operator(k, h2, h2, 0.1, 0.5, 1.0, 2.0), DomainError);
}

TEST_CASE("apply_operator matches adaptive quadrature") {
  auto fexact = [](double z) { return std::cos(z) + 0.3 * z; };
  for (const ScaleContext& ctx : {ScaleContext(kBm, 0.6), ScaleContext(kCl, 0.7),
                                  ScaleContext(ProcessSpec::brownian(0.5, 0.6), 1.5)}) {
    struct Case {
      KernelHandle k;
      double lo, hi, p, u1, u2;
    };
    const Case cases[] = {
        {KernelHandle::two_sided(ctx, 0.5, 2.5), 0.5, 2.5, 0.5, 1.0, 2.5},
        {KernelHandle::two_sided(ctx, -2.5, -0.5), -2.5, -0.5, 0.5, -2.5, -1.0},
        {KernelHandle::two_sided(ctx, -1.0, 1.5), -1.0, 1.5, 0.3, -1.0, 1.5},
        {KernelHandle::two_sided(ctx, -1.0, 1.5), -1.0, 1.5, 1.0, -1.0, 1.5},
        {KernelHandle::one_sided_down(ctx, 0.5), 0.5, 6.0, 0.5, 1.0, 12.0},
        {KernelHandle::one_sided_up(ctx, -0.5), -6.0, -0.5, 0.5, -12.0, -1.0},
    };
    for (const auto& c : cases) {
      const auto nodes = make_grid(c.lo, c.hi, std::vector<double>{c.u1, c.u2}, 2049);
      const auto f = GridFunction::sample(nodes, fexact);
      const auto h = GridFunction::sample(nodes, [](double) { return 0.0; });
      const auto Af = apply_operator(c.k, h, f, 1.0, c.p, c.u1, c.u2);
      for (std::size_t j = 0; j < nodes.size(); j += 128) {
        const double ref = quad_row(c.k, fexact, nodes[j], c.p, c.u1, c.u2);
        INFO("kind ", int(c.k.kind()), " x ", nodes[j], " p ", c.p, " q ", ctx.q());
        CHECK(Af.values()[j] == doctest::Approx(ref).epsilon(1e-9).scale(1.0));
      }
      // Trapezoid and linear interpolation converge to the same integral.
      const auto fl = GridFunction::sample(nodes, fexact, Interp::Linear);
      const auto At = apply_operator(c.k, h, fl, 1.0, c.p, c.u1, c.u2, Quadrature::Trapezoid);
      for (std::size_t j = 0; j < nodes.size(); j += 128) {
        const double ref = quad_row(c.k, fexact, nodes[j], c.p, c.u1, c.u2);
        INFO("kind ", int(c.k.kind()), " x ", nodes[j], " p ", c.p, " q ", ctx.q());
        CHECK(At.values()[j] == doctest::Approx(ref).epsilon(1e-4).scale(1.0));
      }
    }
  }
}

TEST_CASE("apply_operator with an extension outside the solution domain") {
  const ScaleContext ctx(kCl, 0.9);
  const auto k = KernelHandle::two_sided(ctx, 0.5, 2.5);
  const auto nodes = make_grid(0.5, 2.5, {}, 1025);
  auto fext = [](double z) { return z < 0.5 ? 0.0 : (z > 2.5 ? 1.0 : std::sin(z)); };
  const auto f = GridFunction::sample(nodes, fext);
  const auto h = GridFunction::sample(nodes, [](double) { return 0.0; });
  const auto Af = apply_operator(k, h, f, 1.0, 0.4, 0.5, 2.5, Quadrature::Simpson, Extension{0.0, 1.0});
  for (std::size_t j = 0; j < nodes.size(); j += 128) {
    const double x = nodes[j];
    // Split at the jump y = 0.5/p as well.
    const double cut = 0.5 / 0.4;
    const double ref = quad_row(k, fext, x, 0.4, 0.5, std::min(cut, x)) * (x > 0.5) +
                       quad_row(k, fext, x, 0.4, std::min(cut, x), cut) +
                       quad_row(k, fext, x, 0.4, cut, 2.5);
    CHECK(Af.values()[j] == doctest::Approx(ref).epsilon(1e-8).scale(1.0));
  }
}

TEST_CASE("solve_fixed_point trivial cases") {
  const ScaleContext ctx(kBm, 0.6);
  const auto k = KernelHandle::two_sided(ctx, 0.0, 2.0);
  const auto nodes = make_grid(0.0, 2.0, {}, 129);
  const auto h = GridFunction::sample(nodes, [](double x) { return x * x; });
  const auto r0 = solve_fixed_point(k, h, 0.0, 0.5, 0.0, 2.0, config(129));
  CHECK(r0.iterations == 1);
  CHECK(sup_diff(r0.g, h) == 0.0);
  const auto z = GridFunction::sample(nodes, [](double) { return 0.0; });
  const auto rz = solve_fixed_point(k, z, 0.1, 0.5, 0.0, 2.0, config(129));
  CHECK(rz.g.sup_norm() == 0.0);
}

TEST_CASE("solve_fixed_point against the truncated resolvent series") {
  const double q = 0.5, lam = 0.1, p = 0.5;
  const ScaleContext ctx(kBm, q + lam);
  const auto k = KernelHandle::two_sided(ctx, 0.0, 2.0);
  auto hfun = [&](double x) { return ctx.W(x) / ctx.W(2.0); };
  const auto nodes = make_grid(0.0, 2.0, {}, 1025);
  const auto h = GridFunction::sample(nodes, hfun);
  const auto res = solve_fixed_point(k, h, lam, p, 0.0, 2.0, config(1025));
  const std::vector<double> xs{0.0, 0.3, 0.8, 1.25, 1.7, 2.0};
  const std::function<double(double)> hf = hfun;
  const auto s3 = series_sum(k, hf, lam, p, 0.0, 2.0, 3, xs);
  const double bound = series_tail_bound(lam, q + lam, 1.0, 3);
  CHECK(bound == doctest::Approx(std::pow(1.0 / 6.0, 4) / (5.0 / 6.0)));
  for (std::size_t j = 0; j < xs.size(); ++j) CHECK(std::abs(s3[j] - res.g(xs[j])) <= bound);
  // The sharper K = 4 oracle.
  const auto s4 = series_sum(k, hf, lam, p, 0.0, 2.0, 4, std::vector<double>{0.8, 1.25}, 2, 8);
  CHECK(std::abs(s4[0] - res.g(0.8)) <= series_tail_bound(lam, q + lam, 1.0, 4));
  CHECK(std::abs(s4[1] - res.g(1.25)) <= series_tail_bound(lam, q + lam, 1.0, 4));
  CHECK_THROWS_AS(series_sum(k, hf, lam, p, 0.0, 2.0, 5, xs), DomainError);
}

TEST_CASE("series_sum low orders") {
  const ScaleContext ctx(kCl, 0.8);
  const auto k = KernelHandle::two_sided(ctx, -1.0, 1.0);
  const std::function<double(double)> hf = [](double x) { return 1.0 + x * x; };
  const std::vector<double> xs{-0.5, 0.25, 0.9};
  const auto s0 = series_sum(k, hf, 0.3, 0.6, -1.0, 1.0, 0, xs);
  for (std::size_t j = 0; j < xs.size(); ++j) CHECK(s0[j] == hf(xs[j]));
  const auto s1 = series_sum(k, hf, 0.3, 0.6, -1.0, 1.0, 1, xs);
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const double ref = hf(xs[j]) + 0.3 * quad_row(k, hf, xs[j], 0.6, -1.0, 1.0);
    CHECK(s1[j] == doctest::Approx(ref).epsilon(1e-10));
  }
}

TEST_CASE("p = 1 reproduces the killed classical identity") {
  // With p = 1 the resetting is invisible: the lambda-killed solution at rate
  // q + lambda resolves back to rate q.
  for (const auto& spec : {kBm, kCl, ProcessSpec::brownian(-0.3, 1.2)}) {
    const double q = 0.4, lam = 0.5, b = -1.0, a = 1.5;
    const ScaleContext cq(spec, q), cql(spec, q + lam);
    const auto k = KernelHandle::two_sided(cql, b, a);
    const auto nodes = make_grid(b, a, {}, 2049);
    const auto h = GridFunction::sample(nodes, [&](double x) { return classical_exit_up(cql, b, a, x); });
    const auto res = solve_fixed_point(k, h, lam, 1.0, b, a, config(2049));
    for (double x : {-1.0, -0.4, 0.3, 1.1, 1.5})
      CHECK(res.g(x) == doctest::Approx(classical_exit_up(cq, b, a, x)).epsilon(1e-8).scale(1.0));
    const auto hd = GridFunction::sample(nodes, [&](double x) { return classical_exit_down(cql, b, a, x); });
    const auto rd = solve_fixed_point(k, hd, lam, 1.0, b, a, config(2049));
    for (double x : {-1.0, -0.4, 0.3, 1.1, 1.5})
      CHECK(rd.g(x) == doctest::Approx(classical_exit_down(cq, b, a, x)).epsilon(1e-8).scale(1.0));
  }
}

TEST_CASE("Picard iteration properties") {
  for (const auto& spec : {kBm, kCl}) {
    for (double lam : {0.1, 0.5})
      for (double q : {0.3, 1.0}) {
        const ScaleContext ctx(spec, q + lam);
        const double b = -1.0, a = 2.0, p = 0.5;
        const auto k = KernelHandle::two_sided(ctx, b, a);
        const auto nodes = make_grid(b, a, {}, 1025);
        const auto h = GridFunction::sample(nodes, [&](double x) { return ctx.W(x - b) / ctx.W(a - b); });
        const auto cfg = config(1025);
        const auto res = solve_fixed_point(k, h, lam, p, b, a, cfg);
        CHECK(res.residual <= cfg.picard_tol);
        CHECK(res.contraction_bound <= lam / (q + lam) + 1e-10);
        CHECK(res.observed_factor <= lam / (q + lam) + 0.01);
        CHECK_FALSE(res.literal_condition_violated);
        // A priori iteration bound from the contraction ratio.
        const double first = res.history.front();
        const int bound = static_cast<int>(
            std::ceil(std::log(cfg.picard_tol / first) / std::log(res.contraction_bound))) + 1;
        CHECK(res.iterations <= std::max(bound, 1));
        // One more sweep barely moves g.
        const auto Ag = apply_operator(k, h, res.g, lam, p, b, a);
        CHECK(sup_diff(Ag, res.g) <= 2.0 * cfg.picard_tol);
        // Different starting points, same fixed point.
        const auto zero = GridFunction::sample(nodes, [](double) { return 0.0; });
        const auto one = GridFunction::sample(nodes, [](double) { return 1.0; });
        const auto r0 = solve_fixed_point(k, h, lam, p, b, a, cfg, std::nullopt, &zero);
        const auto r1 = solve_fixed_point(k, h, lam, p, b, a, cfg, std::nullopt, &one);
        CHECK(sup_diff(r0.g, r1.g) <= 2.0 * cfg.picard_tol);
      }
  }
}

TEST_CASE("grid refinement") {
  for (const auto& spec : {kBm, kCl}) {
    const ScaleContext ctx(spec, 0.8);
    const double b = 0.5, a = 2.5, p = 0.5;
    const auto k = KernelHandle::two_sided(ctx, b, a);
    auto hfun = [&](double x) { return classical_exit_up(ctx, b, a, x); };
    const double u1 = std::max(b, std::min(a, b / p)), u2 = a;
    auto solve = [&](int n) {
      const auto nodes = make_grid(b, a, std::vector<double>{u1}, n);
      return solve_fixed_point(k, GridFunction::sample(nodes, hfun), 0.3, p, u1, u2, config(n)).g;
    };
    const auto g1 = solve(2049), g2 = solve(4097);
    double worst = 0.0;
    for (double x = b; x <= a; x += 0.01) worst = std::max(worst, std::abs(g1(x) - g2(x)));
    CHECK(worst <= 10.0 * 1e-10);
  }
}

TEST_CASE("solver errors") {
  const ScaleContext ctx(kBm, 0.6);
  const auto k = KernelHandle::two_sided(ctx, 0.0, 2.0);
  const auto nodes = make_grid(0.0, 2.0, {}, 65);
  const auto h = GridFunction::sample(nodes, [](double x) { return x; });
  SolveConfig c = config(65);
  c.max_iter = 2;
  try {
    solve_fixed_point(k, h, 0.5, 0.5, 0.0, 2.0, c);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.history().size() == 2);
  }
  SolveConfig even = config(64);
  CHECK_THROWS_AS(solve_fixed_point(k, h, 0.1, 0.5, 0.0, 2.0, even), DomainError);
  SolveConfig small = config(17);
  CHECK_THROWS_AS(solve_fixed_point(k, h, 0.1, 0.5, 0.0, 2.0, small), DomainError);
  // Literal |gamma| < q violated, effective contraction still holds.
  const auto r = solve_fixed_point(k, h, 0.7, 0.5, 0.0, 2.0, config(65));
  CHECK(r.literal_condition_violated);
  CHECK(r.contraction_bound < 1.0);
  // Too large gamma.
  CHECK_THROWS_AS(solve_fixed_point(k, h, 50.0, 0.5, 0.0, 2.0, config(65)), DomainError);
}

TEST_CASE("grid function") {
  const auto g = GridFunction::sample(make_grid(0.0, 1.0, std::vector<double>{0.37}, 33),
                                      [](double x) { return x * x * x; });
  CHECK(g(0.5) == doctest::Approx(0.125).epsilon(1e-4));
  CHECK(g(1.0) == 1.0);
  CHECK_THROWS_AS(g(1.01), DomainError);
  CHECK_THROWS_AS(GridFunction({0.0, 0.0}, {1.0, 1.0}), DomainError);
  const auto nodes = make_grid(-1.0, 1.0, std::vector<double>{0.37, 5.0}, 33);
  CHECK(std::find(nodes.begin(), nodes.end(), 0.37) != nodes.end());
  // Monotone data stays monotone.
  const auto step = GridFunction(std::vector<double>{0.0, 1.0, 2.0, 3.0}, {0.0, 0.0, 1.0, 1.0});
  double prev = -1.0;
  for (double x = 0.0; x <= 3.0; x += 0.01) {
    CHECK(step(x) >= prev - 1e-15);
    CHECK(step(x) >= -1e-15);
    CHECK(step(x) <= 1.0 + 1e-15);
    prev = step(x);
  }
}
