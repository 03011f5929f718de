#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "psr/errors.hpp"
#include "psr/scale_fn.hpp"

using namespace psr;

namespace {
const ProcessSpec kBm = ProcessSpec::brownian(0.0, 1.0);
const ProcessSpec kCl = ProcessSpec::cramer_lundberg(2.0, 1.0, 1.0);
const double kE = std::numbers::e;

// Frozen from the Laplace-inversion oracle (see "W matches Laplace inversion").
const double kW1 = kE - 1.0 / kE;                // 2.3504023872876028
const double kZ1 = std::cosh(1.0);               // 1.5430806348152437
const double kUp = kW1 / (kE * kE - 1.0 / (kE * kE));  // 0.32402785...
}  // namespace

TEST_CASE("W examples") {
  const ScaleContext bm(kBm, 0.5);
  CHECK(W(bm, 0.0) == 0.0);
  CHECK(W(bm, 1.0) == doctest::Approx(2.350402387).epsilon(1e-9));
  CHECK(W(bm, 1.0) == doctest::Approx(kW1).epsilon(1e-14));
  CHECK(W(bm, -1.0) == 0.0);
  const ScaleContext cl(kCl, 0.1);
  CHECK(W(cl, 1e-12) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(W(cl, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("W matches Laplace inversion") {
  struct Case {
    ProcessSpec s;
    double q;
  };
  const Case cases[] = {{kBm, 0.5}, {ProcessSpec::brownian(0.7, 1.3), 0.2},
                        {ProcessSpec::brownian(-0.5, 0.6), 1.1}, {kCl, 0.1},
                        {ProcessSpec::cramer_lundberg(1.0, 3.0, 2.0), 0.8}};
  for (const auto& c : cases) {
    const ScaleContext ctx(c.s, c.q);
    for (double x : {0.1, 0.5, 1.0, 2.5}) {
      const double ref = oracle::W_by_inversion(c.s, c.q, x, ctx.phi() + 1.0);
      CHECK(ctx.W(x) == doctest::Approx(ref).epsilon(1e-8));
    }
  }
  CHECK(oracle::W_by_inversion(kBm, 0.5, 1.0, 2.0) == doctest::Approx(kW1).epsilon(1e-9));
}

TEST_CASE("Z examples") {
  const ScaleContext bm(kBm, 0.5);
  CHECK(Z(bm, -3.0) == 1.0);
  CHECK(Z(bm, 1.0) == doctest::Approx(1.543080635).epsilon(1e-9));
  CHECK(Z(bm, 1.0) == doctest::Approx(kZ1).epsilon(1e-14));
  const double quad = 1.0 + 0.5 * oracle::integrate([&](double y) { return bm.W(y); }, 0.0, 1.0);
  CHECK(quad == doctest::Approx(kZ1).epsilon(1e-12));
  const ScaleContext cl(kCl, 0.1);
  CHECK(Z(cl, 0.0) == 1.0);
  for (double x : {0.3, 2.0, 7.0}) {
    const double ref = 1.0 + 0.1 * oracle::integrate([&](double y) { return cl.W(y); }, 0.0, x);
    CHECK(cl.Z(x) == doctest::Approx(ref).epsilon(1e-12));
  }
}

TEST_CASE("Z_biv examples") {
  const ScaleContext bm(kBm, 0.5);
  CHECK(Z_biv(bm, 1.0, 0.0) == Z(bm, 1.0));
  CHECK(Z_biv(bm, -2.0, 0.3) == doctest::Approx(std::exp(-0.6)).epsilon(1e-15));
  CHECK(Z_biv(bm, 1.0, 1.0) == doctest::Approx(kE).epsilon(1e-14));
  CHECK_THROWS_AS(Z_biv(bm, 1.0, -0.5), DomainError);
  // Definition by quadrature.
  const ScaleContext cl(kCl, 0.3);
  for (double th : {0.2, 0.9, 2.0})
    for (double x : {0.4, 1.7}) {
      const double in =
          oracle::integrate([&](double y) { return std::exp(-th * y) * cl.W(y); }, 0.0, x);
      const double ref = std::exp(th * x) * (1.0 - cl.psi_q(th) * in);
      CHECK(cl.Z_biv(x, th) == doctest::Approx(ref).epsilon(1e-11));
    }
}

TEST_CASE("classical exits") {
  const ScaleContext bm(kBm, 0.5);
  CHECK(classical_exit_up(bm, 0.0, 2.0, 2.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(classical_exit_down(bm, 0.0, 2.0, 2.0)) < 1e-15);
  CHECK(classical_exit_up(bm, 0.0, 2.0, 1.0) == doctest::Approx(0.324028).epsilon(1e-6));
  CHECK(classical_exit_up(bm, 0.0, 2.0, 1.0) == doctest::Approx(kUp).epsilon(1e-13));
  CHECK(classical_exit_up(bm, 0.0, 2.0, 0.0) == 0.0);
  CHECK(classical_exit_down(bm, 0.0, 2.0, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(classical_exit_up(bm, 0.0, 2.0, 2.5), DomainError);
  CHECK_THROWS_AS(classical_exit_down(bm, 0.0, 2.0, -0.1), DomainError);

  // Stable forms agree with the raw scale function ratios.
  for (const ScaleContext& ctx : {ScaleContext(kBm, 0.7), ScaleContext(kCl, 0.4),
                                  ScaleContext(ProcessSpec::brownian(0.4, 0.8), 1.3)}) {
    for (double x : {-1.0, -0.3, 0.5, 1.9}) {
      const double b = -1.0, a = 2.0;
      const double up = ctx.W(x - b) / ctx.W(a - b);
      const double down = ctx.Z(x - b) - up * ctx.Z(a - b);
      CHECK(classical_exit_up(ctx, b, a, x) == doctest::Approx(up).epsilon(1e-12));
      CHECK(classical_exit_down(ctx, b, a, x) == doctest::Approx(down).epsilon(1e-11));
      CHECK(classical_exit_up(ctx, b, a, x) + classical_exit_down(ctx, b, a, x) <= 1.0 + 1e-14);
    }
  }
}

TEST_CASE("Laplace transform of W") {
  for (const ScaleContext& ctx :
       {ScaleContext(kBm, 0.5), ScaleContext(kCl, 0.1), ScaleContext(kCl, 2.0),
        ScaleContext(ProcessSpec::brownian(-0.3, 0.7), 0.9)}) {
    const double f = ctx.phi();
    const double th = f + 1.0;
    const double dpsi = laplace_exponent_derivative(ctx.spec(), f);
    double T = 1.0;
    while (std::exp((f - th) * T) / dpsi / (th - f) >= 1e-10) T *= 1.5;
    const oracle::GaussLegendre gl(20);
    const double lt = gl.integrate([&](double x) { return std::exp(-th * x) * ctx.W(x); }, 0.0, T,
                                   static_cast<int>(8 * T) + 8);
    CHECK(lt == doctest::Approx(1.0 / ctx.psi_q(th)).epsilon(1e-8));
  }
}

TEST_CASE("Laplace transform of Z(x, theta)") {
  for (const ScaleContext& ctx : {ScaleContext(kBm, 0.5), ScaleContext(kCl, 0.3)}) {
    const double f = ctx.phi();
    for (double th : {0.0, 0.4, f + 0.3}) {
      for (double s : {std::max(f, th) + 1.0, std::max(f, th) + 2.5}) {
        const double grow = std::max(f, th);
        double T = 1.0;
        while (std::exp((grow - s) * T) * (1.0 + T) > 1e-13) T *= 1.5;
        const oracle::GaussLegendre gl(20);
        const double lt = gl.integrate([&](double x) { return std::exp(-s * x) * ctx.Z_biv(x, th); },
                                       0.0, T, static_cast<int>(8 * T) + 8);
        const auto& spec = ctx.spec();
        const double ref =
            s == th ? laplace_exponent_derivative(spec, th) / ctx.psi_q(th)
                    : (laplace_exponent(spec, s) - laplace_exponent(spec, th)) /
                          (ctx.psi_q(s) * (s - th));
        CHECK(lt == doctest::Approx(ref).epsilon(1e-8));
      }
    }
    // theta == s branch.
    const double s = f + 0.8;
    double T = 1.0;
    while (std::exp((f - s) * T) * (1.0 + T) > 1e-13) T *= 1.5;
    const oracle::GaussLegendre gl(20);
    const double lt = gl.integrate([&](double x) { return std::exp(-s * x) * ctx.Z_biv(x, s); }, 0.0,
                                   T, static_cast<int>(8 * T) + 8);
    CHECK(lt == doctest::Approx(laplace_exponent_derivative(ctx.spec(), s) / ctx.psi_q(s))
                    .epsilon(1e-8));
  }
}

TEST_CASE("limit relations") {
  for (const ScaleContext& ctx : {ScaleContext(kBm, 0.5), ScaleContext(kCl, 0.1),
                                  ScaleContext(ProcessSpec::brownian(1.0, 0.5), 0.05)}) {
    const double f = ctx.phi();
    const double a = 30.0 / f;
    for (double x = 0.0; x <= 1.0; x += 0.125)
      CHECK(std::abs(ctx.W(a + x) / ctx.W(a) - std::exp(f * x)) <= 1e-6);
    CHECK(std::abs(ctx.Z(a) / ctx.W(a) - ctx.q() / f) <= 1e-6);
  }
}

TEST_CASE("monotonicity and reduced forms") {
  for (const ScaleContext& ctx : {ScaleContext(kBm, 0.5), ScaleContext(kCl, 0.1),
                                  ScaleContext(ProcessSpec::cramer_lundberg(1.0, 0.0, 1.0), 0.3)}) {
    double prev = 0.0;
    for (double x = -1.0; x <= 6.0; x += 0.01) {
      const double w = ctx.W(x);
      CHECK(w >= 0.0);
      CHECK(w >= prev - 1e-15);
      CHECK(ctx.Z(x) >= 1.0);
      prev = w;
    }
    for (double x : {0.0, 0.3, 4.0}) {
      const double direct = ctx.Z(x) - ctx.q() / ctx.phi() * ctx.W(x);
      CHECK(ctx.Z_minus_ratio_W(x) == doctest::Approx(direct).epsilon(1e-10).scale(1.0));
    }
    CHECK(ctx.Z_minus_ratio_W(0.0) ==
          doctest::Approx(1.0 - ctx.q() * ctx.w0() / ctx.phi()).epsilon(1e-13));
  }
}
