#include "psr/conv_scale.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "psr/errors.hpp"
#include "psr/gauss_legendre.hpp"

namespace psr {

namespace {

// Integral of f over cell [m, m+1] of a uniform grid with N cells, from the
// cubic through four neighbouring nodes.
template <class F>
double cell_integral(F&& f, std::size_t m, std::size_t N, double h) {
  if (m == 0) return h * (9 * f(0) + 19 * f(1) - 5 * f(2) + f(3)) / 24.0;
  if (m + 1 == N) return h * (f(m - 2) - 5 * f(m - 1) + 19 * f(m) + 9 * f(m + 1)) / 24.0;
  return h * (-f(m - 1) + 13 * f(m) + 13 * f(m + 1) - f(m + 2)) / 24.0;
}

void check_params(double q, double lambda, double p) {
  if (!(q > 0.0) || !std::isfinite(q)) throw DomainError("q must be > 0");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be >= 0");
  if (!(p > 0.0 && p < 1.0)) throw DomainError("p must lie in (0, 1)");
}

const GaussRule& rule() {
  static const GaussRule r(10);
  return r;
}

// Gauss-Legendre over [lo, hi] split at the given points, panels of width <= w.
template <class F>
double split_integral(F&& f, double lo, double hi, std::vector<double> cuts, double w) {
  if (!(hi > lo)) return 0.0;
  cuts.push_back(lo);
  cuts.push_back(hi);
  std::erase_if(cuts, [&](double c) { return c < lo || c > hi; });
  std::sort(cuts.begin(), cuts.end());
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double len = cuts[i + 1] - cuts[i];
    if (len <= 0.0) continue;
    const int panels = std::max(1, static_cast<int>(std::ceil(len / w)));
    s += rule().integrate(f, cuts[i], cuts[i + 1], panels);
  }
  return s;
}

}  // namespace

double w_n(const ScaleContext& ctx, double p, int n, double x) {
  if (n < 0) throw DomainError("w_n needs n >= 0");
  if (x < 0.0) return 0.0;
  const double pn = std::pow(p, n);
  return pn * ctx.W(pn * x);
}

double w_n(const ProcessSpec& spec, double q, double p, int n, double x) {
  return w_n(ScaleContext(spec, q), p, n, x);
}

ConvTable::ConvTable(const ProcessSpec& spec, double q, double p, double x_max, int n_max,
                     int intervals)
    : ctx_(spec, q), p_(p), x_max_(x_max) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("p must lie in (0, 1)");
  if (!(x_max > 0.0) || !std::isfinite(x_max)) throw DomainError("x_max must be > 0");
  if (n_max < 0) throw DomainError("n_max must be >= 0");
  if (intervals < 3) throw DomainError("need at least 3 grid intervals");
  const std::size_t N = static_cast<std::size_t>(intervals);
  const double h = x_max / intervals;
  std::vector<double> nodes(N + 1);
  for (std::size_t m = 0; m <= N; ++m) nodes[m] = x_max * static_cast<double>(m) / intervals;
  nodes.back() = x_max;

  const auto& A = ctx_.coefs();
  const auto& r = ctx_.rates();
  std::vector<double> cur(N + 1), next(N + 1), cum(N + 1);
  for (std::size_t m = 0; m <= N; ++m) cur[m] = A[0] * std::exp(r[0] * nodes[m]) + A[1] * std::exp(r[1] * nodes[m]);

  auto push = [&](const std::vector<double>& v) {
    cum[0] = 0.0;
    for (std::size_t m = 0; m < N; ++m)
      cum[m + 1] = cum[m] + cell_integral([&](std::size_t k) { return v[k]; }, m, N, h);
    levels_.emplace_back(nodes, v, Interp::CubicMonotone);
    cumulative_.emplace_back(nodes, cum, Interp::CubicMonotone);
  };
  push(cur);
  for (int n = 1; n <= n_max; ++n) {
    // level_n(x) = sum_i p^n A_i int_0^x e^{beta_i (x - y)} level_{n-1}(y) dy, beta_i = p^n r_i,
    // accumulated cell by cell.
    const double pn = std::pow(p, n);
    std::fill(next.begin(), next.end(), 0.0);
    for (int i = 0; i < 2; ++i) {
      if (A[i] == 0.0) continue;
      const double beta = pn * r[i];
      const double step = std::exp(beta * h);
      double S = 0.0;
      for (std::size_t m = 0; m < N; ++m) {
        const double xe = nodes[m + 1];
        S = step * S + cell_integral(
                           [&](std::size_t k) { return std::exp(beta * (xe - nodes[k])) * cur[k]; },
                           m, N, h);
        next[m + 1] += pn * A[i] * S;
      }
    }
    cur.swap(next);
    push(cur);
  }
}

void ConvTable::check(int n, double x) const {
  if (n < 0 || n > n_max()) throw DomainError("convolution level " + std::to_string(n) + " not cached");
  if (!(x >= -1e-12 * x_max_ && x <= x_max_ * (1.0 + 1e-12)))
    throw DomainError("x outside the cached range [0, x_max]");
}

double ConvTable::level(int n, double x) const {
  check(n, x);
  return levels_[n](std::clamp(x, 0.0, x_max_));
}

double ConvTable::level_integral(int n, double x) const {
  check(n, x);
  return cumulative_[n](std::clamp(x, 0.0, x_max_));
}

double conv_level(const ConvTable& table, int n, double x) { return table.level(n, x); }

double G_operator(const ConvTable& t, const std::function<double(double)>& h, double gamma,
                  double x, double u, double z) {
  if (!(u >= 0.0)) throw DomainError("G needs u >= 0");
  if (!(x >= 0.0 && x <= t.x_max() * (1.0 + 1e-12))) throw DomainError("x outside [0, x_max]");
  double total = h(x - z);
  if (gamma == 0.0) return total;
  const double p = t.p();
  // Bound on |h| over the arguments p^k (x - y) - z in [-z, x - z].
  double hsup = 0.0;
  for (int i = 0; i <= 16; ++i) hsup = std::max(hsup, std::abs(h(-z + x * i / 16.0)));
  for (int k = 1;; ++k) {
    const double pk = std::pow(p, k);
    const double U = u > 0.0 ? x - u / pk : x;
    if (U <= 0.0) return total;
    if (k - 1 > t.n_max()) {
      if (u > 0.0) throw DomainError("convolution table too shallow for the finite G sum");
      throw ConvergenceError("G series not converged within n_max levels", {});
    }
    auto f = [&](double y) { return h(pk * (x - y) - z) * t.level(k - 1, y); };
    const double I = split_integral(f, 0.0, U, {x - z / pk}, 0.25);
    const double gk = std::pow(gamma, k);
    total += gk * I;
    if (u == 0.0 && k <= t.n_max()) {
      const double rest = std::abs(gk * gamma) * hsup * t.level_integral(k, x);
      if (rest <= 1e-12 * std::max(1.0, std::abs(total))) return total;
    }
  }
}

namespace {

void check_conv_query(double q, double lambda, double p, double b, double a, double x) {
  check_params(q, lambda, p);
  if (!(b >= 0.0) || !std::isfinite(a) || !(a > b)) throw DomainError("need a > b >= 0");
  if (!(x >= b && x <= a)) throw DomainError("x must lie in [b, a]");
}

struct ConvSetup {
  ConvTable table;
  double lambda, b;

  double Wb(double y) const {
    const auto& c = table.ctx();
    return G_operator(table, [&](double s) { return c.W(s); }, -lambda, y, b, b);
  }
  // Z-type function with the reset-below-b pieces removed.
  double Zb(double y) const {
    const auto& c = table.ctx();
    double v = G_operator(table, [&](double s) { return c.Z(s); }, -lambda, y, b, b);
    if (lambda == 0.0 || b == 0.0) return v;
    const double p = table.p();
    const double top = std::min(b / p, y);
    std::vector<double> cuts;
    for (double pk = 1.0; pk * y > b; pk *= p) cuts.push_back(pk * y);
    auto f = [&](double uu) {
      return G_operator(table, [&](double s) { return c.W(s); }, -lambda, y, b, uu);
    };
    return v - lambda * split_integral(f, b, top, cuts, 0.1);
  }
};

}  // namespace

double conv_exit_up(const ProcessSpec& spec, double q, double lambda, double p, double b, double a,
                    double x, const ConvOptions& opts) {
  check_conv_query(q, lambda, p, b, a, x);
  const ConvSetup s{ConvTable(spec, q + lambda, p, a, opts.n_max, opts.intervals), lambda, b};
  return s.Wb(x) / s.Wb(a);
}

double conv_exit_down(const ProcessSpec& spec, double q, double lambda, double p, double b,
                      double a, double x, const ConvOptions& opts) {
  check_conv_query(q, lambda, p, b, a, x);
  const ConvSetup s{ConvTable(spec, q + lambda, p, a, opts.n_max, opts.intervals), lambda, b};
  return s.Zb(x) - s.Wb(x) / s.Wb(a) * s.Zb(a);
}

}  // namespace psr
