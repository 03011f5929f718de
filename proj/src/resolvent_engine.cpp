#include "psr/resolvent_engine.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "psr/errors.hpp"
#include "psr/gauss_legendre.hpp"

namespace psr {

void SolveConfig::validate() const {
  if (grid_points < 33) throw DomainError("grid_points must be >= 33");
  if (quadrature == Quadrature::Simpson && grid_points % 2 == 0)
    throw DomainError("grid_points must be odd with Simpson quadrature");
  if (!(picard_tol > 0.0)) throw DomainError("picard_tol must be > 0");
  if (max_iter < 1) throw DomainError("max_iter must be >= 1");
  if (!(truncation_eps > 0.0)) throw DomainError("truncation_eps must be > 0");
  if (!(truncation_scale >= 1.0)) throw DomainError("truncation_scale must be >= 1");
}

namespace {

double tol_of(double v) { return 1e-12 * (1.0 + std::abs(v)); }

// The integral operator f -> int_{u1}^{u2} r(x, y) f(p y) dy on fixed nodes.
// Each row of r is a sum of exponentials in (y - x) on either side of the
// diagonal, so the integral splits into exponentially weighted running sums
// over a partition of [u1, u2].
class Discretization {
 public:
  Discretization(const KernelHandle& k, std::span<const double> xs, std::span<const double> fs,
                 double p, double u1, double u2, Quadrature quad, std::optional<Extension> ext)
      : fnodes_(fs.begin(), fs.end()), ext_(ext) {
    if (!(p > 0.0 && p <= 1.0)) throw DomainError("p must lie in (0, 1]");
    if (!(u1 <= u2)) throw DomainError("need u1 <= u2");
    if (u1 < k.lo() - tol_of(k.lo()) || u2 > k.hi() + tol_of(k.hi()) || !std::isfinite(u1) ||
        !std::isfinite(u2))
      throw DomainError("[u1, u2] must lie in the kernel domain");
    const double flo = fs.front(), fhi = fs.back();
    if (!ext && u1 < u2 && (p * u1 < flo - tol_of(flo) || p * u2 > fhi + tol_of(fhi)))
      throw DomainError("[p u1, p u2] must lie in the solution domain");
    empty_ = u1 == u2;

    const auto [r1, r2] = k.ctx().rates();
    beta_ = {-r1, -r2};

    // Partition of [u1, u2].
    std::vector<double> y{u1, u2};
    for (double x : xs)
      if (x > u1 && x < u2) y.push_back(x);
    for (double z : fs)
      if (z / p > u1 && z / p < u2) y.push_back(z / p);
    std::sort(y.begin(), y.end());
    const double tiny = 1e-14 * std::max({1.0, std::abs(u1), std::abs(u2)});
    y.erase(std::unique(y.begin(), y.end(), [&](double a, double b) { return b - a <= tiny; }),
            y.end());
    if (y.back() != u2) y.back() = u2;
    double hmax = 0.0;
    for (std::size_t i = 0; i + 1 < fs.size(); ++i) hmax = std::max(hmax, fs[i + 1] - fs[i]);
    y_.push_back(y.front());
    for (std::size_t i = 0; i + 1 < y.size(); ++i) {
      const double len = y[i + 1] - y[i];
      const int n = std::max(1, static_cast<int>(std::ceil(len / hmax - 1e-9)));
      for (int s = 1; s < n; ++s) y_.push_back(y[i] + len * s / n);
      y_.push_back(y[i + 1]);
    }
    if (empty_) y_ = {u1, u2};

    const std::size_t P = y_.size() - 1;
    static constexpr std::array<double, 3> simp_t{0.0, 0.5, 1.0}, simp_w{1.0 / 6, 4.0 / 6, 1.0 / 6};
    static constexpr std::array<double, 2> trap_t{0.0, 1.0}, trap_w{0.5, 0.5};
    nq_ = quad == Quadrature::Simpson ? 3 : 2;
    const double* qt = quad == Quadrature::Simpson ? simp_t.data() : trap_t.data();
    const double* qw = quad == Quadrature::Simpson ? simp_w.data() : trap_w.data();

    region_.assign(P, 0);
    cell_.assign(P, 0);
    local_.assign(P * nq_, 0.0);
    for (auto* w : {&wa_, &wb_, &wc_, &wd_}) w->assign(P * nq_, 0.0);
    decay_lo_.assign(P, 0.0);
    decay_up_.assign(P, 0.0);
    for (std::size_t i = 0; i < P; ++i) {
      const double a = y_[i], b = y_[i + 1], len = b - a;
      const double pm = p * 0.5 * (a + b);
      if (pm < flo) {
        region_[i] = -1;
      } else if (pm > fhi) {
        region_[i] = 1;
      } else {
        cell_[i] = locate_cell(fnodes_, pm);
      }
      const double z0 = fnodes_[cell_[i]], hz = fnodes_[cell_[i] + 1] - z0;
      for (int j = 0; j < nq_; ++j) {
        const double yy = a + qt[j] * len;
        const std::size_t idx = i * nq_ + j;
        local_[idx] = std::clamp((p * yy - z0) / hz, 0.0, 1.0);
        const double w = qw[j] * len;
        wa_[idx] = w * std::exp(beta_[0] * (yy - u1));
        wb_[idx] = w * std::exp(beta_[1] * (yy - u2));
        wc_[idx] = w * std::exp(beta_[1] * (yy - b));
        wd_[idx] = w * std::exp(beta_[0] * (yy - a));
      }
      decay_lo_[i] = std::exp(-beta_[1] * len);
      decay_up_[i] = std::exp(beta_[0] * len);
    }

    // Row multipliers.
    const std::size_t m = xs.size();
    xidx_.resize(m);
    mult_.assign(m * 4, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      const double x = xs[j];
      const double X = std::clamp(x, u1, u2);
      auto it = std::lower_bound(y_.begin(), y_.end(), X);
      std::size_t kx = static_cast<std::size_t>(it - y_.begin());
      if (kx == y_.size() || (kx > 0 && X - y_[kx - 1] < y_[kx] - X)) --kx;
      xidx_[j] = kx;
      const double Xk = y_[kx];
      const KernelRow row = k.row(x);
      double* M = &mult_[4 * j];
      // Empty sides are skipped: their multipliers may overflow when x lies
      // far outside [u1, u2].
      const std::size_t n_lower = kx == 0 ? 0 : row.n_lower;
      const std::size_t n_upper = kx + 1 == y_.size() ? 0 : row.n_upper;
      for (std::size_t t = 0; t < n_lower; ++t) {
        const auto& e = row.lower[t];
        if (e.coef == 0.0) continue;
        if (e.rate == beta_[0]) M[0] += e.coef * std::exp(e.kappa + e.rate * (u1 - x));
        else M[1] += e.coef * std::exp(e.kappa + e.rate * (Xk - x));
      }
      for (std::size_t t = 0; t < n_upper; ++t) {
        const auto& e = row.upper[t];
        if (e.coef == 0.0) continue;
        if (e.rate == beta_[0]) M[2] += e.coef * std::exp(e.kappa + e.rate * (Xk - x));
        else M[3] += e.coef * std::exp(e.kappa + e.rate * (u2 - x));
      }
    }
  }

  // out = int r(x_j, y) f(p y) dy for f given by node values on fnodes.
  void apply(std::span<const double> fv, Interp interp, std::span<double> out) const {
    const std::size_t m = xidx_.size();
    if (empty_) {
      std::fill(out.begin(), out.end(), 0.0);
      return;
    }
    const std::size_t P = y_.size() - 1;
    if (interp == Interp::CubicMonotone) {
      slopes_.resize(fv.size());
      monotone_slopes(fnodes_, fv, slopes_);
    }
    fq_.resize(P * nq_);
    for (std::size_t i = 0; i < P; ++i) {
      for (int j = 0; j < nq_; ++j) {
        const std::size_t idx = i * nq_ + j;
        if (region_[i] < 0) {
          fq_[idx] = ext_->below;
        } else if (region_[i] > 0) {
          fq_[idx] = ext_->above;
        } else {
          const std::size_t c = cell_[i];
          const double t = local_[idx];
          if (interp == Interp::Linear) {
            fq_[idx] = fv[c] + t * (fv[c + 1] - fv[c]);
          } else {
            fq_[idx] = hermite(fv[c], fv[c + 1], slopes_[c], slopes_[c + 1],
                               fnodes_[c + 1] - fnodes_[c], t);
          }
        }
      }
    }
    acc_.assign(4 * (P + 1), 0.0);
    double* A0 = &acc_[0];
    double* A1 = &acc_[P + 1];
    double* B0 = &acc_[2 * (P + 1)];
    double* B1 = &acc_[3 * (P + 1)];
    auto dot = [&](const std::vector<double>& w, std::size_t i) {
      double s = 0.0;
      for (int j = 0; j < nq_; ++j) s += w[i * nq_ + j] * fq_[i * nq_ + j];
      return s;
    };
    for (std::size_t i = 0; i < P; ++i) {
      A0[i + 1] = A0[i] + dot(wa_, i);
      A1[i + 1] = decay_lo_[i] * A1[i] + dot(wc_, i);
    }
    for (std::size_t i = P; i-- > 0;) {
      B0[i] = decay_up_[i] * B0[i + 1] + dot(wd_, i);
      B1[i] = B1[i + 1] + dot(wb_, i);
    }
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t kx = xidx_[j];
      const double* M = &mult_[4 * j];
      out[j] = M[0] * A0[kx] + M[1] * A1[kx] + M[2] * B0[kx] + M[3] * B1[kx];
    }
  }

 private:
  std::vector<double> fnodes_;
  std::optional<Extension> ext_;
  bool empty_ = false;
  std::array<double, 2> beta_{};
  std::vector<double> y_;
  int nq_ = 3;
  std::vector<int> region_;
  std::vector<std::size_t> cell_;
  std::vector<double> local_;
  // wa: lower side, rate beta0, anchored at u1; wc: lower, beta1, running.
  // wb: upper side, beta1, anchored at u2; wd: upper, beta0, running.
  std::vector<double> wa_, wb_, wc_, wd_;
  std::vector<double> decay_lo_, decay_up_;
  std::vector<std::size_t> xidx_;
  std::vector<double> mult_;
  mutable std::vector<double> slopes_, fq_, acc_;
};

void check_nodes_in_kernel(const KernelHandle& k, const GridFunction& h) {
  if (h.lo() < k.lo() - tol_of(k.lo()) || h.hi() > k.hi() + tol_of(k.hi()))
    throw DomainError("solution domain must lie in the kernel domain");
}

}  // namespace

GridFunction apply_operator(const KernelHandle& k, const GridFunction& h, const GridFunction& f,
                            double gamma, double p, double u1, double u2, Quadrature quad,
                            std::optional<Extension> ext) {
  check_nodes_in_kernel(k, h);
  const Discretization D(k, h.nodes(), f.nodes(), p, u1, u2, quad, ext);
  std::vector<double> out(h.size());
  D.apply(f.values(), f.interp(), out);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = h.values()[j] + gamma * out[j];
  return GridFunction(h.nodes(), std::move(out), h.interp());
}

FixedPointResult solve_fixed_point(const KernelHandle& k, const GridFunction& h, double gamma,
                                   double p, double u1, double u2, const SolveConfig& cfg,
                                   std::optional<Extension> ext, const GridFunction* initial) {
  cfg.validate();
  check_nodes_in_kernel(k, h);
  FixedPointResult res{.g = h, .history = {}};
  res.literal_condition_violated = std::abs(gamma) >= k.ctx().q();
  if (gamma == 0.0) {
    res.iterations = 1;
    return res;
  }
  const Discretization D(k, h.nodes(), h.nodes(), p, u1, u2, cfg.quadrature, ext);
  double msup = 0.0;
  for (double x : h.nodes()) msup = std::max(msup, k.mass(x, u1, u2));
  res.contraction_bound = std::abs(gamma) * msup;
  if (!(res.contraction_bound < 1.0))
    throw DomainError("resolvent equation is not a contraction (|gamma| sup mass >= 1)");

  const std::size_t m = h.size();
  const auto& hv = h.values();
  std::vector<double> g(hv);
  if (initial) {
    for (std::size_t j = 0; j < m; ++j) g[j] = (*initial)(h.nodes()[j]);
  }
  std::vector<double> next(m);
  // Increments are measured relative to max(1, |g|) node by node, so that
  // solutions growing like e^{Phi x} keep full accuracy where they are small.
  const double tol = cfg.picard_tol;
  const double floor = 1e-12;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    D.apply(g, cfg.interp, next);
    double inc = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      next[j] = hv[j] + gamma * next[j];
      inc = std::max(inc, std::abs(next[j] - g[j]) / std::max(1.0, std::abs(next[j])));
      if (std::isnan(next[j])) inc = next[j];
    }
    if (!res.history.empty() && res.history.back() > floor && inc > floor)
      res.observed_factor = std::max(res.observed_factor, inc / res.history.back());
    res.history.push_back(inc);
    g.swap(next);
    if (!std::isfinite(inc)) break;
    if (inc <= tol) {
      res.g = GridFunction(h.nodes(), std::move(g), cfg.interp);
      res.iterations = it;
      res.residual = inc;
      return res;
    }
  }
  throw ConvergenceError("Picard iteration did not converge in " + std::to_string(cfg.max_iter) +
                             " iterations (residual " +
                             std::to_string(res.history.empty() ? 0.0 : res.history.back()) + ")",
                         res.history);
}

double series_tail_bound(double gamma, double q, double sup_h, int K) {
  const double r = std::abs(gamma) / q;
  if (!(r < 1.0)) throw DomainError("series tail bound needs |gamma| < q");
  return std::pow(r, K + 1) * sup_h / (1.0 - r);
}

namespace {

struct SeriesEval {
  const KernelHandle& k;
  const std::function<double(double)>& h;
  double p, u1, u2;
  int panels;
  GaussRule rule;

  // T_n(x) = int r(x, y) T_{n-1}(p y) dy, T_0 = h.
  double T(int n, double x) const {
    if (n == 0) return h(x);
    std::vector<double> cuts{u1, u2};
    for (double c : {x, u1 / p, u2 / p})
      if (c > u1 && c < u2) cuts.push_back(c);
    std::sort(cuts.begin(), cuts.end());
    double s = 0.0;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      const double a = cuts[c], b = cuts[c + 1];
      const bool below = b <= x;
      const double hp = (b - a) / panels;
      for (int q = 0; q < panels; ++q) {
        const double mid = a + (q + 0.5) * hp;
        for (std::size_t i = 0; i < rule.x.size(); ++i) {
          double y = mid + 0.5 * hp * rule.x[i];
          // Keep the kernel on the side of the diagonal this piece belongs to.
          const double r = below ? k.eval(x, std::min(y, x)) : k.eval(x, std::max(y, std::nextafter(x, u2)));
          s += 0.5 * hp * rule.w[i] * r * T(n - 1, p * y);
        }
      }
    }
    return s;
  }
};

}  // namespace

std::vector<double> series_sum(const KernelHandle& k, const std::function<double(double)>& h,
                               double gamma, double p, double u1, double u2, int K,
                               std::span<const double> xs, int panels, int order) {
  if (K < 0 || K > 4) throw DomainError("series_sum supports 0 <= K <= 4");
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("p must lie in (0, 1]");
  if (!(u1 <= u2)) throw DomainError("need u1 <= u2");
  const SeriesEval ev{k, h, p, u1, u2, panels, GaussRule(order)};
  std::vector<double> out(xs.size());
  for (std::size_t j = 0; j < xs.size(); ++j) {
    double s = h(xs[j]), gk = 1.0;
    for (int n = 1; n <= K; ++n) {
      gk *= gamma;
      s += gk * ev.T(n, xs[j]);
    }
    out[j] = s;
  }
  return out;
}

GridFunction series_sum(const KernelHandle& k, const GridFunction& h, double gamma, double p,
                        double u1, double u2, int K) {
  const std::function<double(double)> fh = [&h](double x) { return h(x); };
  auto v = series_sum(k, fh, gamma, p, u1, u2, K, h.nodes());
  return GridFunction(h.nodes(), std::move(v), h.interp());
}

}  // namespace psr
