#include "psr/mc_oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <random>
#include <thread>

#include "psr/errors.hpp"

namespace psr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Independent stream per (seed, path index).
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t path) : eng_(splitmix64(splitmix64(seed) ^ path)) {}
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(eng_); }
  double normal() { return normal_(eng_); }
  double exponential(double rate) {
    if (rate <= 0.0) return kInf;
    return std::exponential_distribution<double>(rate)(eng_);
  }

 private:
  std::mt19937_64 eng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

enum class Outcome { None, Up, Down };

struct Result {
  Outcome side = Outcome::None;
  double tau = 0.0;
};

struct NoObserver {
  void operator()(double, double, PathEventKind) const {}
};

struct Simulator {
  ProcessSpec spec;
  double lambda, p, b, a, horizon;
  double dt, dt_max;

  template <class Obs>
  Result run(Rng& rng, double x, Obs&& obs) const {
    obs(0.0, x, PathEventKind::Step);
    if (x >= a) {
      obs(0.0, x, PathEventKind::Exit);
      return {Outcome::Up, 0.0};
    }
    const bool bm = spec.family == Family::BrownianDrift;
    if (x < b || (bm && x <= b)) {
      obs(0.0, x, PathEventKind::Exit);
      return {Outcome::Down, 0.0};
    }
    return bm ? run_bm(rng, x, obs) : run_cl(rng, x, obs);
  }

  // Reset U <- p U at time t; exits if that lands outside [b, a].
  template <class Obs>
  bool reset(double t, double& u, Result& r, Obs& obs) const {
    obs(t, u, PathEventKind::Step);
    u *= p;
    obs(t, u, PathEventKind::Reset);
    if (u > a) r = {Outcome::Up, t};
    else if (u < b) r = {Outcome::Down, t};
    else return false;
    obs(t, u, PathEventKind::Exit);
    return true;
  }

  template <class Obs>
  Result run_cl(Rng& rng, double u, Obs& obs) const {
    const double c = spec.c;
    double t = 0.0;
    double next_jump = rng.exponential(spec.eta);
    double next_reset = rng.exponential(lambda);
    Result r;
    for (;;) {
      const double tn = std::min({next_jump, next_reset, horizon});
      if (u + c * (tn - t) >= a) {
        const double tau = t + (a - u) / c;
        obs(tau, a, PathEventKind::Exit);
        return {Outcome::Up, tau};
      }
      u += c * (tn - t);
      t = tn;
      if (t >= horizon) {
        obs(t, u, PathEventKind::Step);
        return r;
      }
      if (t == next_jump) {
        obs(t, u, PathEventKind::Step);
        u -= rng.exponential(spec.jump_mean_inv);
        obs(t, u, PathEventKind::Jump);
        if (u < b) {
          obs(t, u, PathEventKind::Exit);
          return {Outcome::Down, t};
        }
        next_jump = t + rng.exponential(spec.eta);
      } else {
        if (reset(t, u, r, obs)) return r;
        next_reset = t + rng.exponential(lambda);
      }
    }
  }

  template <class Obs>
  Result run_bm(Rng& rng, double u, Obs& obs) const {
    const double mu = spec.mu, s2 = spec.sigma * spec.sigma, sigma = spec.sigma;
    double t = 0.0;
    double next_reset = rng.exponential(lambda);
    Result r;
    for (;;) {
      if (t >= horizon) return r;
      // Far from both barriers a crossing within the step is negligible
      // (bridge probability below e^{-50}), so the step may grow.
      const double d = std::min(a - u, u - b);
      double h = std::clamp(d * d / (25.0 * s2), dt, dt_max);
      const bool at_reset = next_reset - t <= h;
      h = std::min({h, next_reset - t, horizon - t});
      const double un = u + mu * h + sigma * std::sqrt(h) * rng.normal();
      const double tm = t + 0.5 * h;
      const double pu = std::isfinite(a) ? std::exp(-2.0 * (a - u) * std::max(a - un, 0.0) / (s2 * h)) : 0.0;
      const double pd = std::isfinite(b) ? std::exp(-2.0 * (u - b) * std::max(un - b, 0.0) / (s2 * h)) : 0.0;
      const bool up = un >= a || (pu > 0.0 && rng.uniform() < pu);
      const bool down = !up && (un <= b || (pd > 0.0 && rng.uniform() < pd));
      if (up || down) {
        obs(tm, up ? a : b, PathEventKind::Exit);
        return {up ? Outcome::Up : Outcome::Down, tm};
      }
      t += h;
      u = un;
      if (at_reset && next_reset <= horizon) {
        t = next_reset;
        if (reset(t, u, r, obs)) return r;
        next_reset = t + rng.exponential(lambda);
      } else {
        obs(t, u, PathEventKind::Step);
      }
    }
  }
};

struct Welford {
  std::int64_t n = 0;
  double mean = 0.0, m2 = 0.0;
  void add(double w) {
    ++n;
    const double d = w - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (w - mean);
  }
  void merge(const Welford& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double nn = static_cast<double>(n + o.n);
    const double d = o.mean - mean;
    mean += d * static_cast<double>(o.n) / nn;
    m2 += o.m2 + d * d * static_cast<double>(n) * static_cast<double>(o.n) / nn;
    n += o.n;
  }
};

}  // namespace

void SimConfig::validate() const {
  if (n_paths < 1) throw DomainError("n_paths must be >= 1");
  if (!(dt > 0.0) || !(dt_max >= dt)) throw DomainError("need 0 < dt <= dt_max");
  if (!(horizon >= 0.0)) throw DomainError("horizon must be >= 0");
  if (stream_count < 1) throw DomainError("stream_count must be >= 1");
}

std::string bias_note_name(BiasNote b) {
  return b == BiasNote::Exact ? "Exact" : "BridgeCorrected";
}

std::string event_name(PathEventKind e) {
  switch (e) {
    case PathEventKind::Step: return "step";
    case PathEventKind::Jump: return "jump";
    case PathEventKind::Reset: return "reset";
    case PathEventKind::Exit: return "exit";
  }
  return "?";
}

int mc_threads() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("PSR_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, cap);
  }
  return n;
}

MCEstimate simulate_exit(const ExitQuery& qy, const SimConfig& cfg) {
  validate_query(qy);
  cfg.validate();
  const bool one_sided = qy.side == Side::UpOneSided || qy.side == Side::DownOneSided;
  const double horizon = cfg.horizon > 0.0 ? cfg.horizon : std::log(1e6) / qy.q;
  if (one_sided && std::exp(-qy.q * horizon) > 1e-6 * (1.0 + 1e-12))
    throw DomainError("one-sided simulation needs e^{-q horizon} <= 1e-6");
  double b = qy.b, a = qy.a;
  if (qy.side == Side::UpOneSided) b = -kInf;
  if (qy.side == Side::DownOneSided) a = kInf;
  const bool bm = qy.spec.family == Family::BrownianDrift;
  if (bm) {
    const double w = std::isfinite(a - b) ? std::min(1.0, (a - b) * (a - b)) : 1.0;
    if (cfg.dt > 1e-3 * w * (1.0 + 1e-12)) throw DomainError("dt must be <= 1e-3 min(1, (a-b)^2)");
  }
  const Simulator sim{qy.spec, qy.lambda, qy.p, b, a, horizon, cfg.dt, cfg.dt_max};
  const bool want_up = qy.side == Side::UpTwoSided || qy.side == Side::UpOneSided;

  const auto blocks = static_cast<std::int64_t>(std::min<std::int64_t>(cfg.stream_count, cfg.n_paths));
  std::vector<Welford> acc(static_cast<std::size_t>(blocks));
  std::atomic<std::int64_t> next{0};
  auto worker = [&] {
    for (std::int64_t blk; (blk = next.fetch_add(1)) < blocks;) {
      const std::int64_t lo = cfg.n_paths * blk / blocks, hi = cfg.n_paths * (blk + 1) / blocks;
      Welford w;
      for (std::int64_t i = lo; i < hi; ++i) {
        Rng rng(cfg.seed, static_cast<std::uint64_t>(i));
        const auto r = sim.run(rng, qy.x, NoObserver{});
        const bool hit = want_up ? r.side == Outcome::Up : r.side == Outcome::Down;
        w.add(hit ? std::exp(-qy.q * r.tau) : 0.0);
      }
      acc[static_cast<std::size_t>(blk)] = w;
    }
  };
  const int nt = static_cast<int>(std::min<std::int64_t>(mc_threads(), blocks));
  if (nt <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < nt; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  Welford total;
  for (const auto& w : acc) total.merge(w);
  MCEstimate est;
  est.mean = total.mean;
  est.n = total.n;
  est.std_error = total.n > 1 ? std::sqrt(total.m2 / static_cast<double>(total.n - 1) /
                                         static_cast<double>(total.n))
                              : 0.0;
  est.bias_note = bm ? BiasNote::BridgeCorrected : BiasNote::Exact;
  return est;
}

std::vector<PathEvent> simulate_path(const ProcessSpec& spec, double lambda, double p, double x,
                                     double horizon, const SimConfig& cfg, double b, double a) {
  spec.validate();
  if (!(lambda >= 0.0)) throw DomainError("lambda must be >= 0");
  if (!(p > 0.0 && p < 1.0)) throw DomainError("p must lie in (0, 1)");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("horizon must be finite and > 0");
  if (!(cfg.dt > 0.0)) throw DomainError("dt must be > 0");
  const Simulator sim{spec, lambda, p, b, a, horizon, cfg.dt, cfg.dt};
  std::vector<PathEvent> out;
  Rng rng(cfg.seed, 0);
  sim.run(rng, x, [&](double t, double u, PathEventKind k) { out.push_back({t, u, k}); });
  return out;
}

}  // namespace psr
