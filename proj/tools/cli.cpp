#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "psr/conv_scale.hpp"
#include "psr/errors.hpp"
#include "psr/mc_oracle.hpp"
#include "psr/process_json.hpp"
#include "psr/psr_exit.hpp"
#include "psr/total_resetting.hpp"

#ifndef PSR_VERSION
#define PSR_VERSION "0.0.0"
#endif

namespace psr::cli {

std::string fmt_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

std::string fmt_exact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

struct QueryArgs {
  std::string model;
  std::string side = "up";
  std::string method = "resolvent";
  double q = kUnset, lambda = 0.0, p = 0.5, b = kUnset, a = kUnset, x = kUnset;
  int grid_points = SolveConfig{}.grid_points;
};

struct SimArgs {
  std::int64_t n_paths = 100000;
  std::uint64_t seed = SimConfig{}.seed;
  double dt = SimConfig{}.dt;
};

const std::map<std::string, Side> kSides{{"up", Side::UpTwoSided},
                                         {"down", Side::DownTwoSided},
                                         {"up1", Side::UpOneSided},
                                         {"down1", Side::DownOneSided}};

void add_query_options(CLI::App* cmd, QueryArgs& qa) {
  cmd->add_option("model", qa.model, "process JSON file")->required();
  cmd->add_option("--side", qa.side, "up|down|up1|down1")
      ->check(CLI::IsMember({"up", "down", "up1", "down1"}));
  cmd->add_option("--q", qa.q, "killing rate")->required();
  cmd->add_option("--lambda", qa.lambda, "resetting rate");
  cmd->add_option("--p", qa.p, "resetting factor");
  cmd->add_option("--b", qa.b, "lower barrier");
  cmd->add_option("--a", qa.a, "upper barrier");
  cmd->add_option("--x", qa.x, "starting point")->required();
  cmd->add_option("--method", qa.method, "resolvent|direct|conv|total")
      ->check(CLI::IsMember({"resolvent", "direct", "conv", "total"}));
  cmd->add_option("--grid-points", qa.grid_points, "solver nodes");
}

void add_sim_options(CLI::App* cmd, SimArgs& sa) {
  cmd->add_option("--n-paths", sa.n_paths, "Monte Carlo paths");
  cmd->add_option("--seed", sa.seed, "RNG seed");
  cmd->add_option("--dt", sa.dt, "Brownian time step near barriers");
}

ExitQuery make_query(const QueryArgs& qa) {
  ExitQuery q;
  q.spec = load_spec(qa.model);
  q.side = kSides.at(qa.side);
  q.q = qa.q;
  q.lambda = qa.lambda;
  q.p = qa.p;
  const bool need_b = q.side != Side::UpOneSided;
  const bool need_a = q.side != Side::DownOneSided;
  if (need_b && std::isnan(qa.b)) throw DomainError("--b is required for side " + qa.side);
  if (need_a && std::isnan(qa.a)) throw DomainError("--a is required for side " + qa.side);
  q.b = need_b ? qa.b : -std::numeric_limits<double>::infinity();
  q.a = need_a ? qa.a : std::numeric_limits<double>::infinity();
  q.x = qa.x;
  return q;
}

ExitValue analytic(const ExitQuery& q, const QueryArgs& qa) {
  if (qa.method == "total") {
    switch (q.side) {
      case Side::UpTwoSided: return total_exit_up({q.spec, q.q, q.lambda, q.b, q.a}, q.x);
      case Side::DownTwoSided: return total_exit_down({q.spec, q.q, q.lambda, q.b, q.a}, q.x);
      case Side::UpOneSided: return total_exit_one_sided_up(q.spec, q.q, q.lambda, q.a, q.x);
      case Side::DownOneSided: return total_exit_one_sided_down(q.spec, q.q, q.lambda, q.b, q.x);
    }
  }
  if (qa.method == "conv") {
    if (q.side == Side::UpOneSided || q.side == Side::DownOneSided || q.b < 0.0)
      throw DomainError("method conv needs a two-sided query with b >= 0");
    ExitValue v;
    v.region = Region::PosPos;
    v.value = q.side == Side::UpTwoSided ? conv_exit_up(q.spec, q.q, q.lambda, q.p, q.b, q.a, q.x)
                                         : conv_exit_down(q.spec, q.q, q.lambda, q.p, q.b, q.a, q.x);
    return v;
  }
  PsrOptions opts;
  opts.solve.grid_points = qa.grid_points;
  opts.method = qa.method == "direct" ? Method::Direct : Method::Resolvent;
  return evaluate_exit(q, opts);
}

struct Manifest {
  std::string command;
  std::string model;
  std::string output;
  std::string seed;
  std::vector<std::pair<std::string, std::string>> params;
};

void add_query_params(Manifest& m, const ExitQuery& q, const QueryArgs& qa) {
  m.model = qa.model;
  m.params.emplace_back("side", qa.side);
  m.params.emplace_back("method", qa.method);
  m.params.emplace_back("q", fmt_exact(q.q));
  m.params.emplace_back("lambda", fmt_exact(q.lambda));
  m.params.emplace_back("p", fmt_exact(q.p));
  m.params.emplace_back("b", fmt_exact(q.b));
  m.params.emplace_back("a", fmt_exact(q.a));
  m.params.emplace_back("x", fmt_exact(q.x));
  m.params.emplace_back("grid_points", std::to_string(qa.grid_points));
}

void write_manifest(std::ostream& os, const Manifest& m) {
  os << "# tool=psr " << PSR_VERSION << '\n';
  os << "# command=" << m.command << '\n';
  os << "# model=" << m.model << '\n';
  for (const auto& [k, v] : m.params) os << "# param." << k << '=' << v << '\n';
  os << "# output=" << m.output << '\n';
  os << "# seed=" << m.seed << '\n';
}

// Writes to the named file, or to out when the name is empty.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& out) : out_(out) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw DomainError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : out_; }

 private:
  std::ostream& out_;
  std::ofstream file_;
};

int cmd_exit(const QueryArgs& qa, std::ostream& out) {
  const ExitQuery q = make_query(qa);
  const ExitValue v = analytic(q, qa);
  out << "value=" << fmt_value(v.value) << '\n';
  out << "correction=" << fmt_value(v.correction) << '\n';
  out << "region=" << region_name(v.region) << '\n';
  out << "solver_residual=" << fmt_value(v.solver_residual) << '\n';
  out << "iterations=" << v.iterations << '\n';
  out << "contraction_bound=" << fmt_value(v.contraction_bound) << '\n';
  out << "observed_factor=" << fmt_value(v.observed_factor) << '\n';
  return kOk;
}

SimConfig sim_config(const SimArgs& sa) {
  SimConfig c;
  c.n_paths = sa.n_paths;
  c.seed = sa.seed;
  c.dt = sa.dt;
  return c;
}

int cmd_compare(const QueryArgs& qa, const SimArgs& sa, const std::string& output,
                std::ostream& out) {
  const ExitQuery q = make_query(qa);
  const double value = analytic(q, qa).value;
  const MCEstimate mc = simulate_exit(q, sim_config(sa));
  int code = kOk;
  double z = std::numeric_limits<double>::quiet_NaN();
  if (mc.std_error > 0.0) {
    z = (value - mc.mean) / mc.std_error;
    if (std::abs(z) > 3.29) code = kMismatch;
  } else if (std::abs(value - mc.mean) > 1e-12) {
    code = kMismatch;
  }
  Manifest m{"compare", {}, output.empty() ? "-" : output, std::to_string(sa.seed), {}};
  add_query_params(m, q, qa);
  m.params.emplace_back("n_paths", std::to_string(sa.n_paths));
  m.params.emplace_back("dt", fmt_exact(sa.dt));
  Sink sink(output, out);
  auto& os = sink.stream();
  write_manifest(os, m);
  os << "analytic,mc_mean,mc_stderr,z_score,bias\n";
  os << fmt_value(value) << ',' << fmt_value(mc.mean) << ',' << fmt_value(mc.std_error) << ','
     << fmt_value(z) << ',' << bias_note_name(mc.bias_note) << '\n';
  return code;
}

std::vector<double> parse_range(const std::string& spec) {
  double lo = 0.0, hi = 0.0;
  long n = 0;
  char c1 = 0, c2 = 0;
  std::istringstream is(spec);
  if (!(is >> lo >> c1 >> hi >> c2 >> n) || c1 != ':' || c2 != ':' || !is.eof())
    throw DomainError("--range must be lo:hi:n, got '" + spec + "'");
  if (n < 1) throw DomainError("--range needs n >= 1");
  if (n > 1 && !(lo < hi)) throw DomainError("--range needs lo < hi");
  std::vector<double> pts(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i)
    pts[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  if (n > 1) pts.back() = hi;
  return pts;
}

int cmd_sweep(const QueryArgs& qa, const std::string& vary, const std::string& range,
              const std::string& output, std::ostream& out) {
  const auto pts = parse_range(range);
  ExitQuery q = make_query(qa);
  Manifest m{"sweep", {}, output.empty() ? "-" : output, "none", {}};
  add_query_params(m, q, qa);
  m.params.emplace_back("vary", vary);
  m.params.emplace_back("range", range);
  std::vector<double> values;
  values.reserve(pts.size());
  for (double v : pts) {
    (vary == "p" ? q.p : vary == "lambda" ? q.lambda : q.x) = v;
    values.push_back(analytic(q, qa).value);
  }
  Sink sink(output, out);
  auto& os = sink.stream();
  write_manifest(os, m);
  os << vary << ",value\n";
  for (std::size_t i = 0; i < pts.size(); ++i) os << fmt_value(pts[i]) << ',' << fmt_value(values[i]) << '\n';
  return kOk;
}

struct PathArgs {
  std::string model;
  double lambda = 0.0, p = 0.6, x = 1.0, horizon = 10.0;
};

int cmd_path(const PathArgs& pa, const SimArgs& sa, const std::string& output, std::ostream& out) {
  const ProcessSpec spec = load_spec(pa.model);
  const auto path = simulate_path(spec, pa.lambda, pa.p, pa.x, pa.horizon, sim_config(sa));
  Manifest m{"path", pa.model, output.empty() ? "-" : output, std::to_string(sa.seed), {}};
  m.params.emplace_back("lambda", fmt_exact(pa.lambda));
  m.params.emplace_back("p", fmt_exact(pa.p));
  m.params.emplace_back("x", fmt_exact(pa.x));
  m.params.emplace_back("horizon", fmt_exact(pa.horizon));
  m.params.emplace_back("dt", fmt_exact(sa.dt));
  Sink sink(output, out);
  auto& os = sink.stream();
  write_manifest(os, m);
  os << "t,u,event\n";
  for (const auto& e : path) os << fmt_value(e.t) << ',' << fmt_value(e.u) << ',' << event_name(e.kind) << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exit identities for Levy processes with partial resetting", "psr"};
  app.set_version_flag("--version", PSR_VERSION);
  app.require_subcommand(1);

  QueryArgs qa;
  SimArgs sa;
  PathArgs pa;
  std::string output, vary = "x", range;

  auto* exit_cmd = app.add_subcommand("exit", "evaluate an exit identity");
  add_query_options(exit_cmd, qa);

  auto* compare_cmd = app.add_subcommand("compare", "analytic value against Monte Carlo");
  add_query_options(compare_cmd, qa);
  add_sim_options(compare_cmd, sa);
  compare_cmd->add_option("-o,--output", output, "CSV file");

  auto* sweep_cmd = app.add_subcommand("sweep", "evaluate over a parameter grid");
  add_query_options(sweep_cmd, qa);
  sweep_cmd->add_option("--vary", vary, "p|lambda|x")->check(CLI::IsMember({"p", "lambda", "x"}));
  sweep_cmd->add_option("--range", range, "lo:hi:n")->required();
  sweep_cmd->add_option("-o,--output", output, "CSV file");

  auto* path_cmd = app.add_subcommand("path", "dump one sample path");
  path_cmd->add_option("model", pa.model, "process JSON file")->required();
  path_cmd->add_option("--lambda", pa.lambda, "resetting rate");
  path_cmd->add_option("--p", pa.p, "resetting factor");
  path_cmd->add_option("--x", pa.x, "starting point");
  path_cmd->add_option("--horizon", pa.horizon, "time horizon");
  add_sim_options(path_cmd, sa);
  path_cmd->add_option("-o,--output", output, "CSV file");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kDomain;
  }

  try {
    if (*exit_cmd) return cmd_exit(qa, out);
    if (*compare_cmd) return cmd_compare(qa, sa, output, out);
    if (*sweep_cmd) return cmd_sweep(qa, vary, range, output, out);
    if (*path_cmd) return cmd_path(pa, sa, output, out);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kDomain;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kConvergence;
  }
  return kDomain;
}

}  // namespace psr::cli
