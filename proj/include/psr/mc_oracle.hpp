#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "psr/psr_exit.hpp"

namespace psr {

struct SimConfig {
  std::int64_t n_paths = 100000;
  std::uint64_t seed = 12345;
  // Brownian step near the barriers; steps grow up to dt_max far from them.
  double dt = 1e-3;
  double dt_max = 0.1;
  // 0 selects log(1e6)/q, so that e^{-q horizon} = 1e-6.
  double horizon = 0.0;
  // Paths are split into this many contiguous blocks for the reduction.
  int stream_count = 64;

  void validate() const;
};

enum class BiasNote { Exact, BridgeCorrected };

struct MCEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t n = 0;
  BiasNote bias_note = BiasNote::Exact;
};

std::string bias_note_name(BiasNote b);

// Worker threads: PSR_THREADS if set, else the hardware concurrency.
int mc_threads();

MCEstimate simulate_exit(const ExitQuery& query, const SimConfig& cfg);

enum class PathEventKind { Step, Jump, Reset, Exit };
std::string event_name(PathEventKind e);

struct PathEvent {
  double t;
  double u;
  PathEventKind kind;
};

// One path of U up to the horizon (or first exit from [b, a]). Jumps and resets
// appear as a Step row with the value before and a Jump/Reset row after.
std::vector<PathEvent> simulate_path(const ProcessSpec& spec, double lambda, double p, double x,
                                     double horizon, const SimConfig& cfg,
                                     double b = -std::numeric_limits<double>::infinity(),
                                     double a = std::numeric_limits<double>::infinity());

}  // namespace psr
