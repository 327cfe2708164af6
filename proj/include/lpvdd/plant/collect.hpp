#pragma once

#include <cstdint>
#include <vector>

#include "lpvdd/core/data_matrices.hpp"
#include "lpvdd/core/types.hpp"
#include "lpvdd/plant/disc.hpp"

namespace lpvdd::plant {

struct ExcitationSpec {
  std::uint64_t seed = 42;
  double amplitude = 10.0;
  double cutoff_hz = 5.0;
  double horizon_s = 1.0;

  int samples(double ts) const;
};

// Uniform samples in [-amplitude, amplitude] through a first-order low-pass
// y_k = a y_{k-1} + (1 - a) r_k, a = exp(-2 pi cutoff ts), then clamped.
std::vector<double> generate_excitation(std::uint64_t seed, int n_steps, double cutoff_hz,
                                        double amplitude, double ts);

struct OpenLoopLog {
  double ts = 0.0;
  std::vector<double> u, p, theta, omega;

  int size() const { return static_cast<int>(u.size()); }
};

// Applies u[k] at sample k and records (u_k, p_k, x_k) before the step.
OpenLoopLog simulate_open_loop(const DiscParams& params, const std::vector<double>& u,
                               DiscState x0 = {});

struct Window {
  int offset = 0;
  int nd = 7;
};

// Samples offset .. offset + nd of the log as a dictionary over disc_schedule_box().
DataDictionary extract_window(const OpenLoopLog& log, const Window& w);

struct CollectedData {
  OpenLoopLog log;
  DataDictionary dictionary;
};

CollectedData collect_dictionary(const DiscParams& params, const ExcitationSpec& ex,
                                 const Window& w, DiscState x0 = {});

struct WindowReport {
  int offset = 0;
  int rank = 0;
  int required_rank = 0;
  double condition_number = 0.0;
  bool is_pe = false;
  bool ill_conditioned = false;  // cond(G) above the flag threshold
};

constexpr double kConditionFlag = 1e6;

std::vector<WindowReport> window_sweep(const OpenLoopLog& log, int nd,
                                       double flag_threshold = kConditionFlag);
// PE window with the smallest cond(G); fails with IllPosed if none is PE.
Window best_window(const OpenLoopLog& log, int nd);

}  // namespace lpvdd::plant
