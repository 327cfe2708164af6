#include "lpvdd/plant/collect.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "lpvdd/core/error.hpp"

namespace lpvdd::plant {

int ExcitationSpec::samples(double ts) const {
  require(horizon_s > 0.0, ErrorKind::Config, "excitation horizon must be positive");
  return static_cast<int>(std::lround(horizon_s / ts));
}

std::vector<double> generate_excitation(std::uint64_t seed, int n_steps, double cutoff_hz,
                                        double amplitude, double ts) {
  require(ts > 0.0, ErrorKind::InvalidArgument, "sampling period must be positive");
  require(cutoff_hz > 0.0 && cutoff_hz < 0.5 / ts, ErrorKind::InvalidArgument,
          "excitation cutoff must lie in (0, 1/(2 Ts))");
  require(amplitude > 0.0, ErrorKind::InvalidArgument, "excitation amplitude must be positive");
  require(n_steps >= 0, ErrorKind::InvalidArgument, "negative excitation length");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-amplitude, amplitude);
  const double a = std::exp(-2.0 * M_PI * cutoff_hz * ts);
  std::vector<double> out(n_steps);
  double y = 0.0;
  for (int k = 0; k < n_steps; ++k) {
    const double r = dist(rng);
    y = k == 0 ? r : a * y + (1.0 - a) * r;
    out[k] = std::clamp(y, -amplitude, amplitude);
  }
  return out;
}

OpenLoopLog simulate_open_loop(const DiscParams& params, const std::vector<double>& u,
                               DiscState x0) {
  params.validate();
  OpenLoopLog log;
  log.ts = params.ts;
  DiscState x = x0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double uk = saturate(u[k], params);
    log.u.push_back(uk);
    log.p.push_back(scheduling_sinc(x.theta));
    log.theta.push_back(x.theta);
    log.omega.push_back(x.omega);
    if (k + 1 < u.size()) x = zoh_step(x, uk, params);
  }
  return log;
}

DataDictionary extract_window(const OpenLoopLog& log, const Window& w) {
  require(w.nd >= 1, ErrorKind::Config, "window needs N_d >= 1");
  require(w.offset >= 0 && w.offset + w.nd + 1 <= log.size(), ErrorKind::Config,
          "window (offset " + std::to_string(w.offset) + ", N_d " + std::to_string(w.nd) +
              ") does not fit a " + std::to_string(log.size()) + "-sample horizon");
  const int n = w.nd + 1;
  Eigen::MatrixXd u(1, n), p(1, n), x(2, n);
  for (int j = 0; j < n; ++j) {
    const int k = w.offset + j;
    u(0, j) = log.u[k];
    p(0, j) = log.p[k];
    x(0, j) = log.theta[k];
    x(1, j) = log.omega[k];
  }
  return DataDictionary(u, p, x, disc_schedule_box());
}

CollectedData collect_dictionary(const DiscParams& params, const ExcitationSpec& ex,
                                 const Window& w, DiscState x0) {
  const int n = ex.samples(params.ts);
  require(w.offset + w.nd + 1 <= n, ErrorKind::Config,
          "window (offset " + std::to_string(w.offset) + ", N_d " + std::to_string(w.nd) +
              ") exceeds the " + std::to_string(n) + "-sample horizon");
  OpenLoopLog log = simulate_open_loop(
      params, generate_excitation(ex.seed, n, ex.cutoff_hz, ex.amplitude, params.ts), x0);
  DataDictionary d = extract_window(log, w);
  return {std::move(log), std::move(d)};
}

std::vector<WindowReport> window_sweep(const OpenLoopLog& log, int nd, double flag_threshold) {
  std::vector<WindowReport> out;
  for (int off = 0; off + nd + 1 <= log.size(); ++off) {
    const PeReport pe = pe_check(build_data_matrices(extract_window(log, {off, nd})));
    WindowReport r;
    r.offset = off;
    r.rank = pe.rank;
    r.required_rank = pe.required_rank;
    r.condition_number = pe.condition_number;
    r.is_pe = pe.is_pe;
    r.ill_conditioned = !(pe.condition_number <= flag_threshold);
    out.push_back(r);
  }
  return out;
}

Window best_window(const OpenLoopLog& log, int nd) {
  const auto sweep = window_sweep(log, nd);
  const WindowReport* best = nullptr;
  for (const auto& r : sweep)
    if (r.is_pe && (!best || r.condition_number < best->condition_number)) best = &r;
  require(best != nullptr, ErrorKind::IllPosed, "no persistently exciting window in the log");
  return {best->offset, nd};
}

}  // namespace lpvdd::plant
