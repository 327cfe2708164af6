#include "lpvdd/plant/scenario.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <limits>
#include <random>
#include <sstream>

#include "lpvdd/core/error.hpp"
#include "lpvdd/core/io.hpp"
#include "lpvdd/core/linalg.hpp"
#include "lpvdd/plant/collect.hpp"

namespace lpvdd::plant {

double DeployedController::input(const DiscState& measured, double theta_ref) const {
  Eigen::VectorXd p(1);
  p(0) = scheduling_sinc(measured.theta);
  const Eigen::MatrixXd k = gains(map.apply(p));
  const Eigen::Vector2d e(measured.theta - theta_ref, measured.omega);
  return (k * e)(0);
}

const char* to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::DisturbanceRejection: return "disturbance-rejection";
    case ScenarioKind::ReferenceTracking: return "reference-tracking";
    case ScenarioKind::Regulation: return "regulation";
  }
  return "?";
}

void Scenario::validate() const {
  require(duration > 0.0 && std::isfinite(duration), ErrorKind::Config,
          "scenario duration must be positive");
  require(std::isfinite(initial.theta) && std::isfinite(initial.omega), ErrorKind::Config,
          "scenario initial state must be finite");
  for (std::size_t i = 0; i < pulses.size(); ++i) {
    require(pulses[i].time >= 0.0 && pulses[i].time <= duration, ErrorKind::Config,
            "disturbance pulse outside the scenario duration");
    require(i == 0 || pulses[i].time > pulses[i - 1].time, ErrorKind::Config,
            "disturbance pulse times must be strictly increasing");
  }
  for (std::size_t i = 0; i < setpoints.size(); ++i) {
    require(setpoints[i].time >= 0.0 && setpoints[i].time <= duration, ErrorKind::Config,
            "setpoint outside the scenario duration");
    require(i == 0 || setpoints[i].time > setpoints[i - 1].time, ErrorKind::Config,
            "setpoint times must be strictly increasing");
  }
  require(measurement.quantization >= 0.0 && measurement.velocity_noise >= 0.0,
          ErrorKind::Config, "measurement options must be non-negative");
}

double Scenario::reference_at(double t) const {
  double ref = 0.0;
  for (const auto& s : setpoints)
    if (s.time <= t + 1e-12) ref = s.theta;
  return ref;
}

Scenario Scenario::tracking() {
  Scenario s;
  s.kind = ScenarioKind::ReferenceTracking;
  s.name = "tracking";
  s.duration = 20.0;
  const double refs[] = {0.0, M_PI / 4, 0.0, M_PI / 2, 0.0, 3 * M_PI / 4, 0.0, M_PI, 0.0};
  for (int i = 0; i < 9; ++i) s.setpoints.push_back({i * s.duration / 9.0, refs[i]});
  return s;
}

Scenario Scenario::disturbance() {
  Scenario s;
  s.kind = ScenarioKind::DisturbanceRejection;
  s.name = "disturbance";
  s.duration = 20.0;
  const double sign[] = {1.0, -1.0, 1.0, -1.0, 1.0};
  for (int i = 0; i < 5; ++i) s.pulses.push_back({1.5 + 4.0 * i, 5.0 * sign[i]});
  return s;
}

Scenario Scenario::regulation(DiscState x0, double duration) {
  Scenario s;
  s.kind = ScenarioKind::Regulation;
  s.name = "regulation";
  s.duration = duration;
  s.initial = x0;
  return s;
}

Trajectory run_closed_loop(const DiscParams& params, const DeployedController& c,
                           const Scenario& s) {
  params.validate();
  s.validate();
  require(c.gains.k0.allFinite() && c.gains.kbar.allFinite(), ErrorKind::InvalidArgument,
          "controller gains are not finite");
  require(c.gains.nx() == 2 && c.gains.nu() == 1 && c.gains.np() == 1 && c.map.dim() == 1,
          ErrorKind::DimensionMismatch, "disc controller needs n_x = 2, n_u = 1, n_p = 1");
  const int n = static_cast<int>(std::lround(s.duration / params.ts));
  std::vector<int> pulse_at;
  for (const auto& p : s.pulses) pulse_at.push_back(static_cast<int>(std::lround(p.time / params.ts)));

  std::mt19937_64 rng(s.measurement.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  Trajectory tr;
  DiscState x = s.initial;
  double theta_prev = 0.0;
  for (int k = 0; k <= n; ++k) {
    for (std::size_t i = 0; i < pulse_at.size(); ++i)
      if (pulse_at[i] == k) x.omega += s.pulses[i].delta_omega;
    DiscState m = x;
    if (s.measurement.quantization > 0.0)
      m.theta = s.measurement.quantization * std::round(x.theta / s.measurement.quantization);
    if (s.measurement.finite_difference_velocity)
      m.omega = k == 0 ? x.omega : (m.theta - theta_prev) / params.ts;
    if (s.measurement.velocity_noise > 0.0) m.omega += s.measurement.velocity_noise * noise(rng);
    theta_prev = m.theta;

    const double t = k * params.ts;
    const double ref = s.reference_at(t);
    const double u = saturate(c.input(m, ref), params);
    tr.t.push_back(t);
    tr.theta.push_back(x.theta);
    tr.omega.push_back(x.omega);
    tr.p.push_back(scheduling_sinc(m.theta));
    tr.u.push_back(u);
    tr.theta_ref.push_back(ref);
    if (k < n) x = zoh_step(x, u, params);
  }
  return tr;
}

double settling_time(const Trajectory& tr, double band, double from, double to) {
  int first = -1, last = -1, last_out = -1;
  for (int k = 0; k < tr.size(); ++k) {
    if (tr.t[k] < from - 1e-12 || tr.t[k] > to + 1e-12) continue;
    if (first < 0) first = k;
    last = k;
    if (std::abs(tr.theta[k] - tr.theta_ref[k]) >= band) last_out = k;
  }
  if (first < 0 || last_out == last) return std::numeric_limits<double>::infinity();
  return last_out < 0 ? tr.t[first] : tr.t[last_out + 1];
}

ScenarioMetrics evaluate(const Trajectory& tr, const Scenario& s) {
  ScenarioMetrics m;
  for (double u : tr.u) m.max_abs_u = std::max(m.max_abs_u, std::abs(u));
  const double ts = tr.size() > 1 ? tr.t[1] - tr.t[0] : 0.0;
  const double end = tr.t.empty() ? 0.0 : tr.t.back();
  if (s.kind == ScenarioKind::ReferenceTracking) {
    for (std::size_t i = 0; i < s.setpoints.size(); ++i) {
      const double a = s.setpoints[i].time;
      const double b = i + 1 < s.setpoints.size() ? s.setpoints[i + 1].time - ts : end;
      const double tail = b - 0.1 * (b - a);
      double sum = 0.0;
      int cnt = 0;
      for (int k = 0; k < tr.size(); ++k)
        if (tr.t[k] >= tail - 1e-12 && tr.t[k] <= b + 1e-12) {
          sum += tr.theta[k];
          ++cnt;
        }
      m.steady_state_errors.push_back(cnt ? std::abs(sum / cnt - s.setpoints[i].theta)
                                          : std::numeric_limits<double>::infinity());
      m.settling_times.push_back(settling_time(tr, kTrackingBand, a, b) - a);
    }
  } else if (s.kind == ScenarioKind::DisturbanceRejection) {
    for (std::size_t i = 0; i < s.pulses.size(); ++i) {
      const double a = s.pulses[i].time;
      const double b = i + 1 < s.pulses.size() ? s.pulses[i + 1].time - ts : end;
      m.settling_times.push_back(settling_time(tr, kRecoveryBand, a, b) - a);
    }
  } else {
    m.settling_times.push_back(settling_time(tr, kRegulationBand, 0.0, end));
  }
  return m;
}

L2Measurement empirical_l2_ratio(const DiscParams& params, const DeployedController& c,
                                 const Eigen::MatrixXd& w, const Eigen::MatrixXd& ws,
                                 const Eigen::MatrixXd& wr) {
  require(w.rows() == 2 && ws.rows() == 2 && wr.rows() == 1, ErrorKind::DimensionMismatch,
          "disturbance must have two channels and weights sizes 2 and 1");
  const Eigen::MatrixXd ss = psd_sqrt(ws), sr = psd_sqrt(wr);
  // Keep simulating after the disturbance ends so the decaying tail counts.
  const int tail = static_cast<int>(std::lround(5.0 / params.ts));
  DiscState x;
  double z2 = 0.0;
  for (Eigen::Index k = 0; k < w.cols() + tail; ++k) {
    const double u = saturate(c.input(x, 0.0), params);
    z2 += (ss * x.vec()).squaredNorm() + (sr * Eigen::VectorXd::Constant(1, u)).squaredNorm();
    x = zoh_step(x, u, params);
    if (k < w.cols()) {
      x.theta += w(0, k);
      x.omega += w(1, k);
    }
  }
  L2Measurement out;
  out.z_norm = std::sqrt(z2);
  out.w_norm = w.norm();
  out.ratio = out.w_norm > 0.0 ? out.z_norm / out.w_norm : 0.0;
  return out;
}

Eigen::MatrixXd band_limited_disturbance(std::uint64_t seed, int n,
                                         const Eigen::Vector2d& amplitude, double cutoff_hz,
                                         double ts) {
  Eigen::MatrixXd w(2, n);
  for (int ch = 0; ch < 2; ++ch) {
    const auto seq = generate_excitation(seed * 2 + ch, n, cutoff_hz, amplitude(ch), ts);
    for (int k = 0; k < n; ++k) w(ch, k) = seq[k];
  }
  return w;
}

std::string trajectory_csv(const Trajectory& tr, const std::string& header_comment) {
  std::ostringstream os;
  if (!header_comment.empty()) os << "# " << header_comment << '\n';
  os << "t,theta,omega,p,u,theta_ref\n";
  for (int k = 0; k < tr.size(); ++k)
    os << format_double(tr.t[k]) << ',' << format_double(tr.theta[k]) << ','
       << format_double(tr.omega[k]) << ',' << format_double(tr.p[k]) << ','
       << format_double(tr.u[k]) << ',' << format_double(tr.theta_ref[k]) << '\n';
  return os.str();
}

void write_trajectory(const std::filesystem::path& path, const Trajectory& tr,
                      const std::string& header_comment) {
  write_text(path, trajectory_csv(tr, header_comment));
}

Trajectory read_trajectory(const std::filesystem::path& path) {
  std::istringstream is(read_text(path));
  std::string line;
  Trajectory tr;
  bool header = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      require(line.rfind("t,theta,omega,p,u,theta_ref", 0) == 0, ErrorKind::Io,
              "unexpected trajectory header in '" + path.string() + "'");
      header = true;
      continue;
    }
    const auto f = split_csv_line(line);
    require(f.size() == 6, ErrorKind::Io, "trajectory row must have six fields");
    tr.t.push_back(parse_double(f[0]));
    tr.theta.push_back(parse_double(f[1]));
    tr.omega.push_back(parse_double(f[2]));
    tr.p.push_back(parse_double(f[3]));
    tr.u.push_back(parse_double(f[4]));
    tr.theta_ref.push_back(parse_double(f[5]));
  }
  return tr;
}

}  // namespace lpvdd::plant
