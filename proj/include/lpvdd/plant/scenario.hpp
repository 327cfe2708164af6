#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lpvdd/core/rescale.hpp"
#include "lpvdd/core/types.hpp"
#include "lpvdd/plant/disc.hpp"

namespace lpvdd::plant {

// u = K(map(sinc(theta))) (x - [theta_ref; 0]), no feedforward.
struct DeployedController {
  ControllerGains gains;
  SchedulingMap map;

  double input(const DiscState& measured, double theta_ref) const;
};

struct VelocityPulse {
  double time = 0.0;
  double delta_omega = 0.0;
};

struct Setpoint {
  double time = 0.0;
  double theta = 0.0;
};

struct MeasurementOptions {
  double quantization = 0.0;          // encoder step in rad; 0 disables
  double velocity_noise = 0.0;        // std-dev in rad/s; 0 disables
  bool finite_difference_velocity = false;
  std::uint64_t seed = 1;

  static constexpr double kEncoderStep = 2.0 * M_PI / 2000.0;
};

enum class ScenarioKind { DisturbanceRejection, ReferenceTracking, Regulation };

const char* to_string(ScenarioKind k);

struct Scenario {
  ScenarioKind kind = ScenarioKind::Regulation;
  std::string name;
  double duration = 5.0;
  DiscState initial;
  std::vector<VelocityPulse> pulses;
  std::vector<Setpoint> setpoints;  // empty means theta_ref = 0
  MeasurementOptions measurement;

  void validate() const;
  double reference_at(double t) const;

  static Scenario tracking();
  static Scenario disturbance();
  static Scenario regulation(DiscState x0, double duration);
};

struct Trajectory {
  std::vector<double> t, theta, omega, p, u, theta_ref;

  int size() const { return static_cast<int>(t.size()); }
};

Trajectory run_closed_loop(const DiscParams& params, const DeployedController& c,
                           const Scenario& s);

// Earliest time in [from, to] after which |theta - theta_ref| < band holds for
// every remaining sample up to `to`. Infinity if it never settles.
double settling_time(const Trajectory& tr, double band, double from, double to);

struct ScenarioMetrics {
  double max_abs_u = 0.0;
  std::vector<double> steady_state_errors;  // per setpoint segment
  std::vector<double> settling_times;       // per segment or pulse, relative to its start
};

constexpr double kTrackingBand = 0.1;
constexpr double kRecoveryBand = 0.05;
constexpr double kRegulationBand = 0.01;

// Steady-state error of a segment: |mean(theta) - ref| over its final 10%.
ScenarioMetrics evaluate(const Trajectory& tr, const Scenario& s);

// Disturbance injected additively on the sampled state, z = (Ws^1/2 x, Wr^1/2 u).
struct L2Measurement {
  double ratio = 0.0;
  double z_norm = 0.0;
  double w_norm = 0.0;
};

L2Measurement empirical_l2_ratio(const DiscParams& params, const DeployedController& c,
                                 const Eigen::MatrixXd& w, const Eigen::MatrixXd& ws,
                                 const Eigen::MatrixXd& wr);

// Two-channel low-pass filtered uniform noise with per-channel amplitude.
Eigen::MatrixXd band_limited_disturbance(std::uint64_t seed, int n,
                                         const Eigen::Vector2d& amplitude, double cutoff_hz,
                                         double ts);

std::string trajectory_csv(const Trajectory& tr, const std::string& header_comment = "");
void write_trajectory(const std::filesystem::path& path, const Trajectory& tr,
                      const std::string& header_comment = "");
Trajectory read_trajectory(const std::filesystem::path& path);

}  // namespace lpvdd::plant
