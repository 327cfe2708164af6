#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "lpvdd/core/types.hpp"

namespace lpvdd::plant {

// Unbalanced disc driven by a DC motor:
//   theta'' = -mgl_over_j sin(theta) - omega / tau + (km / tau) u
struct DiscParams {
  double mgl_over_j = 70.0;
  double tau = 0.4;
  double km = 16.0;
  double saturation = 10.0;
  double ts = 0.01;
  double max_substep = 1e-3;
  double divergence_limit = 1e6;

  void validate() const;
  double input_gain() const { return km / tau; }
  int substeps() const;
};

struct DiscState {
  double theta = 0.0;
  double omega = 0.0;

  Eigen::Vector2d vec() const { return {theta, omega}; }
};

// (theta', omega') for a given input; the input is used as given.
Eigen::Vector2d ct_dynamics(const DiscState& x, double u, const DiscParams& params);

// One sampling period under a held, saturated input (RK4 with substeps).
// Throws Divergence if the state leaves the divergence limit.
DiscState zoh_step(const DiscState& x, double u, const DiscParams& params);

double saturate(double u, const DiscParams& params);

// sin(theta)/theta with the removable singularity filled in.
double scheduling_sinc(double theta);

// Scheduling set for the disc: sinc takes values in [-0.2172..., 1].
ScheduleBox disc_schedule_box();

// Affine LPV embedding of the continuous-time model with p = sinc(theta),
// forward-Euler discretized at ts. Used only as a reference model in tests.
AffineMatrixFunction euler_a(const DiscParams& params);
AffineMatrixFunction euler_b(const DiscParams& params);

}  // namespace lpvdd::plant
