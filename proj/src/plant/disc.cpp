#include "lpvdd/plant/disc.hpp"

#include <algorithm>
#include <cmath>

#include "lpvdd/core/error.hpp"

namespace lpvdd::plant {

void DiscParams::validate() const {
  require(std::isfinite(mgl_over_j) && mgl_over_j >= 0.0, ErrorKind::InvalidArgument,
          "mgl_over_j must be finite and non-negative");
  require(tau > 0.0 && std::isfinite(tau), ErrorKind::InvalidArgument, "tau must be positive");
  require(std::isfinite(km), ErrorKind::InvalidArgument, "km must be finite");
  require(saturation > 0.0, ErrorKind::InvalidArgument, "saturation must be positive");
  require(ts > 0.0 && std::isfinite(ts), ErrorKind::InvalidArgument,
          "sampling period must be positive");
  require(max_substep > 0.0, ErrorKind::InvalidArgument, "max_substep must be positive");
  require(divergence_limit > 0.0, ErrorKind::InvalidArgument,
          "divergence limit must be positive");
}

int DiscParams::substeps() const {
  return std::max(1, static_cast<int>(std::ceil(ts / max_substep - 1e-9)));
}

Eigen::Vector2d ct_dynamics(const DiscState& x, double u, const DiscParams& params) {
  return {x.omega,
          -params.mgl_over_j * std::sin(x.theta) - x.omega / params.tau + params.input_gain() * u};
}

double saturate(double u, const DiscParams& params) {
  return std::clamp(u, -params.saturation, params.saturation);
}

DiscState zoh_step(const DiscState& x, double u, const DiscParams& params) {
  params.validate();
  require(std::isfinite(u), ErrorKind::InvalidArgument, "input is not finite");
  const double uc = saturate(u, params);
  const int n = params.substeps();
  const double h = params.ts / n;
  Eigen::Vector2d s = x.vec();
  auto f = [&](const Eigen::Vector2d& v) { return ct_dynamics({v(0), v(1)}, uc, params); };
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector2d k1 = f(s);
    const Eigen::Vector2d k2 = f(s + 0.5 * h * k1);
    const Eigen::Vector2d k3 = f(s + 0.5 * h * k2);
    const Eigen::Vector2d k4 = f(s + h * k3);
    s += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  if (!s.allFinite() || s.cwiseAbs().maxCoeff() > params.divergence_limit)
    fail(ErrorKind::Divergence, "disc state diverged");
  return {s(0), s(1)};
}

double scheduling_sinc(double theta) {
  if (std::abs(theta) < 1e-4) {
    const double t2 = theta * theta;
    return 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
  }
  return std::sin(theta) / theta;
}

ScheduleBox disc_schedule_box() {
  return ScheduleBox(Eigen::VectorXd::Constant(1, -0.22), Eigen::VectorXd::Constant(1, 1.0));
}

AffineMatrixFunction euler_a(const DiscParams& params) {
  Eigen::MatrixXd a0(2, 2), a1(2, 2);
  a0 << 1.0, params.ts, 0.0, 1.0 - params.ts / params.tau;
  a1 << 0.0, 0.0, -params.ts * params.mgl_over_j, 0.0;
  return AffineMatrixFunction({a0, a1});
}

AffineMatrixFunction euler_b(const DiscParams& params) {
  Eigen::MatrixXd b0(2, 1);
  b0 << 0.0, params.ts * params.input_gain();
  return AffineMatrixFunction({b0, Eigen::MatrixXd::Zero(2, 1)});
}

}  // namespace lpvdd::plant
