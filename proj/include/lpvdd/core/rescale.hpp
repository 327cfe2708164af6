#pragma once

#include <Eigen/Dense>

#include "lpvdd/core/types.hpp"

namespace lpvdd {

// Affine scheduling change p̃ = (p - center) ./ half_width. The normalizing
// map sends the box onto [-1, 1]^np: p̃ = (2p - up - lo) / (up - lo).
class SchedulingMap {
 public:
  SchedulingMap() = default;
  SchedulingMap(Eigen::VectorXd center, Eigen::VectorXd half_width);

  static SchedulingMap identity(int np);

  int dim() const { return static_cast<int>(center_.size()); }
  const Eigen::VectorXd& center() const { return center_; }
  const Eigen::VectorXd& half_width() const { return half_width_; }
  bool is_identity() const;

  Eigen::VectorXd apply(const Eigen::VectorXd& p) const;
  Eigen::VectorXd invert(const Eigen::VectorXd& pt) const;
  ScheduleBox apply(const ScheduleBox& box) const;
  DataDictionary apply(const DataDictionary& d) const;

  // Gains expressed in the mapped coordinates, rewritten for the original ones.
  ControllerGains pull_back(const ControllerGains& k) const;

 private:
  Eigen::VectorXd center_;
  Eigen::VectorXd half_width_;
};

// Fails with InvalidArgument on a degenerate box.
SchedulingMap rescale_scheduling(const ScheduleBox& box);

}  // namespace lpvdd
