#include "lpvdd/core/rescale.hpp"

#include "lpvdd/core/error.hpp"

namespace lpvdd {

SchedulingMap::SchedulingMap(Eigen::VectorXd center, Eigen::VectorXd half_width)
    : center_(std::move(center)), half_width_(std::move(half_width)) {
  require(center_.size() == half_width_.size(), ErrorKind::DimensionMismatch,
          "scheduling map center and width differ in length");
  require((half_width_.array() > 0.0).all(), ErrorKind::InvalidArgument,
          "scheduling map needs positive half widths");
}

SchedulingMap SchedulingMap::identity(int np) {
  return SchedulingMap(Eigen::VectorXd::Zero(np), Eigen::VectorXd::Ones(np));
}

bool SchedulingMap::is_identity() const {
  return (center_.array() == 0.0).all() && (half_width_.array() == 1.0).all();
}

Eigen::VectorXd SchedulingMap::apply(const Eigen::VectorXd& p) const {
  require(p.size() == dim(), ErrorKind::DimensionMismatch,
          "scheduling vector has the wrong length");
  return ((p - center_).array() / half_width_.array()).matrix();
}

Eigen::VectorXd SchedulingMap::invert(const Eigen::VectorXd& pt) const {
  require(pt.size() == dim(), ErrorKind::DimensionMismatch,
          "scheduling vector has the wrong length");
  return center_ + (pt.array() * half_width_.array()).matrix();
}

ScheduleBox SchedulingMap::apply(const ScheduleBox& box) const {
  return ScheduleBox(apply(box.lower()), apply(box.upper()));
}

DataDictionary SchedulingMap::apply(const DataDictionary& d) const {
  Eigen::MatrixXd p(d.p().rows(), d.p().cols());
  for (Eigen::Index k = 0; k < p.cols(); ++k) p.col(k) = apply(Eigen::VectorXd(d.p().col(k)));
  // Clamp rounding so samples on the box boundary stay inside [-1, 1].
  const ScheduleBox box = apply(d.box());
  for (Eigen::Index k = 0; k < p.cols(); ++k)
    p.col(k) = p.col(k).cwiseMax(box.lower()).cwiseMin(box.upper());
  return DataDictionary(d.u(), p, d.x(), box);
}

ControllerGains SchedulingMap::pull_back(const ControllerGains& k) const {
  require(k.np() == dim(), ErrorKind::DimensionMismatch,
          "gains and scheduling map differ in scheduling dimension");
  ControllerGains out{k.k0, k.kbar};
  for (int i = 1; i <= dim(); ++i) {
    const double s = half_width_(i - 1);
    out.k0 -= center_(i - 1) / s * k.block(i);
    out.kbar.middleCols((i - 1) * k.nx(), k.nx()) = k.block(i) / s;
  }
  return out;
}

SchedulingMap rescale_scheduling(const ScheduleBox& box) {
  require(!box.degenerate(), ErrorKind::InvalidArgument,
          "cannot rescale a degenerate schedule box");
  return SchedulingMap((box.upper() + box.lower()) / 2.0,
                       (box.upper() - box.lower()) / 2.0);
}

}  // namespace lpvdd
