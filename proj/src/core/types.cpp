#include "lpvdd/core/types.hpp"

#include <sstream>

#include "lpvdd/core/error.hpp"

namespace lpvdd {

bool operator==(const Dims& a, const Dims& b) {
  return a.nu == b.nu && a.np == b.np && a.nx == b.nx && a.nd == b.nd;
}

ScheduleBox::ScheduleBox(Eigen::VectorXd lower, Eigen::VectorXd upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  require(lower_.size() == upper_.size(), ErrorKind::DimensionMismatch,
          "schedule box bounds have different lengths");
  require(lower_.size() > 0, ErrorKind::InvalidArgument,
          "schedule box needs at least one axis");
  for (Eigen::Index i = 0; i < lower_.size(); ++i) {
    require(std::isfinite(lower_(i)) && std::isfinite(upper_(i)),
            ErrorKind::InvalidArgument, "schedule box bounds must be finite");
    require(lower_(i) <= upper_(i), ErrorKind::InvalidArgument,
            "schedule box has lower > upper on axis " + std::to_string(i + 1));
  }
}

bool ScheduleBox::degenerate() const {
  return ((upper_ - lower_).array() <= 0.0).any();
}

bool ScheduleBox::contains(const Eigen::VectorXd& p, double tol) const {
  if (p.size() != lower_.size()) return false;
  return ((p - lower_).array() >= -tol).all() &&
         ((upper_ - p).array() >= -tol).all();
}

std::vector<Eigen::VectorXd> ScheduleBox::vertices() const {
  const int n = dim();
  std::vector<Eigen::VectorXd> out;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i)
      v(i) = (mask >> i) & 1u ? upper_(i) : lower_(i);
    out.push_back(v);
  }
  return out;
}

std::vector<Eigen::VectorXd> ScheduleBox::grid(int n) const {
  require(n >= 1, ErrorKind::InvalidArgument, "grid needs at least one point");
  const int d = dim();
  std::vector<Eigen::VectorXd> out;
  std::vector<int> idx(d, 0), count(d, n);
  for (int i = 0; i < d; ++i)
    if (lower_(i) == upper_(i)) count[i] = 1;
  while (true) {
    Eigen::VectorXd v(d);
    for (int i = 0; i < d; ++i) {
      const double t = count[i] == 1 ? 0.5 : static_cast<double>(idx[i]) / (count[i] - 1);
      v(i) = lower_(i) + t * (upper_(i) - lower_(i));
    }
    out.push_back(v);
    int axis = 0;
    while (axis < d && ++idx[axis] == count[axis]) idx[axis++] = 0;
    if (axis == d) break;
  }
  return out;
}

ScheduleBox ScheduleBox::symmetric_unit(int np) {
  return ScheduleBox(-Eigen::VectorXd::Ones(np), Eigen::VectorXd::Ones(np));
}

DataDictionary::DataDictionary(Eigen::MatrixXd u, Eigen::MatrixXd p,
                               Eigen::MatrixXd x, ScheduleBox box)
    : u_(std::move(u)), p_(std::move(p)), x_(std::move(x)), box_(std::move(box)) {
  require(x_.cols() >= 2, ErrorKind::InvalidArgument,
          "dictionary needs at least two samples");
  require(u_.cols() == x_.cols() && p_.cols() == x_.cols(),
          ErrorKind::DimensionMismatch,
          "dictionary u, p and x hold different sample counts");
  require(x_.rows() >= 1 && u_.rows() >= 1 && p_.rows() >= 1,
          ErrorKind::DimensionMismatch, "dictionary signals must be non-empty");
  require(p_.rows() == box_.dim(), ErrorKind::DimensionMismatch,
          "scheduling dimension does not match the schedule box");
  require(u_.allFinite() && p_.allFinite() && x_.allFinite(),
          ErrorKind::InvalidArgument, "dictionary contains non-finite values");
  for (Eigen::Index k = 0; k < p_.cols(); ++k) {
    if (!box_.contains(p_.col(k))) {
      std::ostringstream os;
      os << "scheduling sample " << k + 1 << " (" << p_.col(k).transpose()
         << ") lies outside the schedule box";
      fail(ErrorKind::InvalidArgument, os.str());
    }
  }
}

Dims DataDictionary::dims() const {
  return Dims{static_cast<int>(u_.rows()), static_cast<int>(p_.rows()),
              static_cast<int>(x_.rows()), static_cast<int>(x_.cols()) - 1};
}

DataDictionary DataDictionary::truncated(int nd) const {
  require(nd >= 1 && nd + 1 <= samples(), ErrorKind::InvalidArgument,
          "truncation length out of range");
  return DataDictionary(u_.leftCols(nd + 1), p_.leftCols(nd + 1),
                        x_.leftCols(nd + 1), box_);
}

AffineMatrixFunction::AffineMatrixFunction(std::vector<Eigen::MatrixXd> coeffs)
    : coeffs_(std::move(coeffs)) {
  require(!coeffs_.empty(), ErrorKind::InvalidArgument,
          "affine matrix function needs a constant term");
  for (const auto& c : coeffs_)
    require(c.rows() == coeffs_[0].rows() && c.cols() == coeffs_[0].cols(),
            ErrorKind::DimensionMismatch,
            "affine matrix function coefficients differ in shape");
}

Eigen::MatrixXd AffineMatrixFunction::operator()(const Eigen::VectorXd& p) const {
  require(p.size() == np(), ErrorKind::DimensionMismatch,
          "scheduling vector has the wrong length");
  Eigen::MatrixXd out = coeffs_[0];
  for (int i = 0; i < np(); ++i) out += p(i) * coeffs_[i + 1];
  return out;
}

Eigen::MatrixXd AffineMatrixFunction::stacked_bar() const {
  Eigen::MatrixXd out(rows(), cols() * np());
  for (int i = 0; i < np(); ++i) out.middleCols(i * cols(), cols()) = coeffs_[i + 1];
  return out;
}

Eigen::MatrixXd ControllerGains::block(int i) const {
  return kbar.middleCols((i - 1) * nx(), nx());
}

Eigen::MatrixXd ControllerGains::operator()(const Eigen::VectorXd& p) const {
  require(p.size() == np(), ErrorKind::DimensionMismatch,
          "scheduling vector has the wrong length for the gains");
  Eigen::MatrixXd out = k0;
  for (int i = 0; i < np(); ++i) out += p(i) * block(i + 1);
  return out;
}

AffineMatrixFunction ControllerGains::as_function() const {
  std::vector<Eigen::MatrixXd> c{k0};
  for (int i = 1; i <= np(); ++i) c.push_back(block(i));
  return AffineMatrixFunction(std::move(c));
}

}  // namespace lpvdd
