#pragma once

#include <Eigen/Dense>
#include <vector>

namespace lpvdd {

struct Dims {
  int nu = 0;
  int np = 0;
  int nx = 0;
  int nd = 0;  // number of regression samples; the dictionary holds nd + 1

  // (1 + np)(nx + nu), the rank G must reach for persistency of excitation.
  int required_rank() const { return (1 + np) * (nx + nu); }
  int lifted_state() const { return nx * (1 + np); }
  int lifted_input() const { return nu * (1 + np); }
};

bool operator==(const Dims& a, const Dims& b);

// Axis-aligned scheduling set. lower == upper is accepted (a degenerate box
// is only useful for frozen-point checks); rescaling rejects it.
class ScheduleBox {
 public:
  ScheduleBox() = default;
  ScheduleBox(Eigen::VectorXd lower, Eigen::VectorXd upper);

  int dim() const { return static_cast<int>(lower_.size()); }
  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }
  bool degenerate() const;
  bool contains(const Eigen::VectorXd& p, double tol = 0.0) const;

  std::vector<Eigen::VectorXd> vertices() const;
  // Tensor grid with n points per axis, endpoints included; a zero-width axis
  // contributes a single point.
  std::vector<Eigen::VectorXd> grid(int n) const;

  static ScheduleBox symmetric_unit(int np);

 private:
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
};

// N_d + 1 samples of (u, p, x), stored column-wise.
class DataDictionary {
 public:
  DataDictionary() = default;
  DataDictionary(Eigen::MatrixXd u, Eigen::MatrixXd p, Eigen::MatrixXd x,
                 ScheduleBox box);

  Dims dims() const;
  int samples() const { return static_cast<int>(x_.cols()); }
  const Eigen::MatrixXd& u() const { return u_; }
  const Eigen::MatrixXd& p() const { return p_; }
  const Eigen::MatrixXd& x() const { return x_; }
  const ScheduleBox& box() const { return box_; }

  // First nd + 1 samples.
  DataDictionary truncated(int nd) const;

 private:
  Eigen::MatrixXd u_, p_, x_;
  ScheduleBox box_;
};

// M(p) = M_0 + sum_i p_i M_i.
class AffineMatrixFunction {
 public:
  AffineMatrixFunction() = default;
  explicit AffineMatrixFunction(std::vector<Eigen::MatrixXd> coeffs);

  int np() const { return static_cast<int>(coeffs_.size()) - 1; }
  Eigen::Index rows() const { return coeffs_.front().rows(); }
  Eigen::Index cols() const { return coeffs_.front().cols(); }
  const Eigen::MatrixXd& coeff(int i) const { return coeffs_.at(i); }
  const std::vector<Eigen::MatrixXd>& coeffs() const { return coeffs_; }

  Eigen::MatrixXd operator()(const Eigen::VectorXd& p) const;
  // [M_1 ... M_np]
  Eigen::MatrixXd stacked_bar() const;

 private:
  std::vector<Eigen::MatrixXd> coeffs_;
};

// K(p) = K0 + sum_i p_i K_i with Kbar = [K_1 ... K_np].
struct ControllerGains {
  Eigen::MatrixXd k0;
  Eigen::MatrixXd kbar;

  int nu() const { return static_cast<int>(k0.rows()); }
  int nx() const { return static_cast<int>(k0.cols()); }
  int np() const { return nx() == 0 ? 0 : static_cast<int>(kbar.cols() / nx()); }
  Eigen::MatrixXd block(int i) const;  // K_i, 1-based
  Eigen::MatrixXd operator()(const Eigen::VectorXd& p) const;
  AffineMatrixFunction as_function() const;
};

}  // namespace lpvdd
