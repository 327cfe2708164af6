#pragma once

#include <Eigen/Dense>

#include "lpvdd/core/types.hpp"

namespace lpvdd {

// Stacked data matrices over samples 1..N_d; xnext holds samples 2..N_d+1.
// The column-k blocks of xp and up are p_k ⊗ x_k and p_k ⊗ u_k.
struct DataMatrices {
  Dims dims;
  Eigen::MatrixXd u, up, x, xp, xnext;
  Eigen::MatrixXd g;  // [x; xp; u; up]
};

DataMatrices build_data_matrices(const DataDictionary& d);

struct PeReport {
  bool is_pe = false;
  int rank = 0;
  int required_rank = 0;
  double condition_number = 0.0;  // sigma_max / sigma_required; inf if rank-deficient
  Eigen::VectorXd singular_values;
};

constexpr double kDefaultRankTol = 1e-9;

PeReport pe_check(const DataMatrices& m, double rank_tol = kDefaultRankTol);

// Minimum-norm least-squares solution of a * out = b, singular values below
// rank_tol * sigma_max treated as zero.
Eigen::MatrixXd min_norm_solve(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                               double rank_tol = kDefaultRankTol);
Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& a,
                               double rank_tol = kDefaultRankTol);

// Data-driven one-step predictor xnext * G^+ * [x; p⊗x; u; p⊗u].
// Construction fails with IllPosed unless the dictionary is PE.
class DataDrivenModel {
 public:
  explicit DataDrivenModel(const DataMatrices& m, double rank_tol = kDefaultRankTol);

  Eigen::VectorXd step(const Eigen::VectorXd& x, const Eigen::VectorXd& p,
                       const Eigen::VectorXd& u) const;
  // xnext * G^+ : the identified [A0 Abar B0 Bbar].
  const Eigen::MatrixXd& coefficients() const { return theta_; }
  const Dims& dims() const { return dims_; }

 private:
  Dims dims_;
  Eigen::MatrixXd theta_;
};

Eigen::VectorXd dd_open_loop_step(const DataMatrices& m, const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& p, const Eigen::VectorXd& u);

Eigen::VectorXd lpv_step(const AffineMatrixFunction& a, const AffineMatrixFunction& b,
                         const Eigen::VectorXd& x, const Eigen::VectorXd& p,
                         const Eigen::VectorXd& u);

// [A0 + B0 K0 | Abar + B0 Kbar + Bbar (I⊗K0) | Bbar (I⊗Kbar)]
Eigen::MatrixXd closed_loop_matrix(const AffineMatrixFunction& a,
                                   const AffineMatrixFunction& b,
                                   const ControllerGains& k);

// [I 0 0; 0 I⊗I 0; K0 Kbar 0; 0 I⊗K0 I⊗Kbar]
Eigen::MatrixXd consistency_matrix(const ControllerGains& k);

struct ClosedLoopMap {
  Eigen::MatrixXd v;
  double residual = 0.0;  // ||G V - consistency_matrix||_F
};

// Minimum-norm V with G V = consistency_matrix(k); fails with Consistency if
// the system is not solvable to 1e-6 relative accuracy.
ClosedLoopMap dd_closed_loop_map(const DataMatrices& m, const ControllerGains& k,
                                 double rank_tol = kDefaultRankTol);

// Spectral radius of a square matrix.
double spectral_radius(const Eigen::MatrixXd& a);

}  // namespace lpvdd
