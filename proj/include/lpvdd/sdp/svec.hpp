#pragma once

#include <Eigen/Dense>

namespace lpvdd::sdp {

// Scaled half-vectorization: lower triangle taken column by column, with
// off-diagonal entries multiplied by sqrt(2) so that <svec(A), svec(B)> = tr(AB).
inline constexpr int svec_dim(int n) { return n * (n + 1) / 2; }

Eigen::VectorXd svec(const Eigen::MatrixXd& a);
Eigen::MatrixXd smat(const Eigen::VectorXd& v);
// Dimension n with svec_dim(n) == len; fails on a non-triangular length.
int smat_order(Eigen::Index len);

// Unit basis matrix for svec coordinate k of an n x n symmetric matrix.
Eigen::MatrixXd svec_basis(int n, int k);
// Row/column pair (i >= j) addressed by svec coordinate k.
std::pair<int, int> svec_index(int n, int k);

}  // namespace lpvdd::sdp
