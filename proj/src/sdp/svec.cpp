#include "lpvdd/sdp/svec.hpp"

#include <cmath>

#include "lpvdd/core/error.hpp"

namespace lpvdd::sdp {

Eigen::VectorXd svec(const Eigen::MatrixXd& a) {
  require(a.rows() == a.cols(), ErrorKind::DimensionMismatch, "svec needs a square matrix");
  const int n = static_cast<int>(a.rows());
  Eigen::VectorXd v(svec_dim(n));
  int k = 0;
  for (int j = 0; j < n; ++j)
    for (int i = j; i < n; ++i)
      v(k++) = i == j ? a(i, i) : M_SQRT2 * 0.5 * (a(i, j) + a(j, i));
  return v;
}

int smat_order(Eigen::Index len) {
  const int n = static_cast<int>(std::lround((std::sqrt(8.0 * len + 1.0) - 1.0) / 2.0));
  require(svec_dim(n) == len, ErrorKind::DimensionMismatch,
          "vector length is not a triangular number");
  return n;
}

Eigen::MatrixXd smat(const Eigen::VectorXd& v) {
  const int n = smat_order(v.size());
  Eigen::MatrixXd a(n, n);
  int k = 0;
  for (int j = 0; j < n; ++j)
    for (int i = j; i < n; ++i) {
      if (i == j) {
        a(i, i) = v(k++);
      } else {
        a(i, j) = a(j, i) = v(k++) / M_SQRT2;
      }
    }
  return a;
}

std::pair<int, int> svec_index(int n, int k) {
  require(k >= 0 && k < svec_dim(n), ErrorKind::InvalidArgument, "svec index out of range");
  int j = 0;
  while (k >= n - j) {
    k -= n - j;
    ++j;
  }
  return {j + k, j};
}

Eigen::MatrixXd svec_basis(int n, int k) {
  const auto [i, j] = svec_index(n, k);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
  if (i == j) {
    b(i, i) = 1.0;
  } else {
    b(i, j) = b(j, i) = 1.0 / M_SQRT2;
  }
  return b;
}

}  // namespace lpvdd::sdp
