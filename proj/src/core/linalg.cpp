#include "lpvdd/core/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>

#include "lpvdd/core/error.hpp"

namespace lpvdd {

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& w) {
  require(w.rows() == w.cols(), ErrorKind::DimensionMismatch, "weight must be square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (w + w.transpose()));
  const Eigen::VectorXd& ev = es.eigenvalues();
  require(ev.minCoeff() >= -1e-12 * std::max(1.0, ev.maxCoeff()), ErrorKind::InvalidArgument,
          "matrix is not positive semidefinite");
  return es.eigenvectors() * ev.cwiseMax(0.0).cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

static Eigen::VectorXd eigs(const Eigen::MatrixXd& a) {
  require(a.rows() == a.cols() && a.rows() > 0, ErrorKind::DimensionMismatch,
          "eigenvalues need a non-empty square matrix");
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(0.5 * (a + a.transpose()),
                                                        Eigen::EigenvaluesOnly)
      .eigenvalues();
}

double min_eigenvalue(const Eigen::MatrixXd& sym) { return eigs(sym).minCoeff(); }
double max_eigenvalue(const Eigen::MatrixXd& sym) { return eigs(sym).maxCoeff(); }

}  // namespace lpvdd
