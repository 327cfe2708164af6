#include "lpvdd/core/kron.hpp"

namespace lpvdd {

Eigen::VectorXd kron(const Eigen::VectorXd& p, const Eigen::VectorXd& v) {
  Eigen::VectorXd out(p.size() * v.size());
  for (Eigen::Index i = 0; i < p.size(); ++i)
    out.segment(i * v.size(), v.size()) = p(i) * v;
  return out;
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Eigen::MatrixXd blkdiag_repeat(int n, const Eigen::MatrixXd& m) {
  return kron(Eigen::MatrixXd::Identity(n, n), m);
}

Eigen::VectorXd lift(const Eigen::VectorXd& v, const Eigen::VectorXd& p) {
  Eigen::VectorXd out(v.size() * (1 + p.size()));
  out << v, kron(p, v);
  return out;
}

Eigen::MatrixXd lift_operator(int n, const Eigen::VectorXd& p) {
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd out(n * (1 + p.size()), n);
  out << eye, kron(Eigen::MatrixXd(p), eye);
  return out;
}

Eigen::MatrixXd lift_operator2(int n, const Eigen::VectorXd& p) {
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd pm = p;
  Eigen::MatrixXd out(n * (1 + p.size() + p.size() * p.size()), n);
  out << eye, kron(pm, eye), kron(kron(pm, pm), eye);
  return out;
}

}  // namespace lpvdd
