#include "lpvdd/core/data_matrices.hpp"

#include <Eigen/SVD>
#include <Eigen/Eigenvalues>
#include <limits>

#include "lpvdd/core/error.hpp"
#include "lpvdd/core/kron.hpp"

namespace lpvdd {

DataMatrices build_data_matrices(const DataDictionary& d) {
  DataMatrices m;
  m.dims = d.dims();
  const auto [nu, np, nx, nd] = m.dims;
  m.u = d.u().leftCols(nd);
  m.x = d.x().leftCols(nd);
  m.xnext = d.x().middleCols(1, nd);
  m.up.resize(np * nu, nd);
  m.xp.resize(np * nx, nd);
  for (int k = 0; k < nd; ++k) {
    const Eigen::VectorXd p = d.p().col(k);
    m.up.col(k) = kron(p, Eigen::VectorXd(d.u().col(k)));
    m.xp.col(k) = kron(p, Eigen::VectorXd(d.x().col(k)));
  }
  m.g.resize(m.dims.required_rank(), nd);
  m.g << m.x, m.xp, m.u, m.up;
  return m;
}

PeReport pe_check(const DataMatrices& m, double rank_tol) {
  PeReport r;
  r.required_rank = m.dims.required_rank();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m.g);
  r.singular_values = svd.singularValues();
  const double smax = r.singular_values.size() ? r.singular_values(0) : 0.0;
  for (Eigen::Index i = 0; i < r.singular_values.size(); ++i)
    if (smax > 0.0 && r.singular_values(i) > rank_tol * smax) ++r.rank;
  r.is_pe = r.rank == r.required_rank;
  if (r.singular_values.size() >= r.required_rank &&
      r.singular_values(r.required_rank - 1) > rank_tol * smax && smax > 0.0)
    r.condition_number = smax / r.singular_values(r.required_rank - 1);
  else
    r.condition_number = std::numeric_limits<double>::infinity();
  return r;
}

Eigen::MatrixXd min_norm_solve(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                               double rank_tol) {
  require(a.rows() == b.rows(), ErrorKind::DimensionMismatch,
          "least-squares operands have different row counts");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double cut = s.size() ? rank_tol * s(0) : 0.0;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cut && s(i) > 0.0) inv(i) = 1.0 / s(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose() * b;
}

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& a, double rank_tol) {
  return min_norm_solve(a, Eigen::MatrixXd::Identity(a.rows(), a.rows()), rank_tol);
}

DataDrivenModel::DataDrivenModel(const DataMatrices& m, double rank_tol)
    : dims_(m.dims) {
  const PeReport pe = pe_check(m, rank_tol);
  require(pe.is_pe, ErrorKind::IllPosed,
          "dictionary is not persistently exciting (rank " + std::to_string(pe.rank) +
              " of " + std::to_string(pe.required_rank) + ")");
  theta_ = m.xnext * pseudo_inverse(m.g, rank_tol);
}

Eigen::VectorXd DataDrivenModel::step(const Eigen::VectorXd& x, const Eigen::VectorXd& p,
                                      const Eigen::VectorXd& u) const {
  require(x.size() == dims_.nx && p.size() == dims_.np && u.size() == dims_.nu,
          ErrorKind::DimensionMismatch, "query dimensions do not match the dictionary");
  Eigen::VectorXd z(dims_.required_rank());
  z << x, kron(p, x), u, kron(p, u);
  return theta_ * z;
}

Eigen::VectorXd dd_open_loop_step(const DataMatrices& m, const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& p, const Eigen::VectorXd& u) {
  return DataDrivenModel(m).step(x, p, u);
}

Eigen::VectorXd lpv_step(const AffineMatrixFunction& a, const AffineMatrixFunction& b,
                         const Eigen::VectorXd& x, const Eigen::VectorXd& p,
                         const Eigen::VectorXd& u) {
  require(a.rows() == a.cols() && a.rows() == x.size() && b.rows() == x.size() &&
              b.cols() == u.size() && a.np() == b.np(),
          ErrorKind::DimensionMismatch, "LPV model dimensions do not match");
  return a(p) * x + b(p) * u;
}

Eigen::MatrixXd closed_loop_matrix(const AffineMatrixFunction& a,
                                   const AffineMatrixFunction& b,
                                   const ControllerGains& k) {
  const int nx = static_cast<int>(a.rows());
  const int np = a.np();
  require(b.np() == np && k.np() == np && b.rows() == nx && k.nx() == nx &&
              k.nu() == b.cols(),
          ErrorKind::DimensionMismatch, "closed-loop operands do not match");
  const Eigen::MatrixXd bbar = b.stacked_bar();
  Eigen::MatrixXd out(nx, nx * (1 + np + np * np));
  out.leftCols(nx) = a.coeff(0) + b.coeff(0) * k.k0;
  out.middleCols(nx, nx * np) =
      a.stacked_bar() + b.coeff(0) * k.kbar + bbar * blkdiag_repeat(np, k.k0);
  out.rightCols(nx * np * np) = bbar * blkdiag_repeat(np, k.kbar);
  return out;
}

Eigen::MatrixXd consistency_matrix(const ControllerGains& k) {
  const int nx = k.nx(), nu = k.nu(), np = k.np();
  Eigen::MatrixXd out =
      Eigen::MatrixXd::Zero((1 + np) * (nx + nu), nx * (1 + np + np * np));
  out.topLeftCorner(nx * (1 + np), nx * (1 + np)).setIdentity();
  const int r = nx * (1 + np);
  out.block(r, 0, nu, nx) = k.k0;
  out.block(r, nx, nu, nx * np) = k.kbar;
  out.block(r + nu, nx, nu * np, nx * np) = blkdiag_repeat(np, k.k0);
  out.block(r + nu, nx * (1 + np), nu * np, nx * np * np) = blkdiag_repeat(np, k.kbar);
  return out;
}

ClosedLoopMap dd_closed_loop_map(const DataMatrices& m, const ControllerGains& k,
                                 double rank_tol) {
  require(k.nx() == m.dims.nx && k.nu() == m.dims.nu && k.np() == m.dims.np,
          ErrorKind::DimensionMismatch, "gains do not match the dictionary");
  const Eigen::MatrixXd mcl = consistency_matrix(k);
  ClosedLoopMap out;
  out.v = min_norm_solve(m.g, mcl, rank_tol);
  out.residual = (m.g * out.v - mcl).norm();
  require(out.residual <= 1e-6 * mcl.norm(), ErrorKind::Consistency,
          "G V = M_CL has no solution (residual " + std::to_string(out.residual) + ")");
  return out;
}

double spectral_radius(const Eigen::MatrixXd& a) {
  require(a.rows() == a.cols(), ErrorKind::DimensionMismatch,
          "spectral radius needs a square matrix");
  if (a.size() == 0) return 0.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace lpvdd
