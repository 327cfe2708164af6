#include <algorithm>

#include "lpvdd/core/error.hpp"
#include "lpvdd/core/kron.hpp"
#include "lpvdd/core/linalg.hpp"
#include "lpvdd/synthesis/synthesis.hpp"

namespace lpvdd::synthesis {

using sdp::AffineMatrixExpr;
using sdp::BlockBuilder;
using sdp::MatrixVariable;
using sdp::Sense;

const char* to_string(ProgramKind k) {
  return k == ProgramKind::QuadraticPerformance ? "qp" : "l2";
}

ProgramKind kind_from_string(const std::string& s) {
  if (s == "qp") return ProgramKind::QuadraticPerformance;
  if (s == "l2") return ProgramKind::L2Gain;
  fail(ErrorKind::Config, "unknown synthesis kind '" + s + "' (expected qp or l2)");
}

static void check_weight(const Eigen::MatrixXd& w, int n, bool definite, const char* what) {
  require(w.rows() == n && w.cols() == n, ErrorKind::DimensionMismatch,
          std::string(what) + " must be " + std::to_string(n) + "x" + std::to_string(n));
  require(w.allFinite() && (w - w.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * (1 + w.norm()),
          ErrorKind::InvalidArgument, std::string(what) + " must be finite and symmetric");
  const double lmin = min_eigenvalue(w);
  if (definite)
    require(lmin > 0.0, ErrorKind::InvalidArgument, std::string(what) + " must be positive definite");
  else
    require(lmin >= -1e-12 * std::max(1.0, w.norm()), ErrorKind::InvalidArgument,
            std::string(what) + " must be positive semidefinite");
}

void QuadraticWeights::validate(int nx, int nu) const {
  check_weight(q, nx, false, "Q");
  check_weight(r, nu, true, "R");
}

void L2Weights::validate(int nx, int nu) const {
  check_weight(ws, nx, false, "W_S");
  check_weight(wr, nu, true, "W_R");
  require(lambda >= 0.0 && std::isfinite(lambda), ErrorKind::InvalidArgument,
          "lambda must be non-negative");
}

Weights Weights::disc_defaults() {
  Weights w;
  w.qp.q = Eigen::Vector2d(4.0, 0.1).asDiagonal();
  w.qp.r = Eigen::MatrixXd::Constant(1, 1, 3.5);
  w.l2.ws = Eigen::Vector2d(1.5e-2, 2e-5).asDiagonal();
  w.l2.wr = Eigen::MatrixXd::Constant(1, 1, 3.06e-3);
  w.l2.lambda = 1e-6;
  return w;
}

Eigen::MatrixXd LftBlocks::r1() const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(2 * nw, nw + l12.cols());
  out.topLeftCorner(nw, nw) = l11;
  out.topRightCorner(nw, l12.cols()) = l12;
  out.bottomLeftCorner(nw, nw).setIdentity();
  return out;
}

Eigen::MatrixXd LftBlocks::r2() const {
  Eigen::MatrixXd out(l21.rows(), l21.cols() + l22.cols());
  out << l21, l22;
  return out;
}

LftBlocks lft_blocks(const Dims& d, ProgramKind kind) {
  require(d.nx > 0 && d.nu > 0 && d.np > 0, ErrorKind::DimensionMismatch,
          "synthesis needs n_x, n_u, n_p >= 1");
  const int nx = d.nx, np = d.np;
  LftBlocks b;
  b.nw = 2 * nx * np;
  b.ne = kind == ProgramKind::QuadraticPerformance ? nx + d.nu : 2 * nx + d.nu;
  const int dim_w = 2 * nx * (1 + np) + b.ne;
  const int c2 = 2 * nx + b.ne;
  Eigen::MatrixXd g1 = Eigen::MatrixXd::Zero(nx, 2 * nx), g2 = g1;
  g1.leftCols(nx).setIdentity();
  g2.rightCols(nx).setIdentity();

  b.l11 = Eigen::MatrixXd::Zero(b.nw, b.nw);
  b.l12 = Eigen::MatrixXd::Zero(b.nw, c2);
  for (int i = 0; i < np; ++i) b.l12.block(2 * nx * i, 0, 2 * nx, 2 * nx).setIdentity();

  const int second = nx * (1 + np);  // start of the second Π block
  b.l21 = Eigen::MatrixXd::Zero(dim_w, b.nw);
  for (int i = 0; i < np; ++i) {
    b.l21.block(nx + nx * i, 2 * nx * i, nx, 2 * nx) = g1;
    b.l21.block(second + nx + nx * i, 2 * nx * i, nx, 2 * nx) = g2;
  }
  b.l22 = Eigen::MatrixXd::Zero(dim_w, c2);
  b.l22.block(0, 0, nx, 2 * nx) = g1;
  b.l22.block(second, 0, nx, 2 * nx) = g2;
  b.l22.block(2 * second, 2 * nx, b.ne, b.ne).setIdentity();
  return b;
}

Eigen::MatrixXd delta(const Eigen::VectorXd& p, int nx) {
  return kron(Eigen::MatrixXd(p.asDiagonal()), Eigen::MatrixXd::Identity(2 * nx, 2 * nx));
}

static void check_fq_shape(Eigen::Index rows, Eigen::Index cols, const Dims& d) {
  require(rows == d.nd * (1 + d.np) && cols == d.nx * (1 + d.np), ErrorKind::DimensionMismatch,
          "F_Q must be N_d(1+n_p) x n_x(1+n_p)");
}

// Column offset of block (i, j) of F_Q inside 𝓕.
static int fq_target(int i, int j, const Dims& d) {
  if (i == 0 && j == 0) return 0;
  if (i == 0 || j == 0) return d.nx * std::max(i, j);
  return d.nx * (1 + d.np + (i - 1) * d.np + (j - 1));
}

Eigen::MatrixXd expand_fq(const Eigen::MatrixXd& fq, const Dims& d) {
  check_fq_shape(fq.rows(), fq.cols(), d);
  const int np = d.np, nx = d.nx, nd = d.nd;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(nd, nx * (1 + np + np * np));
  for (int i = 0; i <= np; ++i)
    for (int j = 0; j <= np; ++j)
      out.middleCols(fq_target(i, j, d), nx) += fq.block(i * nd, j * nx, nd, nx);
  return out;
}

AffineMatrixExpr expand_fq(const MatrixVariable& fq, const Dims& d) {
  check_fq_shape(fq.rows, fq.cols, d);
  const int np = d.np, nx = d.nx, nd = d.nd;
  const int width = nx * (1 + np + np * np);
  AffineMatrixExpr out(nd, width);
  for (int i = 0; i <= np; ++i)
    for (int j = 0; j <= np; ++j) {
      Eigen::MatrixXd l = Eigen::MatrixXd::Zero(nd, nd * (1 + np));
      l.middleCols(i * nd, nd).setIdentity();
      Eigen::MatrixXd r = Eigen::MatrixXd::Zero(nx * (1 + np), width);
      r.block(j * nx, fq_target(i, j, d), nx, nx).setIdentity();
      out.add_term(l, fq, r);
    }
  return out;
}

Eigen::MatrixXd blocked_certificate(const Eigen::MatrixXd& z, const Eigen::MatrixXd& y,
                                    const Dims& d) {
  const int nx = d.nx, nu = d.nu, np = d.np;
  const Eigen::MatrixXd y0 = y.leftCols(nx), ybar = y.rightCols(nx * np);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d.required_rank(), nx * (1 + np + np * np));
  out.topLeftCorner(nx, nx) = z;
  out.block(nx, nx, nx * np, nx * np) = blkdiag_repeat(np, z);
  const int r = nx * (1 + np);
  out.block(r, 0, nu, nx) = y0;
  out.block(r, nx, nu, nx * np) = ybar;
  out.block(r + nu, nx, nu * np, nx * np) = blkdiag_repeat(np, y0);
  out.block(r + nu, nx * (1 + np), nu * np, nx * np * np) = blkdiag_repeat(np, ybar);
  return out;
}

static AffineMatrixExpr blocked_certificate(const MatrixVariable& z, const MatrixVariable& y,
                                            const Dims& d) {
  const int nx = d.nx, nu = d.nu, np = d.np;
  Eigen::MatrixXd s0 = Eigen::MatrixXd::Zero(nx * (1 + np), nx);
  s0.topRows(nx).setIdentity();
  Eigen::MatrixXd sbar = Eigen::MatrixXd::Zero(nx * (1 + np), nx * np);
  sbar.bottomRows(nx * np).setIdentity();
  const AffineMatrixExpr y0 = AffineMatrixExpr(y) * s0;
  const AffineMatrixExpr ybar = AffineMatrixExpr(y) * sbar;
  BlockBuilder b({nx, nx * np, nu, nu * np}, {nx, nx * np, nx * np * np});
  b.set(0, 0, z);
  b.set(1, 1, sdp::kron_identity(np, z));
  b.set(2, 0, y0);
  b.set(2, 1, ybar);
  b.set(3, 1, sdp::kron_identity(np, y0));
  b.set(3, 2, sdp::kron_identity(np, ybar));
  return b.build();
}

SynthesisProgram build_program(ProgramKind kind, const DataMatrices& m, const Weights& w,
                               const ScheduleBox& box, const SynthesisOptions& opt) {
  const Dims d = m.dims;
  const PeReport pe = pe_check(m, opt.rank_tol);
  require(pe.is_pe, ErrorKind::IllPosed,
          "dictionary is not persistently exciting (rank " + std::to_string(pe.rank) + " of " +
              std::to_string(pe.required_rank) + ")");
  require(box.dim() == d.np, ErrorKind::DimensionMismatch,
          "schedule box dimension does not match the data");
  const bool qp = kind == ProgramKind::QuadraticPerformance;
  if (qp)
    w.qp.validate(d.nx, d.nu);
  else
    w.l2.validate(d.nx, d.nu);
  const int nx = d.nx, nu = d.nu, np = d.np, nd = d.nd;
  const int n1 = nx * (1 + np);
  const LftBlocks lft = lft_blocks(d, kind);

  SynthesisProgram sp;
  sp.kind = kind;
  sp.dims = d;
  auto& prog = sp.program;
  sp.z = prog.add_symmetric(nx, "Z");
  sp.y = prog.add_variable(nu, n1, false, "Y");
  sp.fq = prog.add_variable(nd * (1 + np), n1, false, "F_Q");
  sp.xi = prog.add_symmetric(2 * lft.nw, "Xi");
  if (!qp) sp.gamma = prog.add_symmetric(1, "gamma");

  sp.successor = opt.project_successor
                     ? Eigen::MatrixXd(m.xnext * pseudo_inverse(m.g, opt.rank_tol) * m.g)
                     : m.xnext;

  Eigen::MatrixXd e0 = Eigen::MatrixXd::Zero(n1, nx);
  e0.topRows(nx).setIdentity();
  const AffineMatrixExpr z0 = e0 * AffineMatrixExpr(sp.z) * e0.transpose();
  const Eigen::MatrixXd xcal = blkdiag_repeat(1 + np, sp.successor);
  const AffineMatrixExpr xfq = xcal * AffineMatrixExpr(sp.fq);

  AffineMatrixExpr wexpr;
  if (qp) {
    BlockBuilder b({n1, n1, nx, nu});
    b.set(0, 0, z0);
    b.set_sym(1, 0, xfq);
    b.set(1, 1, z0);
    b.set_sym(2, 0, psd_sqrt(w.qp.q) * AffineMatrixExpr(sp.z) * e0.transpose());
    b.set_sym(3, 0, psd_sqrt(w.qp.r) * AffineMatrixExpr(sp.y));
    b.set(2, 2, AffineMatrixExpr(Eigen::MatrixXd(Eigen::MatrixXd::Identity(nx, nx))));
    b.set(3, 3, AffineMatrixExpr(Eigen::MatrixXd(Eigen::MatrixXd::Identity(nu, nu))));
    wexpr = b.build();
  } else {
    BlockBuilder b({n1, n1, nx, nu, nx});
    b.set(0, 0, z0);
    b.set_sym(1, 0, xfq);
    b.set(1, 1, z0);
    b.set_sym(2, 0, psd_sqrt(w.l2.ws) * AffineMatrixExpr(sp.z) * e0.transpose());
    b.set_sym(3, 0, psd_sqrt(w.l2.wr) * AffineMatrixExpr(sp.y));
    b.set_sym(4, 1, AffineMatrixExpr(Eigen::MatrixXd(e0.transpose())));
    b.set(2, 2, sdp::scaled_identity(*sp.gamma, nx));
    b.set(3, 3, sdp::scaled_identity(*sp.gamma, nu));
    b.set(4, 4, sdp::scaled_identity(*sp.gamma, nx));
    wexpr = b.build();
  }
  require(wexpr.rows() == lft.l21.rows(), ErrorKind::DimensionMismatch,
          "performance block does not match the outer factor");

  const AffineMatrixExpr main =
      AffineMatrixExpr(sp.xi).congruence(lft.r1()) + wexpr.congruence(lft.r2());
  prog.add_lmi(main, Sense::PosDef, "performance", opt.margin);

  int v = 0;
  for (const Eigen::VectorXd& p : box.vertices()) {
    Eigen::MatrixXd g(2 * lft.nw, lft.nw);
    g << Eigen::MatrixXd::Identity(lft.nw, lft.nw), delta(p, nx);
    prog.add_lmi(AffineMatrixExpr(sp.xi).congruence(g), Sense::NegSemidef,
                 "multiplier vertex " + std::to_string(++v));
  }
  Eigen::MatrixXd s22 = Eigen::MatrixXd::Zero(2 * lft.nw, lft.nw);
  s22.bottomRows(lft.nw).setIdentity();
  prog.add_lmi(AffineMatrixExpr(sp.xi).congruence(s22), Sense::PosDef, "multiplier Xi22",
               opt.margin);
  if (!qp) {
    prog.add_lmi(AffineMatrixExpr(sp.z), Sense::PosDef, "Z positive", opt.margin);
    prog.add_lmi(AffineMatrixExpr(*sp.gamma), Sense::PosDef, "gamma positive", opt.margin);
  }

  prog.add_equality(m.g * expand_fq(sp.fq, d) - blocked_certificate(sp.z, sp.y, d),
                    "data consistency");

  if (qp) {
    prog.add_objective(sp.z, Eigen::MatrixXd::Identity(nx, nx));
  } else {
    prog.add_objective(*sp.gamma, Eigen::MatrixXd::Ones(1, 1));
    if (w.l2.lambda > 0.0)
      prog.add_objective(sp.z, w.l2.lambda * Eigen::MatrixXd::Identity(nx, nx));
  }
  return sp;
}

}  // namespace lpvdd::synthesis
