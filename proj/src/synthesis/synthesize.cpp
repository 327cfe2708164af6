#include <Eigen/SVD>
#include <algorithm>
#include <functional>
#include <limits>
#include <random>

#include "lpvdd/core/error.hpp"
#include "lpvdd/core/io.hpp"
#include "lpvdd/core/kron.hpp"
#include "lpvdd/core/linalg.hpp"
#include "lpvdd/synthesis/synthesis.hpp"

namespace lpvdd::synthesis {

DataMatrices SynthesisResult::data() const { return build_data_matrices(map.apply(dictionary)); }

ControllerGains recover_gains(const Eigen::MatrixXd& z, const Eigen::MatrixXd& y, int np,
                              double* residual) {
  const Eigen::Index nx = z.rows();
  require(z.cols() == nx && y.cols() == nx * (1 + np), ErrorKind::DimensionMismatch,
          "Y must be n_u x n_x(1+n_p) for an n_x x n_x Z");
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(z);
  const auto& s = svd.singularValues();
  require(s(0) > 0.0 && s(nx - 1) > 1e-9 * s(0), ErrorKind::IllPosed,
          "certificate Z is singular; gains cannot be recovered");
  const Eigen::MatrixXd zi = z.inverse();
  ControllerGains k;
  k.k0 = y.leftCols(nx) * zi;
  k.kbar = Eigen::MatrixXd(y.rows(), nx * np);
  for (int i = 0; i < np; ++i) k.kbar.middleCols(i * nx, nx) = y.middleCols((1 + i) * nx, nx) * zi;
  if (residual) {
    double r = 0.0;
    for (int i = 0; i <= np; ++i) {
      const Eigen::MatrixXd yi = y.middleCols(i * nx, nx);
      const Eigen::MatrixXd ki = i == 0 ? k.k0 : k.block(i);
      r = std::max(r, (yi - ki * z).norm() / std::max(1.0, yi.norm()));
    }
    *residual = r;
  }
  return k;
}

static Certificate extract(const SynthesisProgram& sp, const sdp::Solution& s) {
  Certificate c;
  c.z = s.value(sp.z);
  c.y = s.value(sp.y);
  c.fq = s.value(sp.fq);
  c.xi = s.value(sp.xi);
  if (sp.gamma) c.gamma = s.value(*sp.gamma)(0, 0);
  return c;
}

SynthesisResult synthesize(ProgramKind kind, const DataDictionary& d, const Weights& w,
                           const SynthesisOptions& opt) {
  const Dims dims = d.dims();
  require(dims.np >= 1, ErrorKind::DimensionMismatch, "synthesis needs n_p >= 1");
  SynthesisResult r;
  r.kind = kind;
  r.dims = dims;
  r.weights = w;
  r.dictionary = d;
  r.dictionary_hash = dictionary_hash(d);
  r.rescaled = opt.rescale;
  r.map = opt.rescale ? rescale_scheduling(d.box()) : SchedulingMap::identity(dims.np);
  r.box = r.map.apply(d.box());
  r.projected = opt.project_successor;
  const DataMatrices m = r.data();

  SynthesisOptions o = opt;
  SynthesisProgram sp = build_program(kind, m, w, r.box, o);
  sdp::Solution sol = sdp::solve(sp.program, o.solve);
  if (sol.status == sdp::SolveStatus::Infeasible && o.triage) {
    const std::string first = sol.worst_lmi;
    o.margin = opt.margin / 10.0;
    sp = build_program(kind, m, w, r.box, o);
    sol = sdp::solve(sp.program, o.solve);
    if (sol.status == sdp::SolveStatus::Optimal)
      r.notes.push_back("feasible only after relaxing the margin to " + format_double(o.margin));
    else if (sol.status == sdp::SolveStatus::Infeasible)
      fail(ErrorKind::Infeasible,
           std::string("synthesis program infeasible (also with margin ") +
               format_double(o.margin) + "); most violated constraint: " +
               (sol.worst_lmi.empty() ? first : sol.worst_lmi));
  }
  if (sol.status == sdp::SolveStatus::Infeasible)
    fail(ErrorKind::Infeasible,
         "synthesis program infeasible; most violated constraint: " + sol.worst_lmi);
  if (sol.status != sdp::SolveStatus::Optimal)
    fail(ErrorKind::NumericalFailure, "SDP solver failed: " + sol.message);

  r.status = sol.status;
  r.objective = sol.objective;
  r.lmi_residual = sol.lmi_residual;
  r.equality_residual = sol.equality_residual;
  r.iterations = sol.iterations;
  r.solver = sol.solver;
  r.margin = o.margin;
  r.certificate = extract(sp, sol);
  r.gains = recover_gains(r.certificate.z, r.certificate.y, dims.np, &r.gain_residual);
  if (kind == ProgramKind::L2Gain)
    r.notes.push_back("certified L2 gain bound " + format_double(r.certificate.gamma));
  return r;
}

static FrozenStability scan(const ScheduleBox& box, int grid_n,
                            const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& acl) {
  require(grid_n >= 2, ErrorKind::InvalidArgument, "grid needs at least two points per axis");
  FrozenStability f;
  f.degenerate_box = box.degenerate();
  for (const Eigen::VectorXd& p : box.grid(grid_n)) {
    const double rho = spectral_radius(acl(p));
    f.grid.emplace_back(p, rho);
    if (f.worst_p.size() == 0 || rho > f.max_radius) {
      f.max_radius = rho;
      f.worst_p = p;
    }
  }
  f.stable = f.max_radius < 1.0;
  return f;
}

FrozenStability certify_closed_loop(const AffineMatrixFunction& a, const AffineMatrixFunction& b,
                                    const ControllerGains& k, const ScheduleBox& box,
                                    int grid_n) {
  require(a.np() == box.dim() && b.np() == box.dim() && k.np() == box.dim(),
          ErrorKind::DimensionMismatch, "model, gains and box disagree on n_p");
  return scan(box, grid_n,
              [&](const Eigen::VectorXd& p) { return Eigen::MatrixXd(a(p) + b(p) * k(p)); });
}

FrozenStability certify_closed_loop(const DataMatrices& m, const ControllerGains& k,
                                    const ScheduleBox& box, int grid_n) {
  require(m.dims.np == box.dim(), ErrorKind::DimensionMismatch, "data and box disagree on n_p");
  const Eigen::MatrixXd v = dd_closed_loop_map(m, k).v;
  const Eigen::MatrixXd xv = m.xnext * v;
  return scan(box, grid_n, [&](const Eigen::VectorXd& p) {
    return Eigen::MatrixXd(xv * lift_operator2(m.dims.nx, p));
  });
}

// Performance block of the certificate, assembled directly from its definition.
static Eigen::MatrixXd performance_block(const SynthesisResult& r, const Eigen::MatrixXd& succ) {
  const Dims d = r.dims;
  const int nx = d.nx, nu = d.nu, n1 = nx * (1 + d.np);
  const Certificate& c = r.certificate;
  Eigen::MatrixXd z0 = Eigen::MatrixXd::Zero(n1, n1);
  z0.topLeftCorner(nx, nx) = c.z;
  const Eigen::MatrixXd w21 = blkdiag_repeat(1 + d.np, succ) * c.fq;
  const bool qp = r.kind == ProgramKind::QuadraticPerformance;
  const Eigen::MatrixXd sx = psd_sqrt(qp ? r.weights.qp.q : r.weights.l2.ws);
  const Eigen::MatrixXd su = psd_sqrt(qp ? r.weights.qp.r : r.weights.l2.wr);
  const int n = 2 * n1 + nx + nu + (qp ? 0 : nx);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  w.block(0, 0, n1, n1) = z0;
  w.block(n1, n1, n1, n1) = z0;
  w.block(n1, 0, n1, n1) = w21;
  w.block(2 * n1, 0, nx, nx) = sx * c.z;
  w.block(2 * n1 + nx, 0, nu, n1) = su * c.y;
  const double g = qp ? 1.0 : c.gamma;
  w.block(2 * n1, 2 * n1, nx + nu, nx + nu) = g * Eigen::MatrixXd::Identity(nx + nu, nx + nu);
  if (!qp) {
    w.block(2 * n1 + nx + nu, n1, nx, nx).setIdentity();
    w.block(2 * n1 + nx + nu, 2 * n1 + nx + nu, nx, nx) = g * Eigen::MatrixXd::Identity(nx, nx);
  }
  return w.selfadjointView<Eigen::Lower>();
}

VerificationReport verify_certificate(const SynthesisResult& r, double tol, int interior_points,
                                      std::uint64_t seed) {
  const Dims d = r.dims;
  const int nx = d.nx;
  const Certificate& c = r.certificate;
  const DataMatrices m = r.data();
  VerificationReport v;

  const Eigen::MatrixXd succ =
      r.projected ? Eigen::MatrixXd(m.xnext * pseudo_inverse(m.g) * m.g) : m.xnext;
  const Eigen::MatrixXd w = performance_block(r, succ);
  const LftBlocks lft = lft_blocks(d, r.kind);
  const Eigen::MatrixXd r1 = lft.r1(), r2 = lft.r2();
  v.main_lmi_min = min_eigenvalue(r1.transpose() * c.xi * r1 + r2.transpose() * w * r2);

  auto form = [&](const Eigen::VectorXd& p) {
    Eigen::MatrixXd g(2 * lft.nw, lft.nw);
    g << Eigen::MatrixXd::Identity(lft.nw, lft.nw), delta(p, nx);
    return max_eigenvalue(g.transpose() * c.xi * g);
  };
  v.vertex_max = -std::numeric_limits<double>::infinity();
  for (const Eigen::VectorXd& p : r.box.vertices()) v.vertex_max = std::max(v.vertex_max, form(p));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  v.interior_max = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < interior_points; ++k) {
    Eigen::VectorXd p(d.np);
    for (int i = 0; i < d.np; ++i)
      p(i) = r.box.lower()(i) + unit(rng) * (r.box.upper()(i) - r.box.lower()(i));
    v.interior_max = std::max(v.interior_max, form(p));
  }
  v.xi22_min = min_eigenvalue(c.xi.bottomRightCorner(lft.nw, lft.nw));
  v.z_min = min_eigenvalue(c.z);

  const Eigen::MatrixXd big = expand_fq(c.fq, d);
  const Eigen::MatrixXd lhs = m.g * big;
  v.equality_fro = (lhs - blocked_certificate(c.z, c.y, d)).norm();
  for (int i = 0; i <= d.np; ++i) {
    const Eigen::MatrixXd yi = c.y.middleCols(i * nx, nx);
    const Eigen::MatrixXd ki = i == 0 ? r.gains.k0 : r.gains.block(i);
    v.gain_residual = std::max(v.gain_residual, (yi - ki * c.z).norm() / std::max(1.0, yi.norm()));
  }

  const double scale = std::max(1.0, c.fq.norm());
  v.fq_identity = 0.0;
  for (int k = 0; k < 20; ++k) {
    Eigen::VectorXd p(d.np);
    for (int i = 0; i < d.np; ++i) p(i) = 2.0 * unit(rng) - 1.0;
    const Eigen::MatrixXd a = big * lift_operator2(nx, p);
    const Eigen::MatrixXd b =
        lift_operator(d.nd, p).transpose() * c.fq * lift_operator(nx, p);
    v.fq_identity = std::max(v.fq_identity, (a - b).norm() / scale);
  }

  const double margin_tol = r.margin - tol;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok) v.failures.push_back(what);
  };
  check(v.main_lmi_min >= margin_tol, "performance LMI below margin: " + format_double(v.main_lmi_min));
  check(v.vertex_max <= tol, "multiplier vertex condition violated: " + format_double(v.vertex_max));
  check(v.interior_max <= tol, "multiplier condition violated inside the box: " +
                                    format_double(v.interior_max));
  check(v.xi22_min >= margin_tol, "Xi22 not positive: " + format_double(v.xi22_min));
  check(v.z_min > 0.0, "Z not positive definite: " + format_double(v.z_min));
  if (r.kind == ProgramKind::L2Gain) check(c.gamma >= margin_tol, "gamma not positive");
  const double eq_scale = std::max(1.0, lhs.norm());
  check(v.equality_fro <= tol * eq_scale,
        "data consistency residual " + format_double(v.equality_fro));
  check(v.gain_residual <= 1e-10, "gain recovery residual " + format_double(v.gain_residual));
  check(v.fq_identity <= 1e-12, "F_Q expansion mismatch " + format_double(v.fq_identity));
  v.passed = v.failures.empty();
  return v;
}

}  // namespace lpvdd::synthesis
