// Primal-dual path-following solver for the LMI form
//   min c'z  s.t.  F_k(z) = F0_k + sum_i z_i F_ik ⪰ 0,
// paired with the multiplier problem
//   max -sum_k <F0_k, X_k>  s.t.  sum_k <F_ik, X_k> = c_i,  X_k ⪰ 0.
// HKM search direction with a Mehrotra predictor-corrector step. Linear
// algebra in the iteration runs in long double; the problems we feed it are
// small and badly conditioned near the optimum.

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>

#include "lpvdd/core/error.hpp"
#include "lpvdd/core/io.hpp"
#include "lpvdd/sdp/solver.hpp"
#include "lpvdd/sdp/svec.hpp"

namespace lpvdd::sdp {

namespace {

using Real = long double;
using MatR = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using VecR = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

struct LmiData {
  int m = 0;
  VecR c;
  std::vector<MatR> f0;
  std::vector<std::vector<std::pair<int, MatR>>> f;  // nonzero F_ik per block
};

enum class Exit { Converged, Stalled, MaxIterations, PrimalDiverged, DualDiverged, Stopped };

struct Iterate {
  VecR z;
  std::vector<MatR> x, s;
};

struct IpmReport {
  Exit exit = Exit::MaxIterations;
  Iterate it;
  int iterations = 0;
  Real pobj = 0, dobj = 0, relgap = 0, pinf = 0, dinf = 0;
};

using StopFn = std::function<bool(const VecR& z, Real dinf)>;

Real inner(const MatR& a, const MatR& b) { return a.cwiseProduct(b).sum(); }

MatR sym(const MatR& a) { return (a + a.transpose()) / Real(2); }

// Largest alpha with x + alpha*dx ⪰ 0 (infinity if unbounded, 0 if x is not PD).
Real max_step(const MatR& x, const MatR& dx) {
  Eigen::LLT<MatR> llt(x);
  if (llt.info() != Eigen::Success) return 0;
  const MatR l = llt.matrixL();
  MatR t = l.template triangularView<Eigen::Lower>().solve(dx);
  t = l.template triangularView<Eigen::Lower>().solve(t.transpose().eval()).transpose();
  Eigen::SelfAdjointEigenSolver<MatR> es(sym(t), Eigen::EigenvaluesOnly);
  const Real lmin = es.eigenvalues().minCoeff();
  return lmin < 0 ? -Real(1) / lmin : std::numeric_limits<Real>::infinity();
}

class Ipm {
 public:
  Ipm(const LmiData& d, Real feas_tol, Real gap_tol, int max_it, bool verbose)
      : d_(d), feas_tol_(feas_tol), gap_tol_(gap_tol), max_it_(max_it), verbose_(verbose) {
    nb_ = static_cast<int>(d.f0.size());
    for (const auto& b : d.f0) ntot_ += static_cast<int>(b.rows());
  }

  IpmReport run(const StopFn& stop) {
    IpmReport rep;
    Iterate& st = rep.it;
    initial_point(st);
    int slow = 0;
    for (int iter = 0;; ++iter) {
      rep.iterations = iter;
      const VecR rp = d_.c - a_op(st.x);
      std::vector<MatR> rd(nb_);
      Real rdn = 0, f0n = 0;
      for (int k = 0; k < nb_; ++k) {
        rd[k] = f_of(st.z, k) - st.s[k];
        rdn += rd[k].squaredNorm();
        f0n += d_.f0[k].squaredNorm();
      }
      Real xs = 0, f0x = 0;
      for (int k = 0; k < nb_; ++k) {
        xs += inner(st.x[k], st.s[k]);
        f0x += inner(d_.f0[k], st.x[k]);
      }
      const Real mu = xs / ntot_;
      rep.pobj = -f0x;
      rep.dobj = d_.c.dot(st.z);
      rep.relgap = std::abs(rep.dobj - rep.pobj) /
                   std::max({Real(1), std::abs(rep.pobj), std::abs(rep.dobj)});
      rep.pinf = rp.norm() / (1 + d_.c.norm());
      rep.dinf = std::sqrt(rdn) / (1 + std::sqrt(f0n));
      if (verbose_)
        std::fprintf(stderr, "%3d  pobj %+.10Le  dobj %+.10Le  gap %.2Le  pinf %.2Le  dinf %.2Le  mu %.2Le\n",
                     iter, rep.pobj, rep.dobj, rep.relgap, rep.pinf, rep.dinf, mu);

      if (rep.pinf <= feas_tol_ && rep.dinf <= feas_tol_ && rep.relgap <= gap_tol_) {
        rep.exit = Exit::Converged;
        return rep;
      }
      if (stop && stop(st.z, rep.dinf)) {
        rep.exit = Exit::Stopped;
        return rep;
      }
      if (iter >= max_it_) {
        rep.exit = Exit::MaxIterations;
        return rep;
      }
      Real xmax = 0;
      for (const auto& x : st.x) xmax = std::max(xmax, x.cwiseAbs().maxCoeff());
      if (xmax > Real(1e16)) {
        rep.exit = Exit::PrimalDiverged;
        return rep;
      }
      if (st.z.size() && st.z.cwiseAbs().maxCoeff() > Real(1e16)) {
        rep.exit = Exit::DualDiverged;
        return rep;
      }

      // Schur complement M_ij = sum_k tr(F_ik X_k F_jk S_k^-1).
      std::vector<MatR> sinv(nb_);
      for (int k = 0; k < nb_; ++k) {
        Eigen::LLT<MatR> llt(st.s[k]);
        if (llt.info() != Eigen::Success) {
          rep.exit = Exit::Stalled;
          return rep;
        }
        sinv[k] = sym(llt.solve(MatR::Identity(st.s[k].rows(), st.s[k].cols())));
      }
      MatR m = MatR::Zero(d_.m, d_.m);
      for (int k = 0; k < nb_; ++k) {
        const auto& fk = d_.f[k];
        std::vector<MatR> g(fk.size());
        for (std::size_t a = 0; a < fk.size(); ++a) g[a] = st.x[k] * fk[a].second * sinv[k];
        for (std::size_t a = 0; a < fk.size(); ++a)
          for (std::size_t b = 0; b <= a; ++b) {
            const Real v = inner(fk[a].second, g[b]);
            m(fk[a].first, fk[b].first) += v;
            if (a != b) m(fk[b].first, fk[a].first) += v;
          }
      }
      m = sym(m);
      Eigen::LLT<MatR> mllt;
      Real reg = 0;
      const Real dmax = std::max(m.diagonal().cwiseAbs().maxCoeff(), Real(1e-300));
      for (int attempt = 0; attempt < 8; ++attempt) {
        mllt.compute(m + reg * MatR::Identity(d_.m, d_.m));
        if (mllt.info() == Eigen::Success) break;
        reg = reg == 0 ? dmax * Real(1e-18) : reg * 100;
      }
      if (mllt.info() != Eigen::Success) {
        rep.exit = Exit::Stalled;
        return rep;
      }

      auto direction = [&](const std::vector<MatR>& rc, VecR& dz, std::vector<MatR>& dx,
                           std::vector<MatR>& ds) {
        VecR rhs = -rp;
        std::vector<MatR> h(nb_);
        for (int k = 0; k < nb_; ++k) {
          h[k] = (rc[k] - st.x[k] * rd[k]) * sinv[k];
          for (const auto& [i, fi] : d_.f[k]) rhs(i) += inner(fi, h[k]);
        }
        dz = mllt.solve(rhs);
        // One step of iterative refinement on the Schur system.
        dz += mllt.solve(rhs - m * dz);
        dx.resize(nb_);
        ds.resize(nb_);
        for (int k = 0; k < nb_; ++k) {
          ds[k] = rd[k] + astar(dz, k);
          dx[k] = sym((rc[k] - st.x[k] * ds[k]) * sinv[k]);
        }
      };

      std::vector<MatR> rc(nb_);
      for (int k = 0; k < nb_; ++k) rc[k] = -st.x[k] * st.s[k];
      VecR dz;
      std::vector<MatR> dx, ds;
      direction(rc, dz, dx, ds);
      Real ap = 1, ad = 1;
      for (int k = 0; k < nb_; ++k) {
        ap = std::min(ap, max_step(st.x[k], dx[k]));
        ad = std::min(ad, max_step(st.s[k], ds[k]));
      }
      Real xs_aff = 0;
      for (int k = 0; k < nb_; ++k)
        xs_aff += inner(st.x[k] + ap * dx[k], st.s[k] + ad * ds[k]);
      const Real mu_aff = std::max(xs_aff, Real(0)) / ntot_;
      Real sigma = std::pow(mu_aff / mu, Real(3));
      sigma = std::clamp(sigma, Real(0), Real(1));

      for (int k = 0; k < nb_; ++k) {
        rc[k] = sigma * mu * MatR::Identity(st.x[k].rows(), st.x[k].cols()) - st.x[k] * st.s[k] -
                dx[k] * ds[k];
      }
      direction(rc, dz, dx, ds);
      Real apmax = std::numeric_limits<Real>::infinity(), admax = apmax;
      for (int k = 0; k < nb_; ++k) {
        apmax = std::min(apmax, max_step(st.x[k], dx[k]));
        admax = std::min(admax, max_step(st.s[k], ds[k]));
      }
      const Real tau = Real(0.98);
      ap = std::min(Real(1), tau * apmax);
      ad = std::min(Real(1), tau * admax);
      for (int k = 0; k < nb_; ++k) {
        st.x[k] = sym(st.x[k] + ap * dx[k]);
        st.s[k] = sym(st.s[k] + ad * ds[k]);
      }
      st.z += ad * dz;
      // Once the LMI side is feasible, keep S tied to F(z) exactly.
      if (ad == 1) {
        for (int k = 0; k < nb_; ++k) {
          MatR fz = f_of(st.z, k);
          if (Eigen::LLT<MatR>(fz).info() == Eigen::Success) st.s[k] = fz;
        }
      }
      slow = (ap < Real(1e-8) && ad < Real(1e-8)) ? slow + 1 : 0;
      if (slow >= 3) {
        rep.exit = Exit::Stalled;
        rep.iterations = iter + 1;
        return rep;
      }
    }
  }

 private:
  void initial_point(Iterate& st) const {
    st.z = VecR::Zero(d_.m);
    st.x.resize(nb_);
    st.s.resize(nb_);
    for (int k = 0; k < nb_; ++k) {
      const int n = static_cast<int>(d_.f0[k].rows());
      const Real rn = std::sqrt(static_cast<Real>(n));
      Real fmax = d_.f0[k].norm();
      Real xi_x = std::max(Real(10), rn);
      for (const auto& [i, fi] : d_.f[k]) {
        const Real fn = fi.norm();
        fmax = std::max(fmax, fn);
        xi_x = std::max(xi_x, rn * (1 + std::abs(d_.c(i))) / (1 + fn));
      }
      const Real xi_s = std::max({Real(10), rn, fmax});
      st.x[k] = xi_x * MatR::Identity(n, n);
      st.s[k] = xi_s * MatR::Identity(n, n);
    }
  }

  VecR a_op(const std::vector<MatR>& x) const {
    VecR out = VecR::Zero(d_.m);
    for (int k = 0; k < nb_; ++k)
      for (const auto& [i, fi] : d_.f[k]) out(i) += inner(fi, x[k]);
    return out;
  }

  MatR astar(const VecR& z, int k) const {
    MatR out = MatR::Zero(d_.f0[k].rows(), d_.f0[k].cols());
    for (const auto& [i, fi] : d_.f[k]) out += z(i) * fi;
    return out;
  }

  MatR f_of(const VecR& z, int k) const { return d_.f0[k] + astar(z, k); }

  const LmiData& d_;
  Real feas_tol_, gap_tol_;
  int max_it_;
  bool verbose_;
  int nb_ = 0;
  int ntot_ = 0;
};

MatR to_real(const Eigen::MatrixXd& a) { return a.cast<Real>(); }

// Reduction of the standard form to a pure LMI program over a well-scaled
// coordinate vector: x = x0 + T z.
struct Reduced {
  Eigen::VectorXd x0;
  Eigen::MatrixXd t;
  LmiData data;
  double c_scale = 1.0;
  double c_const = 0.0;
  bool objective_in_range = true;
};

Reduced reduce(const StandardForm& sf, double& eq_inconsistency) {
  const int n = sf.n;
  Reduced r;
  Eigen::MatrixXd nullsp;
  r.x0 = Eigen::VectorXd::Zero(n);
  eq_inconsistency = 0.0;
  if (sf.aeq.rows() > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sf.aeq, Eigen::ComputeThinU | Eigen::ComputeFullV);
    const Eigen::VectorXd& s = svd.singularValues();
    const double smax = s.size() ? s(0) : 0.0;
    int rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s(i) > 1e-12 * smax && s(i) > 0) ++rank;
    const Eigen::MatrixXd u = svd.matrixU().leftCols(rank);
    const Eigen::MatrixXd v = svd.matrixV().leftCols(rank);
    r.x0 = v * (u.transpose() * sf.beq).cwiseQuotient(s.head(rank));
    eq_inconsistency = (sf.aeq * r.x0 - sf.beq).norm() / (1.0 + sf.beq.norm());
    nullsp = svd.matrixV().rightCols(n - rank);
  } else {
    nullsp = Eigen::MatrixXd::Identity(n, n);
  }

  Eigen::Index rows = 0;
  for (const auto& b : sf.blocks) rows += b.coeffs.rows();
  Eigen::MatrixXd a(rows, nullsp.cols());
  std::vector<Eigen::VectorXd> c0(sf.blocks.size());
  Eigen::Index row = 0;
  for (std::size_t k = 0; k < sf.blocks.size(); ++k) {
    const auto& b = sf.blocks[k];
    const Eigen::MatrixXd ck = b.coeffs.rightCols(n);
    c0[k] = b.coeffs.col(0) + ck * r.x0;
    a.middleRows(row, ck.rows()) = ck * nullsp;
    row += ck.rows();
  }
  const Eigen::VectorXd c1 = nullsp.transpose() * sf.c;
  r.c_const = sf.c0 + sf.c.dot(r.x0);

  int rank = 0;
  Eigen::MatrixXd ua, va;
  Eigen::VectorXd sa;
  if (a.cols() > 0 && a.rows() > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    sa = svd.singularValues();
    const double smax = sa.size() ? sa(0) : 0.0;
    for (Eigen::Index i = 0; i < sa.size(); ++i)
      if (sa(i) > 1e-11 * smax && sa(i) > 0) ++rank;
    ua = svd.matrixU().leftCols(rank);
    va = svd.matrixV().leftCols(rank);
  }
  // Directions outside the LMI row space leave every constraint unchanged;
  // the objective must not move along them.
  const Eigen::VectorXd c_lmi = rank ? Eigen::VectorXd(va * (va.transpose() * c1)) : Eigen::VectorXd::Zero(c1.size());
  r.objective_in_range = (c1 - c_lmi).norm() <= 1e-9 * (1.0 + c1.norm());

  r.t = rank ? Eigen::MatrixXd(nullsp * va * sa.head(rank).cwiseInverse().asDiagonal())
             : Eigen::MatrixXd(n, 0);
  Eigen::VectorXd c2 = r.t.transpose() * sf.c;
  r.c_scale = c2.norm() > 0 ? c2.norm() : 1.0;
  c2 /= r.c_scale;

  r.data.m = rank;
  r.data.c = c2.cast<Real>();
  row = 0;
  for (std::size_t k = 0; k < sf.blocks.size(); ++k) {
    const auto& b = sf.blocks[k];
    r.data.f0.push_back(to_real(smat(c0[k])));
    std::vector<std::pair<int, MatR>> fk;
    for (int i = 0; i < rank; ++i) {
      const Eigen::VectorXd col = ua.block(row, i, b.coeffs.rows(), 1);
      if (col.cwiseAbs().maxCoeff() > 1e-15) fk.emplace_back(i, to_real(smat(col)));
    }
    r.data.f.push_back(std::move(fk));
    row += b.coeffs.rows();
  }
  return r;
}

// min t  s.t.  F_k(z) + t I ⪰ 0,  t ≥ -1.
LmiData phase_one(const LmiData& d) {
  LmiData p;
  p.m = d.m + 1;
  p.c = VecR::Zero(p.m);
  p.c(d.m) = 1;
  p.f0 = d.f0;
  p.f = d.f;
  for (std::size_t k = 0; k < d.f0.size(); ++k)
    p.f[k].emplace_back(d.m, MatR::Identity(d.f0[k].rows(), d.f0[k].cols()));
  p.f0.push_back(MatR::Ones(1, 1));
  p.f.push_back({{d.m, MatR::Ones(1, 1)}});
  return p;
}

const char* exit_name(Exit e) {
  switch (e) {
    case Exit::Converged: return "converged";
    case Exit::Stalled: return "stalled";
    case Exit::MaxIterations: return "iteration limit";
    case Exit::PrimalDiverged: return "multiplier iterates diverged";
    case Exit::DualDiverged: return "decision variables diverged";
    case Exit::Stopped: return "stopped";
  }
  return "?";
}

class InteriorPointSolver final : public ConicSolver {
 public:
  std::string name() const override { return "ipm"; }

  SolverOutput solve(const StandardForm& sf, const SolverSettings& s) const override {
    SolverOutput out;
    double eq_bad = 0.0;
    Reduced r = reduce(sf, eq_bad);
    if (eq_bad > s.feas_tol) {
      out.status = SolveStatus::Infeasible;
      out.message = "equality constraints are inconsistent";
      out.x = r.x0;
      return out;
    }
    auto recover = [&](const VecR& z) {
      return Eigen::VectorXd(r.x0 + r.t * z.head(r.data.m).cast<double>());
    };

    if (r.objective_in_range) {
      Ipm ipm(r.data, s.feas_tol, s.gap_tol, s.max_iterations, s.verbose);
      const IpmReport rep = ipm.run(nullptr);
      out.iterations = rep.iterations;
      out.x = recover(rep.it.z);
      if (rep.exit == Exit::Converged) {
        out.status = SolveStatus::Optimal;
        out.message = "converged in " + std::to_string(rep.iterations) + " iterations";
        return out;
      }
      out.message = std::string(exit_name(rep.exit)) + " after " +
                    std::to_string(rep.iterations) + " iterations (gap " +
                    std::to_string(static_cast<double>(rep.relgap)) + ", pinf " +
                    std::to_string(static_cast<double>(rep.pinf)) + ", dinf " +
                    std::to_string(static_cast<double>(rep.dinf)) + ")";
    } else {
      out.message = "objective is unbounded along a direction no constraint sees";
    }

    // Classify the failure with a feasibility problem.
    const LmiData p1 = phase_one(r.data);
    const Real stop_at = -Real(s.feas_tol);
    Ipm ipm1(p1, s.feas_tol, s.gap_tol, s.max_iterations, s.verbose);
    const IpmReport rep1 = ipm1.run([&](const VecR& z, Real dinf) {
      return dinf <= Real(1e-12) && z(r.data.m) < stop_at;
    });
    out.iterations += rep1.iterations;
    const Real t = rep1.it.z(r.data.m);
    // A positive multiplier-side bound certifies t* > 0 even below feas_tol,
    // which happens when the constraints are homogeneous up to the margin.
    const bool bound_positive = rep1.pobj > 0 && rep1.pinf <= Real(1e-12) &&
                                std::abs(rep1.dobj - rep1.pobj) < rep1.pobj;
    if (rep1.exit == Exit::Converged && (t > Real(s.feas_tol) || bound_positive)) {
      out.status = SolveStatus::Infeasible;
      out.x = recover(rep1.it.z);
      Real best = -1;
      for (std::size_t k = 0; k < sf.blocks.size(); ++k) {
        const Real w = rep1.it.x[k].trace() / std::max<Real>(1, rep1.it.x[k].rows());
        if (w > best) {
          best = w;
          out.culprit_block = static_cast<int>(k);
        }
      }
      out.message = "no point satisfies the LMIs (best worst-case violation " +
                    format_double(static_cast<double>(t)) + ")";
      return out;
    }
    out.status = SolveStatus::NumericalFailure;
    if (rep1.exit == Exit::Stopped || t < stop_at)
      out.message += "; the constraints are feasible";
    else
      out.message += "; feasibility undecided (phase one " + std::string(exit_name(rep1.exit)) + ")";
    return out;
  }
};

}  // namespace

std::vector<std::string> available_solvers() { return {"ipm"}; }

std::unique_ptr<ConicSolver> make_solver(const std::string& name) {
  std::string n = name;
  if (n.empty()) {
    const char* env = std::getenv("LPVDD_SOLVER");
    n = env && *env ? env : "ipm";
  }
  if (n == "ipm") return std::make_unique<InteriorPointSolver>();
  fail(ErrorKind::Config, "unknown solver '" + n + "' (available: ipm)");
}

}  // namespace lpvdd::sdp
