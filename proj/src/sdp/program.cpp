#include "lpvdd/sdp/program.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <set>

#include "lpvdd/core/error.hpp"
#include "lpvdd/sdp/solver.hpp"
#include "lpvdd/sdp/svec.hpp"

namespace lpvdd::sdp {

const char* to_string(Sense s) {
  switch (s) {
    case Sense::NegDef: return "negdef";
    case Sense::NegSemidef: return "negsemidef";
    case Sense::PosDef: return "posdef";
    case Sense::PosSemidef: return "possemidef";
  }
  return "?";
}

Sense sense_from_string(const std::string& s) {
  if (s == "negdef") return Sense::NegDef;
  if (s == "negsemidef") return Sense::NegSemidef;
  if (s == "posdef") return Sense::PosDef;
  if (s == "possemidef") return Sense::PosSemidef;
  fail(ErrorKind::InvalidArgument, "unknown LMI sense '" + s + "'");
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::NumericalFailure: return "numerical-failure";
  }
  return "?";
}

double LinearFunctional::evaluate(const Assignment& values) const {
  double v = constant;
  for (const auto& [id, w] : weights) v += w.cwiseProduct(values.at(id)).sum();
  return v;
}

MatrixVariable ConicProgram::add_variable(int rows, int cols, bool symmetric, std::string name) {
  require(rows > 0 && cols > 0, ErrorKind::InvalidArgument, "variable shape must be positive");
  require(!symmetric || rows == cols, ErrorKind::DimensionMismatch,
          "symmetric variable must be square");
  MatrixVariable v;
  v.id = static_cast<int>(vars_.size());
  v.rows = rows;
  v.cols = cols;
  v.symmetric = symmetric;
  v.name = name.empty() ? "v" + std::to_string(v.id) : std::move(name);
  vars_.push_back(v);
  return v;
}

static void check_terms(const ConicProgram& p, const AffineMatrixExpr& e) {
  for (const Term& t : e.terms()) {
    require(t.var >= 0 && t.var < static_cast<int>(p.variables().size()),
            ErrorKind::InvalidArgument, "expression uses a variable of another program");
    const MatrixVariable& v = p.variable(t.var);
    require(v.rows == t.var_rows && v.cols == t.var_cols, ErrorKind::DimensionMismatch,
            "expression term disagrees with variable '" + v.name + "' shape");
  }
}

static bool expr_symmetric(const ConicProgram& p, const AffineMatrixExpr& e) {
  const double scale = 1.0 + e.constant().cwiseAbs().maxCoeff();
  if ((e.constant() - e.constant().transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    return false;
  std::set<int> used;
  for (const Term& t : e.terms()) used.insert(t.var);
  for (int id : used) {
    const MatrixVariable& v = p.variable(id);
    for (int k = 0; k < v.dof(); ++k) {
      const Eigen::MatrixXd c = e.coefficient(v, k);
      const double s = 1.0 + c.cwiseAbs().maxCoeff();
      if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-12 * s) return false;
    }
  }
  return true;
}

void ConicProgram::add_lmi(const AffineMatrixExpr& expr, Sense sense, std::string name,
                           double margin) {
  require(expr.rows() == expr.cols() && expr.rows() > 0, ErrorKind::DimensionMismatch,
          "LMI expression must be square");
  check_terms(*this, expr);
  require(expr_symmetric(*this, expr), ErrorKind::InvalidArgument,
          "LMI expression '" + name + "' is not symmetric");
  if (is_strict(sense))
    require(margin > 0.0, ErrorKind::InvalidArgument, "strict LMI needs a positive margin");
  LmiConstraint c;
  c.name = name.empty() ? "lmi" + std::to_string(lmis_.size()) : std::move(name);
  c.expr = expr;
  c.sense = sense;
  c.margin = is_strict(sense) ? margin : 0.0;
  lmis_.push_back(std::move(c));
}

void ConicProgram::add_equality(const AffineMatrixExpr& expr, std::string name) {
  require(expr.rows() > 0 && expr.cols() > 0, ErrorKind::DimensionMismatch,
          "equality expression is empty");
  check_terms(*this, expr);
  eqs_.push_back({name.empty() ? "eq" + std::to_string(eqs_.size()) : std::move(name), expr});
}

void ConicProgram::set_objective(LinearFunctional f) {
  for (const auto& [id, w] : f.weights) {
    require(id >= 0 && id < static_cast<int>(vars_.size()), ErrorKind::InvalidArgument,
            "objective refers to an unknown variable");
    require(w.rows() == vars_[id].rows && w.cols() == vars_[id].cols,
            ErrorKind::DimensionMismatch, "objective weight shape mismatch");
  }
  objective_ = std::move(f);
}

void ConicProgram::add_objective(const MatrixVariable& v, const Eigen::MatrixXd& w) {
  require(w.rows() == v.rows && w.cols() == v.cols, ErrorKind::DimensionMismatch,
          "objective weight shape mismatch");
  objective_.weights.emplace_back(v.id, w);
}

int ConicProgram::total_dof() const {
  int n = 0;
  for (const auto& v : vars_) n += v.dof();
  return n;
}

int ConicProgram::scalar_equation_count() const {
  int n = 0;
  for (const auto& e : eqs_) n += static_cast<int>(e.expr.rows() * e.expr.cols());
  return n;
}

StandardForm vectorize(const ConicProgram& program) {
  StandardForm sf;
  for (const auto& v : program.variables()) {
    sf.offsets.push_back(sf.n);
    sf.n += v.dof();
  }
  const int n = sf.n;
  sf.c = Eigen::VectorXd::Zero(n);
  sf.c0 = program.objective().constant;
  for (const auto& [id, w] : program.objective().weights) {
    const MatrixVariable& v = program.variable(id);
    for (int k = 0; k < v.dof(); ++k) sf.c(sf.offsets[id] + k) += w.cwiseProduct(v.basis(k)).sum();
  }

  auto used_vars = [&](const AffineMatrixExpr& e) {
    std::set<int> ids;
    for (const Term& t : e.terms()) ids.insert(t.var);
    return ids;
  };

  for (const LmiConstraint& lmi : program.lmis()) {
    const int d = static_cast<int>(lmi.expr.rows());
    const bool neg = lmi.sense == Sense::NegDef || lmi.sense == Sense::NegSemidef;
    const double sign = neg ? -1.0 : 1.0;
    StandardForm::Block b;
    b.dim = d;
    b.name = lmi.name;
    b.coeffs = Eigen::MatrixXd::Zero(svec_dim(d), 1 + n);
    b.coeffs.col(0) = svec(sign * lmi.expr.constant() -
                           lmi.margin * Eigen::MatrixXd::Identity(d, d));
    for (int id : used_vars(lmi.expr)) {
      const MatrixVariable& v = program.variable(id);
      for (int k = 0; k < v.dof(); ++k)
        b.coeffs.col(1 + sf.offsets[id] + k) = sign * svec(lmi.expr.coefficient(v, k));
    }
    sf.blocks.push_back(std::move(b));
  }

  const int m = program.scalar_equation_count();
  sf.aeq = Eigen::MatrixXd::Zero(m, n);
  sf.beq = Eigen::VectorXd::Zero(m);
  int row = 0;
  for (const EqualityConstraint& eq : program.equalities()) {
    const Eigen::Index r = eq.expr.rows(), c = eq.expr.cols();
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index j = 0; j < c; ++j) sf.beq(row + i * c + j) = -eq.expr.constant()(i, j);
    for (int id : used_vars(eq.expr)) {
      const MatrixVariable& v = program.variable(id);
      for (int k = 0; k < v.dof(); ++k) {
        const Eigen::MatrixXd coef = eq.expr.coefficient(v, k);
        for (Eigen::Index i = 0; i < r; ++i)
          for (Eigen::Index j = 0; j < c; ++j)
            sf.aeq(row + i * c + j, sf.offsets[id] + k) = coef(i, j);
      }
    }
    row += static_cast<int>(r * c);
  }
  return sf;
}

Assignment StandardForm::unpack(const ConicProgram& program, const Eigen::VectorXd& x) const {
  require(x.size() == n, ErrorKind::DimensionMismatch, "solution vector has the wrong length");
  Assignment out;
  for (const auto& v : program.variables())
    out.push_back(v.from_coords(x.segment(offsets[v.id], v.dof())));
  return out;
}

double lmi_violation(const LmiConstraint& c, const Assignment& values) {
  Eigen::MatrixXd e = c.expr.evaluate(values);
  e = 0.5 * (e + e.transpose());
  if (c.sense == Sense::PosDef || c.sense == Sense::PosSemidef) e = -e;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(e, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff() + c.margin;
}

Solution solve(const ConicProgram& program, const SolveOptions& options) {
  const auto solver = make_solver(options.solver);
  const StandardForm sf = vectorize(program);
  SolverSettings s;
  s.feas_tol = options.feas_tol;
  s.gap_tol = options.gap_tol;
  s.max_iterations = options.max_iterations;
  s.verbose = options.verbose;
  const SolverOutput out = solver->solve(sf, s);

  Solution sol;
  sol.status = out.status;
  sol.iterations = out.iterations;
  sol.solver = solver->name();
  sol.message = out.message;
  if (out.culprit_block >= 0 && out.culprit_block < static_cast<int>(program.lmis().size()))
    sol.worst_lmi = program.lmis()[out.culprit_block].name;
  if (out.x.size() != sf.n) return sol;

  // Residuals come from direct evaluation of the expressions, not from the
  // vectorized data the solver saw.
  sol.values = sf.unpack(program, out.x);
  sol.objective = program.objective().evaluate(sol.values);
  sol.lmi_residual = -std::numeric_limits<double>::infinity();
  for (const LmiConstraint& c : program.lmis()) {
    const double v = lmi_violation(c, sol.values);
    if (v > sol.lmi_residual) {
      sol.lmi_residual = v;
      if (out.status != SolveStatus::Infeasible) sol.worst_lmi = c.name;
    }
  }
  if (program.lmis().empty()) sol.lmi_residual = 0.0;
  sol.equality_residual = 0.0;
  for (const EqualityConstraint& e : program.equalities())
    sol.equality_residual =
        std::max(sol.equality_residual, e.expr.evaluate(sol.values).cwiseAbs().maxCoeff());

  if (sol.status == SolveStatus::Optimal &&
      (sol.lmi_residual > options.feas_tol || sol.equality_residual > options.feas_tol)) {
    sol.status = SolveStatus::NumericalFailure;
    sol.message = "solver reported optimal but validation failed (lmi residual " +
                  std::to_string(sol.lmi_residual) + ", equality residual " +
                  std::to_string(sol.equality_residual) + ")";
  }
  return sol;
}

}  // namespace lpvdd::sdp
