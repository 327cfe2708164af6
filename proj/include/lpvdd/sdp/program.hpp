#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "lpvdd/sdp/expression.hpp"

namespace lpvdd::sdp {

constexpr double kDefaultMargin = 1e-6;
constexpr double kDefaultFeasTol = 1e-7;
constexpr double kDefaultGapTol = 1e-8;

enum class Sense { NegDef, NegSemidef, PosDef, PosSemidef };

const char* to_string(Sense s);
Sense sense_from_string(const std::string& s);
inline bool is_strict(Sense s) { return s == Sense::NegDef || s == Sense::PosDef; }

// Strict senses are enforced as expr ⪯ -margin*I or expr ⪰ margin*I.
struct LmiConstraint {
  std::string name;
  AffineMatrixExpr expr;
  Sense sense = Sense::PosSemidef;
  double margin = 0.0;
};

struct EqualityConstraint {
  std::string name;
  AffineMatrixExpr expr;  // expr == 0 entrywise
};

// constant + sum_k <W_k, V_k>
struct LinearFunctional {
  double constant = 0.0;
  std::vector<std::pair<int, Eigen::MatrixXd>> weights;

  double evaluate(const Assignment& values) const;
};

class ConicProgram {
 public:
  MatrixVariable add_variable(int rows, int cols, bool symmetric, std::string name = "");
  MatrixVariable add_symmetric(int n, std::string name = "") {
    return add_variable(n, n, true, std::move(name));
  }

  void add_lmi(const AffineMatrixExpr& expr, Sense sense, std::string name = "",
               double margin = kDefaultMargin);
  void add_equality(const AffineMatrixExpr& expr, std::string name = "");

  void set_objective(LinearFunctional f);
  // Adds <w, v> to the objective.
  void add_objective(const MatrixVariable& v, const Eigen::MatrixXd& w);
  void add_objective_constant(double c) { objective_.constant += c; }

  const std::vector<MatrixVariable>& variables() const { return vars_; }
  const std::vector<LmiConstraint>& lmis() const { return lmis_; }
  const std::vector<EqualityConstraint>& equalities() const { return eqs_; }
  const LinearFunctional& objective() const { return objective_; }

  int total_dof() const;
  int scalar_equation_count() const;
  const MatrixVariable& variable(int id) const { return vars_.at(id); }

 private:
  std::vector<MatrixVariable> vars_;
  std::vector<LmiConstraint> lmis_;
  std::vector<EqualityConstraint> eqs_;
  LinearFunctional objective_;
};

enum class SolveStatus { Optimal, Infeasible, NumericalFailure };
const char* to_string(SolveStatus s);

struct SolveOptions {
  double feas_tol = kDefaultFeasTol;
  double gap_tol = kDefaultGapTol;
  int max_iterations = 200;
  std::string solver;  // empty: LPVDD_SOLVER environment variable, then "ipm"
  bool verbose = false;
};

struct Solution {
  SolveStatus status = SolveStatus::NumericalFailure;
  Assignment values;
  double objective = 0.0;
  double lmi_residual = 0.0;       // worst eigenvalue violation after margins
  double equality_residual = 0.0;  // worst entry of any equality
  std::string worst_lmi;
  int iterations = 0;
  std::string solver;
  std::string message;

  const Eigen::MatrixXd& value(const MatrixVariable& v) const { return values.at(v.id); }
};

// Worst violation of one LMI at the given point: the largest eigenvalue of
// expr + margin*I for ⪯ senses, of -expr + margin*I for ⪰ senses.
double lmi_violation(const LmiConstraint& c, const Assignment& values);

Solution solve(const ConicProgram& program, const SolveOptions& options = {});

}  // namespace lpvdd::sdp
