#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "lpvdd/sdp/program.hpp"

namespace lpvdd::sdp {

// Vectorized program over x = concatenated variable coordinates:
//   min c'x + c0  s.t.  aeq x = beq,  smat(coeffs_k * [1; x]) ⪰ 0 for each block.
struct StandardForm {
  struct Block {
    int dim = 0;
    Eigen::MatrixXd coeffs;  // svec_dim(dim) x (1 + n); column 0 is the constant
    std::string name;
  };

  int n = 0;
  Eigen::VectorXd c;
  double c0 = 0.0;
  Eigen::MatrixXd aeq;
  Eigen::VectorXd beq;
  std::vector<Block> blocks;
  std::vector<int> offsets;  // coordinate offset of each variable

  Assignment unpack(const ConicProgram& program, const Eigen::VectorXd& x) const;
};

StandardForm vectorize(const ConicProgram& program);

struct SolverSettings {
  double feas_tol = kDefaultFeasTol;
  double gap_tol = kDefaultGapTol;
  int max_iterations = 200;
  bool verbose = false;
};

struct SolverOutput {
  SolveStatus status = SolveStatus::NumericalFailure;
  Eigen::VectorXd x;
  int iterations = 0;
  std::string message;
  int culprit_block = -1;  // for infeasible outcomes, the block carrying the certificate
};

class ConicSolver {
 public:
  virtual ~ConicSolver() = default;
  virtual std::string name() const = 0;
  virtual SolverOutput solve(const StandardForm& sf, const SolverSettings& s) const = 0;
};

std::vector<std::string> available_solvers();
// Fails with Config on an unknown name. Empty picks LPVDD_SOLVER, then "ipm".
std::unique_ptr<ConicSolver> make_solver(const std::string& name = "");

}  // namespace lpvdd::sdp
