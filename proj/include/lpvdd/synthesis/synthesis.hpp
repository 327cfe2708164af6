#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lpvdd/core/data_matrices.hpp"
#include "lpvdd/core/rescale.hpp"
#include "lpvdd/core/types.hpp"
#include "lpvdd/sdp/program.hpp"

namespace lpvdd::synthesis {

enum class ProgramKind { QuadraticPerformance, L2Gain };

const char* to_string(ProgramKind k);  // "qp" | "l2"
ProgramKind kind_from_string(const std::string& s);

struct QuadraticWeights {
  Eigen::MatrixXd q;  // ⪰ 0
  Eigen::MatrixXd r;  // ≻ 0

  void validate(int nx, int nu) const;
};

struct L2Weights {
  Eigen::MatrixXd ws;  // ⪰ 0
  Eigen::MatrixXd wr;  // ≻ 0
  double lambda = 0.0;

  void validate(int nx, int nu) const;
};

struct Weights {
  QuadraticWeights qp;
  L2Weights l2;

  // Q = diag(4, 0.1), R = 3.5 and W_S = diag(1.5e-2, 2e-5), W_R = 3.06e-3, λ = 1e-6.
  static Weights disc_defaults();
};

// Constant factors of the linear fractional representation of the scheduling:
// Φ(p) = L22 + L21 Δ(p) L12 = blkdiag(Π(p), Π(p), I_ne) with Π(p) = [I; p ⊗ I].
struct LftBlocks {
  int nw = 0;  // 2 n_x n_p
  int ne = 0;  // n_x + n_u (quadratic performance) or 2 n_x + n_u (L2)
  Eigen::MatrixXd l11, l12, l21, l22;

  // [L11 L12; I 0]
  Eigen::MatrixXd r1() const;
  // [L21 L22]
  Eigen::MatrixXd r2() const;
};

LftBlocks lft_blocks(const Dims& d, ProgramKind kind);
// blkdiag(p_i I_{2 n_x})
Eigen::MatrixXd delta(const Eigen::VectorXd& p, int nx);

// F_Q (N_d(1+n_p) x n_x(1+n_p)) to 𝓕 (N_d x n_x(1+n_p+n_p^2)) with
// 𝓕 [I; p⊗I; p⊗p⊗I] = [I; p⊗I]^T F_Q [I; p⊗I].
Eigen::MatrixXd expand_fq(const Eigen::MatrixXd& fq, const Dims& d);
sdp::AffineMatrixExpr expand_fq(const sdp::MatrixVariable& fq, const Dims& d);

// [Z 0 0; 0 I⊗Z 0; Y0 Ybar 0; 0 I⊗Y0 I⊗Ybar]
Eigen::MatrixXd blocked_certificate(const Eigen::MatrixXd& z, const Eigen::MatrixXd& y,
                                    const Dims& d);

struct SynthesisOptions {
  double margin = sdp::kDefaultMargin;
  bool rescale = true;
  // Use X+ G^+ G in place of X+ in the performance block; identical for data
  // from an exact affine LPV system.
  bool project_successor = true;
  double rank_tol = kDefaultRankTol;
  bool triage = true;
  sdp::SolveOptions solve;
};

struct SynthesisProgram {
  ProgramKind kind = ProgramKind::QuadraticPerformance;
  Dims dims;
  sdp::ConicProgram program;
  sdp::MatrixVariable z, y, fq, xi;
  std::optional<sdp::MatrixVariable> gamma;
  Eigen::MatrixXd successor;  // X+ as used in the performance block
};

// Assembles the program for data matrices and box in the same scheduling
// coordinates. Fails with IllPosed if the data are not PE.
SynthesisProgram build_program(ProgramKind kind, const DataMatrices& m, const Weights& w,
                               const ScheduleBox& box, const SynthesisOptions& opt = {});

struct Certificate {
  Eigen::MatrixXd z, y, fq, xi;
  double gamma = 0.0;
};

struct SynthesisResult {
  ProgramKind kind = ProgramKind::QuadraticPerformance;
  Dims dims;
  Weights weights;
  ControllerGains gains;  // in synthesis coordinates
  SchedulingMap map;      // physical -> synthesis coordinates
  bool rescaled = false;
  ScheduleBox box;        // synthesis coordinates
  DataDictionary dictionary;  // physical coordinates, as supplied
  std::string dictionary_hash;
  Certificate certificate;
  sdp::SolveStatus status = sdp::SolveStatus::NumericalFailure;
  double objective = 0.0;
  double lmi_residual = 0.0;
  double equality_residual = 0.0;
  double gain_residual = 0.0;
  int iterations = 0;
  std::string solver;
  double margin = 0.0;
  bool projected = true;
  std::vector<std::string> notes;

  // Gains expressed in the physical scheduling variable.
  ControllerGains physical_gains() const { return map.pull_back(gains); }
  // Data matrices in synthesis coordinates.
  DataMatrices data() const;
};

// K0 = Y0 Z^-1, K_i = Y_i Z^-1. Fails with IllPosed when Z is near-singular.
ControllerGains recover_gains(const Eigen::MatrixXd& z, const Eigen::MatrixXd& y, int np,
                              double* residual = nullptr);

// Fails with IllPosed (not PE, singular Z), Infeasible, or NumericalFailure.
SynthesisResult synthesize(ProgramKind kind, const DataDictionary& d, const Weights& w,
                           const SynthesisOptions& opt = {});

struct FrozenStability {
  double max_radius = 0.0;
  Eigen::VectorXd worst_p;
  bool stable = false;
  bool degenerate_box = false;
  std::vector<std::pair<Eigen::VectorXd, double>> grid;  // (p, spectral radius)
};

FrozenStability certify_closed_loop(const AffineMatrixFunction& a, const AffineMatrixFunction& b,
                                    const ControllerGains& k, const ScheduleBox& box, int grid_n);
FrozenStability certify_closed_loop(const DataMatrices& m, const ControllerGains& k,
                                    const ScheduleBox& box, int grid_n);

struct VerificationReport {
  double main_lmi_min = 0.0;     // smallest eigenvalue of the performance LMI
  double vertex_max = 0.0;       // largest eigenvalue of the multiplier form at vertices
  double interior_max = 0.0;     // same at random interior points
  double xi22_min = 0.0;
  double z_min = 0.0;
  double equality_fro = 0.0;
  double gain_residual = 0.0;
  double fq_identity = 0.0;
  bool passed = false;
  std::vector<std::string> failures;
};

// Rebuilds every condition from the stored certificate with plain matrix
// algebra and checks it against tol (LMIs, equality) and 1e-10 (gains).
VerificationReport verify_certificate(const SynthesisResult& r, double tol = sdp::kDefaultFeasTol,
                                      int interior_points = 50, std::uint64_t seed = 7);

}  // namespace lpvdd::synthesis
