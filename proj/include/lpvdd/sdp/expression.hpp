#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace lpvdd::sdp {

struct MatrixVariable {
  int id = -1;
  int rows = 0;
  int cols = 0;
  bool symmetric = false;
  std::string name;

  // Scalar degrees of freedom: n(n+1)/2 for symmetric, rows*cols otherwise.
  int dof() const { return symmetric ? rows * (rows + 1) / 2 : rows * cols; }
  // Matrix multiplying scalar coordinate k. Symmetric variables use the
  // svec basis, free ones the row-major unit matrices.
  Eigen::MatrixXd basis(int k) const;
  Eigen::MatrixXd from_coords(const Eigen::VectorXd& coords) const;
  Eigen::VectorXd to_coords(const Eigen::MatrixXd& value) const;
};

// Values indexed by variable id.
using Assignment = std::vector<Eigen::MatrixXd>;

// left * V * right, or left * V^T * right when transposed.
struct Term {
  int var = -1;
  int var_rows = 0;
  int var_cols = 0;
  Eigen::MatrixXd left;
  Eigen::MatrixXd right;
  bool transposed = false;
};

class AffineMatrixExpr {
 public:
  AffineMatrixExpr() = default;
  AffineMatrixExpr(Eigen::Index rows, Eigen::Index cols);
  explicit AffineMatrixExpr(const Eigen::MatrixXd& constant);
  AffineMatrixExpr(const MatrixVariable& v);  // NOLINT: a variable is an expression

  Eigen::Index rows() const { return constant_.rows(); }
  Eigen::Index cols() const { return constant_.cols(); }
  const Eigen::MatrixXd& constant() const { return constant_; }
  const std::vector<Term>& terms() const { return terms_; }

  AffineMatrixExpr& add_term(const Eigen::MatrixXd& left, const MatrixVariable& v,
                             const Eigen::MatrixXd& right, bool transposed = false);
  AffineMatrixExpr& add_term(Term t);
  AffineMatrixExpr& add_constant(const Eigen::MatrixXd& c);

  AffineMatrixExpr transpose() const;
  // t^T * this * t
  AffineMatrixExpr congruence(const Eigen::MatrixXd& t) const;
  // Embeds this expression at (r0, c0) of a rows x cols zero matrix.
  AffineMatrixExpr placed(Eigen::Index rows, Eigen::Index cols, Eigen::Index r0,
                          Eigen::Index c0) const;

  AffineMatrixExpr& operator+=(const AffineMatrixExpr& o);
  AffineMatrixExpr& operator-=(const AffineMatrixExpr& o);
  AffineMatrixExpr& operator*=(double s);

  Eigen::MatrixXd evaluate(const Assignment& values) const;
  // Coefficient of scalar coordinate k of variable v.
  Eigen::MatrixXd coefficient(const MatrixVariable& v, int k) const;
  bool depends_on(int var) const;

 private:
  Eigen::MatrixXd constant_;
  std::vector<Term> terms_;
};

AffineMatrixExpr operator+(AffineMatrixExpr a, const AffineMatrixExpr& b);
AffineMatrixExpr operator-(AffineMatrixExpr a, const AffineMatrixExpr& b);
AffineMatrixExpr operator-(AffineMatrixExpr a);
AffineMatrixExpr operator*(double s, AffineMatrixExpr a);
AffineMatrixExpr operator*(const Eigen::MatrixXd& l, const AffineMatrixExpr& a);
AffineMatrixExpr operator*(const AffineMatrixExpr& a, const Eigen::MatrixXd& r);

// s * I_n for a 1x1 variable s.
AffineMatrixExpr scaled_identity(const MatrixVariable& s, int n);
// I_n ⊗ V
AffineMatrixExpr kron_identity(int n, const AffineMatrixExpr& v);

// Assembles a block matrix from sub-expressions; unset blocks are zero.
class BlockBuilder {
 public:
  BlockBuilder(std::vector<Eigen::Index> row_sizes, std::vector<Eigen::Index> col_sizes);
  // Square layout with equal row and column partitions.
  explicit BlockBuilder(std::vector<Eigen::Index> sizes);

  void set(int i, int j, const AffineMatrixExpr& e);
  // Sets (i, j) and its transpose at (j, i).
  void set_sym(int i, int j, const AffineMatrixExpr& e);
  AffineMatrixExpr build() const;

 private:
  std::vector<Eigen::Index> rs_, cs_, ro_, co_;
  AffineMatrixExpr acc_;
};

}  // namespace lpvdd::sdp
