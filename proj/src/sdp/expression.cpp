#include "lpvdd/sdp/expression.hpp"

#include <cmath>

#include "lpvdd/core/error.hpp"
#include "lpvdd/sdp/svec.hpp"

namespace lpvdd::sdp {

Eigen::MatrixXd MatrixVariable::basis(int k) const {
  require(k >= 0 && k < dof(), ErrorKind::InvalidArgument, "coordinate out of range");
  if (symmetric) return svec_basis(rows, k);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(rows, cols);
  b(k / cols, k % cols) = 1.0;
  return b;
}

Eigen::MatrixXd MatrixVariable::from_coords(const Eigen::VectorXd& coords) const {
  require(coords.size() == dof(), ErrorKind::DimensionMismatch,
          "coordinate vector length does not match variable '" + name + "'");
  if (symmetric) return smat(coords);
  Eigen::MatrixXd v(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) v(i, j) = coords(i * cols + j);
  return v;
}

Eigen::VectorXd MatrixVariable::to_coords(const Eigen::MatrixXd& value) const {
  require(value.rows() == rows && value.cols() == cols, ErrorKind::DimensionMismatch,
          "value shape does not match variable '" + name + "'");
  if (symmetric) return svec(value);
  Eigen::VectorXd c(dof());
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) c(i * cols + j) = value(i, j);
  return c;
}

AffineMatrixExpr::AffineMatrixExpr(Eigen::Index rows, Eigen::Index cols)
    : constant_(Eigen::MatrixXd::Zero(rows, cols)) {}

AffineMatrixExpr::AffineMatrixExpr(const Eigen::MatrixXd& constant) : constant_(constant) {}

AffineMatrixExpr::AffineMatrixExpr(const MatrixVariable& v)
    : constant_(Eigen::MatrixXd::Zero(v.rows, v.cols)) {
  add_term(Eigen::MatrixXd::Identity(v.rows, v.rows), v,
           Eigen::MatrixXd::Identity(v.cols, v.cols));
}

AffineMatrixExpr& AffineMatrixExpr::add_term(const Eigen::MatrixXd& left,
                                             const MatrixVariable& v,
                                             const Eigen::MatrixXd& right, bool transposed) {
  return add_term(Term{v.id, v.rows, v.cols, left, right, transposed});
}

AffineMatrixExpr& AffineMatrixExpr::add_term(Term t) {
  const int inner_l = t.transposed ? t.var_cols : t.var_rows;
  const int inner_r = t.transposed ? t.var_rows : t.var_cols;
  require(t.var >= 0, ErrorKind::InvalidArgument, "term refers to an unregistered variable");
  require(t.left.cols() == inner_l && t.right.rows() == inner_r &&
              t.left.rows() == rows() && t.right.cols() == cols(),
          ErrorKind::DimensionMismatch, "term shape does not match the expression");
  terms_.push_back(std::move(t));
  return *this;
}

AffineMatrixExpr& AffineMatrixExpr::add_constant(const Eigen::MatrixXd& c) {
  require(c.rows() == rows() && c.cols() == cols(), ErrorKind::DimensionMismatch,
          "constant shape does not match the expression");
  constant_ += c;
  return *this;
}

AffineMatrixExpr AffineMatrixExpr::transpose() const {
  AffineMatrixExpr out(constant_.transpose());
  for (const Term& t : terms_)
    out.terms_.push_back(Term{t.var, t.var_rows, t.var_cols, t.right.transpose(),
                              t.left.transpose(), !t.transposed});
  return out;
}

AffineMatrixExpr AffineMatrixExpr::congruence(const Eigen::MatrixXd& t) const {
  return t.transpose() * (*this) * t;
}

AffineMatrixExpr AffineMatrixExpr::placed(Eigen::Index rows, Eigen::Index cols,
                                          Eigen::Index r0, Eigen::Index c0) const {
  require(r0 + this->rows() <= rows && c0 + this->cols() <= cols, ErrorKind::DimensionMismatch,
          "placed block exceeds the target");
  Eigen::MatrixXd pl = Eigen::MatrixXd::Zero(rows, this->rows());
  pl.block(r0, 0, this->rows(), this->rows()).setIdentity();
  Eigen::MatrixXd pr = Eigen::MatrixXd::Zero(this->cols(), cols);
  pr.block(0, c0, this->cols(), this->cols()).setIdentity();
  return pl * (*this) * pr;
}

AffineMatrixExpr& AffineMatrixExpr::operator+=(const AffineMatrixExpr& o) {
  require(o.rows() == rows() && o.cols() == cols(), ErrorKind::DimensionMismatch,
          "adding expressions of different shapes");
  constant_ += o.constant_;
  terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
  return *this;
}

AffineMatrixExpr& AffineMatrixExpr::operator-=(const AffineMatrixExpr& o) {
  return *this += -o;
}

AffineMatrixExpr& AffineMatrixExpr::operator*=(double s) {
  constant_ *= s;
  for (Term& t : terms_) t.left *= s;
  return *this;
}

Eigen::MatrixXd AffineMatrixExpr::evaluate(const Assignment& values) const {
  Eigen::MatrixXd out = constant_;
  for (const Term& t : terms_) {
    require(t.var < static_cast<int>(values.size()), ErrorKind::InvalidArgument,
            "assignment is missing a variable");
    const Eigen::MatrixXd& v = values[t.var];
    require(v.rows() == t.var_rows && v.cols() == t.var_cols, ErrorKind::DimensionMismatch,
            "assigned value has the wrong shape");
    if (t.transposed)
      out.noalias() += t.left * v.transpose() * t.right;
    else
      out.noalias() += t.left * v * t.right;
  }
  return out;
}

Eigen::MatrixXd AffineMatrixExpr::coefficient(const MatrixVariable& v, int k) const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows(), cols());
  int bi = 0, bj = 0;
  double w = 1.0;
  bool pair = false;
  if (v.symmetric) {
    std::tie(bi, bj) = svec_index(v.rows, k);
    pair = bi != bj;
    w = pair ? 1.0 / M_SQRT2 : 1.0;
  } else {
    bi = k / v.cols;
    bj = k % v.cols;
  }
  for (const Term& t : terms_) {
    if (t.var != v.id) continue;
    // basis = w * (e_bi e_bj^T [+ e_bj e_bi^T])
    const int i = t.transposed ? bj : bi;
    const int j = t.transposed ? bi : bj;
    out.noalias() += w * t.left.col(i) * t.right.row(j);
    if (pair) out.noalias() += w * t.left.col(j) * t.right.row(i);
  }
  return out;
}

bool AffineMatrixExpr::depends_on(int var) const {
  for (const Term& t : terms_)
    if (t.var == var) return true;
  return false;
}

AffineMatrixExpr operator+(AffineMatrixExpr a, const AffineMatrixExpr& b) { return a += b; }
AffineMatrixExpr operator-(AffineMatrixExpr a, const AffineMatrixExpr& b) { return a -= b; }
AffineMatrixExpr operator-(AffineMatrixExpr a) { return a *= -1.0; }
AffineMatrixExpr operator*(double s, AffineMatrixExpr a) { return a *= s; }

AffineMatrixExpr operator*(const Eigen::MatrixXd& l, const AffineMatrixExpr& a) {
  require(l.cols() == a.rows(), ErrorKind::DimensionMismatch,
          "left factor does not match the expression");
  AffineMatrixExpr out(Eigen::MatrixXd(l * a.constant()));
  for (const Term& t : a.terms()) {
    Term u = t;
    u.left = l * t.left;
    out.add_term(std::move(u));
  }
  return out;
}

AffineMatrixExpr operator*(const AffineMatrixExpr& a, const Eigen::MatrixXd& r) {
  require(a.cols() == r.rows(), ErrorKind::DimensionMismatch,
          "right factor does not match the expression");
  AffineMatrixExpr out(Eigen::MatrixXd(a.constant() * r));
  for (const Term& t : a.terms()) {
    Term u = t;
    u.right = t.right * r;
    out.add_term(std::move(u));
  }
  return out;
}

AffineMatrixExpr scaled_identity(const MatrixVariable& s, int n) {
  require(s.rows == 1 && s.cols == 1, ErrorKind::DimensionMismatch,
          "scaled identity needs a scalar variable");
  AffineMatrixExpr out(n, n);
  for (int i = 0; i < n; ++i) {
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, 1);
    e(i) = 1.0;
    out.add_term(e, s, e.transpose());
  }
  return out;
}

AffineMatrixExpr kron_identity(int n, const AffineMatrixExpr& v) {
  AffineMatrixExpr out(n * v.rows(), n * v.cols());
  for (int i = 0; i < n; ++i) out += v.placed(out.rows(), out.cols(), i * v.rows(), i * v.cols());
  return out;
}

static std::vector<Eigen::Index> offsets(const std::vector<Eigen::Index>& sizes) {
  std::vector<Eigen::Index> o(sizes.size() + 1, 0);
  for (std::size_t i = 0; i < sizes.size(); ++i) o[i + 1] = o[i] + sizes[i];
  return o;
}

BlockBuilder::BlockBuilder(std::vector<Eigen::Index> row_sizes,
                           std::vector<Eigen::Index> col_sizes)
    : rs_(std::move(row_sizes)), cs_(std::move(col_sizes)) {
  ro_ = offsets(rs_);
  co_ = offsets(cs_);
  acc_ = AffineMatrixExpr(ro_.back(), co_.back());
}

BlockBuilder::BlockBuilder(std::vector<Eigen::Index> sizes) : BlockBuilder(sizes, sizes) {}

void BlockBuilder::set(int i, int j, const AffineMatrixExpr& e) {
  require(i >= 0 && j >= 0 && i < static_cast<int>(rs_.size()) &&
              j < static_cast<int>(cs_.size()),
          ErrorKind::InvalidArgument, "block index out of range");
  require(e.rows() == rs_[i] && e.cols() == cs_[j], ErrorKind::DimensionMismatch,
          "block (" + std::to_string(i) + "," + std::to_string(j) + ") has shape " +
              std::to_string(e.rows()) + "x" + std::to_string(e.cols()) + ", expected " +
              std::to_string(rs_[i]) + "x" + std::to_string(cs_[j]));
  acc_ += e.placed(acc_.rows(), acc_.cols(), ro_[i], co_[j]);
}

void BlockBuilder::set_sym(int i, int j, const AffineMatrixExpr& e) {
  set(i, j, e);
  if (i != j) set(j, i, e.transpose());
}

AffineMatrixExpr BlockBuilder::build() const { return acc_; }

}  // namespace lpvdd::sdp
