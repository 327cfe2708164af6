#pragma once

#include <Eigen/Dense>
#include <random>

#include "lpvdd/core/data_matrices.hpp"
#include "lpvdd/core/types.hpp"

namespace lpvdd::testing {

inline Eigen::MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c,
                                     double scale = 1.0) {
  std::uniform_real_distribution<double> d(-scale, scale);
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = d(rng);
  return m;
}

inline Eigen::VectorXd random_in_box(std::mt19937_64& rng, const ScheduleBox& box) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd p(box.dim());
  for (int i = 0; i < box.dim(); ++i)
    p(i) = box.lower()(i) + unit(rng) * (box.upper()(i) - box.lower()(i));
  return p;
}

struct RandomLpv {
  AffineMatrixFunction a, b;
  DataDictionary dictionary;
};

// Affine LPV system with coefficients scaled to keep short trajectories
// bounded, excited by uniform inputs and scheduling over [-1, 1]^np.
inline RandomLpv random_lpv(std::mt19937_64& rng, int nx, int nu, int np, int extra = 4) {
  std::vector<Eigen::MatrixXd> ac, bc;
  for (int i = 0; i <= np; ++i) {
    ac.push_back(random_matrix(rng, nx, nx, 0.6 / nx));
    bc.push_back(random_matrix(rng, nx, nu, 1.0));
  }
  RandomLpv s{AffineMatrixFunction(ac), AffineMatrixFunction(bc), {}};
  const ScheduleBox box = ScheduleBox::symmetric_unit(np);
  const int nd = Dims{nu, np, nx, 0}.required_rank() + extra;
  Eigen::MatrixXd u = random_matrix(rng, nu, nd + 1);
  Eigen::MatrixXd p(np, nd + 1), x(nx, nd + 1);
  x.col(0) = random_matrix(rng, nx, 1);
  for (int k = 0; k <= nd; ++k) {
    p.col(k) = random_in_box(rng, box);
    if (k < nd) x.col(k + 1) = s.a(p.col(k)) * x.col(k) + s.b(p.col(k)) * u.col(k);
  }
  s.dictionary = DataDictionary(u, p, x, box);
  return s;
}

}  // namespace lpvdd::testing
