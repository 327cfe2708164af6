#pragma once

#include <Eigen/Dense>

namespace lpvdd {

// Scheduling-major Kronecker product: (p ⊗ v)[i*dim(v) + j] = p_i * v_j.
Eigen::VectorXd kron(const Eigen::VectorXd& p, const Eigen::VectorXd& v);

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

// I_n ⊗ m
Eigen::MatrixXd blkdiag_repeat(int n, const Eigen::MatrixXd& m);

// [v; p ⊗ v]
Eigen::VectorXd lift(const Eigen::VectorXd& v, const Eigen::VectorXd& p);

// [I; p ⊗ I] with I of size n, i.e. the operator v -> lift(v, p).
Eigen::MatrixXd lift_operator(int n, const Eigen::VectorXd& p);

// [I; p ⊗ I; p ⊗ p ⊗ I], the second-order lift used by the closed-loop map.
Eigen::MatrixXd lift_operator2(int n, const Eigen::VectorXd& p);

}  // namespace lpvdd
