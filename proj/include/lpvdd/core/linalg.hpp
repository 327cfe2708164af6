#pragma once

#include <Eigen/Dense>

namespace lpvdd {

// Symmetric PSD square root; fails on a matrix with a clearly negative eigenvalue.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& w);

double min_eigenvalue(const Eigen::MatrixXd& sym);
double max_eigenvalue(const Eigen::MatrixXd& sym);

}  // namespace lpvdd
