#pragma once

#include <Eigen/Dense>

namespace chiral {

/// Pf(A) = a01 a23 - a02 a13 + a03 a12 for a 4x4 real antisymmetric matrix.
/// Throws std::invalid_argument if A deviates from antisymmetry by more
/// than `tol`.
double pfaffian4(const Eigen::Matrix4d& a, double tol = 1e-10);

/// Pfaffian of a real antisymmetric matrix by Householder reduction to
/// tridiagonal form, O(n^3). Odd dimension gives 0. The input is not
/// checked for antisymmetry; only its strict lower triangle is read.
double pfaffian(Eigen::MatrixXd a);

}  // namespace chiral
