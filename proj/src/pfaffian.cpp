#include "chiral/pfaffian.hpp"

#include <cmath>
#include <stdexcept>

namespace chiral {

double pfaffian4(const Eigen::Matrix4d& a, double tol) {
  if ((a + a.transpose()).cwiseAbs().maxCoeff() > tol) {
    throw std::invalid_argument("pfaffian4: matrix is not antisymmetric");
  }
  return a(0, 1) * a(2, 3) - a(0, 2) * a(1, 3) + a(0, 3) * a(1, 2);
}

double pfaffian(Eigen::MatrixXd a) {
  const Eigen::Index n = a.rows();
  if (n != a.cols()) throw std::invalid_argument("pfaffian: matrix must be square");
  if (n == 0) return 1.0;
  if (n % 2 == 1) return 0.0;

  // Rebuild the upper triangle from the lower one so rank-2 updates below
  // stay exactly antisymmetric.
  for (Eigen::Index c = 0; c < n; ++c) {
    a(c, c) = 0.0;
    for (Eigen::Index r = c + 1; r < n; ++r) a(c, r) = -a(r, c);
  }

  double pf = 1.0;
  Eigen::VectorXd v, w;
  for (Eigen::Index k = 0; k + 2 < n; k += 2) {
    const Eigen::Index m = n - k - 1;
    auto x = a.col(k).segment(k + 1, m);
    const double sigma = x.tail(m - 1).squaredNorm();
    double alpha = x(0);
    if (sigma != 0.0) {
      const double norm_x = std::sqrt(x(0) * x(0) + sigma);
      v = x;
      if (x(0) <= 0.0) {
        v(0) -= norm_x;
        alpha = norm_x;
      } else {
        v(0) += norm_x;
        alpha = -norm_x;
      }
      v.normalize();
      // Reflection P = 1 - 2 v v^T applied as P A P on the trailing block.
      auto block = a.block(k + 1, k + 1, m, m);
      w.noalias() = 2.0 * (block * v);
      block.noalias() += v * w.transpose();
      block.noalias() -= w * v.transpose();
      pf *= -1.0;  // det P
    }
    pf *= -alpha;
    if (pf == 0.0) return 0.0;
  }
  return pf * a(n - 2, n - 1);
}

}  // namespace chiral
