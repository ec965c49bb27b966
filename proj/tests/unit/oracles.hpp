#pragma once

// Brute-force reference implementations used only by the tests. They share
// no code with the library: operators are built from explicit Kronecker
// products and dense eigensolves.

#include <array>
#include <complex>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "chiral/params.hpp"

namespace oracle {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Single-site operators in the basis {down, up}.
inline Mat sx() { return (Mat(2, 2) << 0, 0.5, 0.5, 0).finished(); }
inline Mat sy() { return (Mat(2, 2) << 0, cplx(0, 0.5), cplx(0, -0.5), 0).finished(); }
inline Mat sz() { return (Mat(2, 2) << -0.5, 0, 0, 0.5).finished(); }
inline Mat splus() { return (Mat(2, 2) << 0, 0, 1, 0).finished(); }
inline Mat sminus() { return (Mat(2, 2) << 0, 1, 0, 0).finished(); }
inline Mat id2() { return Mat::Identity(2, 2); }

// Product of single-qubit operators on an n-qubit register; bit 0 is the
// least significant binary digit of the basis index.
inline Mat product_op(const std::vector<std::pair<int, Mat>>& factors, int n) {
  Mat out = Mat::Identity(1, 1);
  for (int q = n - 1; q >= 0; --q) {
    Mat op = id2();
    for (const auto& [bit, m] : factors)
      if (bit == q) op = m * op;
    out = kron(out, op);
  }
  return out;
}

inline Mat site_op(const Mat& op, int bit, int n) { return product_op({{bit, op}}, n); }

// Spin ladder: chain A site n is qubit 2n, chain B site n is qubit 2n+1.
inline int qa(int site) { return 2 * site; }
inline int qb(int site) { return 2 * site + 1; }

inline Mat spin_hamiltonian(const chiral::ModelParams& p, int N) {
  const int n = 2 * N;
  const Mat na = splus() * sminus();
  Mat h = Mat::Zero(Eigen::Index{1} << n, Eigen::Index{1} << n);
  for (int s = 0; s < N; ++s) {
    h += p.omega0 * site_op(na, qa(s), n);
    h += p.Omega0 * site_op(na, qb(s), n);
  }
  const cplx e(std::cos(p.phi), std::sin(p.phi));
  for (int s = 0; s + 1 < N; ++s) {
    h += p.J * (product_op({{qb(s), splus()}, {qb(s + 1), sminus()}}, n) +
                product_op({{qb(s), sminus()}, {qb(s + 1), splus()}}, n));
    const Mat t = 2.0 * p.g *
                  (e * product_op({{qa(s), splus()}, {qb(s + 1), sx()}}, n) +
                   std::conj(e) * product_op({{qa(s), splus()}, {qb(s), sx()}}, n));
    h += t + Mat(t.adjoint());
  }
  return h;
}

struct Ground {
  double energy;
  Eigen::VectorXcd state;
  double gap;  // to the first excited level
};

inline Ground ground(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  return {es.eigenvalues()(0), es.eigenvectors().col(0), es.eigenvalues()(1) - es.eigenvalues()(0)};
}

inline cplx expect(const Eigen::VectorXcd& v, const Mat& op) { return v.dot(op * v); }

// Fermion annihilators on m modes with Jordan-Wigner strings, mode j is
// qubit j (occupied = up).
inline std::vector<Mat> annihilators(int m) {
  std::vector<Mat> out;
  const Mat zsign = (Mat(2, 2) << 1, 0, 0, -1).finished();  // (-1)^{n_j}
  for (int j = 0; j < m; ++j) {
    Mat op = Mat::Identity(1, 1);
    for (int q = m - 1; q >= 0; --q) op = kron(op, q == j ? sminus() : (q < j ? zsign : id2()));
    out.push_back(op);
  }
  return out;
}

// H = sum h_ij f_i^dag f_j + 1/2 sum (D_ij f_i^dag f_j^dag + h.c.)
inline Mat fock_hamiltonian(const Mat& h, const Mat& delta) {
  const int m = static_cast<int>(h.rows());
  const auto f = annihilators(m);
  Mat H = Mat::Zero(Eigen::Index{1} << m, Eigen::Index{1} << m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      H += h(i, j) * f[i].adjoint() * f[j];
      const Mat pair = 0.5 * delta(i, j) * f[i].adjoint() * f[j].adjoint();
      H += pair + Mat(pair.adjoint());
    }
  }
  return H;
}

// Quadratic fermion ladder written term by term. Modes 2n = b_n (chain B),
// 2n+1 = c_n (chain A); open boundaries. At J = 0 this is the exact
// Jordan-Wigner image of spin_hamiltonian.
inline Mat fermion_ladder(const chiral::ModelParams& p, int N) {
  const auto f = annihilators(2 * N);
  const auto dag = [](const Mat& m) { return Mat(m.adjoint()); };
  const auto b = [&](int n) -> const Mat& { return f[2 * n]; };
  const auto c = [&](int n) -> const Mat& { return f[2 * n + 1]; };
  Mat H = Mat::Zero(f[0].rows(), f[0].cols());
  for (int n = 0; n < N; ++n) H += p.Omega0 * dag(b(n)) * b(n) + p.omega0 * dag(c(n)) * c(n);
  const cplx e(std::cos(p.phi), std::sin(p.phi));
  for (int n = 0; n + 1 < N; ++n) {
    H += p.J * (dag(b(n)) * b(n + 1) + dag(b(n + 1)) * b(n));
    const Mat t = p.g * e * dag(c(n)) * (dag(b(n + 1)) + b(n + 1)) + p.g * std::conj(e) * dag(c(n)) * (b(n) - dag(b(n)));
    H += t + dag(t);
  }
  return H;
}

// Roots of det(x - m) for a 4x4 matrix: Faddeev-LeVerrier coefficients,
// then Durand-Kerner iteration.
inline std::array<cplx, 4> charpoly_roots(const Eigen::Matrix4cd& m) {
  std::array<cplx, 5> c{};
  c[0] = 1.0;
  Eigen::Matrix4cd M = Eigen::Matrix4cd::Zero();
  for (int k = 1; k <= 4; ++k) {
    M = m * M + c[k - 1] * Eigen::Matrix4cd::Identity();
    c[k] = -(m * M).trace() / static_cast<double>(k);
  }
  const auto p = [&](cplx x) { return (((x + c[1]) * x + c[2]) * x + c[3]) * x + c[4]; };
  const double scale = 1.0 + m.cwiseAbs().rowwise().sum().maxCoeff();
  std::array<cplx, 4> z{};
  for (int i = 0; i < 4; ++i) z[i] = scale * std::pow(cplx(0.4, 0.9), i + 1);
  for (int it = 0; it < 5000; ++it) {
    for (int i = 0; i < 4; ++i) {
      cplx den = 1.0;
      for (int j = 0; j < 4; ++j)
        if (j != i) den *= z[i] - z[j];
      z[i] -= p(z[i]) / den;
    }
  }
  return z;
}

inline Eigen::MatrixXd random_antisymmetric(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      a(i, j) = d(rng);
      a(j, i) = -a(i, j);
    }
  return a;
}

}  // namespace oracle
