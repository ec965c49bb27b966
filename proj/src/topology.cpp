#include "chiral/topology.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "chiral/pfaffian.hpp"

namespace chiral {

namespace {

constexpr cplx I{0.0, 1.0};

Eigen::Matrix4cd majorana_map() {
  Eigen::Matrix4cd w = Eigen::Matrix4cd::Zero();
  for (int i = 0; i < 2; ++i) {
    w(i, i) = 1.0;
    w(i, i + 2) = 1.0;
    w(i + 2, i) = I;
    w(i + 2, i + 2) = -I;
  }
  return w;
}

}  // namespace

MajoranaBloch majorana_bloch(const BlochMatrix& h) {
  static const Eigen::Matrix4cd w = majorana_map();
  return {h.k, w * h.entries * w.adjoint()};
}

Eigen::Matrix4d antisymmetrized(const MajoranaBloch& m, double tol) {
  const Eigen::Matrix4cd ih = I * m.entries;
  const double imag_part = ih.imag().cwiseAbs().maxCoeff();
  const double sym_part = (ih.real() + ih.real().transpose()).cwiseAbs().maxCoeff();
  if (imag_part > tol || sym_part > tol) {
    throw std::runtime_error("i H~_k is not real antisymmetric at k = " + std::to_string(m.k));
  }
  return 0.5 * (ih.real() - ih.real().transpose());
}

int z2_invariant(const ModelParams& params) {
  const double pf0 = pfaffian4(antisymmetrized(majorana_bloch(build_bloch(params, 0.0))));
  const double pfpi = pfaffian4(antisymmetrized(majorana_bloch(build_bloch(params, kPi))));
  return pf0 * pfpi < 0.0 ? -1 : 1;
}

RealSpaceBdG build_realspace(const ModelParams& p) {
  if (p.N < 2) throw std::invalid_argument("build_realspace: N must be at least 2");
  const int n_sites = p.N;
  const int modes = 2 * n_sites;
  RealSpaceBdG rs;
  rs.N = n_sites;
  rs.h = Eigen::MatrixXcd::Zero(modes, modes);
  rs.delta = Eigen::MatrixXcd::Zero(modes, modes);
  auto b = [](int n) { return 2 * n; };
  auto c = [](int n) { return 2 * n + 1; };
  auto hop = [&](int i, int j, cplx t) {
    rs.h(i, j) += t;
    rs.h(j, i) += std::conj(t);
  };
  auto pair = [&](int i, int j, cplx d) {
    rs.delta(i, j) += d;
    rs.delta(j, i) -= d;
  };

  const bool periodic = p.boundary == Boundary::periodic;
  const int bonds = periodic ? n_sites : n_sites - 1;
  const cplx ep = std::exp(I * p.phi);
  const cplx em = std::exp(-I * p.phi);
  for (int n = 0; n < n_sites; ++n) {
    rs.h(b(n), b(n)) = p.Omega0;
    rs.h(c(n), c(n)) = p.omega0;
  }
  for (int n = 0; n < bonds; ++n) {
    const int m = (n + 1) % n_sites;
    // In periodic chains of two sites the forward and backward bonds coincide.
    if (!(periodic && n_sites == 2 && n == 1)) hop(b(n), b(m), p.J);
    // g e^{i phi} c_n^dag (b_{n+1}^dag + b_{n+1}) + g e^{-i phi} c_n^dag (b_n - b_n^dag) + h.c.
    hop(c(n), b(m), p.g * ep);
    pair(c(n), b(m), p.g * ep);
    hop(c(n), b(n), p.g * em);
    pair(c(n), b(n), -p.g * em);
  }

  rs.matrix = Eigen::MatrixXcd::Zero(2 * modes, 2 * modes);
  for (int i = 0; i < modes; ++i) {
    const auto pi = RealSpaceBdG::particle_index(i);
    const auto hi = RealSpaceBdG::hole_index(i);
    for (int j = 0; j < modes; ++j) {
      const auto pj = RealSpaceBdG::particle_index(j);
      const auto hj = RealSpaceBdG::hole_index(j);
      rs.matrix(pi, pj) = rs.h(i, j);
      rs.matrix(pi, hj) = rs.delta(i, j);
      rs.matrix(hi, pj) = std::conj(rs.delta(j, i));
      rs.matrix(hi, hj) = -rs.h(j, i);
    }
  }
  return rs;
}

BdgSpectrum bdg_spectrum(const RealSpaceBdG& rs) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rs.matrix);
  if (es.info() != Eigen::Success) throw std::runtime_error("BdG eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

ZeroModeReport zero_modes(const BdgSpectrum& spectrum, int N) {
  Eigen::Index idx = 0;
  spectrum.energies.cwiseAbs().minCoeff(&idx);
  const int window = std::max(1, static_cast<int>(std::lround(0.1 * N)));
  double edge = 0.0;
  for (int n = 0; n < N; ++n) {
    if (n >= window && n < N - window) continue;
    edge += spectrum.vectors.col(idx).segment(4 * n, 4).squaredNorm();
  }
  return {std::abs(spectrum.energies(idx)), edge};
}

ZeroModeReport zero_modes(const ModelParams& params, int N) {
  ModelParams p = params;
  p.N = N;
  p.boundary = Boundary::open;
  return zero_modes(bdg_spectrum(build_realspace(p)), N);
}

double ldos(const BdgSpectrum& spectrum, double omega, int site, double eta) {
  if (eta <= 0.0) throw std::invalid_argument("ldos: broadening must be positive");
  const Eigen::Index n_states = spectrum.energies.size();
  if (site < 0 || 4 * site >= n_states) throw std::out_of_range("ldos: site outside chain");
  double rho = 0.0;
  for (Eigen::Index l = 0; l < n_states; ++l) {
    const double w = spectrum.vectors.col(l).segment(4 * site, 4).squaredNorm();
    const double d = omega - spectrum.energies(l);
    rho += w * eta / (d * d + eta * eta);
  }
  return rho / kPi;
}

std::vector<double> ldos(const BdgSpectrum& spectrum, const std::vector<double>& omegas, int site, double eta) {
  std::vector<double> out;
  out.reserve(omegas.size());
  for (double w : omegas) out.push_back(ldos(spectrum, w, site, eta));
  return out;
}

}  // namespace chiral
