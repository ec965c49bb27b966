#include "chiral/lswt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace chiral {

namespace {

constexpr cplx I{0.0, 1.0};

double threshold_formula(const ModelParams& p, double phi, double k) {
  const double denom = 8.0 * (1.0 + std::cos(2.0 * phi) * std::cos(k));
  const double num = p.omega0 * (p.Omega0 + 2.0 * p.J * std::cos(k));
  if (denom <= 1e-14 || num < 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(num / denom);
}

}  // namespace

cplx lswt_coupling(const ModelParams& p, double k) {
  return 2.0 * p.g * std::exp(I * (k / 2.0)) * std::cos(p.phi + k / 2.0);
}

HopfieldMatrix build_hopfield(const ModelParams& p, double k, double spin) {
  const double omega_k = p.Omega0 + 2.0 * p.J * std::cos(k);
  const cplx gk = lswt_coupling(p, k);
  const cplx gm = lswt_coupling(p, -k);
  HopfieldMatrix h;
  h.k = k;
  auto& L = h.L;
  L << omega_k, std::conj(gm), 0.0, gk,
       gm, p.omega0, gm, 0.0,
       0.0, -std::conj(gm), -omega_k, -gk,
       -std::conj(gk), 0.0, -std::conj(gk), -p.omega0;
  L *= 2.0 * spin;
  return h;
}

LswtModes para_diagonalize(const HopfieldMatrix& h) {
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(h.L);
  if (es.info() != Eigen::Success) throw std::runtime_error("Hopfield eigensolver failed");
  std::array<int, 4> order{0, 1, 2, 3};
  const auto& vals = es.eigenvalues();
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (std::abs(vals(a).real() - vals(b).real()) > 1e-12) return vals(a).real() < vals(b).real();
    return vals(a).imag() < vals(b).imag();
  });

  LswtModes out;
  out.k = h.k;
  double max_imag = 0.0;
  for (int i = 0; i < 4; ++i) {
    out.eigenvalues[i] = vals(order[i]);
    out.vectors.col(i) = es.eigenvectors().col(order[i]);
    max_imag = std::max(max_imag, std::abs(vals(order[i]).imag()));
  }
  out.status = max_imag <= kStableImag   ? Stability::stable
               : max_imag <= kMarginalImag ? Stability::marginal
                                           : Stability::unstable;
  for (int i = 0; i < 4; ++i) {
    const Eigen::Vector4cd u = out.vectors.col(i);
    const double norm = (u.adjoint() * h.metric.asDiagonal() * u)(0, 0).real();
    out.krein_norm[i] = norm;
    if (out.stable() && std::abs(norm) > 1e-14) {
      out.vectors.col(i) /= std::sqrt(std::abs(norm));
      out.krein_norm[i] = norm > 0 ? 1.0 : -1.0;
    }
  }
  return out;
}

LswtThreshold instability_threshold(const ModelParams& params, double phi) {
  if (phi < 0.0 || phi > kPi / 2) throw std::invalid_argument("phi must lie in [0, pi/2]");
  constexpr int scan = 4096;
  const MomentumGrid grid = momentum_grid(scan);
  auto f = [&](double k) { return threshold_formula(params, phi, k); };
  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.count(); ++i) {
    if (f(grid.points[i]) < f(grid.points[best])) best = i;
  }
  double k_c = grid.points[best];
  double g_c = f(k_c);
  // Golden-section refinement around the coarse minimum.
  const double dk = 2.0 * kPi / scan;
  double a = k_c - dk, b = k_c + dk;
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  while (b - a > 1e-12) {
    if (f(c) < f(d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - invphi * (b - a);
    d = a + invphi * (b - a);
  }
  const double k_ref = 0.5 * (a + b);
  if (f(k_ref) < g_c) {
    g_c = f(k_ref);
    k_c = std::remainder(k_ref, 2.0 * kPi);
    if (k_c <= -kPi) k_c += 2.0 * kPi;
  }
  if (!std::isfinite(g_c)) throw std::domain_error("no spin-wave instability for these couplings");

  LswtThreshold out;
  out.g = g_c;
  out.k_c = k_c;
  if (const double g0 = f(0.0); std::isfinite(g0)) out.g_at_zero = g0;
  if (const double gp = f(kPi); std::isfinite(gp)) out.g_at_pi = gp;
  ModelParams p = params;
  p.phi = phi;
  p.g = g_c;
  out.condition_residual = std::norm(lswt_coupling(p, -k_c)) + std::norm(lswt_coupling(p, k_c)) -
                           p.omega0 * (p.Omega0 + 2.0 * p.J * std::cos(k_c)) / 2.0;
  return out;
}

std::vector<LswtPoint> lswt_observables(const ModelParams& params, const std::vector<double>& g_values, int nk) {
  const LswtThreshold thr = instability_threshold(params, params.phi);
  const MomentumGrid grid = momentum_grid(nk);
  std::vector<LswtPoint> out;
  for (double g : g_values) {
    if (g > thr.g) {
      throw std::domain_error("g = " + std::to_string(g) + " lies beyond the spin-wave instability at " +
                              std::to_string(thr.g));
    }
    ModelParams p = params;
    p.g = g;
    double zero_point = 0.0, bosons = 0.0;
    for (double k : grid.points) {
      const LswtModes modes = para_diagonalize(build_hopfield(p, k));
      if (modes.status == Stability::unstable) {
        throw std::domain_error("unstable spin-wave mode at g = " + std::to_string(g));
      }
      for (int i = 0; i < 4; ++i) {
        if (modes.krein_norm[i] <= 0.0) continue;
        zero_point += 0.5 * modes.eigenvalues[i].real();
        bosons += std::norm(modes.vectors(2, i)) + std::norm(modes.vectors(3, i));
      }
      zero_point -= 0.5 * (p.Omega0 + 2.0 * p.J * std::cos(k) + p.omega0);
    }
    const double spins = 2.0 * static_cast<double>(grid.count());
    out.push_back({g, -0.5 + bosons / spins, zero_point / spins});
  }
  return out;
}

}  // namespace chiral
