#include "chiral/bdg_kspace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace chiral {

namespace {

constexpr cplx I{0.0, 1.0};

Eigen::Matrix4cd particle_hole_image(const Eigen::Matrix4cd& h) {
  // (sigma^x (x) 1) h^* (sigma^x (x) 1)
  Eigen::Matrix4cd out;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) out(r, c) = std::conj(h((r + 2) % 4, (c + 2) % 4));
  }
  return out;
}

double min_abs_eigenvalue(const ModelParams& params, double k) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(build_bloch(params, k).entries, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().minCoeff();
}

/// Golden-section minimization of f on [a, b].
template <class F>
std::pair<double, double> golden_min(F&& f, double a, double b, double tol) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

}  // namespace

BlochSymbols bloch_symbols(const ModelParams& p, double k) {
  BlochSymbols s;
  s.Omega_k = p.Omega0 + 2.0 * p.J * std::cos(k);
  const cplx half_phase = std::exp(-I * (k / 2.0));
  s.gamma_k = 2.0 * I * p.g * half_phase * std::sin(p.phi - k / 2.0);
  s.Upsilon_k = 2.0 * p.g * half_phase * std::cos(p.phi - k / 2.0);
  return s;
}

BlochMatrix build_bloch(const ModelParams& p, double k) {
  const BlochSymbols s = bloch_symbols(p, k);
  const BlochSymbols m = bloch_symbols(p, -k);
  BlochMatrix out;
  out.k = k;
  out.symbols = s;
  auto& h = out.entries;
  h.setZero();
  h(0, 0) = s.Omega_k;
  h(0, 1) = std::conj(s.Upsilon_k);
  h(0, 3) = -m.gamma_k;
  h(1, 0) = s.Upsilon_k;
  h(1, 1) = p.omega0;
  h(1, 2) = s.gamma_k;
  h(2, 1) = std::conj(s.gamma_k);
  h(2, 2) = -s.Omega_k;
  h(2, 3) = -m.Upsilon_k;
  h(3, 0) = -std::conj(m.gamma_k);
  h(3, 2) = -std::conj(m.Upsilon_k);
  h(3, 3) = -p.omega0;
  return out;
}

std::array<double, 4> bloch_eigenvalues(const Eigen::Matrix4cd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(h);
  std::array<int, 4> order{0, 1, 2, 3};
  const auto& vals = es.eigenvalues();
  const auto& vecs = es.eigenvectors();
  auto particle_weight = [&](int i) { return vecs.col(i).head<2>().squaredNorm(); };
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (std::abs(vals(a) - vals(b)) > 1e-12) return vals(a) < vals(b);
    return particle_weight(a) > particle_weight(b);
  });
  std::array<double, 4> out{};
  for (int i = 0; i < 4; ++i) out[i] = vals(order[i]);
  return out;
}

BandStructure band_structure(const ModelParams& params, const MomentumGrid& grid) {
  BandStructure bs;
  bs.grid = grid;
  bs.bands.reserve(grid.count());
  double cos_sum = 0.0;
  for (double k : grid.points) {
    bs.bands.push_back(bloch_eigenvalues(build_bloch(params, k).entries));
    cos_sum += std::cos(k);
  }
  bs.constant = params.J * cos_sum +
                static_cast<double>(grid.count()) * (params.omega0 + params.Omega0) / 2.0;
  return bs;
}

bool phc_holds(const Eigen::Matrix4cd& h_k, const Eigen::Matrix4cd& h_minus_k, double tol) {
  return (particle_hole_image(h_k) + h_minus_k).cwiseAbs().maxCoeff() <= tol;
}

bool check_phc(const ModelParams& params, double k, double tol) {
  return phc_holds(build_bloch(params, k).entries, build_bloch(params, -k).entries, tol);
}

bool check_antiunitary_pi_half(const ModelParams& params, double k, double tol) {
  if (std::abs(params.phi - kPi / 2) > 1e-12) {
    throw std::invalid_argument("the anti-unitary symmetry is only defined at phi = pi/2");
  }
  const Eigen::Matrix4cd h = build_bloch(params, k).entries;
  const Eigen::Matrix4cd hm = build_bloch(params, -k).entries;
  const Eigen::Vector4cd sz(1.0, -1.0, 1.0, -1.0);
  const Eigen::Matrix4cd image = sz.asDiagonal() * h.conjugate() * sz.asDiagonal();
  return (image - hm).cwiseAbs().maxCoeff() <= tol;
}

std::optional<CriticalCoupling> critical_coupling(double omega0, double Omega0, double J, double phi) {
  const double c2 = std::cos(2.0 * phi);
  if (std::abs(phi - kPi / 4) < 1e-12 || c2 == 0.0) return std::nullopt;
  if (phi < kPi / 4) {
    return CriticalCoupling{0.5 * std::sqrt(omega0 * (Omega0 + 2.0 * J) / c2), GapBranch::k_zero};
  }
  return CriticalCoupling{0.5 * std::sqrt(omega0 * (Omega0 - 2.0 * J) / std::abs(c2)), GapBranch::k_pi};
}

GapScan gap_scan(const ModelParams& params, int grid_points) {
  const MomentumGrid grid = momentum_grid(grid_points);
  std::vector<double> gaps(grid.count());
  for (std::size_t i = 0; i < grid.count(); ++i) gaps[i] = min_abs_eigenvalue(params, grid.points[i]);
  const auto it = std::min_element(gaps.begin(), gaps.end());
  const auto idx = static_cast<std::size_t>(it - gaps.begin());
  GapScan best{*it, grid.points[idx]};

  // Refine within the neighbouring grid cells; the grid is periodic.
  const double dk = 2.0 * kPi / grid_points;
  const double k0 = grid.points[idx];
  auto f = [&](double k) { return min_abs_eigenvalue(params, k); };
  auto [k_ref, g_ref] = golden_min(f, k0 - dk, k0 + dk, 1e-12);
  if (g_ref < best.min_gap) {
    // Map back into (-pi, pi].
    double k = std::remainder(k_ref, 2.0 * kPi);
    if (k <= -kPi) k += 2.0 * kPi;
    best = {g_ref, k};
  }
  return best;
}

std::optional<double> numeric_critical_coupling(const ModelParams& params, double g_max, int grid_points,
                                                double closing_tol) {
  constexpr int coarse = 64;
  ModelParams p = params;
  auto gap_at = [&](double g) {
    p.g = g;
    return gap_scan(p, grid_points).min_gap;
  };
  const double dg = g_max / coarse;
  double best_g = 0.0;
  double best_gap = gap_at(0.0);
  for (int i = 1; i <= coarse; ++i) {
    const double gap = gap_at(i * dg);
    if (gap < best_gap) {
      best_gap = gap;
      best_g = i * dg;
    }
  }
  auto [g_star, gap_star] =
      golden_min(gap_at, std::max(0.0, best_g - dg), std::min(g_max, best_g + dg), 1e-8);
  if (gap_star > closing_tol) return std::nullopt;
  return g_star;
}

StrongCouplingLimit strong_coupling(double g, double phi) {
  const double plus = 2.0 * g * (std::cos(phi) + std::sin(phi));
  const double minus = 2.0 * g * (std::cos(phi) - std::sin(phi));
  StrongCouplingLimit out;
  out.levels = {-std::abs(plus), -std::abs(minus), std::abs(minus), std::abs(plus)};
  std::sort(out.levels.begin(), out.levels.end());
  out.gs_energy_per_site = phi <= kPi / 4 ? -4.0 * g * std::cos(phi) : -4.0 * g * std::sin(phi);
  return out;
}

}  // namespace chiral
