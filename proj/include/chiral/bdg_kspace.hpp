#pragma once

#include <array>
#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "chiral/params.hpp"

namespace chiral {

using cplx = std::complex<double>;

/// Dispersion and coupling symbols entering the Bloch matrix at momentum k:
///   Omega_k   = Omega0 + 2 J cos k
///   gamma_k   = 2 i g e^{-ik/2} sin(phi - k/2)   (interchain pairing)
///   Upsilon_k = 2 g e^{-ik/2} cos(phi - k/2)     (interchain hopping)
struct BlochSymbols {
  double Omega_k = 0.0;
  cplx gamma_k;
  cplx Upsilon_k;
};

BlochSymbols bloch_symbols(const ModelParams& params, double k);

/// 4x4 Bogoliubov-de Gennes matrix in the Nambu basis
/// (b_k, c_k, b_{-k}^dag, c_{-k}^dag). The free-fermion Hamiltonian is
/// H = 1/2 sum_k Psi_k^dag H_k Psi_k + E0.
struct BlochMatrix {
  double k = 0.0;
  Eigen::Matrix4cd entries;
  BlochSymbols symbols;
};

BlochMatrix build_bloch(const ModelParams& params, double k);

/// Ascending eigenvalues. Ties are ordered by decreasing particle-sector
/// weight of the eigenvector so the output is deterministic.
std::array<double, 4> bloch_eigenvalues(const Eigen::Matrix4cd& h);

struct BandStructure {
  MomentumGrid grid;
  std::vector<std::array<double, 4>> bands;
  /// E0 = J sum_k cos k + N (omega0 + Omega0) / 2 with N = grid size.
  double constant = 0.0;
};

BandStructure band_structure(const ModelParams& params, const MomentumGrid& grid);

/// Particle-hole constraint X H_k X^-1 = -H_{-k} with X = (sigma^x (x) 1) K.
bool phc_holds(const Eigen::Matrix4cd& h_k, const Eigen::Matrix4cd& h_minus_k, double tol = 1e-12);
bool check_phc(const ModelParams& params, double k, double tol = 1e-12);

/// S H_k S^-1 = H_{-k} with S = (1 (x) sigma^z) K. Only defined at phi = pi/2;
/// throws std::invalid_argument otherwise.
bool check_antiunitary_pi_half(const ModelParams& params, double k, double tol = 1e-12);

/// Momentum at which the single-particle gap closes on a critical line.
enum class GapBranch { k_zero, k_pi };

struct CriticalCoupling {
  double g = 0.0;
  GapBranch branch = GapBranch::k_zero;
};

/// Gap-closing coupling of the free-fermion model. Returns nullopt at
/// phi = pi/4, where no finite coupling closes the gap.
std::optional<CriticalCoupling> critical_coupling(double omega0, double Omega0, double J, double phi);

struct GapScan {
  double min_gap = 0.0;
  double k_star = 0.0;
};

/// Minimum of |E| over the four bands and all k. A coarse scan over
/// `grid_points` momenta (the grid contains 0 and pi for even counts) is
/// refined by golden-section search around the coarse minimum.
GapScan gap_scan(const ModelParams& params, int grid_points = 2048);

/// Gap-closing coupling found numerically: coarse scan of gap_scan over
/// g in [0, g_max] followed by golden-section minimization. Returns nullopt
/// when the minimum gap stays above `closing_tol`.
std::optional<double> numeric_critical_coupling(const ModelParams& params, double g_max,
                                                int grid_points = 2048, double closing_tol = 1e-6);

/// g >> omega0, Omega0, J limit: four flat levels and the ground-state energy
/// per unit cell.
struct StrongCouplingLimit {
  std::array<double, 4> levels{};
  double gs_energy_per_site = 0.0;
};

StrongCouplingLimit strong_coupling(double g, double phi);

}  // namespace chiral
