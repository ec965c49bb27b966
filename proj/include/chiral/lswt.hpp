#pragma once

#include <array>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "chiral/bdg_kspace.hpp"
#include "chiral/params.hpp"

namespace chiral {

/// Dynamical matrix of the spin-wave Hamiltonian about the polarized state in
/// the basis (b_k, a_k, b_{-k}^dag, a_{-k}^dag), a for chain A and b for
/// chain B. eta * L is Hermitian.
struct HopfieldMatrix {
  double k = 0.0;
  Eigen::Matrix4cd L;
  Eigen::Vector4d metric{1.0, 1.0, -1.0, -1.0};
};

/// g_k = 2 g e^{ik/2} cos(phi + k/2)
cplx lswt_coupling(const ModelParams& params, double k);

HopfieldMatrix build_hopfield(const ModelParams& params, double k, double spin = 0.5);

enum class Stability { stable, marginal, unstable };

inline constexpr double kStableImag = 1e-10;
inline constexpr double kMarginalImag = 1e-8;

struct LswtModes {
  double k = 0.0;
  /// Sorted by real part, then imaginary part.
  std::array<cplx, 4> eigenvalues{};
  Stability status = Stability::stable;
  bool stable() const { return status == Stability::stable; }
  /// Eigenvectors as columns in the order of `eigenvalues`. When stable each
  /// is scaled to Krein norm U^dag eta U = +-1.
  Eigen::Matrix4cd vectors;
  std::array<double, 4> krein_norm{};
};

LswtModes para_diagonalize(const HopfieldMatrix& h);

struct LswtThreshold {
  double g = 0.0;
  double k_c = 0.0;
  /// The formula evaluated on the k = 0 and k = pi branches, when defined.
  std::optional<double> g_at_zero;
  std::optional<double> g_at_pi;
  /// |g_{-k}|^2 + |g_k|^2 - omega0 Omega_k / 2 at (g, k_c).
  double condition_residual = 0.0;
};

/// Smallest coupling at which some mode goes soft:
/// min_k sqrt(omega0 Omega_k / (8 (1 + cos 2phi cos k))) over a 4096-point
/// scan with golden-section refinement. The other couplings come from params.
LswtThreshold instability_threshold(const ModelParams& params, double phi);

struct LswtPoint {
  double g = 0.0;
  /// Average <S^z> per spin.
  double magnetization = 0.0;
  /// Zero-point energy per spin relative to the polarized state.
  double energy = 0.0;
};

/// Spin-wave observables on an nk-point periodic momentum grid. Throws
/// std::domain_error for any g beyond the instability threshold.
std::vector<LswtPoint> lswt_observables(const ModelParams& params, const std::vector<double>& g_values,
                                        int nk = 512);

}  // namespace chiral
