#pragma once

#include <vector>

#include <Eigen/Dense>

#include "chiral/bdg_kspace.hpp"
#include "chiral/params.hpp"

namespace chiral {

/// Bloch matrix rotated to the Majorana basis, W H_k W^dag with
/// W = [[1, 1], [i, -i]] in 2x2 blocks.
struct MajoranaBloch {
  double k = 0.0;
  Eigen::Matrix4cd entries;
};

MajoranaBloch majorana_bloch(const BlochMatrix& h);

/// Real antisymmetric part of i H~_k. Throws std::runtime_error if i H~_k is
/// not real antisymmetric within `tol` (only expected at k = 0 and k = pi).
Eigen::Matrix4d antisymmetrized(const MajoranaBloch& m, double tol = 1e-10);

/// sgn(Pf[i H~_0] Pf[i H~_pi]): +1 trivial, -1 topological. A vanishing
/// Pfaffian (gap closed exactly at a time-reversal momentum) counts as +1.
int z2_invariant(const ModelParams& params);

/// Real-space quadratic Hamiltonian
///   H = sum h_ij f_i^dag f_j + 1/2 sum (delta_ij f_i^dag f_j^dag + h.c.)
/// over fermion modes f_{2n} = b_n, f_{2n+1} = c_n. `matrix` is the 4N x 4N
/// BdG matrix with per-site blocks (b_n, c_n, b_n^dag, c_n^dag) at rows
/// 4n..4n+3. The quartic correction to the chain-B hopping is dropped.
struct RealSpaceBdG {
  int N = 0;
  Eigen::MatrixXcd matrix;
  Eigen::MatrixXcd h;
  Eigen::MatrixXcd delta;

  /// Position of mode j (particle) or its conjugate (hole) in `matrix`.
  static Eigen::Index particle_index(Eigen::Index mode) { return 4 * (mode / 2) + mode % 2; }
  static Eigen::Index hole_index(Eigen::Index mode) { return 4 * (mode / 2) + 2 + mode % 2; }
};

/// Open chains by default. With periodic boundaries the wrap-around bonds are
/// added without the Jordan-Wigner boundary sign. J = 0 is accepted here so
/// the exactly quadratic limit can be built.
RealSpaceBdG build_realspace(const ModelParams& params);

struct BdgSpectrum {
  Eigen::VectorXd energies;  // ascending
  Eigen::MatrixXcd vectors;  // columns, per-site layout
};

BdgSpectrum bdg_spectrum(const RealSpaceBdG& rs);

struct ZeroModeReport {
  double E_min = 0.0;
  /// Weight of the |E|-smallest eigenvector on the outer 10% of sites of
  /// each end.
  double edge_weight = 0.0;
};

/// Uses params with N replaced by `N` and open boundaries.
ZeroModeReport zero_modes(const ModelParams& params, int N);
ZeroModeReport zero_modes(const BdgSpectrum& spectrum, int N);

inline constexpr double kDefaultBroadening = 0.02;

/// rho(omega, n) = -1/pi Im Tr[(omega + i eta - H)^-1]_{nn}, the trace running
/// over the four Nambu/flavor components of site n.
double ldos(const BdgSpectrum& spectrum, double omega, int site, double eta = kDefaultBroadening);
std::vector<double> ldos(const BdgSpectrum& spectrum, const std::vector<double>& omegas, int site,
                         double eta = kDefaultBroadening);

}  // namespace chiral
