#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "chiral/params.hpp"
#include "chiral/quadratic.hpp"

namespace chiral {

/// Interleaved spin basis of the ladder: chain-A site n is bit 2n, chain-B
/// site n is bit 2n+1. A set bit is spin up.
struct SpinBasis {
  int N = 0;
  int n_spins() const { return 2 * N; }
  std::uint64_t dimension() const { return std::uint64_t{1} << n_spins(); }
  static int bit_A(int n) { return 2 * n; }
  static int bit_B(int n) { return 2 * n + 1; }
};

inline constexpr int kMaxEdSpins = 16;

using SparseHamiltonian = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

/// Full interacting Hamiltonian on 2N spins in the SpinBasis ordering. N
/// overrides params.N; params.boundary selects open or periodic bonds. Throws
/// std::invalid_argument if 2N exceeds kMaxEdSpins or N < 2.
SparseHamiltonian build_hamiltonian(const ModelParams& params, int N);

/// Eigenvalue of the spin parity exp(i pi N_up) on a basis state.
inline int spin_parity(std::uint64_t state) { return (__builtin_popcountll(state) % 2 == 0) ? 1 : -1; }

struct SectorSpectrum {
  int sector = 1;
  std::vector<double> energies;  // ascending
  /// Columns are eigenvectors embedded in the full 2^{2N} space. Empty when
  /// states were not requested.
  Eigen::MatrixXcd states;
  int n_kept = 0;
};

struct SectorPair {
  SectorSpectrum even;
  SectorSpectrum odd;
};

/// Sector dimensions up to this are diagonalized densely; larger sectors use
/// Lanczos with full reorthogonalization from a fixed-seed start vector.
inline constexpr std::size_t kDenseSectorLimit = 512;

/// Lowest n_states levels of each parity sector. Throws std::runtime_error if
/// Lanczos fails to converge. A single Krylov sequence resolves only one
/// vector per degenerate eigenvalue.
SectorPair sector_spectra(const ModelParams& params, int N, int n_states, bool keep_states = true);

/// Dense diagonalization of the whole Hilbert space (small N only).
std::vector<double> full_spectrum(const ModelParams& params, int N);

struct EdGaps {
  double delta0 = 0.0;  // E_GS(odd) - E_GS(even)
  double delta1 = 0.0;  // E_1st(odd) - E_GS(even)
};

EdGaps gaps(const SectorPair& spectra);
EdGaps gaps(const ModelParams& params, int N);

/// Lowest state of the two sectors.
Eigen::VectorXcd ground_state(const SectorPair& spectra);
double ground_state_energy(const SectorPair& spectra);

struct EdObservables {
  /// <S^z> per site.
  std::vector<double> magnetization_A, magnetization_B;
  /// Two-point functions <S^a_n S^a_m>, N x N.
  Eigen::MatrixXd corr_xA, corr_yA, corr_xB, corr_yB;
  /// <(S_n x S_{n+1})^z> per bond.
  std::vector<double> chirality_A, chirality_B;
  /// Averages over bulk bonds (the end bonds are dropped when N >= 4).
  double chirality_A_bulk = 0.0, chirality_B_bulk = 0.0;
  /// sqrt|<S^x_0 S^x_{N-1}>| on chain B.
  double order_parameter = 0.0;
};

EdObservables observables(const Eigen::VectorXcd& state, int N);

/// Schmidt decomposition between unit cells [0, cut) and [cut, N).
EntanglementData entanglement_ed(const Eigen::VectorXcd& state, int N, int cut);

struct JwReport {
  double e_ed = 0.0;
  double e_ff = 0.0;
  double discrepancy = 0.0;  // e_ed - e_ff
  /// J = 0 or g = 0, where the fermion model is exactly quadratic.
  bool exact_limit = false;
};

/// Compares the interacting ground-state energy with the quadratic-fermion
/// one for open chains.
JwReport jw_consistency(const ModelParams& params, int N);

/// Applies S^a (a in x, y, z) on `bit` to a full-space state.
Eigen::VectorXcd apply_spin(const Eigen::VectorXcd& state, int bit, char axis);

}  // namespace chiral
