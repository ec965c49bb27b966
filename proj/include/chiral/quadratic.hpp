#pragma once

#include <complex>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "chiral/params.hpp"
#include "chiral/topology.hpp"

namespace chiral {

/// Majorana operators a_j = f_j + f_j^dag, b_j = -i (f_j - f_j^dag) are
/// interleaved as w_{2j} = a_j, w_{2j+1} = b_j, with fermion modes ordered
/// b_0, c_0, b_1, c_1, ... (the Jordan-Wigner order).
///
/// Returns the real antisymmetric A with H = (i/4) w^T A w + Tr(h)/2.
Eigen::MatrixXd majorana_hamiltonian(const RealSpaceBdG& rs);

struct CovarianceOptions {
  /// Permit exact zero modes. The filling is then fixed to the even-parity
  /// ground state.
  bool allow_degenerate = false;
  /// Single-particle energies at or below this are treated as zero modes.
  double zero_tol = 1e-10;
};

struct CovarianceData {
  int N = 0;
  Eigen::MatrixXcd C;          // <f_i^dag f_j>
  Eigen::MatrixXcd F;          // <f_i f_j>
  Eigen::MatrixXd majorana_M;  // (i/2) <[w_k, w_l]>
  /// True if zero modes were present and the filling was chosen by parity.
  bool degenerate = false;
};

/// Quasiparticle vacuum of the BdG problem. Throws std::domain_error if
/// zero modes are present and options.allow_degenerate is false.
CovarianceData ground_covariance(const RealSpaceBdG& rs, CovarianceOptions options = {});

/// Tr(h)/2 - (1/2) sum of positive single-particle energies.
double ground_energy(const RealSpaceBdG& rs);

/// Expectation of the fermion parity (-1)^{N_f}, equal to Pf(-M).
double fermion_parity(const CovarianceData& cov);

struct EntanglementData {
  int cut = 0;  // subsystem = unit cells [0, cut)
  std::vector<double> rdm_spectrum;  // descending
  double entropy = 0.0;              // nats
  double schmidt_gap = 0.0;
};

/// Entanglement of the first `cut` unit cells (both chains). Many-body levels
/// are assembled from the single-particle occupations; only the `keep`
/// largest are returned.
EntanglementData entanglement_ff(const CovarianceData& cov, int cut, int keep = 64);

/// Schmidt gap at the half-chain cut for each point; nullopt where the point
/// fails validation or the ground state could not be built.
std::vector<std::optional<double>> schmidt_gap_map(const std::vector<ModelParams>& points);

enum class SpinAxis { xB, xA, yA };

SpinAxis parse_spin_axis(std::string_view text);

/// <S^a_n S^a_m> for the chain and component selected by `axis`, evaluated as
/// a Pfaffian over the Jordan-Wigner string between the two spins.
double spin_correlator(const CovarianceData& cov, int n, int m, SpinAxis axis);

enum class Chain { A, B };

/// <(S_n x S_{n+1})^z> on one chain.
double chirality_ff(const CovarianceData& cov, Chain chain, int bond);

/// Expectation of the product S^{alpha_1}_{j_1} S^{alpha_2}_{j_2} of two spins
/// at Jordan-Wigner positions j (2n for chain B, 2n+1 for chain A), alpha in
/// {'x', 'y'}.
std::complex<double> two_spin_expectation(const CovarianceData& cov, int j1, char alpha1, int j2, char alpha2);

/// sqrt of the spin correlator between sites N/8 and N/8 + 3N/4 (N divisible
/// by 4). For phi > pi/4 the correlator is multiplied by (-1)^r to undo the
/// staggering of the ordered state. Throws std::domain_error if the
/// correlator is negative beyond 1e-8.
double order_parameter_ff(const ModelParams& params, int N, SpinAxis axis = SpinAxis::xB);

}  // namespace chiral
