#include "chiral/ed.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "chiral/topology.hpp"

namespace chiral {

namespace {

constexpr cplx I{0.0, 1.0};

void check_size(int N) {
  if (N < 2) throw std::invalid_argument("ED needs N >= 2");
  if (2 * N > kMaxEdSpins) {
    throw std::invalid_argument("ED size cap exceeded: 2N = " + std::to_string(2 * N) + " > " +
                                std::to_string(kMaxEdSpins));
  }
}

// Calls emit(to, from, amplitude) for every nonzero <to|H|from>.
template <class Emit>
void for_each_element(const ModelParams& p, int N, Emit&& emit) {
  const std::uint64_t dim = std::uint64_t{1} << (2 * N);
  const bool periodic = p.boundary == Boundary::periodic;
  const int bonds = periodic ? N : N - 1;
  const cplx ep = std::exp(I * p.phi), em = std::exp(-I * p.phi);
  for (std::uint64_t s = 0; s < dim; ++s) {
    double diag = 0.0;
    for (int n = 0; n < N; ++n) {
      if (s >> SpinBasis::bit_A(n) & 1) diag += p.omega0;
      if (s >> SpinBasis::bit_B(n) & 1) diag += p.Omega0;
    }
    emit(s, s, cplx(diag));
    for (int n = 0; n < bonds; ++n) {
      const int m = (n + 1) % N;
      const int bn = SpinBasis::bit_B(n), bm = SpinBasis::bit_B(m);
      if (!(periodic && N == 2 && n == 1) && ((s >> bn) & 1) != ((s >> bm) & 1)) {
        emit(s ^ (std::uint64_t{1} << bn) ^ (std::uint64_t{1} << bm), s, cplx(p.J));
      }
      // 2g sigma^+_n (e^{i phi} S^x_m + e^{-i phi} S^x_n) + h.c.; S^x contributes 1/2.
      const int an = SpinBasis::bit_A(n);
      const std::uint64_t flip_a = std::uint64_t{1} << an;
      const bool a_up = (s >> an) & 1;
      for (auto [b, phase] : {std::pair{bm, ep}, std::pair{bn, em}}) {
        const std::uint64_t t = s ^ flip_a ^ (std::uint64_t{1} << b);
        emit(t, s, p.g * (a_up ? std::conj(phase) : phase));
      }
    }
  }
}

struct Sector {
  std::vector<std::uint64_t> states;
  std::vector<std::int64_t> index;  // full state -> sector position, -1 outside
};

Sector make_sector(int N, int parity) {
  Sector sec;
  const std::uint64_t dim = std::uint64_t{1} << (2 * N);
  sec.index.assign(dim, -1);
  for (std::uint64_t s = 0; s < dim; ++s) {
    if (spin_parity(s) == parity) {
      sec.index[s] = static_cast<std::int64_t>(sec.states.size());
      sec.states.push_back(s);
    }
  }
  return sec;
}

SparseHamiltonian sector_hamiltonian(const ModelParams& p, int N, const Sector& sec) {
  std::vector<Eigen::Triplet<cplx>> trips;
  for_each_element(p, N, [&](std::uint64_t to, std::uint64_t from, cplx amp) {
    if (amp == 0.0) return;
    const auto r = sec.index[to], c = sec.index[from];
    if (r >= 0 && c >= 0) trips.emplace_back(r, c, amp);
  });
  const auto d = static_cast<Eigen::Index>(sec.states.size());
  SparseHamiltonian h(d, d);
  h.setFromTriplets(trips.begin(), trips.end());
  return h;
}

struct Eigenpairs {
  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;
};

Eigenpairs lanczos(const SparseHamiltonian& h, int n_states, bool want_vectors) {
  const Eigen::Index dim = h.rows();
  const int max_steps = static_cast<int>(std::min<Eigen::Index>(dim, 400));
  std::mt19937_64 rng(20240611);
  std::normal_distribution<double> normal;
  Eigen::VectorXcd v0(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v0(i) = cplx(normal(rng), normal(rng));
  v0.normalize();

  std::vector<Eigen::VectorXcd> basis{v0};
  std::vector<double> alpha, beta;
  Eigen::VectorXcd w;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
  auto solve_tridiagonal = [&](int m) {
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      t(i, i) = alpha[i];
      if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
    }
    tri.compute(t);
  };

  bool converged = false;
  int m = 0;
  for (int j = 0; j < max_steps; ++j) {
    w.noalias() = h * basis[j];
    alpha.push_back(basis[j].dot(w).real());
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis) w -= q.dot(w) * q;
    }
    const double b = w.norm();
    m = j + 1;
    const bool exhausted = b < 1e-12 || m == dim;
    if (exhausted || (m >= n_states && (m % 10 == 0 || m == max_steps))) {
      solve_tridiagonal(m);
      const int k = std::min(n_states, m);
      double worst = 0.0;
      for (int i = 0; i < k; ++i) {
        const double e = tri.eigenvalues()(i);
        worst = std::max(worst, b * std::abs(tri.eigenvectors()(m - 1, i)) / std::max(1.0, std::abs(e)));
      }
      if (exhausted || worst < 1e-11) {
        converged = true;
        break;
      }
    }
    beta.push_back(b);
    basis.push_back(w / b);
  }
  if (!converged) throw std::runtime_error("Lanczos did not converge");

  const int k = std::min(n_states, m);
  Eigenpairs out;
  out.values = tri.eigenvalues().head(k);
  if (want_vectors) {
    out.vectors = Eigen::MatrixXcd::Zero(dim, k);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < m; ++j) out.vectors.col(i) += tri.eigenvectors()(j, i) * basis[j];
      out.vectors.col(i).normalize();
    }
  }
  return out;
}

Eigenpairs dense(const SparseHamiltonian& h, int n_states, bool want_vectors) {
  const Eigen::MatrixXcd m = Eigen::MatrixXcd(h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, want_vectors ? Eigen::ComputeEigenvectors
                                                                     : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("dense ED eigensolver failed");
  const int k = static_cast<int>(std::min<Eigen::Index>(n_states, m.rows()));
  Eigenpairs out;
  out.values = es.eigenvalues().head(k);
  if (want_vectors) out.vectors = es.eigenvectors().leftCols(k);
  return out;
}

SectorSpectrum solve_sector(const ModelParams& p, int N, int parity, int n_states, bool keep_states) {
  const Sector sec = make_sector(N, parity);
  const SparseHamiltonian h = sector_hamiltonian(p, N, sec);
  const Eigenpairs ep = sec.states.size() <= kDenseSectorLimit ? dense(h, n_states, keep_states)
                                                               : lanczos(h, n_states, keep_states);
  SectorSpectrum out;
  out.sector = parity;
  out.n_kept = static_cast<int>(ep.values.size());
  out.energies.assign(ep.values.data(), ep.values.data() + ep.values.size());
  if (keep_states) {
    const SpinBasis basis{N};
    out.states = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(basis.dimension()), out.n_kept);
    for (std::size_t i = 0; i < sec.states.size(); ++i) {
      out.states.row(static_cast<Eigen::Index>(sec.states[i])) = ep.vectors.row(static_cast<Eigen::Index>(i));
    }
  }
  return out;
}

}  // namespace

SparseHamiltonian build_hamiltonian(const ModelParams& params, int N) {
  check_size(N);
  const auto dim = static_cast<Eigen::Index>(SpinBasis{N}.dimension());
  std::vector<Eigen::Triplet<cplx>> trips;
  for_each_element(params, N, [&](std::uint64_t to, std::uint64_t from, cplx amp) {
    if (amp != 0.0) trips.emplace_back(static_cast<Eigen::Index>(to), static_cast<Eigen::Index>(from), amp);
  });
  SparseHamiltonian h(dim, dim);
  h.setFromTriplets(trips.begin(), trips.end());
  return h;
}

SectorPair sector_spectra(const ModelParams& params, int N, int n_states, bool keep_states) {
  check_size(N);
  if (n_states < 1) throw std::invalid_argument("n_states must be positive");
  return {solve_sector(params, N, 1, n_states, keep_states), solve_sector(params, N, -1, n_states, keep_states)};
}

std::vector<double> full_spectrum(const ModelParams& params, int N) {
  const Eigen::MatrixXcd h = Eigen::MatrixXcd(build_hamiltonian(params, N));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

EdGaps gaps(const SectorPair& s) {
  if (s.even.energies.empty() || s.odd.energies.size() < 2) {
    throw std::invalid_argument("gaps need one even and two odd levels");
  }
  return {s.odd.energies[0] - s.even.energies[0], s.odd.energies[1] - s.even.energies[0]};
}

EdGaps gaps(const ModelParams& params, int N) { return gaps(sector_spectra(params, N, 2, false)); }

Eigen::VectorXcd ground_state(const SectorPair& s) {
  const SectorSpectrum& best = s.even.energies[0] <= s.odd.energies[0] ? s.even : s.odd;
  if (best.states.cols() == 0) throw std::invalid_argument("sector spectra were computed without states");
  return best.states.col(0);
}

double ground_state_energy(const SectorPair& s) { return std::min(s.even.energies[0], s.odd.energies[0]); }

Eigen::VectorXcd apply_spin(const Eigen::VectorXcd& state, int bit, char axis) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(state.size());
  const std::uint64_t mask = std::uint64_t{1} << bit;
  for (Eigen::Index s = 0; s < state.size(); ++s) {
    const auto u = static_cast<std::uint64_t>(s);
    const bool up = u & mask;
    switch (axis) {
      case 'x':
        out(static_cast<Eigen::Index>(u ^ mask)) += 0.5 * state(s);
        break;
      case 'y':
        // S^y = (S^+ - S^-) / 2i
        out(static_cast<Eigen::Index>(u ^ mask)) += (up ? 0.5 * I : -0.5 * I) * state(s);
        break;
      case 'z':
        out(s) += (up ? 0.5 : -0.5) * state(s);
        break;
      default:
        throw std::invalid_argument("spin axis must be x, y or z");
    }
  }
  return out;
}

EdObservables observables(const Eigen::VectorXcd& state, int N) {
  check_size(N);
  if (static_cast<std::uint64_t>(state.size()) != SpinBasis{N}.dimension()) {
    throw std::invalid_argument("state dimension does not match N");
  }
  EdObservables o;
  o.corr_xA = o.corr_yA = o.corr_xB = o.corr_yB = Eigen::MatrixXd::Zero(N, N);
  std::vector<Eigen::VectorXcd> xa, ya, xb, yb;
  for (int n = 0; n < N; ++n) {
    const int a = SpinBasis::bit_A(n), b = SpinBasis::bit_B(n);
    o.magnetization_A.push_back(state.dot(apply_spin(state, a, 'z')).real());
    o.magnetization_B.push_back(state.dot(apply_spin(state, b, 'z')).real());
    xa.push_back(apply_spin(state, a, 'x'));
    ya.push_back(apply_spin(state, a, 'y'));
    xb.push_back(apply_spin(state, b, 'x'));
    yb.push_back(apply_spin(state, b, 'y'));
  }
  for (int n = 0; n < N; ++n) {
    for (int m = 0; m < N; ++m) {
      o.corr_xA(n, m) = xa[n].dot(xa[m]).real();
      o.corr_yA(n, m) = ya[n].dot(ya[m]).real();
      o.corr_xB(n, m) = xb[n].dot(xb[m]).real();
      o.corr_yB(n, m) = yb[n].dot(yb[m]).real();
    }
  }
  for (int n = 0; n + 1 < N; ++n) {
    o.chirality_A.push_back(xa[n].dot(ya[n + 1]).real() - ya[n].dot(xa[n + 1]).real());
    o.chirality_B.push_back(xb[n].dot(yb[n + 1]).real() - yb[n].dot(xb[n + 1]).real());
  }
  const int first = N >= 4 ? 1 : 0;
  const int last = N >= 4 ? N - 2 : N - 1;  // exclusive
  for (int n = first; n < last; ++n) {
    o.chirality_A_bulk += o.chirality_A[n];
    o.chirality_B_bulk += o.chirality_B[n];
  }
  o.chirality_A_bulk /= (last - first);
  o.chirality_B_bulk /= (last - first);
  o.order_parameter = std::sqrt(std::abs(o.corr_xB(0, N - 1)));
  return o;
}

EntanglementData entanglement_ed(const Eigen::VectorXcd& state, int N, int cut) {
  check_size(N);
  if (cut <= 0 || cut >= N) throw std::out_of_range("entanglement cut must lie in (0, N)");
  const Eigen::Index left = Eigen::Index{1} << (2 * cut);
  const Eigen::Index right = state.size() / left;
  // Low bits index the left block.
  const Eigen::Map<const Eigen::MatrixXcd> psi(state.data(), left, right);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(psi);
  EntanglementData out;
  out.cut = cut;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    const double lam = svd.singularValues()(i) * svd.singularValues()(i);
    out.rdm_spectrum.push_back(lam);
    if (lam > 0.0) out.entropy -= lam * std::log(lam);
  }
  out.schmidt_gap = out.rdm_spectrum.size() > 1 ? out.rdm_spectrum[0] - out.rdm_spectrum[1] : out.rdm_spectrum[0];
  return out;
}

JwReport jw_consistency(const ModelParams& params, int N) {
  ModelParams p = params;
  p.N = N;
  p.boundary = Boundary::open;
  JwReport r;
  r.e_ed = ground_state_energy(sector_spectra(p, N, 1, false));
  r.e_ff = ground_energy(build_realspace(p));
  r.discrepancy = r.e_ed - r.e_ff;
  r.exact_limit = p.J == 0.0 || p.g == 0.0;
  return r;
}

}  // namespace chiral
