#include "chiral/quadratic.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

#include "chiral/pfaffian.hpp"

namespace chiral {

namespace {

constexpr cplx I{0.0, 1.0};

// Modes with energy below this are rebuilt from an exact decomposition of A
// restricted to their subspace instead of the (-A^2)^{-1/2} formula.
constexpr double kNearNull = 1e-3;

Eigen::MatrixXd real_basis(const Eigen::MatrixXcd& z) {
  // z spans a subspace closed under conjugation; recover a real orthonormal
  // basis of the same dimension.
  Eigen::MatrixXd x(z.rows(), 2 * z.cols());
  x << z.real(), z.imag();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU);
  return svd.matrixU().leftCols(z.cols());
}

double binary_entropy(double p) {
  double s = 0.0;
  if (p > 0.0 && p < 1.0) s -= p * std::log(p) + (1.0 - p) * std::log(1.0 - p);
  return s;
}

}  // namespace

Eigen::MatrixXd majorana_hamiltonian(const RealSpaceBdG& rs) {
  const Eigen::Index m = rs.h.rows();
  const Eigen::MatrixXd hR = rs.h.real(), hI = rs.h.imag();
  const Eigen::MatrixXd dR = rs.delta.real(), dI = rs.delta.imag();
  Eigen::MatrixXd a(2 * m, 2 * m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      a(2 * i, 2 * j) = hI(i, j) + dI(i, j);
      a(2 * i + 1, 2 * j + 1) = hI(i, j) - dI(i, j);
      a(2 * i, 2 * j + 1) = hR(i, j) - dR(i, j);
      a(2 * i + 1, 2 * j) = -hR(i, j) - dR(i, j);
    }
  }
  return a;
}

CovarianceData ground_covariance(const RealSpaceBdG& rs, CovarianceOptions options) {
  const Eigen::MatrixXd a = majorana_hamiltonian(rs);
  const Eigen::Index n = a.rows();

  Eigen::MatrixXd s(n, n);
  s.noalias() = a.transpose() * a;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  if (es.info() != Eigen::Success) throw std::runtime_error("covariance eigensolver failed");
  const Eigen::VectorXd& lam = es.eigenvalues();
  const Eigen::MatrixXd& v = es.eigenvectors();

  Eigen::Index m0 = 0;
  while (m0 < n && lam(m0) < kNearNull * kNearNull) ++m0;
  if (m0 % 2 == 1) ++m0;
  const Eigen::Index m1 = n - m0;

  Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(n, n);
  if (m1 > 0) {
    const Eigen::VectorXd inv_eps = lam.tail(m1).cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd av(n, m1);
    av.noalias() = a * v.rightCols(m1);
    gamma.noalias() = -(av * inv_eps.asDiagonal()) * v.rightCols(m1).transpose();
  }

  CovarianceData cov;
  cov.N = rs.N;
  Eigen::MatrixXd first_pair;
  if (m0 > 0) {
    const Eigen::MatrixXd v0 = v.leftCols(m0);
    Eigen::MatrixXd a0 = v0.transpose() * a * v0;
    a0 = 0.5 * (a0 - a0.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> small(I * a0.cast<cplx>());
    Eigen::MatrixXd g0 = Eigen::MatrixXd::Zero(m0, m0);
    std::vector<Eigen::Index> zero_cols;
    for (Eigen::Index l = 0; l < m0; ++l) {
      const double mu = small.eigenvalues()(l);
      if (std::abs(mu) <= options.zero_tol) {
        zero_cols.push_back(l);
        continue;
      }
      const Eigen::VectorXcd u = small.eigenvectors().col(l);
      g0 += (I * (mu > 0 ? 1.0 : -1.0) * (u * u.adjoint())).real();
    }
    if (!zero_cols.empty()) {
      if (!options.allow_degenerate) {
        throw std::domain_error("ground state is degenerate (zero modes present); filling is ambiguous");
      }
      Eigen::MatrixXcd z(m0, static_cast<Eigen::Index>(zero_cols.size()));
      for (std::size_t c = 0; c < zero_cols.size(); ++c) z.col(c) = small.eigenvectors().col(zero_cols[c]);
      const Eigen::MatrixXd r = real_basis(z);
      for (Eigen::Index c = 0; c + 1 < r.cols(); c += 2) {
        const Eigen::MatrixXd pair =
            r.col(c) * r.col(c + 1).transpose() - r.col(c + 1) * r.col(c).transpose();
        g0 += pair;
        if (c == 0) first_pair = v0 * pair * v0.transpose();
      }
      cov.degenerate = true;
    }
    gamma.noalias() += v0 * g0 * v0.transpose();
  }
  gamma = 0.5 * (gamma - gamma.transpose()).eval();
  cov.majorana_M = std::move(gamma);
  if (cov.degenerate && fermion_parity(cov) < 0.0) cov.majorana_M -= 2.0 * first_pair;

  // <w_k w_l> = delta_kl - i M_kl
  const Eigen::Index modes = n / 2;
  cov.C.resize(modes, modes);
  cov.F.resize(modes, modes);
  auto g = [&](Eigen::Index k, Eigen::Index l) {
    return cplx(k == l ? 1.0 : 0.0, -cov.majorana_M(k, l));
  };
  for (Eigen::Index i = 0; i < modes; ++i) {
    for (Eigen::Index j = 0; j < modes; ++j) {
      const cplx aa = g(2 * i, 2 * j), ab = g(2 * i, 2 * j + 1);
      const cplx ba = g(2 * i + 1, 2 * j), bb = g(2 * i + 1, 2 * j + 1);
      cov.C(i, j) = 0.25 * (aa + I * ab - I * ba + bb);
      cov.F(i, j) = 0.25 * (aa + I * ab + I * ba - bb);
    }
  }
  return cov;
}

double ground_energy(const RealSpaceBdG& rs) {
  const Eigen::MatrixXd a = majorana_hamiltonian(rs);
  Eigen::MatrixXd s(a.rows(), a.cols());
  s.noalias() = a.transpose() * a;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
  // Each single-particle energy appears twice in the spectrum of -A^2.
  const double eps_sum = 0.5 * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return 0.5 * rs.h.trace().real() - 0.5 * eps_sum;
}

double fermion_parity(const CovarianceData& cov) { return pfaffian(-cov.majorana_M); }

EntanglementData entanglement_ff(const CovarianceData& cov, int cut, int keep) {
  if (cut <= 0 || cut >= cov.N) throw std::out_of_range("entanglement cut must lie in (0, N)");
  if (keep < 2) throw std::invalid_argument("entanglement: keep at least two levels");
  const Eigen::Index dim = 4 * cut;
  const Eigen::MatrixXcd sub = I * cov.majorana_M.topLeftCorner(dim, dim).cast<cplx>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sub, Eigen::EigenvaluesOnly);
  // Spectrum is +-nu; the upper half carries one level per mode.
  std::vector<double> nu;
  for (Eigen::Index l = dim / 2; l < dim; ++l) nu.push_back(std::clamp(es.eigenvalues()(l), 0.0, 1.0));

  EntanglementData out;
  out.cut = cut;
  double top = 1.0;
  std::vector<double> ratios;
  for (double v : nu) {
    const double p = 0.5 * (1.0 + v);
    out.entropy += binary_entropy(p);
    top *= p;
    ratios.push_back((1.0 - p) / p);
  }
  std::sort(ratios.begin(), ratios.end(), std::greater<>());

  // Best-first enumeration of subsets of flipped modes in decreasing weight:
  // a node (weight, last) spawns "append last+1" and "replace last by last+1".
  out.rdm_spectrum.push_back(top);
  using Node = std::pair<double, std::size_t>;
  std::priority_queue<Node> heap;
  if (!ratios.empty()) heap.push({top * ratios[0], 0});
  while (!heap.empty() && static_cast<int>(out.rdm_spectrum.size()) < keep) {
    auto [w, last] = heap.top();
    heap.pop();
    out.rdm_spectrum.push_back(w);
    if (last + 1 < ratios.size()) {
      heap.push({w * ratios[last + 1], last + 1});
      if (ratios[last] > 0.0) heap.push({w / ratios[last] * ratios[last + 1], last + 1});
    }
  }
  out.schmidt_gap = out.rdm_spectrum.size() > 1 ? out.rdm_spectrum[0] - out.rdm_spectrum[1] : out.rdm_spectrum[0];
  return out;
}

std::vector<std::optional<double>> schmidt_gap_map(const std::vector<ModelParams>& points) {
  std::vector<std::optional<double>> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    try {
      const ModelParams q = validate(p).params;
      const auto cov = ground_covariance(build_realspace(q), {.allow_degenerate = true});
      out.push_back(entanglement_ff(cov, q.N / 2).schmidt_gap);
    } catch (const std::exception&) {
      out.push_back(std::nullopt);
    }
  }
  return out;
}

SpinAxis parse_spin_axis(std::string_view text) {
  if (text == "xB") return SpinAxis::xB;
  if (text == "xA") return SpinAxis::xA;
  if (text == "yA") return SpinAxis::yA;
  throw std::invalid_argument("unknown spin axis: " + std::string(text));
}

std::complex<double> two_spin_expectation(const CovarianceData& cov, int j1, char alpha1, int j2, char alpha2) {
  const int modes = 2 * cov.N;
  if (j1 < 0 || j2 < 0 || j1 >= modes || j2 >= modes) throw std::out_of_range("spin position outside chain");
  auto check = [](char a) {
    if (a != 'x' && a != 'y') throw std::invalid_argument("spin component must be x or y");
  };
  check(alpha1);
  check(alpha2);
  // S^x_j = K_j a_j / 2 and S^y_j = -K_j b_j / 2, K_j = prod_{i<j} (-i a_i b_i).
  auto majorana = [](int j, char a) { return a == 'x' ? 2 * j : 2 * j + 1; };
  cplx coef = 0.25 * (alpha1 == 'x' ? 1.0 : -1.0) * (alpha2 == 'x' ? 1.0 : -1.0);
  if (j1 == j2) {
    // S^a S^a = 1/4; S^x S^y = (i/2) S^z
    if (alpha1 == alpha2) return 0.25;
    const double sz = cov.C(j1, j1).real() - 0.5;
    return (alpha1 == 'x' ? 0.5 : -0.5) * I * sz;
  }
  if (j1 > j2) {
    std::swap(j1, j2);
    std::swap(alpha1, alpha2);
  }
  std::vector<int> ops;
  ops.reserve(2 * (j2 - j1) + 2);
  ops.push_back(majorana(j1, alpha1));
  for (int l = j1; l < j2; ++l) {
    ops.push_back(2 * l);
    ops.push_back(2 * l + 1);
    coef *= -I;
  }
  ops.push_back(majorana(j2, alpha2));

  // Stable sort with the sign of the permutation among distinct operators,
  // then cancel squares (w^2 = 1).
  for (std::size_t i = 1; i < ops.size(); ++i) {
    for (std::size_t k = i; k > 0 && ops[k - 1] > ops[k]; --k) {
      std::swap(ops[k - 1], ops[k]);
      coef = -coef;
    }
  }
  std::vector<int> reduced;
  for (int w : ops) {
    if (!reduced.empty() && reduced.back() == w) {
      reduced.pop_back();
    } else {
      reduced.push_back(w);
    }
  }
  if (reduced.size() % 2 == 1) return 0.0;
  const auto len = static_cast<Eigen::Index>(reduced.size());
  Eigen::MatrixXd sub(len, len);
  for (Eigen::Index p = 0; p < len; ++p) {
    for (Eigen::Index q = 0; q < len; ++q) sub(p, q) = cov.majorana_M(reduced[p], reduced[q]);
  }
  // <w_1 ... w_2n> = Pf(-i M_sub) = (-i)^n Pf(M_sub)
  cplx phase = 1.0;
  for (Eigen::Index p = 0; p < len / 2; ++p) phase *= -I;
  return coef * phase * pfaffian(sub);
}

double spin_correlator(const CovarianceData& cov, int n, int m, SpinAxis axis) {
  if (n < 0 || m < 0 || n >= cov.N || m >= cov.N) throw std::out_of_range("site outside chain");
  const int offset = axis == SpinAxis::xB ? 0 : 1;
  const char a = axis == SpinAxis::yA ? 'y' : 'x';
  return two_spin_expectation(cov, 2 * n + offset, a, 2 * m + offset, a).real();
}

double chirality_ff(const CovarianceData& cov, Chain chain, int bond) {
  if (bond < 0 || bond + 1 >= cov.N) throw std::out_of_range("bond outside chain");
  const int j = 2 * bond + (chain == Chain::A ? 1 : 0);
  const cplx k = two_spin_expectation(cov, j, 'x', j + 2, 'y') - two_spin_expectation(cov, j, 'y', j + 2, 'x');
  return k.real();
}

double order_parameter_ff(const ModelParams& params, int N, SpinAxis axis) {
  if (N < 4 || N % 4 != 0) throw std::invalid_argument("order parameter needs N divisible by 4");
  ModelParams p = params;
  p.N = N;
  p.boundary = Boundary::open;
  const auto cov = ground_covariance(build_realspace(p), {.allow_degenerate = true});
  const int r = 3 * N / 4;
  const int n1 = N / 8;
  double corr = spin_correlator(cov, n1, n1 + r, axis);
  if (p.phi > kPi / 4 && r % 2 == 1) corr = -corr;
  if (corr < -1e-8) throw std::domain_error("order parameter: correlator is negative for this axis");
  return std::sqrt(std::max(corr, 0.0));
}

}  // namespace chiral
