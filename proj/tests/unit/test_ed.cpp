#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "chiral/ed.hpp"
#include "chiral/quadratic.hpp"
#include "chiral/topology.hpp"
#include "oracles.hpp"

using namespace chiral;

namespace {

ModelParams ref(double g, double phi, int N) {
  return {.omega0 = 2.5, .Omega0 = 2.5, .J = 1.0, .g = g, .phi = phi, .N = N};
}

}  // namespace

TEST_CASE("Hamiltonian matches the Kronecker-product oracle") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int N : {2, 3, 4}) {
    for (int t = 0; t < 3; ++t) {
      ModelParams p{.omega0 = 1 + 3 * u(rng), .Omega0 = 2 + 3 * u(rng), .J = 0.5 + u(rng), .g = 2 * u(rng),
                    .phi = kPi / 2 * u(rng), .N = N};
      const Eigen::MatrixXcd mine = Eigen::MatrixXcd(build_hamiltonian(p, N));
      const Eigen::MatrixXcd want = oracle::spin_hamiltonian(p, N);
      CHECK((mine - want).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  CHECK_THROWS_AS(build_hamiltonian(ref(1.0, 0.0, 9), 9), std::invalid_argument);
  CHECK_THROWS_AS(build_hamiltonian(ref(1.0, 0.0, 1), 1), std::invalid_argument);
}

TEST_CASE("Hamiltonian commutes with spin parity") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 5; ++t) {
    const auto p = ref(3 * u(rng), kPi / 2 * u(rng), 5);
    const SparseHamiltonian h = build_hamiltonian(p, 5);
    double worst = 0.0;
    for (Eigen::Index r = 0; r < h.outerSize(); ++r)
      for (SparseHamiltonian::InnerIterator it(h, r); it; ++it)
        if (spin_parity(static_cast<std::uint64_t>(it.row())) != spin_parity(static_cast<std::uint64_t>(it.col())))
          worst = std::max(worst, std::abs(it.value()));
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("decoupled N = 2 spectrum") {
  const auto p = ref(0.0, 0.0, 2);
  const auto spec = full_spectrum(p, 2);
  std::vector<double> expect;
  for (double a : {0.0, 2.5, 2.5, 5.0})
    for (double b : {0.0, 2.5 - 1.0, 2.5 + 1.0, 5.0}) expect.push_back(a + b);
  std::sort(expect.begin(), expect.end());
  REQUIRE(spec.size() == 16);
  for (int i = 0; i < 16; ++i) CHECK(spec[i] == doctest::Approx(expect[i]).epsilon(1e-12));
}

TEST_CASE("single-magnon energies on a ring") {
  ModelParams p{.omega0 = 30.0, .Omega0 = 10.0, .J = 1.0, .g = 0.0, .phi = 0.0, .N = 5, .boundary = Boundary::periodic};
  const auto spec = full_spectrum(p, 5);
  std::vector<double> magnons;
  for (int m = 0; m < 5; ++m) magnons.push_back(10.0 + 2.0 * std::cos(2 * kPi * m / 5));
  std::sort(magnons.begin(), magnons.end());
  CHECK(std::abs(spec[0]) < 1e-12);
  for (int i = 0; i < 5; ++i) CHECK(spec[1 + i] == doctest::Approx(magnons[i]).epsilon(1e-12));
}

TEST_CASE("sector solve equals the unrestricted dense solve") {
  for (int N : {3, 4, 5}) {
    const auto p = ref(1.3, 0.4, N);
    const auto full = full_spectrum(p, N);
    const auto sp = sector_spectra(p, N, 4);
    std::vector<double> merged = sp.even.energies;
    merged.insert(merged.end(), sp.odd.energies.begin(), sp.odd.energies.end());
    std::sort(merged.begin(), merged.end());
    for (int i = 0; i < 4; ++i) CHECK(merged[i] == doctest::Approx(full[i]).epsilon(1e-10));
    CHECK(ground_state_energy(sp) == doctest::Approx(full[0]).epsilon(1e-10));
  }
}

TEST_CASE("sector states are orthonormal parity eigenvectors") {
  const auto sp = sector_spectra(ref(1.1, 0.9, 4), 4, 4);
  for (const SectorSpectrum* s : {&sp.even, &sp.odd}) {
    REQUIRE(s->states.cols() == 4);
    const Eigen::MatrixXcd gram = s->states.adjoint() * s->states;
    CHECK((gram - Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);
    double leak = 0.0;
    for (Eigen::Index i = 0; i < s->states.rows(); ++i)
      if (spin_parity(static_cast<std::uint64_t>(i)) != s->sector) leak += s->states.row(i).squaredNorm();
    CHECK(leak < 1e-20);
    for (std::size_t i = 1; i < s->energies.size(); ++i) CHECK(s->energies[i] >= s->energies[i - 1]);
  }
  CHECK(sp.even.sector == 1);
  CHECK(sp.odd.sector == -1);
}

TEST_CASE("iterative sectors agree with free fermions at J = 0") {
  for (int N : {6, 7}) {
    ModelParams p = ref(1.2, 0.5, N);
    p.J = 0.0;
    const auto rs = build_realspace(p);
    const double e0 = ground_energy(rs);
    REQUIRE(fermion_parity(ground_covariance(rs)) == doctest::Approx(1.0));
    const auto spec = bdg_spectrum(rs);
    double eps_min = 1e9;
    for (Eigen::Index i = 0; i < spec.energies.size(); ++i)
      if (spec.energies(i) > 0) eps_min = std::min(eps_min, spec.energies(i));
    const auto sp = sector_spectra(p, N, 1, false);
    CHECK(sp.even.energies[0] == doctest::Approx(e0).epsilon(1e-10));
    CHECK(sp.odd.energies[0] == doctest::Approx(e0 + eps_min).epsilon(1e-10));
  }
}

TEST_CASE("parity gaps") {
  ModelParams p = ref(0.0, 0.0, 4);
  p.J = 0.0;
  CHECK(gaps(p, 4).delta0 == doctest::Approx(2.5));

  const auto g0 = gaps(ref(0.0, 0.0, 4), 4);
  CHECK(g0.delta0 == doctest::Approx(2.5 + 2.0 * std::cos(4 * kPi / 5)));
  CHECK(g0.delta1 > g0.delta0);

  const auto sp = sector_spectra(ref(2.0, kPi / 4, 5), 5, 2, false);
  const auto g = gaps(sp);
  CHECK(g.delta0 > 0.0);
  CHECK(sp.even.energies[0] < sp.odd.energies[0]);
  CHECK(g.delta1 > g.delta0);
}

TEST_CASE("observables match brute-force expectation values") {
  using namespace oracle;
  const int N = 3;
  const auto p = ref(1.4, 0.5, N);
  const auto sp = sector_spectra(p, N, 1);
  const Eigen::VectorXcd psi = ground_state(sp);
  const auto o = observables(psi, N);
  const int n = 2 * N;
  for (int a = 0; a < N; ++a) {
    CHECK(o.magnetization_A[a] == doctest::Approx(expect(psi, site_op(sz(), qa(a), n)).real()));
    CHECK(o.magnetization_B[a] == doctest::Approx(expect(psi, site_op(sz(), qb(a), n)).real()));
    for (int b = 0; b < N; ++b) {
      if (a == b) continue;
      CHECK(o.corr_xA(a, b) == doctest::Approx(expect(psi, product_op({{qa(a), sx()}, {qa(b), sx()}}, n)).real()));
      CHECK(o.corr_yA(a, b) == doctest::Approx(expect(psi, product_op({{qa(a), sy()}, {qa(b), sy()}}, n)).real()));
      CHECK(o.corr_xB(a, b) == doctest::Approx(expect(psi, product_op({{qb(a), sx()}, {qb(b), sx()}}, n)).real()));
      CHECK(o.corr_yB(a, b) == doctest::Approx(expect(psi, product_op({{qb(a), sy()}, {qb(b), sy()}}, n)).real()));
    }
  }
  for (int bond = 0; bond + 1 < N; ++bond) {
    const auto kappa = [&](int q1, int q2) {
      return (expect(psi, product_op({{q1, sx()}, {q2, sy()}}, n)) - expect(psi, product_op({{q1, sy()}, {q2, sx()}}, n))).real();
    };
    CHECK(o.chirality_A[bond] == doctest::Approx(kappa(qa(bond), qa(bond + 1))));
    CHECK(o.chirality_B[bond] == doctest::Approx(kappa(qb(bond), qb(bond + 1))));
  }
  CHECK(o.order_parameter == doctest::Approx(std::sqrt(std::abs(o.corr_xB(0, N - 1)))));
}

TEST_CASE("decoupled ground state observables") {
  const auto sp = sector_spectra(ref(0.0, 0.3, 4), 4, 1);
  const auto o = observables(ground_state(sp), 4);
  for (int a = 0; a < 4; ++a) {
    CHECK(o.magnetization_A[a] == doctest::Approx(-0.5));
    CHECK(o.magnetization_B[a] == doctest::Approx(-0.5));
    for (int b = 0; b < 4; ++b)
      if (a != b) CHECK(std::abs(o.corr_xB(a, b)) < 1e-12);
  }
  const auto es = entanglement_ed(ground_state(sp), 4, 2);
  CHECK(std::abs(es.entropy) < 1e-12);
  CHECK(es.schmidt_gap == doctest::Approx(1.0));
}

TEST_CASE("chirality vanishes at phi = 0 and pi/2 only") {
  for (double phi : {0.0, kPi / 2}) {
    for (double g : {0.5, 1.0, 2.0}) {
      const auto o = observables(ground_state(sector_spectra(ref(g, phi, 4), 4, 1)), 4);
      for (double k : o.chirality_A) CHECK(std::abs(k) < 1e-10);
      for (double k : o.chirality_B) CHECK(std::abs(k) < 1e-10);
    }
  }
  const auto o = observables(ground_state(sector_spectra(ref(1.0, kPi / 4, 4), 4, 1)), 4);
  CHECK(std::abs(o.chirality_B_bulk) > 1e-3);
}

TEST_CASE("ED entanglement equals the free-fermion value at J = 0") {
  ModelParams p = ref(1.6, 0.8, 5);
  p.J = 0.0;
  const auto psi = ground_state(sector_spectra(p, 5, 1));
  const auto cov = ground_covariance(build_realspace(p));
  for (int cut : {1, 2}) {
    const auto ed = entanglement_ed(psi, 5, cut);
    const auto ff = entanglement_ff(cov, cut);
    CHECK(ed.entropy == doctest::Approx(ff.entropy).epsilon(1e-8));
    for (int i = 0; i < 6; ++i) CHECK(std::abs(ed.rdm_spectrum[i] - ff.rdm_spectrum[i]) < 1e-8);
  }
}

TEST_CASE("Jordan-Wigner consistency report") {
  ModelParams p = ref(1.0, kPi / 3, 5);
  p.J = 0.0;
  const auto exact = jw_consistency(p, 5);
  CHECK(exact.exact_limit);
  CHECK(std::abs(exact.discrepancy) < 1e-10);

  const auto free = jw_consistency(ref(0.0, 0.2, 5), 5);
  CHECK(free.exact_limit);
  CHECK(std::abs(free.discrepancy) < 1e-12);

  const auto inter = jw_consistency(ref(1.5, 0.0, 5), 5);
  CHECK_FALSE(inter.exact_limit);
  CHECK(std::abs(inter.discrepancy) > 1e-3);
  const auto strong = jw_consistency(ref(6.0, 0.0, 5), 5);
  CHECK(std::abs(strong.discrepancy / strong.e_ed) < std::abs(inter.discrepancy / inter.e_ed));
}

TEST_CASE("spin application") {
  Eigen::VectorXcd down = Eigen::VectorXcd::Zero(4);
  down(0) = 1.0;
  const auto x = apply_spin(down, 1, 'x');
  CHECK(x(2) == std::complex<double>(0.5));
  const auto z = apply_spin(down, 0, 'z');
  CHECK(z(0) == std::complex<double>(-0.5));
  CHECK_THROWS(apply_spin(down, 0, 'q'));
}
