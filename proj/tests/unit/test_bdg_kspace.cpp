#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include "chiral/bdg_kspace.hpp"
#include "oracles.hpp"

using namespace chiral;

namespace {

ModelParams ref(double g, double phi) { return {.omega0 = 2.5, .Omega0 = 2.5, .J = 1.0, .g = g, .phi = phi, .N = 8}; }

std::array<double, 4> charpoly_roots(const Eigen::Matrix4cd& h) {
  const auto z = oracle::charpoly_roots(h);
  std::array<double, 4> out{};
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(z[i].imag()) < 1e-8);
    out[i] = z[i].real();
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::array<double, 4> sorted(std::array<double, 4> a) {
  std::sort(a.begin(), a.end());
  return a;
}

}  // namespace

TEST_CASE("decoupled Bloch matrix") {
  const auto h = build_bloch(ref(0.0, 0.7), 0.0).entries;
  Eigen::Matrix4cd expect = Eigen::Vector4cd(4.5, 2.5, -4.5, -2.5).asDiagonal();
  CHECK((h - expect).norm() < 1e-14);
}

TEST_CASE("Bloch symbols at the pi/2 critical point") {
  const auto s = bloch_symbols(ref(0.559, kPi / 2), kPi);
  CHECK(std::abs(s.gamma_k) < 1e-14);
  CHECK(std::abs(s.Upsilon_k) == doctest::Approx(2 * 0.559));
  CHECK(s.Omega_k == doctest::Approx(0.5));
}

TEST_CASE("Bloch matrix is Hermitian") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const auto h = build_bloch(ref(3 * u(rng), kPi / 2 * u(rng)), 2 * kPi * u(rng) - kPi).entries;
    CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("eigenvalues agree with characteristic polynomial roots") {
  const auto h = build_bloch(ref(1.0, kPi / 4), 1.0).entries;
  const auto mine = bloch_eigenvalues(h);
  const auto oracle = charpoly_roots(h);
  for (int i = 0; i < 4; ++i) CHECK(mine[i] == doctest::Approx(oracle[i]).epsilon(1e-9));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    const auto hr = build_bloch(ref(2 * u(rng), kPi / 2 * u(rng)), 2 * kPi * u(rng) - kPi).entries;
    const auto a = bloch_eigenvalues(hr);
    const auto b = charpoly_roots(hr);
    for (int i = 0; i < 4; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-8));
  }
}

TEST_CASE("bands at g = 0 are the bare dispersions") {
  const auto p = ref(0.0, 0.3);
  const auto bs = band_structure(p, momentum_grid(64));
  REQUIRE(bs.bands.size() == 64);
  for (std::size_t i = 0; i < 64; ++i) {
    const double k = bs.grid.points[i];
    const double Om = 2.5 + 2 * std::cos(k);
    const auto expect = sorted({2.5, -2.5, Om, -Om});
    for (int b = 0; b < 4; ++b) CHECK(bs.bands[i][b] == doctest::Approx(expect[b]).epsilon(1e-13));
  }
  // cos k sums to zero on a full periodic grid
  CHECK(bs.constant == doctest::Approx(64 * 2.5));
}

TEST_CASE("band touching at the analytic critical couplings") {
  const double g0 = critical_coupling(2.5, 2.5, 1.0, 0.0)->g;
  const GapScan s0 = gap_scan(ref(g0, 0.0));
  CHECK(s0.min_gap < 1e-6);
  CHECK(s0.k_star == doctest::Approx(0.0));

  const double g1 = critical_coupling(2.5, 2.5, 1.0, kPi / 2)->g;
  const GapScan s1 = gap_scan(ref(g1, kPi / 2));
  CHECK(s1.min_gap < 1e-6);
  CHECK(std::abs(s1.k_star) == doctest::Approx(kPi));

  CHECK(gap_scan(ref(0.0, 0.0)).min_gap == doctest::Approx(0.5));
}

TEST_CASE("bands are asymmetric in k at generic angle") {
  const auto p = ref(0.5, kPi / 3);
  double worst = 0.0;
  for (double k : {0.3, 0.9, 1.7, 2.5}) {
    const auto a = bloch_eigenvalues(build_bloch(p, k).entries);
    const auto b = bloch_eigenvalues(build_bloch(p, -k).entries);
    for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  CHECK(worst > 1e-3);
}

TEST_CASE("particle-hole constraint") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    const auto p = ref(3 * u(rng), kPi / 2 * u(rng));
    const double k = 2 * kPi * u(rng) - kPi;
    CHECK(check_phc(p, k));
    const auto a = bloch_eigenvalues(build_bloch(p, k).entries);
    const auto b = bloch_eigenvalues(build_bloch(p, -k).entries);
    for (int i = 0; i < 4; ++i) CHECK(a[i] == doctest::Approx(-b[3 - i]).epsilon(1e-10).scale(1.0));
  }
  CHECK(check_phc(ref(0.0, 0.0), 0.4));

  const auto p = ref(1.2, 0.4);
  Eigen::Matrix4cd corrupted = build_bloch(p, 0.8).entries;
  corrupted(0, 1) += 1e-3;
  corrupted(1, 0) += 1e-3;
  CHECK_FALSE(phc_holds(corrupted, build_bloch(p, -0.8).entries));
}

TEST_CASE("anti-unitary symmetry at phi = pi/2") {
  CHECK(check_antiunitary_pi_half(ref(0.559, kPi / 2), 0.7));
  CHECK_THROWS_AS(check_antiunitary_pi_half(ref(0.559, kPi / 4), 0.7), std::invalid_argument);
  for (int i = 0; i < 33; ++i) {
    const double k = -kPi + i * kPi / 16;
    const auto p = ref(0.9, kPi / 2);
    CHECK(check_antiunitary_pi_half(p, k));
    const auto a = bloch_eigenvalues(build_bloch(p, k).entries);
    const auto b = bloch_eigenvalues(build_bloch(p, -k).entries);
    for (int j = 0; j < 4; ++j) CHECK(a[j] == doctest::Approx(b[j]).epsilon(1e-10));
  }
}

TEST_CASE("critical coupling formula") {
  const auto c0 = critical_coupling(2.5, 2.5, 1.0, 0.0);
  REQUIRE(c0);
  CHECK(c0->g == doctest::Approx(1.677).epsilon(5e-4));
  CHECK(c0->branch == GapBranch::k_zero);
  const auto c1 = critical_coupling(2.5, 2.5, 1.0, kPi / 2);
  REQUIRE(c1);
  CHECK(c1->g == doctest::Approx(0.559).epsilon(5e-4));
  CHECK(c1->branch == GapBranch::k_pi);
  CHECK_FALSE(critical_coupling(2.5, 2.5, 1.0, kPi / 4).has_value());
  // closed form at another angle
  const double phi = 0.3;
  CHECK(critical_coupling(2.5, 2.5, 1.0, phi)->g == doctest::Approx(0.5 * std::sqrt(2.5 * 4.5 / std::cos(2 * phi))));
}

TEST_CASE("numeric gap closing matches the formula") {
  for (double phi : {0.0, 0.4, 1.2, kPi / 2}) {
    const auto formula = critical_coupling(2.5, 2.5, 1.0, phi);
    const auto numeric = numeric_critical_coupling(ref(0.0, phi), 4.0);
    REQUIRE(numeric);
    CHECK(std::abs(*numeric - formula->g) < 1e-3);
  }
}

TEST_CASE("strong-coupling limit") {
  const double g = 10.0;
  const auto s0 = strong_coupling(g, 0.0);
  CHECK(s0.levels[0] == doctest::Approx(-2 * g));
  CHECK(s0.levels[1] == doctest::Approx(-2 * g));
  CHECK(s0.levels[3] == doctest::Approx(2 * g));
  CHECK(s0.gs_energy_per_site == doctest::Approx(-4 * g));

  const auto s1 = strong_coupling(g, kPi / 4);
  CHECK(s1.levels[0] == doctest::Approx(-2 * std::sqrt(2.0) * g));
  CHECK(std::abs(s1.levels[1]) < 1e-12);
  CHECK(std::abs(s1.levels[2]) < 1e-12);
  const double h = 1e-6;
  const double left = (strong_coupling(g, kPi / 4).gs_energy_per_site - strong_coupling(g, kPi / 4 - h).gs_energy_per_site) / h;
  const double right = (strong_coupling(g, kPi / 4 + h).gs_energy_per_site - strong_coupling(g, kPi / 4).gs_energy_per_site) / h;
  CHECK(std::abs(left - right) > 1.0);

  CHECK(strong_coupling(g, kPi / 2).gs_energy_per_site == doctest::Approx(-4 * g));
}

TEST_CASE("Bloch bands flatten toward the strong-coupling levels") {
  const double g = 200.0;
  for (double phi : {0.0, 0.3, 1.1}) {
    const auto lim = strong_coupling(g, phi);
    for (double k : {-2.0, 0.0, 1.0, kPi}) {
      const auto e = bloch_eigenvalues(build_bloch(ref(g, phi), k).entries);
      for (int i = 0; i < 4; ++i) CHECK(std::abs(e[i] - lim.levels[i]) / g < 0.05);
    }
  }
}
