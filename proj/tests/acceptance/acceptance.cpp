// Acceptance suite. Each criterion prints one PASS/FAIL line with its key
// numbers and wall time; the exit code is nonzero if any selected criterion
// fails.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "chiral/bdg_kspace.hpp"
#include "chiral/ed.hpp"
#include "chiral/lswt.hpp"
#include "chiral/quadratic.hpp"
#include "chiral/scaling.hpp"
#include "chiral/topology.hpp"

using namespace chiral;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

ModelParams ref(double g, double phi, int N = 64) {
  return {.omega0 = 2.5, .Omega0 = 2.5, .J = 1.0, .g = g, .phi = phi, .N = N};
}

double g_c(double phi) { return critical_coupling(2.5, 2.5, 1.0, phi)->g; }

CovarianceData covariance(const ModelParams& p) {
  return ground_covariance(build_realspace(p), {.allow_degenerate = true});
}

Outcome critical_line() {
  const double g0 = g_c(0.0), g1 = g_c(kPi / 2);
  bool ok = fmt("%.4g", g0) == "1.677" && fmt("%.4g", g1) == "0.559";
  double worst = 0.0;
  for (int i = 0; i <= 16; ++i) {
    const double phi = kPi / 2 * i / 16;
    const auto formula = critical_coupling(2.5, 2.5, 1.0, phi);
    const auto numeric = numeric_critical_coupling(ref(0.0, phi), 10.0, 512);
    if (formula.has_value() != numeric.has_value()) {
      ok = false;
      continue;
    }
    if (formula) worst = std::max(worst, std::abs(formula->g - *numeric));
  }
  ok = ok && worst < 1e-3;
  return {ok, fmt("g_c(0)=%.6f g_c(pi/2)=%.6f max|bisection-formula|=%.2e over 17 phi", g0, g1, worst)};
}

Outcome no_transition() {
  double lowest = 1e300, at = 0.0;
  for (int i = 1; i <= 1000; ++i) {
    const double g = 0.1 * i;
    const double gap = gap_scan(ref(g, kPi / 4)).min_gap;
    if (gap < lowest) {
      lowest = gap;
      at = g;
    }
  }
  return {lowest > 0.05, fmt("min gap %.4g at g=%.1f (need > 0.05 for g <= 100)", lowest, at)};
}

Outcome invariant_map() {
  const int n = 64;
  const double dg = 3.0 / (n - 1), dphi = kPi / 2 / (n - 1);
  auto expected = [](double g, double phi) {
    const auto c = critical_coupling(2.5, 2.5, 1.0, std::clamp(phi, 0.0, kPi / 2));
    return c && g > c->g ? -1 : 1;
  };
  int wrong = 0, far = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double g = i * dg, phi = j * dphi;
      const int want = expected(g, phi);
      if (z2_invariant(ref(g, phi)) == want) continue;
      ++wrong;
      bool near_line = false;
      for (int a = -1; a <= 1; ++a)
        for (int b = -1; b <= 1; ++b) near_line |= expected(g + a * dg, phi + b * dphi) != want;
      if (!near_line) ++far;
    }
  return {far == 0, fmt("%d cells differ from the analytic line, %d farther than one grid step", wrong, far)};
}

Outcome zero_mode_check() {
  const auto topo = zero_modes(ref(2.0, kPi / 2), 200);
  const auto triv = zero_modes(ref(0.2, 0.0), 200);
  const bool ok = topo.E_min < 1e-6 && topo.edge_weight > 0.9 && triv.E_min > 0.3;
  return {ok, fmt("topological E_min=%.2e edge=%.4f; trivial E_min=%.4f", topo.E_min, topo.edge_weight, triv.E_min)};
}

Outcome entanglement_degeneracy() {
  const std::vector<std::pair<double, double>> topo = {
      {2.5, 0.0}, {3.0, 0.3}, {1.0, kPi / 2}, {2.0, kPi / 2}, {1.5, 1.3}};
  const std::vector<std::pair<double, double>> triv = {
      {0.5, 0.0}, {1.0, 0.0}, {0.3, kPi / 2}, {1.0, kPi / 4}, {2.0, kPi / 4}};
  const int N = 128;
  double worst_pair = 0.0, least_split = 1e300;
  for (auto [g, phi] : topo) {
    const auto es = entanglement_ff(covariance(ref(g, phi, N)), N / 2, 16).rdm_spectrum;
    for (int i = 0; i < 4; ++i) worst_pair = std::max(worst_pair, std::abs(es[2 * i] - es[2 * i + 1]));
  }
  for (auto [g, phi] : triv) {
    const auto es = entanglement_ff(covariance(ref(g, phi, N)), N / 2, 16).rdm_spectrum;
    least_split = std::min(least_split, es[0] - es[1]);
  }
  return {worst_pair < 1e-6 && least_split > 1e-2,
          fmt("largest pair split in topological points %.2e, smallest leading split in trivial points %.4f",
              worst_pair, least_split)};
}

Outcome oracle_equivalence() {
  const int N = 5;
  double de = 0.0, dc = 0.0;
  for (auto [g, phi] : std::vector<std::pair<double, double>>{{0.7, 0.0}, {1.0, kPi / 3}, {1.8, kPi / 2}, {2.4, 0.2}}) {
    ModelParams p = ref(g, phi, N);
    p.J = 0.0;
    const auto sectors = sector_spectra(p, N, 1);
    de = std::max(de, std::abs(ground_state_energy(sectors) - ground_energy(build_realspace(p))));
    const auto ob = observables(ground_state(sectors), N);
    const auto cov = ground_covariance(build_realspace(p));
    for (int a = 0; a < N; ++a)
      for (int b = 0; b < N; ++b) {
        if (a == b) continue;
        dc = std::max(dc, std::abs(ob.corr_xB(a, b) - spin_correlator(cov, a, b, SpinAxis::xB)));
        dc = std::max(dc, std::abs(ob.corr_xA(a, b) - spin_correlator(cov, a, b, SpinAxis::xA)));
        dc = std::max(dc, std::abs(ob.corr_yA(a, b) - spin_correlator(cov, a, b, SpinAxis::yA)));
      }
  }
  return {de < 1e-10 && dc < 1e-8, fmt("max energy difference %.2e, max correlator difference %.2e", de, dc)};
}

Outcome chirality_symmetry() {
  double sym = 0.0;
  for (double phi : {0.0, kPi / 2})
    for (double g : {0.5, 1.0, 2.0}) {
      const auto ed = observables(ground_state(sector_spectra(ref(g, phi, 5), 5, 1)), 5);
      for (double k : ed.chirality_A) sym = std::max(sym, std::abs(k));
      for (double k : ed.chirality_B) sym = std::max(sym, std::abs(k));
      const auto cov = covariance(ref(g, phi, 64));
      for (int bond : {0, 15, 31, 61}) {
        sym = std::max(sym, std::abs(chirality_ff(cov, Chain::A, bond)));
        sym = std::max(sym, std::abs(chirality_ff(cov, Chain::B, bond)));
      }
    }
  const auto ed = observables(ground_state(sector_spectra(ref(1.0, kPi / 4, 5), 5, 1)), 5);
  const auto cov = covariance(ref(1.0, kPi / 4, 64));
  const double k_ed = std::max(std::abs(ed.chirality_A_bulk), std::abs(ed.chirality_B_bulk));
  const double k_ff = std::max(std::abs(chirality_ff(cov, Chain::A, 31)), std::abs(chirality_ff(cov, Chain::B, 31)));
  return {sym < 1e-10 && k_ed > 1e-3 && k_ff > 1e-3,
          fmt("max |kappa| at phi in {0, pi/2}: %.2e; at phi=pi/4, g=J: ED %.4g, free fermions %.4g", sym, k_ed, k_ff)};
}

Outcome universality() {
  const double gc = g_c(0.0);
  std::string d;
  bool ok = true;
  auto check = [&](const char* name, double v, double target, double tol) {
    const bool pass = std::abs(v - target) <= tol;
    ok = ok && pass;
    d += fmt("%s=%.4f%s ", name, v, pass ? "" : "(out)");
  };

  {
    const int N = 512;
    const auto cov = covariance(ref(gc, 0.0, N));
    SeriesTable corr;
    for (int r = 1; r < N / 2; ++r) corr.add(N, r, spin_correlator(cov, N / 2, N / 2 + r, SpinAxis::xB));
    check("eta", fit_power_law(corr).param("eta"), 0.25, 0.05);

    SeriesTable entropy;
    for (int n : {64, 128, 256}) entropy.add(n, gc, entanglement_ff(covariance(ref(gc, 0.0, n)), n / 2).entropy);
    entropy.add(N, gc, entanglement_ff(cov, N / 2).entropy);
    check("c", fit_central_charge(entropy).param("c"), 0.5, 0.1);
  }
  {
    const int N = 256, anchor = 48;
    SeriesTable xi;
    for (double delta : {0.02, 0.03, 0.04, 0.05, 0.06, 0.08}) {
      const double g = gc * (1 - delta);
      const auto cov = covariance(ref(g, 0.0, N));
      SeriesTable corr;
      for (int r = 1; r <= 200; ++r) {
        const double c = spin_correlator(cov, anchor, anchor + r, SpinAxis::xB);
        if (std::abs(c) > 1e-200) corr.add(N, r, c);
      }
      xi.add(N, g, fit_correlation_length(corr).param("xi"));
    }
    check("nu", fit_xi_divergence(xi, gc).param("nu"), 1.0, 0.1);
  }
  {
    SeriesTable gap;
    for (int N : {64, 128, 256}) gap.add(N, gc, zero_modes(ref(gc, 0.0, N), N).E_min);
    check("z", fit_gap_scaling(gap).param("z"), 1.0, 0.05);
  }
  {
    SeriesTable order;
    for (int N : {64, 128, 256})
      for (int i = -5; i <= 5; ++i) {
        const double g = gc * (1 + 0.01 * i / 5);
        order.add(N, g, order_parameter_ff(ref(g, 0.0, N), N));
      }
    const auto f = data_collapse(order, {gc, 0.15, 1.0}, {.fix_g_c = true, .bootstrap = 0});
    check("beta", f.param("beta"), 0.125, 0.02);
  }
  return {ok, d};
}

Outcome lswt_threshold() {
  const auto t = instability_threshold(ref(0.0, 0.0), 0.0);
  auto stable_everywhere = [](double g) {
    const auto grid = momentum_grid(512).points;
    return std::all_of(grid.begin(), grid.end(),
                       [&](double k) { return para_diagonalize(build_hopfield(ref(g, 0.0), k)).stable(); });
  };
  const bool below = stable_everywhere(t.g - 1e-3), above = stable_everywhere(t.g + 1e-3);
  const bool ok = std::abs(t.g - 0.8385) < 1e-3 && below && !above;
  return {ok, fmt("g_c=%.6f at k=%.3g; stable at g_c-1e-3: %s, at g_c+1e-3: %s", t.g, t.k_c, below ? "yes" : "no",
                  above ? "yes" : "no")};
}

Outcome parity_substitute() {
  // topological side of the free-fermion line: parity splitting shrinks with N
  const std::vector<std::pair<double, double>> topo = {{2.5, 0.0}, {3.0, 0.1}, {1.0, kPi / 2}, {2.0, 1.0}};
  // between the critical lines: even sector holds the ground state
  const std::vector<std::pair<double, double>> triv = {
      {0.5, 0.0}, {0.3, kPi / 2}, {1.0, kPi / 4}, {2.0, kPi / 4}, {2.0, 0.6}};
  bool monotone = true;
  double worst_ratio = 0.0, min_gap = 1e300;
  for (auto [g, phi] : topo) {
    std::vector<double> d;
    for (int N : {4, 5, 6}) d.push_back(std::abs(gaps(ref(g, phi, N), N).delta0));
    monotone = monotone && d[1] < d[0] && d[2] < d[1];
    worst_ratio = std::max(worst_ratio, d[2] / d[0]);
  }
  for (auto [g, phi] : triv)
    for (int N : {4, 5, 6}) {
      const auto gp = gaps(ref(g, phi, N), N);
      min_gap = std::min({min_gap, gp.delta0, gp.delta1});
    }
  const bool ok = monotone && worst_ratio < 0.25 && min_gap > 0.0;
  return {ok, fmt("topological |D0(6)/D0(4)| <= %.3f (monotone in N: %s); smallest even-to-odd gap between lines %.4f",
                  worst_ratio, monotone ? "yes" : "no", min_gap)};
}

struct Criterion {
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> selected;
  app.add_option("--criterion", selected, "criterion numbers to run (default: all)")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> all = {
      {"analytic critical line", 10, critical_line},
      {"no transition at phi=pi/4", 30, no_transition},
      {"Z2 invariant map", 120, invariant_map},
      {"Majorana zero modes", 60, zero_mode_check},
      {"entanglement degeneracy", 120, entanglement_degeneracy},
      {"ED vs free fermions at J=0", 300, oracle_equivalence},
      {"chirality symmetry", 300, chirality_symmetry},
      {"universality", 1800, universality},
      {"spin-wave threshold", 60, lswt_threshold},
      {"ED parity sectors", 600, parity_substitute},
  };
  if (selected.empty())
    for (int i = 1; i <= 10; ++i) selected.push_back(i);

  int failures = 0;
  for (int i : selected) {
    const auto& c = all[i - 1];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = t < c.budget_s;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("criterion %d [%s]: %s  %s  (%.1f s of %.0f s)\n", i, c.name, pass ? "PASS" : "FAIL", o.detail.c_str(),
                t, c.budget_s);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
