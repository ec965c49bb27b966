// chiralchain: command-line front end to the chiral library.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "chiral/bdg_kspace.hpp"
#include "chiral/config.hpp"
#include "chiral/ed.hpp"
#include "chiral/lswt.hpp"
#include "chiral/params.hpp"
#include "chiral/quadratic.hpp"
#include "chiral/scaling.hpp"
#include "chiral/sweep.hpp"
#include "chiral/topology.hpp"

namespace {

using namespace chiral;
using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Model options shared by every subcommand. Flags override --config.
struct ModelOptions {
  std::string config;
  std::map<std::string, std::string> overrides;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "key = value parameter file");
    for (const char* key : {"omega0", "Omega0", "J", "g", "phi", "N", "boundary"}) {
      app->add_option_function<std::string>(
          std::string("--") + key, [this, key](const std::string& v) { overrides[key] = v; },
          std::string("override ") + key);
    }
  }

  ModelParams resolve() const {
    ModelParams p = config.empty() ? ModelParams{} : load_config(config);
    for (const auto& [k, v] : overrides) set_param(p, k, v);
    const ValidatedParams checked = validate(p);
    for (const auto& w : checked.warnings) std::cerr << "warning: " << w << '\n';
    return checked.params;
  }
};

Range parse_range(const std::string& text) {
  Range r;
  char c1 = 0, c2 = 0;
  std::istringstream in(text);
  if (!(in >> r.lo >> c1 >> r.hi >> c2 >> r.steps) || c1 != ':' || c2 != ':' || !in.eof())
    throw std::invalid_argument("expected lo:hi:steps, got '" + text + "'");
  return r;
}

std::vector<double> phi_values(int count) { return Range{0.0, kPi / 2, count}.values(); }

// Writes to the named file, or stdout when the name is empty or "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::runtime_error("cannot open " + path + " for writing");
    }
    stream().precision(17);
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json nan_safe(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json params_json(const ModelParams& p) {
  return {{"omega0", p.omega0}, {"Omega0", p.Omega0}, {"J", p.J},        {"g", p.g},
          {"phi", p.phi},       {"N", p.N},           {"boundary", std::string(to_string(p.boundary))}};
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

void run_bands(const ModelParams& p, int kpoints, const std::string& out) {
  const BandStructure bs = band_structure(p, momentum_grid(kpoints, Boundary::periodic));
  Output o(out);
  o.stream() << "k,E1,E2,E3,E4\n";
  for (std::size_t i = 0; i < bs.grid.count(); ++i) {
    o.stream() << num(bs.grid.points[i]);
    for (double e : bs.bands[i]) o.stream() << ',' << num(e);
    o.stream() << '\n';
  }
}

void run_critline(const ModelParams& p, int phi_grid, const std::string& out) {
  Output o(out);
  o.stream() << "phi,g_c,branch\n";
  for (double phi : phi_values(phi_grid)) {
    const auto cc = critical_coupling(p.omega0, p.Omega0, p.J, phi);
    o.stream() << num(phi) << ',';
    if (!cc) {
      o.stream() << "nan,none\n";
    } else {
      o.stream() << num(cc->g) << ',' << (cc->branch == GapBranch::k_zero ? "k0" : "kpi") << '\n';
    }
  }
}

void run_invariant(const ModelParams& p, int g_grid, int phi_grid, double g_max, const std::string& out) {
  Output o(out);
  o.stream() << "phi,g,Q\n";
  ModelParams q = p;
  for (double phi : phi_values(phi_grid)) {
    for (double g : Range{0.0, g_max, g_grid}.values()) {
      q.phi = phi;
      q.g = g;
      o.stream() << num(phi) << ',' << num(g) << ',' << z2_invariant(q) << '\n';
    }
  }
}

void run_ldos(const ModelParams& p, const std::string& range, int site, double eta, const std::string& out) {
  if (site < 0 || site >= p.N) throw std::invalid_argument("--site outside the chain");
  const std::vector<double> omegas = parse_range(range).values();
  const BdgSpectrum spec = bdg_spectrum(build_realspace(p));
  const std::vector<double> rho = ldos(spec, omegas, site, eta);
  Output o(out);
  o.stream() << "omega,rho\n";
  for (std::size_t i = 0; i < omegas.size(); ++i) o.stream() << num(omegas[i]) << ',' << num(rho[i]) << '\n';
}

CovarianceData covariance(const ModelParams& p) {
  return ground_covariance(build_realspace(p), {.allow_degenerate = true});
}

void run_entanglement(const ModelParams& p, int cut, int keep, const std::string& out) {
  if (cut < 0) cut = p.N / 2;
  const EntanglementData es = entanglement_ff(covariance(p), cut, keep);
  Output o(out);
  o.stream() << "rank,lambda\n";
  for (std::size_t i = 0; i < es.rdm_spectrum.size(); ++i) o.stream() << i << ',' << num(es.rdm_spectrum[i]) << '\n';
  std::cerr << "entropy " << num(es.entropy) << "  schmidt_gap " << num(es.schmidt_gap) << '\n';
}

void run_correlate(const ModelParams& p, const std::string& axis, int r_max, int anchor, const std::string& out) {
  if (anchor < 0) anchor = p.N / 4;
  if (r_max < 1 || anchor + r_max >= p.N) throw std::invalid_argument("anchor + r-max must stay inside the chain");
  const SpinAxis ax = parse_spin_axis(axis);
  const CovarianceData cov = covariance(p);
  Output o(out);
  o.stream() << "r,value\n";
  for (int r = 1; r <= r_max; ++r) o.stream() << r << ',' << num(spin_correlator(cov, anchor, anchor + r, ax)) << '\n';
}

void run_chirality(const ModelParams& p, int phi_grid, const std::string& out) {
  std::vector<double> phis = phi_grid > 0 ? phi_values(phi_grid) : std::vector<double>{p.phi};
  Output o(out);
  o.stream() << "phi,g,chain,kappa_z\n";
  ModelParams q = p;
  const int bond = p.N / 2 - 1;
  for (double phi : phis) {
    q.phi = phi;
    const CovarianceData cov = covariance(q);
    o.stream() << num(phi) << ',' << num(q.g) << ",A," << num(chirality_ff(cov, Chain::A, bond)) << '\n';
    o.stream() << num(phi) << ',' << num(q.g) << ",B," << num(chirality_ff(cov, Chain::B, bond)) << '\n';
  }
}

void run_ed(const ModelParams& p, int n, int states, const std::string& which, const std::string& out) {
  if (n <= 0) n = p.N;
  const bool want_obs = which == "all";
  if (!want_obs && which != "none") throw std::invalid_argument("--observables must be all or none");
  const SectorPair sp = sector_spectra(p, n, states, want_obs);
  const EdGaps gp = gaps(sp);
  ModelParams shown = p;
  shown.N = n;
  json doc = {{"params", params_json(shown)},
              {"energies", {{"even", sp.even.energies}, {"odd", sp.odd.energies}}},
              {"ground_energy", ground_state_energy(sp)},
              {"gaps", {{"delta0", gp.delta0}, {"delta1", gp.delta1}}}};
  if (want_obs) {
    const Eigen::VectorXcd gs = ground_state(sp);
    const EdObservables ob = observables(gs, n);
    const EntanglementData es = entanglement_ed(gs, n, n / 2);
    doc["observables"] = {{"magnetization_A", ob.magnetization_A},
                          {"magnetization_B", ob.magnetization_B},
                          {"corr_xA", matrix_json(ob.corr_xA)},
                          {"corr_yA", matrix_json(ob.corr_yA)},
                          {"corr_xB", matrix_json(ob.corr_xB)},
                          {"corr_yB", matrix_json(ob.corr_yB)},
                          {"chirality_A", ob.chirality_A},
                          {"chirality_B", ob.chirality_B},
                          {"chirality_A_bulk", ob.chirality_A_bulk},
                          {"chirality_B_bulk", ob.chirality_B_bulk},
                          {"order_parameter", ob.order_parameter},
                          {"entropy_half", es.entropy},
                          {"schmidt_gap_half", es.schmidt_gap}};
  }
  Output o(out);
  o.stream() << doc.dump(2) << '\n';
}

void run_lswt(const ModelParams& p, const std::string& range, int nk, const std::string& out) {
  ModelParams q = p;
  const LswtThreshold th = instability_threshold(q, q.phi);
  std::cerr << "threshold g " << num(th.g) << " at k " << num(th.k_c) << '\n';
  Output o(out);
  o.stream() << "g,k,E1,E2,E3,E4,stable,magnetization,energy\n";
  for (double g : parse_range(range).values()) {
    q.g = g;
    const LswtModes modes = para_diagonalize(build_hopfield(q, th.k_c));
    o.stream() << num(g) << ',' << num(th.k_c);
    for (const auto& e : modes.eigenvalues) o.stream() << ',' << num(modes.stable() ? e.real() : kNaN);
    double m = kNaN, e = kNaN;
    if (g <= th.g) {
      try {
        const LswtPoint pt = lswt_observables(q, {g}, nk).front();
        m = pt.magnetization;
        e = pt.energy;
      } catch (const std::domain_error&) {
      }
    }
    o.stream() << ',' << (modes.stable() ? 1 : 0) << ',' << num(m) << ',' << num(e) << '\n';
  }
}

struct FitOptions {
  std::string kind, in, out;
  double g_c = kNaN;
  double prefactor = 6.0;
  double beta = 0.125, nu = 1.0;
  bool fix_g_c = false, fix_beta = false, fix_nu = false;
  int bootstrap = kBootstrapSamples;
};

void run_fit(const FitOptions& f) {
  const SeriesTable table = read_series_csv(f.in);
  const auto need_gc = [&] {
    if (std::isnan(f.g_c)) throw std::invalid_argument("--g-c is required for fit kind " + f.kind);
    return f.g_c;
  };
  FitResult r;
  if (f.kind == "xi") {
    // Either a correlator table (one N) to fit xi, or xi(g) rows to fit nu.
    r = std::isnan(f.g_c) ? fit_correlation_length(table) : fit_xi_divergence(table, f.g_c);
  } else if (f.kind == "eta") {
    r = fit_power_law(table);
  } else if (f.kind == "collapse") {
    CollapseOptions o{.fix_g_c = f.fix_g_c, .fix_beta = f.fix_beta, .fix_nu = f.fix_nu, .bootstrap = f.bootstrap};
    r = data_collapse(table, {need_gc(), f.beta, f.nu}, o);
  } else if (f.kind == "gap") {
    r = fit_gap_scaling(table, std::isnan(f.g_c) ? std::nullopt : std::optional<double>(f.g_c));
  } else if (f.kind == "cc") {
    r = fit_central_charge(table, f.prefactor);
  } else if (f.kind == "chi") {
    r = second_derivative_fit(table);
  } else {
    throw std::invalid_argument("unknown fit kind '" + f.kind + "'");
  }
  json params = json::object(), unc = json::object();
  for (std::size_t i = 0; i < r.params.size(); ++i) {
    params[r.param_names[i]] = nan_safe(r.params[i]);
    unc[r.param_names[i]] = nan_safe(r.uncertainties[i]);
  }
  const json doc = {{"model_id", r.model_id},
                    {"params", params},
                    {"uncertainties", unc},
                    {"window", {nan_safe(r.window.first), nan_safe(r.window.second)}},
                    {"residual_norm", nan_safe(r.residual_norm)},
                    {"converged", r.converged},
                    {"notes", r.notes}};
  Output o(f.out);
  o.stream() << doc.dump(2) << '\n';
}

void run_sweep_cmd(const std::string& spec_path, const std::string& out, unsigned workers) {
  SweepSpec spec = load_sweep_spec(spec_path);
  if (!out.empty()) spec.output = out;
  const ResultGrid grid = run_sweep(spec, workers);
  std::size_t failed = 0, skipped = 0;
  for (const auto& c : grid.cells) {
    failed += c.status == CellStatus::failed;
    skipped += c.status == CellStatus::skipped;
  }
  for (const auto& path : emit(grid, spec.output, spec.format)) std::cerr << "wrote " << path.string() << '\n';
  std::cerr << grid.cells.size() << " cells, " << failed << " failed, " << skipped << " skipped\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chiral two-chain ladder toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  ModelOptions model;
  std::string out;

  auto* bands = app.add_subcommand("bands", "Bloch BdG bands on a k grid");
  int kpoints = 256;
  bands->add_option("--kpoints", kpoints, "number of k points")->check(CLI::PositiveNumber);

  auto* critline = app.add_subcommand("critline", "analytic critical coupling over phi in [0, pi/2]");
  int phi_grid = 17;
  critline->add_option("--phi-grid", phi_grid, "number of phi points")->check(CLI::PositiveNumber);

  auto* invariant = app.add_subcommand("invariant", "Z2 invariant map over (phi, g)");
  int g_grid = 64, inv_phi_grid = 64;
  double g_max = 3.0;
  invariant->add_option("--g-grid", g_grid, "number of g points")->check(CLI::PositiveNumber);
  invariant->add_option("--phi-grid", inv_phi_grid, "number of phi points")->check(CLI::PositiveNumber);
  invariant->add_option("--g-max", g_max, "largest g");

  auto* ldos_cmd = app.add_subcommand("ldos", "local density of states of the open chain");
  std::string omega_range = "-3:3:601";
  int site = 0;
  double eta = kDefaultBroadening;
  ldos_cmd->add_option("--omega-range", omega_range, "lo:hi:steps");
  ldos_cmd->add_option("--site", site, "unit cell index");
  ldos_cmd->add_option("--eta", eta, "Lorentzian broadening")->check(CLI::PositiveNumber);

  auto* ent = app.add_subcommand("entanglement", "free-fermion entanglement spectrum");
  int cut = -1, keep = 64;
  ent->add_option("--cut", cut, "unit cells in the left block (default N/2)");
  ent->add_option("--keep", keep, "number of Schmidt values kept")->check(CLI::PositiveNumber);

  auto* corr = app.add_subcommand("correlate", "string spin correlator from an anchor site");
  std::string axis = "xB";
  int r_max = 16, anchor = -1;
  corr->add_option("--axis", axis, "xB, xA or yA");
  corr->add_option("--r-max", r_max, "largest separation");
  corr->add_option("--anchor", anchor, "first site (default N/4)");

  auto* chir = app.add_subcommand("chirality", "bulk vector chirality per chain");
  int chir_phi_grid = 0;
  chir->add_option("--phi-grid", chir_phi_grid, "scan phi over [0, pi/2] with this many points");

  auto* ed_cmd = app.add_subcommand("ed", "exact diagonalization in parity sectors");
  int ed_n = 0, ed_states = 4;
  std::string which = "all";
  ed_cmd->add_option("--n", ed_n, "sites per chain (default: N)");
  ed_cmd->add_option("--states", ed_states, "levels per sector")->check(CLI::PositiveNumber);
  ed_cmd->add_option("--observables", which, "all or none");

  auto* lswt_cmd = app.add_subcommand("lswt", "linear spin-wave bands and observables");
  std::string g_range = "0:1:11";
  int nk = 512;
  lswt_cmd->add_option("--g-range", g_range, "lo:hi:steps");
  lswt_cmd->add_option("--nk", nk, "momentum points for observables")->check(CLI::PositiveNumber);

  auto* fit = app.add_subcommand("fit", "scaling fits on an N,x,y[,y_err] table");
  FitOptions fo;
  fit->add_option("--kind", fo.kind, "xi, eta, collapse, gap, cc or chi")
      ->required()
      ->check(CLI::IsMember({"xi", "eta", "collapse", "gap", "cc", "chi"}));
  fit->add_option("--in", fo.in, "input table")->required()->check(CLI::ExistingFile);
  fit->add_option("--g-c", fo.g_c, "critical point (xi divergence, collapse, gap)");
  fit->add_option("--prefactor", fo.prefactor, "Calabrese-Cardy denominator (6 open, 3 periodic)");
  fit->add_option("--beta", fo.beta, "initial beta for collapse");
  fit->add_option("--nu", fo.nu, "initial nu for collapse");
  fit->add_flag("--fix-g-c", fo.fix_g_c);
  fit->add_flag("--fix-beta", fo.fix_beta);
  fit->add_flag("--fix-nu", fo.fix_nu);
  fit->add_option("--bootstrap", fo.bootstrap, "collapse bootstrap resamples");

  auto* sweep = app.add_subcommand("sweep", "run a parameter sweep from a spec file");
  std::string spec_path;
  unsigned workers = 0;
  sweep->add_option("--spec", spec_path, "sweep spec (TOML)")->required()->check(CLI::ExistingFile);
  sweep->add_option("--workers", workers, "worker threads (default: CHIRALCHAIN_WORKERS or cores)");

  for (auto* sub : {bands, critline, invariant, ldos_cmd, ent, corr, chir, ed_cmd, lswt_cmd}) {
    model.attach(sub);
    sub->add_option("--out", out, "output file (default stdout)");
  }
  fit->add_option("--out", fo.out, "output JSON (default stdout)");
  sweep->add_option("--out", out, "output directory (overrides the spec)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*bands) run_bands(model.resolve(), kpoints, out);
    else if (*critline) run_critline(model.resolve(), phi_grid, out);
    else if (*invariant) run_invariant(model.resolve(), g_grid, inv_phi_grid, g_max, out);
    else if (*ldos_cmd) run_ldos(model.resolve(), omega_range, site, eta, out);
    else if (*ent) run_entanglement(model.resolve(), cut, keep, out);
    else if (*corr) run_correlate(model.resolve(), axis, r_max, anchor, out);
    else if (*chir) run_chirality(model.resolve(), chir_phi_grid, out);
    else if (*ed_cmd) run_ed(model.resolve(), ed_n, ed_states, which, out);
    else if (*lswt_cmd) run_lswt(model.resolve(), g_range, nk, out);
    else if (*fit) run_fit(fo);
    else if (*sweep) run_sweep_cmd(spec_path, out, workers);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
