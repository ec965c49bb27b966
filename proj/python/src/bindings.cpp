#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "chiral/bdg_kspace.hpp"
#include "chiral/config.hpp"
#include "chiral/ed.hpp"
#include "chiral/lswt.hpp"
#include "chiral/quadratic.hpp"
#include "chiral/scaling.hpp"
#include "chiral/sweep.hpp"
#include "chiral/topology.hpp"

namespace py = pybind11;
using namespace chiral;

namespace {

CovarianceData covariance(const ModelParams& p) {
  return ground_covariance(build_realspace(p), {.allow_degenerate = true});
}

SeriesTable table(const std::vector<int>& N, const std::vector<double>& x, const std::vector<double>& y) {
  if (N.size() != x.size() || x.size() != y.size()) throw std::invalid_argument("N, x and y must have equal length");
  SeriesTable t;
  for (std::size_t i = 0; i < N.size(); ++i) t.add(N[i], x[i], y[i]);
  return t;
}

py::dict fit_dict(const FitResult& f) {
  py::dict params, errors;
  for (std::size_t i = 0; i < f.param_names.size(); ++i) {
    params[py::str(f.param_names[i])] = f.params[i];
    errors[py::str(f.param_names[i])] = f.uncertainties[i];
  }
  py::dict d;
  d["model_id"] = f.model_id;
  d["params"] = params;
  d["uncertainties"] = errors;
  d["residual_norm"] = f.residual_norm;
  d["window"] = f.window;
  d["converged"] = f.converged;
  d["notes"] = f.notes;
  return d;
}

py::object task_value(const TaskValue& v) {
  if (const auto* d = std::get_if<double>(&v)) return py::float_(*d);
  return py::cast(std::get<std::vector<double>>(v));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Chiral two-chain ladder: band theory, topology, free fermions, ED, spin waves and scaling fits";
  m.attr("__version__") = kVersion;

  py::register_exception<std::domain_error>(m, "DomainError", PyExc_ValueError);

  py::enum_<Boundary>(m, "Boundary").value("open", Boundary::open).value("periodic", Boundary::periodic);

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init([](double omega0, double Omega0, double J, double g, double phi, int N, Boundary boundary) {
             return ModelParams{omega0, Omega0, J, g, phi, N, boundary};
           }),
           py::arg("omega0") = 2.5, py::arg("Omega0") = 2.5, py::arg("J") = 1.0, py::arg("g") = 0.0,
           py::arg("phi") = 0.0, py::arg("N") = 8, py::arg("boundary") = Boundary::open)
      .def_readwrite("omega0", &ModelParams::omega0)
      .def_readwrite("Omega0", &ModelParams::Omega0)
      .def_readwrite("J", &ModelParams::J)
      .def_readwrite("g", &ModelParams::g)
      .def_readwrite("phi", &ModelParams::phi)
      .def_readwrite("N", &ModelParams::N)
      .def_readwrite("boundary", &ModelParams::boundary)
      .def(py::self == py::self)
      .def("__repr__", [](const ModelParams& p) { return "ModelParams(" + to_config_string(p) + ")"; });

  m.def(
      "validate",
      [](const ModelParams& p) {
        const auto v = validate(p);
        return py::make_tuple(v.params, v.warnings);
      },
      "Validated copy rescaled to J = 1, plus warnings.");
  m.def("parse_config", [](const std::string& text) { return parse_config(text); });
  m.def("to_config_string", &to_config_string);

  m.def(
      "critical_coupling",
      [](double omega0, double Omega0, double J, double phi) -> py::object {
        const auto c = critical_coupling(omega0, Omega0, J, phi);
        if (!c) return py::none();
        return py::make_tuple(c->g, c->branch == GapBranch::k_zero ? "k0" : "kpi");
      },
      py::arg("omega0"), py::arg("Omega0"), py::arg("J"), py::arg("phi"),
      "(g_c, branch) or None where the gap never closes.");
  m.def(
      "numeric_critical_coupling",
      [](const ModelParams& p, double g_max) { return numeric_critical_coupling(p, g_max); }, py::arg("params"),
      py::arg("g_max"));
  m.def(
      "gap_scan",
      [](const ModelParams& p, int grid) {
        const auto s = gap_scan(p, grid);
        return py::make_tuple(s.min_gap, s.k_star);
      },
      py::arg("params"), py::arg("grid_points") = 2048);
  m.def("bloch_matrix", [](const ModelParams& p, double k) { return Eigen::MatrixXcd(build_bloch(p, k).entries); });
  m.def(
      "band_structure",
      [](const ModelParams& p, int nk) {
        const auto bs = band_structure(p, momentum_grid(nk));
        py::array_t<double> e({static_cast<py::ssize_t>(bs.bands.size()), py::ssize_t{4}});
        auto v = e.mutable_unchecked<2>();
        for (std::size_t i = 0; i < bs.bands.size(); ++i)
          for (int b = 0; b < 4; ++b) v(i, b) = bs.bands[i][b];
        return py::make_tuple(bs.grid.points, e);
      },
      py::arg("params"), py::arg("nk") = 256, "(k, energies[nk, 4]) on the periodic momentum grid.");
  m.def("strong_coupling", [](double g, double phi) {
    const auto s = strong_coupling(g, phi);
    return py::make_tuple(s.levels, s.gs_energy_per_site);
  });

  m.def("z2_invariant", &z2_invariant);
  m.def(
      "bdg_spectrum",
      [](const ModelParams& p) { return Eigen::VectorXd(bdg_spectrum(build_realspace(p)).energies); },
      "Real-space BdG energies for p.N sites and p.boundary.");
  m.def(
      "zero_modes",
      [](const ModelParams& p, int N) {
        const auto z = zero_modes(p, N);
        return py::dict(py::arg("E_min") = z.E_min, py::arg("edge_weight") = z.edge_weight);
      },
      py::arg("params"), py::arg("N"));
  m.def(
      "ldos",
      [](const ModelParams& p, const std::vector<double>& omegas, int site, double eta) {
        return ldos(bdg_spectrum(build_realspace(p)), omegas, site, eta);
      },
      py::arg("params"), py::arg("omegas"), py::arg("site"), py::arg("eta") = kDefaultBroadening);

  m.def("ground_energy", [](const ModelParams& p) { return ground_energy(build_realspace(p)); });
  m.def(
      "entanglement",
      [](const ModelParams& p, int cut, int keep) {
        const auto e = entanglement_ff(covariance(p), cut, keep);
        return py::dict(py::arg("spectrum") = e.rdm_spectrum, py::arg("entropy") = e.entropy,
                        py::arg("schmidt_gap") = e.schmidt_gap);
      },
      py::arg("params"), py::arg("cut"), py::arg("keep") = 64);
  m.def(
      "spin_correlator",
      [](const ModelParams& p, int n, int r_max, const std::string& axis) {
        const auto cov = covariance(p);
        const SpinAxis a = parse_spin_axis(axis);
        std::vector<double> out;
        for (int r = 1; r <= r_max; ++r) out.push_back(spin_correlator(cov, n, n + r, a));
        return out;
      },
      py::arg("params"), py::arg("anchor"), py::arg("r_max"), py::arg("axis") = "xB",
      "Correlator between the anchor site and anchor + r for r = 1..r_max.");
  m.def(
      "chirality",
      [](const ModelParams& p, int bond) {
        const auto cov = covariance(p);
        return py::make_tuple(chirality_ff(cov, Chain::A, bond), chirality_ff(cov, Chain::B, bond));
      },
      py::arg("params"), py::arg("bond"), "(kappa_A, kappa_B) on one bond.");
  m.def(
      "order_parameter",
      [](const ModelParams& p, int N, const std::string& axis) { return order_parameter_ff(p, N, parse_spin_axis(axis)); },
      py::arg("params"), py::arg("N"), py::arg("axis") = "xB");

  m.def(
      "ed_spectra",
      [](const ModelParams& p, int N, int n_states) {
        const auto s = sector_spectra(p, N, n_states, false);
        return py::dict(py::arg("even") = s.even.energies, py::arg("odd") = s.odd.energies);
      },
      py::arg("params"), py::arg("N"), py::arg("n_states") = 4);
  m.def(
      "ed_gaps",
      [](const ModelParams& p, int N) {
        const auto g = gaps(p, N);
        return py::make_tuple(g.delta0, g.delta1);
      },
      py::arg("params"), py::arg("N"), "(odd - even ground energy, first odd excited - even ground energy).");
  m.def(
      "ed_observables",
      [](const ModelParams& p, int N) {
        const auto sectors = sector_spectra(p, N, 1);
        const auto psi = ground_state(sectors);
        const auto o = observables(psi, N);
        py::dict d;
        d["ground_energy"] = ground_state_energy(sectors);
        d["magnetization_A"] = o.magnetization_A;
        d["magnetization_B"] = o.magnetization_B;
        d["corr_xA"] = o.corr_xA;
        d["corr_yA"] = o.corr_yA;
        d["corr_xB"] = o.corr_xB;
        d["corr_yB"] = o.corr_yB;
        d["chirality_A"] = o.chirality_A;
        d["chirality_B"] = o.chirality_B;
        d["order_parameter"] = o.order_parameter;
        d["entropy_half"] = entanglement_ed(psi, N, N / 2).entropy;
        return d;
      },
      py::arg("params"), py::arg("N"));
  m.def(
      "jw_consistency",
      [](const ModelParams& p, int N) {
        const auto r = jw_consistency(p, N);
        return py::dict(py::arg("e_ed") = r.e_ed, py::arg("e_ff") = r.e_ff, py::arg("discrepancy") = r.discrepancy,
                        py::arg("exact_limit") = r.exact_limit);
      },
      py::arg("params"), py::arg("N"));

  m.def(
      "lswt_modes",
      [](const ModelParams& p, double k) {
        const auto modes = para_diagonalize(build_hopfield(p, k));
        std::vector<std::complex<double>> e(modes.eigenvalues.begin(), modes.eigenvalues.end());
        return py::make_tuple(e, modes.stable());
      },
      py::arg("params"), py::arg("k"), "(eigenvalues, stable) of the Hopfield matrix at k.");
  m.def(
      "lswt_threshold",
      [](const ModelParams& p, double phi) {
        const auto t = instability_threshold(p, phi);
        return py::dict(py::arg("g") = t.g, py::arg("k_c") = t.k_c, py::arg("g_at_zero") = t.g_at_zero,
                        py::arg("g_at_pi") = t.g_at_pi);
      },
      py::arg("params"), py::arg("phi"));

  m.def(
      "fit_correlation_length",
      [](const std::vector<int>& N, const std::vector<double>& r, const std::vector<double>& c) {
        return fit_dict(fit_correlation_length(table(N, r, c)));
      },
      py::arg("N"), py::arg("r"), py::arg("corr"));
  m.def(
      "fit_power_law",
      [](const std::vector<int>& N, const std::vector<double>& r, const std::vector<double>& c) {
        return fit_dict(fit_power_law(table(N, r, c)));
      },
      py::arg("N"), py::arg("r"), py::arg("corr"));
  m.def(
      "fit_gap_scaling",
      [](const std::vector<int>& N, const std::vector<double>& x, const std::vector<double>& gap,
         std::optional<double> x_c) { return fit_dict(fit_gap_scaling(table(N, x, gap), x_c)); },
      py::arg("N"), py::arg("x"), py::arg("gap"), py::arg("x_c") = py::none());
  m.def(
      "fit_central_charge",
      [](const std::vector<int>& N, const std::vector<double>& entropy, double prefactor) {
        return fit_dict(fit_central_charge(table(N, std::vector<double>(N.size(), 0.0), entropy), prefactor));
      },
      py::arg("N"), py::arg("entropy"), py::arg("prefactor") = 6.0);
  m.def(
      "data_collapse",
      [](const std::vector<int>& N, const std::vector<double>& g, const std::vector<double>& y, double g_c,
         double beta, double nu, bool fix_g_c, int bootstrap) {
        return fit_dict(data_collapse(table(N, g, y), {g_c, beta, nu}, {.fix_g_c = fix_g_c, .bootstrap = bootstrap}));
      },
      py::arg("N"), py::arg("g"), py::arg("y"), py::arg("g_c"), py::arg("beta") = 0.125, py::arg("nu") = 1.0,
      py::arg("fix_g_c") = false, py::arg("bootstrap") = kBootstrapSamples);

  m.def("registered_tasks", &registered_tasks);
  m.def(
      "run_sweep",
      [](const std::string& spec_text, unsigned workers) {
        const auto grid = run_sweep(parse_sweep_spec(spec_text), workers);
        py::list cells;
        for (const auto& c : grid.cells) {
          py::dict values;
          for (const auto& [k, v] : c.values) values[py::str(k)] = task_value(v);
          cells.append(py::dict(py::arg("coords") = c.coords, py::arg("status") = std::string(to_string(c.status)),
                                py::arg("values") = values, py::arg("error") = c.error));
        }
        return py::dict(py::arg("axes") = grid.axis_names, py::arg("tasks") = grid.tasks, py::arg("cells") = cells,
                        py::arg("csv") = emit_csv(grid));
      },
      py::arg("spec"), py::arg("workers") = 0, "Runs a sweep spec given as text.");
}
