#include "chiral/scaling.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_fit.h>
#include <gsl/gsl_multimin.h>
#include <gsl/gsl_spline.h>

namespace chiral {

namespace {

struct GslQuiet {
  GslQuiet() { gsl_set_error_handler_off(); }
};
const GslQuiet gsl_quiet;

struct Line {
  double intercept = 0.0, slope = 0.0, sumsq = 0.0;
};

Line linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 2) throw std::invalid_argument("linear fit needs at least two points");
  Line l;
  double c00, c01, c11;
  gsl_fit_linear(x.data(), 1, y.data(), 1, x.size(), &l.intercept, &l.slope, &c00, &c01, &c11, &l.sumsq);
  return l;
}

/// Residual bootstrap: standard deviations of (intercept, slope).
std::pair<double, double> bootstrap_line(const std::vector<double>& x, const std::vector<double>& y, const Line& fit) {
  const std::size_t n = x.size();
  std::vector<double> resid(n);
  for (std::size_t i = 0; i < n; ++i) resid[i] = y[i] - (fit.intercept + fit.slope * x[i]);
  std::vector<double> a(kBootstrapSamples), b(kBootstrapSamples), ys(n);
  for (int s = 0; s < kBootstrapSamples; ++s) {
    std::mt19937_64 rng(kBootstrapSeed + static_cast<unsigned>(s));
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t i = 0; i < n; ++i) ys[i] = fit.intercept + fit.slope * x[i] + resid[pick(rng)];
    const Line l = linear_fit(x, ys);
    a[s] = l.intercept;
    b[s] = l.slope;
  }
  auto stdev = [](const std::vector<double>& v) {
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double acc = 0.0;
    for (double t : v) acc += (t - mean) * (t - mean);
    return std::sqrt(acc / (v.size() - 1));
  };
  return {stdev(a), stdev(b)};
}

/// Longest run [i, j] of points whose consecutive slopes lie within +-tol
/// of their midrange. Returns point indices (first, last).
std::pair<std::size_t, std::size_t> stationary_window(const std::vector<double>& x, const std::vector<double>& y,
                                                      std::size_t min_points, double tol) {
  const std::size_t n = x.size();
  std::vector<double> slope(n > 0 ? n - 1 : 0);
  for (std::size_t i = 0; i + 1 < n; ++i) slope[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
  std::size_t best_i = 0, best_len = 0;
  for (std::size_t i = 0; i < slope.size(); ++i) {
    double lo = slope[i], hi = slope[i];
    for (std::size_t j = i; j < slope.size(); ++j) {
      lo = std::min(lo, slope[j]);
      hi = std::max(hi, slope[j]);
      const double mid = 0.5 * (lo + hi);
      if (hi - lo > 2.0 * tol * std::abs(mid)) break;
      const std::size_t len = j - i + 2;  // points
      if (len > best_len) {
        best_len = len;
        best_i = i;
      }
    }
  }
  if (best_len < min_points) {
    throw std::domain_error("no stationary fit window with at least " + std::to_string(min_points) + " points");
  }
  return {best_i, best_i + best_len - 1};
}

struct XY {
  std::vector<double> x, y;
};

XY sorted_xy(const SeriesTable& t) {
  std::vector<SeriesRow> rows = t.rows();
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.x < b.x; });
  XY out;
  for (const auto& r : rows) {
    out.x.push_back(r.x);
    out.y.push_back(r.y);
  }
  return out;
}

struct CollapseProblem {
  const SeriesTable* data;
  std::array<double, 3> fixed;
  std::array<bool, 3> free;
};

std::array<double, 3> unpack(const CollapseProblem& p, const gsl_vector* v) {
  std::array<double, 3> out = p.fixed;
  std::size_t k = 0;
  for (int i = 0; i < 3; ++i) {
    if (p.free[i]) out[i] = gsl_vector_get(v, k++);
  }
  return out;
}

double collapse_objective(const gsl_vector* v, void* params) {
  const auto& p = *static_cast<const CollapseProblem*>(params);
  const auto q = unpack(p, v);
  if (q[2] <= 0.05) return 1e6;
  return collapse_cost(*p.data, q[0], q[1], q[2]);
}

struct Minimum {
  std::array<double, 3> point;
  double cost = 0.0;
  bool converged = false;
};

Minimum minimize_collapse(const SeriesTable& data, std::array<double, 3> start, std::array<bool, 3> free,
                          int max_iterations) {
  CollapseProblem problem{&data, start, free};
  const std::size_t dim = static_cast<std::size_t>(std::count(free.begin(), free.end(), true));
  if (dim == 0) return {start, collapse_cost(data, start[0], start[1], start[2]), true};
  const std::array<double, 3> steps{0.02, 0.02, 0.1};
  gsl_vector* x = gsl_vector_alloc(dim);
  gsl_vector* ss = gsl_vector_alloc(dim);
  std::size_t k = 0;
  for (int i = 0; i < 3; ++i) {
    if (!free[i]) continue;
    gsl_vector_set(x, k, start[i]);
    gsl_vector_set(ss, k, steps[i]);
    ++k;
  }
  gsl_multimin_function f{&collapse_objective, dim, &problem};
  gsl_multimin_fminimizer* m = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, dim);
  gsl_multimin_fminimizer_set(m, &f, x, ss);
  Minimum out;
  for (int it = 0; it < max_iterations; ++it) {
    if (gsl_multimin_fminimizer_iterate(m) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(m), 1e-7) == GSL_SUCCESS) {
      out.converged = true;
      break;
    }
  }
  out.point = unpack(problem, gsl_multimin_fminimizer_x(m));
  out.cost = gsl_multimin_fminimizer_minimum(m);
  gsl_multimin_fminimizer_free(m);
  gsl_vector_free(ss);
  gsl_vector_free(x);
  return out;
}

}  // namespace

SeriesTable::SeriesTable(std::vector<SeriesRow> rows) {
  for (const auto& r : rows) add(r);
}

void SeriesTable::add(int N, double x, double y, std::optional<double> y_err) {
  if (N < 2) throw std::invalid_argument("series row needs N >= 2");
  for (const auto& r : rows_) {
    if (r.N == N && r.x == x) throw std::invalid_argument("duplicate (N, x) row in series table");
  }
  rows_.push_back({N, x, y, y_err});
}

std::vector<int> SeriesTable::sizes() const {
  std::set<int> s;
  for (const auto& r : rows_) s.insert(r.N);
  return {s.begin(), s.end()};
}

std::vector<SeriesRow> SeriesTable::group(int N) const {
  std::vector<SeriesRow> out;
  for (const auto& r : rows_) {
    if (r.N == N) out.push_back(r);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.x < b.x; });
  return out;
}

SeriesTable parse_series_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  SeriesTable t;
  bool header = true;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      if (line.rfind("N,x,y", 0) != 0) throw std::invalid_argument("series CSV must start with header N,x,y");
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() < 3) throw std::invalid_argument("series CSV line " + std::to_string(line_no) + ": too few columns");
    auto num = [&](const std::string& s) {
      std::size_t pos = 0;
      const double v = std::stod(s, &pos);
      if (pos != s.size()) throw std::invalid_argument("series CSV line " + std::to_string(line_no) + ": bad number");
      return v;
    };
    std::optional<double> err;
    if (cells.size() > 3 && !cells[3].empty()) err = num(cells[3]);
    t.add(static_cast<int>(num(cells[0])), num(cells[1]), num(cells[2]), err);
  }
  return t;
}

SeriesTable read_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_series_csv(buf.str());
}

double FitResult::param(const std::string& name) const {
  for (std::size_t i = 0; i < param_names.size(); ++i) {
    if (param_names[i] == name) return params.at(i);
  }
  throw std::out_of_range("no fit parameter named " + name);
}

double FitResult::uncertainty(const std::string& name) const {
  for (std::size_t i = 0; i < param_names.size(); ++i) {
    if (param_names[i] == name) return uncertainties.at(i);
  }
  throw std::out_of_range("no fit parameter named " + name);
}

FitResult fit_correlation_length(const SeriesTable& corr) {
  const XY raw = sorted_xy(corr);
  XY d;
  for (std::size_t i = 0; i < raw.x.size(); ++i) {
    if (raw.y[i] != 0.0 && std::isfinite(raw.y[i])) {
      d.x.push_back(raw.x[i]);
      d.y.push_back(std::log(std::abs(raw.y[i])));
    }
  }
  const auto [i0, i1] = stationary_window(d.x, d.y, 6, 0.05);
  const std::vector<double> x(d.x.begin() + i0, d.x.begin() + i1 + 1);
  const std::vector<double> y(d.y.begin() + i0, d.y.begin() + i1 + 1);
  const Line l = linear_fit(x, y);
  if (l.slope >= 0.0) throw std::domain_error("correlation data do not decay");
  const auto [da, db] = bootstrap_line(x, y, l);
  FitResult r;
  r.model_id = "exp_decay";
  r.param_names = {"xi", "log_amplitude"};
  r.params = {-1.0 / l.slope, l.intercept};
  r.uncertainties = {db / (l.slope * l.slope), da};
  r.residual_norm = std::sqrt(l.sumsq);
  r.window = {x.front(), x.back()};
  return r;
}

FitResult fit_xi_divergence(const SeriesTable& xi, double g_c) {
  std::vector<double> x, y;
  for (const auto& row : xi.rows()) {
    if (row.x == g_c || row.y <= 0.0) continue;
    x.push_back(std::log(std::abs(row.x - g_c)));
    y.push_back(std::log(row.y));
  }
  const Line l = linear_fit(x, y);
  const auto [da, db] = bootstrap_line(x, y, l);
  FitResult r;
  r.model_id = "xi_divergence";
  r.param_names = {"nu", "log_amplitude"};
  r.params = {-l.slope, l.intercept};
  r.uncertainties = {db, da};
  r.residual_norm = std::sqrt(l.sumsq);
  const auto [lo, hi] = std::minmax_element(xi.rows().begin(), xi.rows().end(),
                                            [](const auto& a, const auto& b) { return a.x < b.x; });
  r.window = {lo->x, hi->x};
  return r;
}

FitResult fit_power_law(const SeriesTable& corr) {
  const XY raw = sorted_xy(corr);
  XY d;
  std::vector<double> r_kept;
  for (std::size_t i = 0; i < raw.x.size(); ++i) {
    if (raw.x[i] > 0.0 && raw.y[i] != 0.0 && std::isfinite(raw.y[i])) {
      r_kept.push_back(raw.x[i]);
      d.x.push_back(std::log(raw.x[i]));
      d.y.push_back(std::log(std::abs(raw.y[i])));
    }
  }
  const auto [i0, i1] = stationary_window(d.x, d.y, 4, 0.05);
  const std::vector<double> x(d.x.begin() + i0, d.x.begin() + i1 + 1);
  const std::vector<double> y(d.y.begin() + i0, d.y.begin() + i1 + 1);
  const Line l = linear_fit(x, y);
  const auto [da, db] = bootstrap_line(x, y, l);
  FitResult r;
  r.model_id = "power_law";
  r.param_names = {"eta", "log_amplitude"};
  r.params = {-l.slope, l.intercept};
  r.uncertainties = {db, da};
  r.residual_norm = std::sqrt(l.sumsq);
  r.window = {r_kept[i0], r_kept[i1]};
  return r;
}

double collapse_cost(const SeriesTable& data, double g_c, double beta, double nu) {
  struct Group {
    std::vector<double> X, Y;
    gsl_interp_accel* acc = nullptr;
    gsl_spline* spline = nullptr;
  };
  std::vector<Group> groups;
  std::vector<double> all_y;
  for (int N : data.sizes()) {
    Group g;
    const double sx = std::pow(N, 1.0 / nu), sy = std::pow(N, beta / nu);
    for (const auto& r : data.group(N)) {
      g.X.push_back((r.x - g_c) * sx);
      g.Y.push_back(r.y * sy);
      all_y.push_back(g.Y.back());
    }
    if (g.X.size() >= 3) {
      g.acc = gsl_interp_accel_alloc();
      g.spline = gsl_spline_alloc(gsl_interp_cspline, g.X.size());
      gsl_spline_init(g.spline, g.X.data(), g.Y.data(), g.X.size());
    }
    groups.push_back(std::move(g));
  }
  double acc = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    for (std::size_t j = 0; j < groups.size(); ++j) {
      if (i == j || groups[j].spline == nullptr) continue;
      const auto& gj = groups[j];
      for (std::size_t p = 0; p < groups[i].X.size(); ++p) {
        const double X = groups[i].X[p];
        if (X < gj.X.front() || X > gj.X.back()) continue;
        const double diff = groups[i].Y[p] - gsl_spline_eval(gj.spline, X, gj.acc);
        acc += diff * diff;
        ++pairs;
      }
    }
  }
  for (auto& g : groups) {
    if (g.spline) gsl_spline_free(g.spline);
    if (g.acc) gsl_interp_accel_free(g.acc);
  }
  if (pairs == 0 || all_y.size() < 2) return 1e6;
  const double mean = std::accumulate(all_y.begin(), all_y.end(), 0.0) / all_y.size();
  double var = 0.0;
  for (double v : all_y) var += (v - mean) * (v - mean);
  var /= all_y.size();
  if (var <= 0.0) return 1e6;
  return acc / pairs / var;
}

FitResult data_collapse(const SeriesTable& data, CollapseInit init, CollapseOptions options) {
  if (data.sizes().size() < 3) throw std::invalid_argument("data collapse needs at least three sizes");
  const std::array<bool, 3> free{!options.fix_g_c, !options.fix_beta, !options.fix_nu};
  const Minimum best = minimize_collapse(data, {init.g_c, init.beta, init.nu}, free, options.max_iterations);

  FitResult r;
  r.model_id = "collapse";
  r.param_names = {"g_c", "beta", "nu"};
  r.params = {best.point[0], best.point[1], best.point[2]};
  r.uncertainties = {0.0, 0.0, 0.0};
  r.residual_norm = best.cost;
  r.converged = best.converged;
  if (!best.converged) r.notes.push_back("max_iterations");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& row : data.rows()) {
    lo = std::min(lo, row.x);
    hi = std::max(hi, row.x);
  }
  r.window = {lo, hi};

  // Point bootstrap: resample each size with replacement, drop repeats.
  if (options.bootstrap > 1) {
    std::vector<std::array<double, 3>> samples;
    for (int s = 0; s < options.bootstrap; ++s) {
      std::mt19937_64 rng(kBootstrapSeed + static_cast<unsigned>(s));
      SeriesTable resampled;
      bool usable = true;
      for (int N : data.sizes()) {
        const auto g = data.group(N);
        std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
        std::set<std::size_t> chosen;
        for (std::size_t i = 0; i < g.size(); ++i) chosen.insert(pick(rng));
        if (chosen.size() < 3) usable = false;
        for (std::size_t i : chosen) resampled.add(g[i]);
      }
      if (!usable) continue;
      samples.push_back(minimize_collapse(resampled, best.point, free, options.max_iterations).point);
    }
    // Half the 16-84 percentile width; a few resamples can land in
    // degenerate collapses with no overlap, which would swamp a variance.
    if (samples.size() > 1) {
      for (int k = 0; k < 3; ++k) {
        std::vector<double> v;
        for (const auto& p : samples) v.push_back(p[k]);
        std::sort(v.begin(), v.end());
        const auto at = [&](double q) { return v[static_cast<std::size_t>(std::lround(q * (v.size() - 1)))]; };
        r.uncertainties[k] = 0.5 * (at(0.84) - at(0.16));
      }
    }
  }
  return r;
}

FitResult fit_gap_scaling(const SeriesTable& gaps, std::optional<double> x_c) {
  if (!x_c) {
    std::set<double> xs;
    for (const auto& r : gaps.rows()) xs.insert(r.x);
    if (xs.size() != 1) throw std::invalid_argument("gap scaling: give x_c when rows span several x");
    x_c = *xs.begin();
  }
  std::vector<double> lx, ly;
  for (const auto& r : gaps.rows()) {
    if (std::abs(r.x - *x_c) <= 1e-12 && r.y > 0.0) {
      lx.push_back(std::log(static_cast<double>(r.N)));
      ly.push_back(std::log(r.y));
    }
  }
  if (lx.size() < 3) throw std::invalid_argument("gap scaling needs at least three sizes at x_c");
  const Line l = linear_fit(lx, ly);
  const auto [da, db] = bootstrap_line(lx, ly, l);
  FitResult r;
  r.model_id = "gap_scaling";
  r.param_names = {"z", "log_amplitude"};
  r.params = {-l.slope, l.intercept};
  r.uncertainties = {db, da};
  r.residual_norm = std::sqrt(l.sumsq);
  r.window = {*x_c, *x_c};

  // Collapse of Delta N^z against (x - x_c) N^{1/nu} with z and x_c held.
  std::size_t sizes_with_curves = 0;
  for (int N : gaps.sizes()) sizes_with_curves += gaps.group(N).size() >= 3 ? 1 : 0;
  if (sizes_with_curves >= 3) {
    // y N^{beta/nu} with beta = z nu gives Delta N^z; nu is scanned.
    const double z = -l.slope;
    double best_nu = 1.0, best_cost = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 400; ++i) {
      const double nu = 0.3 + 0.005 * i;
      const double cost = collapse_cost(gaps, *x_c, z * nu, nu);
      if (cost < best_cost) {
        best_cost = cost;
        best_nu = nu;
      }
    }
    r.param_names.push_back("nu");
    r.params.push_back(best_nu);
    r.uncertainties.push_back(0.005);
    r.notes.push_back("collapse_cost=" + std::to_string(best_cost));
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& row : gaps.rows()) {
      lo = std::min(lo, row.x);
      hi = std::max(hi, row.x);
    }
    r.window = {lo, hi};
  }
  return r;
}

FitResult fit_central_charge(const SeriesTable& entropy, double prefactor) {
  if (entropy.sizes().size() < 2) throw std::invalid_argument("central charge fit needs at least two sizes");
  std::vector<double> x, y;
  for (const auto& r : entropy.rows()) {
    x.push_back(std::log(4.0 * r.N / std::numbers::pi));
    y.push_back(r.y);
  }
  const Line l = linear_fit(x, y);
  const auto [da, db] = bootstrap_line(x, y, l);
  FitResult r;
  r.model_id = "central_charge";
  r.param_names = {"c", "s0"};
  r.params = {prefactor * l.slope, l.intercept};
  r.uncertainties = {prefactor * db, da};
  r.residual_norm = std::sqrt(l.sumsq);
  const auto sizes = entropy.sizes();
  r.window = {static_cast<double>(sizes.front()), static_cast<double>(sizes.back())};
  if (std::abs(r.params[0]) < 0.05) r.notes.push_back("area_law");
  return r;
}

std::vector<std::pair<double, double>> second_derivative(const std::vector<double>& x, const std::vector<double>& y,
                                                         double max_step) {
  if (x.size() != y.size() || x.size() < 3) throw std::invalid_argument("second derivative needs >= 3 points");
  const double h = x[1] - x[0];
  if (!(h > 0.0)) throw std::invalid_argument("grid must be increasing");
  if (h > max_step + 1e-15) throw std::invalid_argument("grid step exceeds " + std::to_string(max_step));
  for (std::size_t i = 1; i + 1 < x.size(); ++i) {
    if (std::abs((x[i + 1] - x[i]) - h) > 1e-9 * std::max(1.0, std::abs(h))) {
      throw std::invalid_argument("second derivative needs a uniform grid");
    }
  }
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 1; i + 1 < x.size(); ++i) {
    out.emplace_back(x[i], -(y[i + 1] - 2.0 * y[i] + y[i - 1]) / (h * h));
  }
  return out;
}

FitResult second_derivative_fit(const SeriesTable& energy) {
  std::vector<double> lnN, peaks;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int N : energy.sizes()) {
    const auto g = energy.group(N);
    std::vector<double> x, y;
    for (const auto& r : g) {
      x.push_back(r.x);
      y.push_back(r.y);
    }
    const auto chi = second_derivative(x, y);
    const auto peak = std::max_element(chi.begin(), chi.end(),
                                       [](const auto& a, const auto& b) { return a.second < b.second; });
    lnN.push_back(std::log(static_cast<double>(N)));
    peaks.push_back(peak->second);
    lo = std::min(lo, x.front());
    hi = std::max(hi, x.back());
  }
  const Line l = linear_fit(lnN, peaks);
  const auto [da, db] = bootstrap_line(lnN, peaks, l);
  FitResult r;
  r.model_id = "chi_log";
  r.param_names = {"q", "q0"};
  r.params = {l.slope, l.intercept};
  r.uncertainties = {db, da};
  r.residual_norm = std::sqrt(l.sumsq);
  r.window = {lo, hi};
  return r;
}

}  // namespace chiral
