#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace chiral {

/// Rows of (N, x, y[, y_err]). x is the control parameter (g, phi) or a
/// distance r, depending on the fit.
struct SeriesRow {
  int N = 0;
  double x = 0.0;
  double y = 0.0;
  std::optional<double> y_err;
};

class SeriesTable {
 public:
  SeriesTable() = default;
  explicit SeriesTable(std::vector<SeriesRow> rows);

  /// Throws std::invalid_argument on a duplicate (N, x) pair or N < 2.
  void add(int N, double x, double y, std::optional<double> y_err = std::nullopt);
  void add(const SeriesRow& row) { add(row.N, row.x, row.y, row.y_err); }

  const std::vector<SeriesRow>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  /// Distinct sizes, ascending.
  std::vector<int> sizes() const;
  /// Rows of one size sorted by x.
  std::vector<SeriesRow> group(int N) const;

 private:
  std::vector<SeriesRow> rows_;
};

/// CSV with header N,x,y[,y_err].
SeriesTable read_series_csv(const std::string& path);
SeriesTable parse_series_csv(const std::string& text);

struct FitResult {
  std::string model_id;
  std::vector<std::string> param_names;
  std::vector<double> params;
  std::vector<double> uncertainties;
  double residual_norm = 0.0;
  /// Range of x used by the fit.
  std::pair<double, double> window{0.0, 0.0};
  bool converged = true;
  /// Non-fatal findings such as "area_law" or "max_iterations".
  std::vector<std::string> notes;

  double param(const std::string& name) const;
  double uncertainty(const std::string& name) const;
};

enum class AlphaFlag { log_divergence, power };

struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

struct CriticalExponents {
  Estimate beta, nu, z, eta, c;
  AlphaFlag alpha_flag = AlphaFlag::log_divergence;
};

inline constexpr int kBootstrapSamples = 200;
inline constexpr unsigned kBootstrapSeed = 7;

/// Exponential decay y ~ exp(-r / xi) with x = r. The window is the longest
/// run of local log-slopes within +-5% of each other (at least six points).
/// Throws std::domain_error on non-decaying data.
FitResult fit_correlation_length(const SeriesTable& corr);

/// xi ~ |g - g_c|^-nu with x = g, y = xi.
FitResult fit_xi_divergence(const SeriesTable& xi, double g_c);

/// Algebraic decay y ~ r^-eta with x = r, windowed like
/// fit_correlation_length on log-log slopes (at least four points).
FitResult fit_power_law(const SeriesTable& corr);

struct CollapseInit {
  double g_c = 0.0;
  double beta = 0.125;
  double nu = 1.0;
};

/// Scaled coordinates X = (x - g_c) N^{1/nu}, Y = y N^{beta/nu}. The cost is
/// the mean squared deviation of every point from cubic splines through each
/// other size, divided by the variance of all Y.
double collapse_cost(const SeriesTable& data, double g_c, double beta, double nu);

struct CollapseOptions {
  bool fix_g_c = false;
  bool fix_beta = false;
  bool fix_nu = false;
  int bootstrap = kBootstrapSamples;
  int max_iterations = 4000;
};

/// Nelder-Mead minimization of collapse_cost. params = (g_c, beta, nu);
/// residual_norm holds the optimal cost. Non-convergence is reported through
/// `converged` and a note, with the best point found.
FitResult data_collapse(const SeriesTable& data, CollapseInit init, CollapseOptions options = {});

/// Gap scaling Delta ~ N^-z from rows at x = x_c. When rows away from x_c
/// cover at least three sizes, nu is also fitted from the collapse of
/// Delta N^z against (x - x_c) N^{1/nu}.
FitResult fit_gap_scaling(const SeriesTable& gaps, std::optional<double> x_c = std::nullopt);

/// S = (c / prefactor) ln(4N / pi) + s0 with y = S. prefactor 6 is the
/// open-chain convention, 3 the periodic one.
FitResult fit_central_charge(const SeriesTable& entropy, double prefactor = 6.0);

/// chi = -d^2 y / dx^2 by three-point central differences on a uniform grid.
/// Returns (x, chi) at interior points. Throws if the grid is not uniform or
/// the step exceeds `max_step`.
std::vector<std::pair<double, double>> second_derivative(const std::vector<double>& x, const std::vector<double>& y,
                                                         double max_step = 0.02);

/// Peak of chi per size fitted as q ln N + q0.
FitResult second_derivative_fit(const SeriesTable& energy);

}  // namespace chiral
