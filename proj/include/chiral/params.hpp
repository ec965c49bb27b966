#pragma once

#include <numbers>
#include <string>
#include <string_view>
#include <vector>

namespace chiral {

inline constexpr double kPi = std::numbers::pi;

enum class Boundary { open, periodic };

std::string_view to_string(Boundary b);
Boundary parse_boundary(std::string_view text);

/// Couplings of the two-chain ladder. Energies are in units of J.
///
/// omega0 is the level splitting of chain A (the independent spins), Omega0
/// that of chain B (the XY chain). g and phi are the strength and geometric
/// angle of the chiral interchain coupling. N counts sites per chain.
struct ModelParams {
  double omega0 = 2.5;
  double Omega0 = 2.5;
  double J = 1.0;
  double g = 0.0;
  double phi = 0.0;
  int N = 8;
  Boundary boundary = Boundary::open;

  bool operator==(const ModelParams&) const = default;
};

struct ValidatedParams {
  ModelParams params;
  /// Non-fatal findings, e.g. a gapless decoupled chain B.
  std::vector<std::string> warnings;

  bool outside_studied_regime() const { return !warnings.empty(); }
};

/// Checks the invariants of ModelParams and returns a copy rescaled to J = 1.
/// Throws std::invalid_argument on phi outside [0, pi/2], J <= 0, N < 2 or
/// non-finite couplings. Omega0 <= 2J only produces a warning.
ValidatedParams validate(const ModelParams& params);

/// Ordered quasi-momenta in (-pi, pi].
struct MomentumGrid {
  std::vector<double> points;

  std::size_t count() const { return points.size(); }
};

/// k_n = 2 pi n / count wrapped into (-pi, pi] and sorted. For periodic
/// boundaries this is the allowed momentum set of an N-site ring; for open
/// boundaries the same construction serves as a dense scan grid.
MomentumGrid momentum_grid(int count, Boundary boundary = Boundary::periodic);

}  // namespace chiral
