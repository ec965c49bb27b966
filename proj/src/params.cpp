#include "chiral/params.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace chiral {

std::string_view to_string(Boundary b) {
  return b == Boundary::open ? "open" : "periodic";
}

Boundary parse_boundary(std::string_view text) {
  if (text == "open" || text == "obc") return Boundary::open;
  if (text == "periodic" || text == "pbc") return Boundary::periodic;
  throw std::invalid_argument("unknown boundary condition: " + std::string(text));
}

ValidatedParams validate(const ModelParams& params) {
  for (double v : {params.omega0, params.Omega0, params.J, params.g, params.phi}) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite coupling");
  }
  if (params.J <= 0.0) throw std::invalid_argument("J must be positive (it sets the energy unit)");
  if (params.phi < 0.0 || params.phi > kPi / 2) {
    throw std::invalid_argument("phi must lie in [0, pi/2]");
  }
  if (params.g < 0.0) throw std::invalid_argument("g must be non-negative");
  if (params.N < 2) throw std::invalid_argument("N must be at least 2");

  ValidatedParams out;
  out.params = params;
  out.params.omega0 /= params.J;
  out.params.Omega0 /= params.J;
  out.params.g /= params.J;
  out.params.J = 1.0;

  if (out.params.Omega0 <= 2.0) {
    std::ostringstream msg;
    msg << "Omega0 = " << out.params.Omega0
        << "J <= 2J: chain B is gapless at g = 0; critical lines are computed but unverified here";
    out.warnings.push_back(msg.str());
  }
  if (out.params.omega0 <= 0.0) {
    out.warnings.push_back("omega0 <= 0: the decoupled ground state is not the polarized down state");
  }
  return out;
}

MomentumGrid momentum_grid(int count, Boundary) {
  if (count < 2) throw std::invalid_argument("momentum grid needs at least 2 points");
  MomentumGrid grid;
  grid.points.reserve(count);
  for (int n = 0; n < count; ++n) {
    // Integer wrap keeps k = pi and k = 0 exact.
    int m = (2 * n > count) ? n - count : n;
    grid.points.push_back(2.0 * kPi * m / count);
  }
  std::sort(grid.points.begin(), grid.points.end());
  return grid;
}

}  // namespace chiral
