#pragma once

#include <array>
#include <functional>

namespace mechlink {

// Minimizes a unimodal function on [lo, hi]. Returns the abscissa of the
// minimum once the bracket has shrunk below xtol.
double golden_section(const std::function<double(double)>& f, double lo,
                      double hi, double xtol = 1e-4);

struct Optim2Result {
  std::array<double, 2> x;
  double value;
};

// Deterministic 2-D Nelder-Mead. Terminates when the simplex diameter falls
// below xtol or after max_iter reflections.
Optim2Result nelder_mead_2d(
    const std::function<double(const std::array<double, 2>&)>& f,
    const std::array<double, 2>& start, double scale, double xtol = 1e-4,
    int max_iter = 2000);

// Coarse scan of f over an nx-by-ny grid, logarithmic in both coordinates,
// followed by a simplex refinement seeded at the best grid point.
Optim2Result grid_refine_2d(
    const std::function<double(const std::array<double, 2>&)>& f,
    const std::array<double, 2>& lo, const std::array<double, 2>& hi, int nx,
    int ny, double xtol = 1e-4);

}  // namespace mechlink
