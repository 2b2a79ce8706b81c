#pragma once

#include <functional>
#include <vector>

namespace mechlink {

// Adaptive Simpson integration with an absolute error target.
// Subdivides until the local Richardson estimate |S2 - S1|/15 fits the
// per-interval share of the budget. Throws std::runtime_error if the
// requested tolerance is not reached before max_depth.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-10, int max_depth = 100);

// Cumulative Simpson on a uniform grid with n intervals: values at node k
// approximate the integral of f over [a, t_k]. f is sampled at nodes and
// midpoints (2n + 1 evaluations).
std::vector<double> cumulative_integral(const std::function<double(double)>& f,
                                        double a, double b, int n);

}  // namespace mechlink
