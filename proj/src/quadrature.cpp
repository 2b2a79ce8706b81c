#include "mechlink/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace mechlink {

namespace {

double simpson(double fa, double fm, double fb, double h) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)>& f, double a, double b,
             double fa, double fm, double fb, double whole, double tol,
             int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m);
  double rm = 0.5 * (m + b);
  double flm = f(lm);
  double frm = f(rm);
  double left = simpson(fa, flm, fm, m - a);
  double right = simpson(fm, frm, fb, b - m);
  double err = (left + right - whole) / 15.0;
  if (std::abs(err) <= tol || (b - a) < 1e-15 * std::abs(b)) {
    return left + right + err;
  }
  if (depth <= 0) {
    throw std::runtime_error("adaptive quadrature: tolerance not reached, estimate " +
                             std::to_string(left + right + err));
  }
  return adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, int max_depth) {
  if (a == b) return 0.0;
  double fa = f(a);
  double fb = f(b);
  double fm = f(0.5 * (a + b));
  double whole = simpson(fa, fm, fb, b - a);
  return adapt(f, a, b, fa, fm, fb, whole, abs_tol, max_depth);
}

std::vector<double> cumulative_integral(const std::function<double(double)>& f,
                                        double a, double b, int n) {
  if (n < 1) throw std::invalid_argument("cumulative_integral: need n >= 1");
  double h = (b - a) / n;
  std::vector<double> out(n + 1);
  out[0] = 0.0;
  double fl = f(a);
  for (int k = 0; k < n; ++k) {
    double tl = a + k * h;
    double fm = f(tl + 0.5 * h);
    double fr = f(tl + h);
    out[k + 1] = out[k] + simpson(fl, fm, fr, h);
    fl = fr;
  }
  return out;
}

}  // namespace mechlink
