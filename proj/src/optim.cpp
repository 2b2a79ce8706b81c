#include "mechlink/optim.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace mechlink {

double golden_section(const std::function<double(double)>& f, double lo,
                      double hi, double xtol) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > xtol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

namespace {

using Pt = std::array<double, 2>;

double dist(const Pt& a, const Pt& b) {
  return std::hypot(a[0] - b[0], a[1] - b[1]);
}

}  // namespace

Optim2Result nelder_mead_2d(const std::function<double(const Pt&)>& f,
                            const Pt& start, double scale, double xtol,
                            int max_iter) {
  struct Vertex {
    Pt x;
    double v;
  };
  std::vector<Vertex> s(3);
  s[0] = {start, f(start)};
  for (int i = 0; i < 2; ++i) {
    Pt p = start;
    p[i] += scale;
    s[i + 1] = {p, f(p)};
  }
  auto order = [&] {
    std::sort(s.begin(), s.end(),
              [](const Vertex& a, const Vertex& b) { return a.v < b.v; });
  };
  order();
  for (int it = 0; it < max_iter; ++it) {
    double diam = std::max({dist(s[0].x, s[1].x), dist(s[0].x, s[2].x),
                            dist(s[1].x, s[2].x)});
    if (diam < xtol) break;
    Pt mid{0.5 * (s[0].x[0] + s[1].x[0]), 0.5 * (s[0].x[1] + s[1].x[1])};
    auto along = [&](double t) {
      return Pt{mid[0] + t * (mid[0] - s[2].x[0]),
                mid[1] + t * (mid[1] - s[2].x[1])};
    };
    Pt xr = along(1.0);
    double fr = f(xr);
    if (fr < s[0].v) {
      Pt xe = along(2.0);
      double fe = f(xe);
      if (fe < fr) {
        s[2] = {xe, fe};
      } else {
        s[2] = {xr, fr};
      }
    } else if (fr < s[1].v) {
      s[2] = {xr, fr};
    } else {
      Pt xc = fr < s[2].v ? along(0.5) : along(-0.5);
      double fcv = f(xc);
      if (fcv < std::min(fr, s[2].v)) {
        s[2] = {xc, fcv};
      } else {
        for (int i = 1; i < 3; ++i) {
          Pt p{0.5 * (s[0].x[0] + s[i].x[0]), 0.5 * (s[0].x[1] + s[i].x[1])};
          s[i] = {p, f(p)};
        }
      }
    }
    order();
  }
  return {s[0].x, s[0].v};
}

Optim2Result grid_refine_2d(const std::function<double(const Pt&)>& f,
                            const Pt& lo, const Pt& hi, int nx, int ny,
                            double xtol) {
  Pt best{lo[0], lo[1]};
  double best_v = f(best);
  double lx0 = std::log(lo[0]), lx1 = std::log(hi[0]);
  double ly0 = std::log(lo[1]), ly1 = std::log(hi[1]);
  for (int i = 0; i < nx; ++i) {
    double x = std::exp(lx0 + (lx1 - lx0) * i / (nx - 1));
    for (int j = 0; j < ny; ++j) {
      double y = std::exp(ly0 + (ly1 - ly0) * j / (ny - 1));
      double v = f({x, y});
      if (v < best_v) {
        best_v = v;
        best = {x, y};
      }
    }
  }
  double step = 0.25 * std::min(best[0], best[1]);
  return nelder_mead_2d(f, best, step, xtol);
}

}  // namespace mechlink
