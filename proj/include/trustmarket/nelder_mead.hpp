#pragma once
// Bare-bones Nelder-Mead in two dimensions. Maximizes; standard coefficients
// (reflection 1, expansion 2, contraction 1/2, shrink 1/2).

#include <algorithm>
#include <array>

namespace trustmarket {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct NelderMeadResult {
  Point2 best;
  double value = 0.0;
  int iterations = 0;
};

// `better(va, pa, vb, pb)` is true when (va, pa) beats (vb, pb), which lets
// callers pin down tie-breaking.
template <class F, class Better>
NelderMeadResult nelder_mead_max(F&& f, Better&& better, Point2 start, double offset,
                                    int max_iter) {
  struct Vertex {
    Point2 p;
    double v;
  };
  std::array<Vertex, 3> s{{{start, f(start)},
                           {{start.x + offset, start.y}, 0.0},
                           {{start.x, start.y + offset}, 0.0}}};
  s[1].v = f(s[1].p);
  s[2].v = f(s[2].p);

  const auto order = [&] {
    std::sort(s.begin(), s.end(),
              [&](const Vertex& a, const Vertex& b) { return better(a.v, a.p, b.v, b.p); });
  };
  const auto lerp = [](Point2 a, Point2 b, double t) {
    return Point2{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
  };

  int it = 0;
  for (; it < max_iter; ++it) {
    order();
    const Point2 centroid{(s[0].p.x + s[1].p.x) / 2, (s[0].p.y + s[1].p.y) / 2};
    const Point2 xr = lerp(centroid, s[2].p, -1.0);
    const double fr = f(xr);
    if (better(fr, xr, s[0].v, s[0].p)) {
      const Point2 xe = lerp(centroid, s[2].p, -2.0);
      const double fe = f(xe);
      s[2] = better(fe, xe, fr, xr) ? Vertex{xe, fe} : Vertex{xr, fr};
    } else if (better(fr, xr, s[1].v, s[1].p)) {
      s[2] = {xr, fr};
    } else {
      const bool outside = better(fr, xr, s[2].v, s[2].p);
      const Point2 xc = outside ? lerp(centroid, xr, 0.5) : lerp(centroid, s[2].p, 0.5);
      const double fc = f(xc);
      if (better(fc, xc, outside ? fr : s[2].v, outside ? xr : s[2].p)) {
        s[2] = {xc, fc};
      } else {
        for (int i = 1; i < 3; ++i) {
          s[i].p = lerp(s[0].p, s[i].p, 0.5);
          s[i].v = f(s[i].p);
        }
      }
    }
  }
  order();
  return {s[0].p, s[0].v, it};
}

}  // namespace trustmarket
