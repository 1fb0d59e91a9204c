#include "csfem/polygon.hpp"

#include <algorithm>
#include <cmath>

namespace csfem {

double Triangle2::area() const {
  return 0.5 * std::abs((b.x() - a.x()) * (c.y() - a.y()) -
                        (c.x() - a.x()) * (b.y() - a.y()));
}

static double cross2(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

double shoelace_area(const Polyline& poly) {
  double s = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % n];
    s += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * s;
}

bool point_in_polyline(const Polyline& poly, const Vec2& p) {
  // crossing-number along the +x ray
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    const bool straddles = (a.y() > p.y()) != (b.y() > p.y());
    if (straddles) {
      double x_cross = a.x() + (p.y() - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
      if (p.x() < x_cross) inside = !inside;
    }
  }
  return inside;
}

Polyline simplify_polyline(const Polyline& poly, double eps) {
  Polyline out;
  out.reserve(poly.size());
  for (const Vec2& p : poly) {
    if (out.empty() || (p - out.back()).norm() > eps) out.push_back(p);
  }
  while (out.size() >= 2 && (out.back() - out.front()).norm() <= eps)
    out.pop_back();
  // remove collinear runs
  if (out.size() >= 3) {
    Polyline slim;
    const std::size_t n = out.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& prev = out[(i + n - 1) % n];
      const Vec2& cur = out[i];
      const Vec2& next = out[(i + 1) % n];
      double c = cross2(prev, cur, next);
      double scale = (cur - prev).norm() * (next - cur).norm();
      if (std::abs(c) > eps * std::max(scale, eps)) slim.push_back(cur);
    }
    if (slim.size() >= 3) return slim;
  }
  return out;
}

Polyline clip_polyline_to_box(const Polyline& poly, const Box2& box) {
  if (poly.empty()) return {};
  // clip successively against x>=lo.x, x<=hi.x, y>=lo.y, y<=hi.y
  auto clip_half = [](const Polyline& in, int axis, double c, int keep_sign) {
    Polyline out;
    const std::size_t n = in.size();
    if (n == 0) return out;
    auto side = [&](const Vec2& p) {
      double v = (axis == 0 ? p.x() : p.y()) - c;
      return keep_sign > 0 ? v : -v;  // >= 0 means inside
    };
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& cur = in[i];
      const Vec2& nxt = in[(i + 1) % n];
      double sc = side(cur), sn = side(nxt);
      if (sc >= 0) out.push_back(cur);
      if ((sc > 0 && sn < 0) || (sc < 0 && sn > 0)) {
        double t = sc / (sc - sn);
        out.push_back(cur + t * (nxt - cur));
      }
    }
    return out;
  };
  Polyline r = clip_half(poly, 0, box.lo.x(), +1);
  r = clip_half(r, 0, box.hi.x(), -1);
  r = clip_half(r, 1, box.lo.y(), +1);
  r = clip_half(r, 1, box.hi.y(), -1);
  return r;
}

std::vector<SignedTri> fan_triangulation(const Polyline& raw,
                                         double area_tol) {
  std::vector<SignedTri> tris;
  double total = shoelace_area(raw);
  if (std::abs(total) <= area_tol) return tris;

  double diam = 0.0;
  for (const Vec2& p : raw)
    for (const Vec2& q : raw) diam = std::max(diam, (p - q).norm());
  Polyline poly = simplify_polyline(raw, 1e-13 * std::max(diam, 1.0));
  if (poly.size() < 3) return tris;
  if (shoelace_area(poly) < 0) std::reverse(poly.begin(), poly.end());
  const std::size_t n = poly.size();

  bool convex = true;
  for (std::size_t i = 0; i < n && convex; ++i)
    convex = cross2(poly[i], poly[(i + 1) % n], poly[(i + 2) % n]) >
             -1e-12 * diam * diam;
  if (convex) {
    for (std::size_t i = 1; i + 1 < n; ++i)
      tris.push_back({{poly[0], poly[i], poly[i + 1]}, 1.0});
    return tris;
  }

  // signed centroid fan: sum of signed triangle integrals equals the
  // polygon integral for any closed boundary
  Vec2 c(0, 0);
  for (const Vec2& p : poly) c += p;
  c /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    double s = cross2(c, a, b);
    if (std::abs(s) < 1e-16 * std::max(1.0, diam * diam)) continue;
    tris.push_back({{c, a, b}, s > 0 ? 1.0 : -1.0});
  }
  return tris;
}

}  // namespace csfem
