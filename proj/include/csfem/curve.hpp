#pragma once

#include <functional>

#include "csfem/types.hpp"

namespace csfem {

// Parametric curve in the 2D reference domain, t in [0,1]. The derivative
// falls back to central differences when no analytic one is supplied.
struct Curve2 {
  std::function<Vec2(double)> at;
  std::function<Vec2(double)> deriv;  // optional

  Vec2 tangent(double t) const {
    if (deriv) return deriv(t);
    const double h = 1e-6;
    double a = std::max(0.0, t - h);
    double b = std::min(1.0, t + h);
    return (at(b) - at(a)) / (b - a);
  }
  Curve2 reversed() const {
    Curve2 r;
    auto f = at;
    r.at = [f](double t) { return f(1.0 - t); };
    if (deriv) {
      auto d = deriv;
      r.deriv = [d](double t) { return Vec2(-d(1.0 - t)); };
    }
    return r;
  }
};

// Parametric curve in physical space, t in [0,1].
struct Curve3 {
  std::function<Vec3(double)> at;
  std::function<Vec3(double)> deriv;  // optional

  Vec3 tangent(double t) const {
    if (deriv) return deriv(t);
    const double h = 1e-6;
    double a = std::max(0.0, t - h);
    double b = std::min(1.0, t + h);
    return (at(b) - at(a)) / (b - a);
  }
};

inline Curve2 line_segment(const Vec2& a, const Vec2& b) {
  Curve2 c;
  c.at = [a, b](double t) { return Vec2(a + t * (b - a)); };
  c.deriv = [a, b](double) { return Vec2(b - a); };
  return c;
}

inline Curve3 line_segment3(const Vec3& a, const Vec3& b) {
  Curve3 c;
  c.at = [a, b](double t) { return Vec3(a + t * (b - a)); };
  c.deriv = [a, b](double) { return Vec3(b - a); };
  return c;
}

}  // namespace csfem
