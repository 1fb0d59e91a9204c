#pragma once

#include <functional>

#include "csfem/reference_domain.hpp"
#include "csfem/types.hpp"

namespace csfem {

// A surface patch given by an exact parametric map F from a 2D reference
// domain into R^3, with the Jacobian supplied analytically.
struct ParametricPatch {
  int id = -1;
  std::function<Vec3(const Vec2&)> map;
  std::function<Mat32(const Vec2&)> jacobian;
  ReferenceDomain domain;
  std::function<double(const Vec3&)> mu = [](const Vec3&) { return 1.0; };

  static constexpr double kDetTol = 1e-12;

  Mat2 first_fundamental(const Vec2& p) const {
    Mat32 J = jacobian(p);
    return J.transpose() * J;
  }

  double measure(const Vec2& p) const {
    double det = first_fundamental(p).determinant();
    if (det <= kDetTol) throw GeometryError("degenerate surface metric");
    return std::sqrt(det);
  }

  Vec3 normal(const Vec2& p) const {
    Mat32 J = jacobian(p);
    Vec3 n = J.col(0).cross(J.col(1));
    double len = n.norm();
    if (len <= kDetTol) throw GeometryError("degenerate surface normal");
    return n / len;
  }

  // Pushforward of a reference gradient: grad_Omega v = J G^{-1} grad_ref v.
  Vec3 push_gradient(const Vec2& p, const Vec2& ref_grad) const {
    Mat32 J = jacobian(p);
    Mat2 G = J.transpose() * J;
    double det = G.determinant();
    if (det <= kDetTol) throw GeometryError("degenerate surface metric");
    return J * G.inverse() * ref_grad;
  }
};

// Tangential gradient of a field given by its reference gradient at a point.
inline Vec3 surface_gradient(const ParametricPatch& patch, const Vec2& ref_pt,
                             const Vec2& ref_grad) {
  return patch.push_gradient(ref_pt, ref_grad);
}

void validate_patch(const ParametricPatch& patch, double mu_lo = 1e-12,
                    double mu_hi = 1e12);

}  // namespace csfem
