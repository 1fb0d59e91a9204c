#pragma once

#include <vector>

#include "csfem/polygon.hpp"
#include "csfem/types.hpp"

namespace csfem {

// 1D Gauss-Legendre rule on [0,1]; exact for polynomials of degree 2n-1.
struct QuadRule1D {
  std::vector<double> points;
  std::vector<double> weights;
  int order = 0;  // guaranteed polynomial exactness degree
};

// 2D rule with reference coordinates; weights sum to the reference measure.
struct QuadRule {
  std::vector<Vec2> points;
  std::vector<double> weights;
  int order = 0;
};

const QuadRule1D& gauss_rule_1d(int order);

// Tensor rule on the unit square [0,1]^2.
const QuadRule& cell_quadrature(int order);

// Rule on an arbitrary triangle (collapsed tensor product); weights sum to
// the triangle area.
QuadRule triangle_quadrature(const Triangle2& tri, int order);

}  // namespace csfem
