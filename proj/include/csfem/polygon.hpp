#pragma once

#include <array>
#include <vector>

#include "csfem/types.hpp"

namespace csfem {

// A closed polyline: vertices in order, last edge runs back to the first
// vertex. Orientation matters: counterclockwise loops enclose positive area.
using Polyline = std::vector<Vec2>;

struct Triangle2 {
  Vec2 a, b, c;
  double area() const;
  Vec2 centroid() const { return (a + b + c) / 3.0; }
};

double shoelace_area(const Polyline& poly);

// Winding-number containment test; points on the boundary may land on
// either side within floating-point tolerance.
bool point_in_polyline(const Polyline& poly, const Vec2& p);

// Sutherland-Hodgman clip of an arbitrary simple polygon against an
// axis-aligned box. Output is a polygon (possibly empty).
Polyline clip_polyline_to_box(const Polyline& poly, const Box2& box);

struct SignedTri {
  Triangle2 tri;
  double sign = 1.0;
};

// Triangulation whose signed sum reproduces integrals over the polygon
// exactly: a plain fan for convex input, a centroid fan with signed parts
// otherwise. Robust for the degenerate bridge polygons produced by clipping
// near-tangent cuts.
std::vector<SignedTri> fan_triangulation(const Polyline& poly,
                                         double area_tol = 1e-300);

// Drop consecutive duplicates and collinear vertices.
Polyline simplify_polyline(const Polyline& poly, double eps);

}  // namespace csfem
