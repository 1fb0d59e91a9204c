#pragma once

#include <string>
#include <vector>

#include "csfem/interface_curve.hpp"
#include "csfem/patch.hpp"

namespace csfem {

// Boundary curve segment of one patch, tagged Dirichlet or Neumann by the
// list it lives in.
struct BoundaryCurve {
  int patch = -1;
  Curve2 curve;
};

struct CompositeSurface {
  std::string name;
  std::vector<ParametricPatch> patches;
  std::vector<InterfaceCurve> interfaces;
  std::vector<BoundaryCurve> dirichlet;
  std::vector<BoundaryCurve> neumann;

  const ParametricPatch& patch(int id) const;
  double diameter() const;

  // Construction invariants: trace consistency, convex weights, corner
  // condition, connectivity, nonempty Dirichlet boundary, disjoint
  // interfaces. Throws GeometryError on violation.
  void validate() const;
};

}  // namespace csfem
