#pragma once

#include <vector>

#include "csfem/curve.hpp"
#include "csfem/patch.hpp"
#include "csfem/types.hpp"

namespace csfem {

// Trace of an interface curve in one member patch's reference domain:
// patch.map(curve(t)) == master(t) for all t.
struct InterfaceTrace {
  int patch = -1;
  Curve2 curve;
};

// Curve where two or more patches meet. All member patches share the master
// parametrization t in [0,1]; weights form the convex average <v>.
struct InterfaceCurve {
  int id = -1;
  Curve3 master;
  std::vector<InterfaceTrace> traces;
  std::vector<double> weights;
  bool closed = false;

  int member_count() const { return static_cast<int>(traces.size()); }
  int trace_index(int patch) const {
    for (std::size_t i = 0; i < traces.size(); ++i)
      if (traces[i].patch == patch) return static_cast<int>(i);
    return -1;
  }
  void set_uniform_weights() {
    weights.assign(traces.size(), 1.0 / static_cast<double>(traces.size()));
  }
};

// Exterior unit conormal of `patch` along a boundary trace: tangent to the
// patch, orthogonal to the curve tangent, pointing out of the patch.
Vec3 conormal(const ParametricPatch& patch, const Curve2& trace, double t);

Vec3 conormal(const InterfaceCurve& iface, const ParametricPatch& patch,
              double t);

// Reference-domain outward conormal (unit, Euclidean) at trace(t).
Vec2 reference_conormal(const ParametricPatch& patch, const Curve2& trace,
                        double t);

}  // namespace csfem
