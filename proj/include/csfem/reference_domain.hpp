#pragma once

#include <vector>

#include "csfem/curve.hpp"
#include "csfem/polygon.hpp"
#include "csfem/types.hpp"

namespace csfem {

// One piece of a reference-domain boundary loop, oriented so the domain
// lies to the left. Seam segments are parametrization seams of periodic
// patches, not physical boundary.
struct RefSegment {
  Curve2 curve;
  bool seam = false;
  bool straight = false;  // polygonized by endpoints only
};

struct RefLoop {
  std::vector<RefSegment> segments;
};

// Polygonized boundary with per-edge provenance (which loop/segment the
// edge came from). loops[0] is the outer boundary (CCW), the rest are holes
// (CW).
struct PolyDomain {
  std::vector<Polyline> loops;
  std::vector<std::vector<int>> edge_segment;  // per loop, per edge: segment id
  std::vector<std::vector<bool>> edge_seam;
  double area = 0.0;
};

// Reference domain of a patch: region in the (xi,eta) plane bounded by
// oriented loops; optionally periodic in eta (closed tube patches).
class ReferenceDomain {
 public:
  std::vector<RefLoop> loops;
  bool periodic_eta = false;
  double eta_min = 0.0, eta_max = 0.0;

  const PolyDomain& polygonize(double resolution) const;
  Box2 bounding_box() const;
  double area(double resolution) const;
  bool contains(const Vec2& p, double resolution) const;
  double diameter() const;
  double wrap_eta(double eta) const;

 private:
  mutable double cached_res_ = -1.0;
  mutable PolyDomain cached_;
  mutable Box2 bbox_;
  mutable bool bbox_valid_ = false;
};

ReferenceDomain rectangle_domain(const Vec2& lo, const Vec2& hi);

}  // namespace csfem
