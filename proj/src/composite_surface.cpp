#include "csfem/composite_surface.hpp"

#include <cmath>
#include <set>

namespace csfem {

const ParametricPatch& CompositeSurface::patch(int id) const {
  for (const auto& p : patches)
    if (p.id == id) return p;
  throw GeometryError("unknown patch id");
}

double CompositeSurface::diameter() const {
  Vec3 lo(1e300, 1e300, 1e300), hi = -lo;
  for (const auto& p : patches) {
    Box2 b = p.domain.bounding_box();
    for (int i = 0; i <= 8; ++i)
      for (int j = 0; j <= 8; ++j) {
        Vec2 r(b.lo.x() + i / 8.0 * b.width(), b.lo.y() + j / 8.0 * b.height());
        Vec3 x = p.map(r);
        lo = lo.cwiseMin(x);
        hi = hi.cwiseMax(x);
      }
  }
  return (hi - lo).norm();
}

void CompositeSurface::validate() const {
  const double diam = std::max(diameter(), 1e-12);

  for (const auto& p : patches) validate_patch(p);

  if (dirichlet.empty())
    throw GeometryError("Dirichlet boundary must be nonempty");

  for (const auto& iface : interfaces) {
    if (iface.member_count() < 2)
      throw GeometryError("interface needs at least two member patches");
    if (iface.weights.size() != iface.traces.size())
      throw GeometryError("interface weights/member mismatch");
    double sum = 0.0;
    for (double a : iface.weights) {
      if (a < -1e-14 || a > 1.0 + 1e-14)
        throw GeometryError("interface weight outside [0,1]");
      sum += a;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw GeometryError("interface weights must sum to 1");

    // geometric consistency of traces against the master curve
    for (const auto& tr : iface.traces) {
      const ParametricPatch& p = patch(tr.patch);
      for (int i = 0; i <= 20; ++i) {
        double t = i / 20.0;
        double gap = (p.map(tr.curve.at(t)) - iface.master.at(t)).norm();
        if (gap > 1e-9 * diam)
          throw GeometryError("interface trace inconsistent with master curve");
      }
    }
  }

  // interfaces pairwise disjoint (sampled)
  for (std::size_t a = 0; a < interfaces.size(); ++a)
    for (std::size_t b = a + 1; b < interfaces.size(); ++b) {
      double dmin = 1e300;
      for (int i = 0; i <= 24; ++i)
        for (int j = 0; j <= 24; ++j) {
          double d = (interfaces[a].master.at(i / 24.0) -
                      interfaces[b].master.at(j / 24.0))
                         .norm();
          dmin = std::min(dmin, d);
        }
      if (dmin < 1e-9 * diam)
        throw GeometryError("interface curves are not pairwise disjoint");
    }

  // connectivity of the patch adjacency graph induced by interfaces
  if (!patches.empty()) {
    std::set<int> reached{patches.front().id};
    bool grew = true;
    while (grew) {
      grew = false;
      for (const auto& iface : interfaces) {
        bool touches = false;
        for (const auto& tr : iface.traces)
          if (reached.count(tr.patch)) touches = true;
        if (!touches) continue;
        for (const auto& tr : iface.traces)
          if (reached.insert(tr.patch).second) grew = true;
      }
    }
    if (reached.size() != patches.size())
      throw GeometryError("patch adjacency graph is disconnected");
  }

  // loop orientation: outer CCW, holes CW (domain to the left of travel)
  for (const auto& p : patches) {
    const PolyDomain& pd = p.domain.polygonize(0.01 * p.domain.diameter());
    for (std::size_t li = 0; li < pd.loops.size(); ++li) {
      double a = shoelace_area(pd.loops[li]);
      if ((li == 0 && a <= 0.0) || (li > 0 && a >= 0.0))
        throw GeometryError("reference boundary loop orientation is wrong");
    }
  }

  // corner condition: adjacent conormals at reference-domain corners must
  // satisfy nu+ . nu- > -1 + 1e-6 (seam junctions are not physical corners).
  // With the domain on the left of travel, the outward reference conormal is
  // the right-rotated tangent, which stays well defined at cusps.
  for (const auto& p : patches) {
    for (const auto& loop : p.domain.loops) {
      const std::size_t n = loop.segments.size();
      for (std::size_t s = 0; s < n; ++s) {
        const RefSegment& cur = loop.segments[s];
        const RefSegment& nxt = loop.segments[(s + 1) % n];
        if (cur.seam || nxt.seam) continue;
        Vec2 gap = cur.curve.at(1.0) - nxt.curve.at(0.0);
        if (gap.norm() > 1e-9 * p.domain.diameter()) continue;  // not a shared corner
        Vec2 corner = nxt.curve.at(0.0);
        auto physical_conormal = [&](const Vec2& tau_ref) {
          Vec2 nu_ref = Vec2(tau_ref.y(), -tau_ref.x()).normalized();
          Mat32 J = p.jacobian(corner);
          Mat2 G = J.transpose() * J;
          return Vec3((J * G.inverse() * nu_ref).normalized());
        };
        Vec3 nu_minus = physical_conormal(cur.curve.tangent(1.0 - 1e-7));
        Vec3 nu_plus = physical_conormal(nxt.curve.tangent(1e-7));
        if (nu_minus.dot(nu_plus) <= -1.0 + 1e-6)
          throw GeometryError("corner condition violated (cusp corner)");
      }
    }
  }
}

}  // namespace csfem
