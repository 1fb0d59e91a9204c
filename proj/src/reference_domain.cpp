#include "csfem/reference_domain.hpp"

#include <cmath>

namespace csfem {

static double curve_length_estimate(const Curve2& c) {
  double len = 0.0;
  Vec2 prev = c.at(0.0);
  for (int i = 1; i <= 24; ++i) {
    Vec2 p = c.at(i / 24.0);
    len += (p - prev).norm();
    prev = p;
  }
  return len;
}

const PolyDomain& ReferenceDomain::polygonize(double resolution) const {
  if (resolution == cached_res_ && !cached_.loops.empty()) return cached_;
  PolyDomain out;
  for (const RefLoop& loop : loops) {
    Polyline pts;
    std::vector<int> seg_of_edge;
    std::vector<bool> seam_of_edge;
    for (std::size_t s = 0; s < loop.segments.size(); ++s) {
      const RefSegment& seg = loop.segments[s];
      int n = 1;
      if (!seg.straight) {
        double len = curve_length_estimate(seg.curve);
        n = std::max(2, static_cast<int>(std::ceil(len / resolution)));
      }
      for (int i = 0; i < n; ++i) {  // drop the shared endpoint
        pts.push_back(seg.curve.at(static_cast<double>(i) / n));
        seg_of_edge.push_back(static_cast<int>(s));
        seam_of_edge.push_back(seg.seam);
      }
    }
    out.loops.push_back(std::move(pts));
    out.edge_segment.push_back(std::move(seg_of_edge));
    out.edge_seam.push_back(std::move(seam_of_edge));
  }
  double a = 0.0;
  for (const Polyline& l : out.loops) a += shoelace_area(l);
  out.area = a;
  cached_ = std::move(out);
  cached_res_ = resolution;
  return cached_;
}

Box2 ReferenceDomain::bounding_box() const {
  if (bbox_valid_) return bbox_;
  Box2 b;
  bool first = true;
  double pad = 0.0;  // curved extrema can poke past sampled points
  for (const RefLoop& loop : loops)
    for (const RefSegment& seg : loop.segments) {
      const int n = seg.straight ? 1 : 2048;
      Vec2 prev = seg.curve.at(0.0);
      for (int i = 0; i <= n; ++i) {
        Vec2 p = seg.curve.at(static_cast<double>(i) / n);
        if (first) {
          b.lo = b.hi = p;
          first = false;
        } else {
          b.lo = b.lo.cwiseMin(p);
          b.hi = b.hi.cwiseMax(p);
        }
        if (!seg.straight && i > 0) pad = std::max(pad, (p - prev).norm());
        prev = p;
      }
    }
  b.lo -= Vec2(pad, pad);
  b.hi += Vec2(pad, pad);
  bbox_ = b;
  bbox_valid_ = true;
  return b;
}

double ReferenceDomain::diameter() const {
  Box2 b = bounding_box();
  return (b.hi - b.lo).norm();
}

double ReferenceDomain::area(double resolution) const {
  return polygonize(resolution).area;
}

double ReferenceDomain::wrap_eta(double eta) const {
  if (!periodic_eta) return eta;
  double period = eta_max - eta_min;
  double t = std::fmod(eta - eta_min, period);
  if (t < 0) t += period;
  return eta_min + t;
}

bool ReferenceDomain::contains(const Vec2& p, double resolution) const {
  Vec2 q(p.x(), wrap_eta(p.y()));
  const PolyDomain& pd = polygonize(resolution);
  if (!point_in_polyline(pd.loops[0], q)) return false;
  for (std::size_t i = 1; i < pd.loops.size(); ++i)
    if (point_in_polyline(pd.loops[i], q)) return false;
  return true;
}

ReferenceDomain rectangle_domain(const Vec2& lo, const Vec2& hi) {
  ReferenceDomain d;
  RefLoop loop;
  Vec2 a = lo, b(hi.x(), lo.y()), c = hi, e(lo.x(), hi.y());
  for (auto [p, q] : {std::pair{a, b}, {b, c}, {c, e}, {e, a}}) {
    RefSegment s;
    s.curve = line_segment(p, q);
    s.straight = true;
    loop.segments.push_back(s);
  }
  d.loops.push_back(loop);
  return d;
}

}  // namespace csfem
