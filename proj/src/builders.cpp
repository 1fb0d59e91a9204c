#include "csfem/builders.hpp"

#include <cmath>

namespace csfem {

ParametricPatch flat_patch(int id, const Vec2& lo, const Vec2& hi,
                           const Vec3& origin, const Vec3& e_xi,
                           const Vec3& e_eta) {
  ParametricPatch p;
  p.id = id;
  p.map = [origin, e_xi, e_eta](const Vec2& r) {
    return Vec3(origin + r.x() * e_xi + r.y() * e_eta);
  };
  p.jacobian = [e_xi, e_eta](const Vec2&) {
    Mat32 J;
    J.col(0) = e_xi;
    J.col(1) = e_eta;
    return J;
  };
  p.domain = rectangle_domain(lo, hi);
  return p;
}

ParametricPatch cylinder_strip_patch(int id, double radius, double theta0,
                                     double theta1, double z0, double z1) {
  ParametricPatch p;
  p.id = id;
  double R = radius;
  p.map = [R](const Vec2& r) {
    return Vec3(R * std::cos(r.x()), R * std::sin(r.x()), r.y());
  };
  p.jacobian = [R](const Vec2& r) {
    Mat32 J;
    J.col(0) = Vec3(-R * std::sin(r.x()), R * std::cos(r.x()), 0.0);
    J.col(1) = Vec3(0.0, 0.0, 1.0);
    return J;
  };
  p.domain = rectangle_domain(Vec2(theta0, z0), Vec2(theta1, z1));
  return p;
}

static Curve2 rect_edge(const Vec2& a, const Vec2& b) { return line_segment(a, b); }

CompositeSurface flat_square_surface(const std::vector<int>& neumann_edges) {
  CompositeSurface s;
  s.name = "flat_square";
  s.patches.push_back(flat_patch(0, Vec2(0, 0), Vec2(1, 1), Vec3(0, 0, 0),
                                 Vec3(1, 0, 0), Vec3(0, 1, 0)));
  const Vec2 c[4] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  for (int e = 0; e < 4; ++e) {
    BoundaryCurve bc;
    bc.patch = 0;
    bc.curve = rect_edge(c[e], c[(e + 1) % 4]);
    bool is_neumann = false;
    for (int ne : neumann_edges) is_neumann |= (ne == e);
    (is_neumann ? s.neumann : s.dirichlet).push_back(bc);
  }
  return s;
}

CompositeSurface flat_two_patch_surface(double split, const Vec2& alpha) {
  if (split <= 0.0 || split >= 1.0)
    throw GeometryError("split must lie strictly inside (0,1)");
  CompositeSurface s;
  s.name = "flat_two_patch";
  s.patches.push_back(flat_patch(0, Vec2(0, 0), Vec2(split, 1), Vec3(0, 0, 0),
                                 Vec3(1, 0, 0), Vec3(0, 1, 0)));
  s.patches.push_back(flat_patch(1, Vec2(split, 0), Vec2(1, 1), Vec3(0, 0, 0),
                                 Vec3(1, 0, 0), Vec3(0, 1, 0)));

  InterfaceCurve iface;
  iface.id = 0;
  iface.master = line_segment3(Vec3(split, 0, 0), Vec3(split, 1, 0));
  iface.traces.push_back({0, line_segment(Vec2(split, 0), Vec2(split, 1))});
  iface.traces.push_back({1, line_segment(Vec2(split, 0), Vec2(split, 1))});
  iface.weights = {alpha.x(), alpha.y()};
  s.interfaces.push_back(iface);

  auto dir = [&s](int patch, const Vec2& a, const Vec2& b) {
    s.dirichlet.push_back({patch, rect_edge(a, b)});
  };
  dir(0, Vec2(0, 0), Vec2(split, 0));
  dir(0, Vec2(0, 1), Vec2(0, 0));
  dir(0, Vec2(split, 1), Vec2(0, 1));
  dir(1, Vec2(split, 0), Vec2(1, 0));
  dir(1, Vec2(1, 0), Vec2(1, 1));
  dir(1, Vec2(1, 1), Vec2(split, 1));
  return s;
}

CompositeSurface build_flat_junction(int n_patches,
                                     const std::vector<double>& angles,
                                     double width, double height) {
  if (n_patches < 2 || static_cast<int>(angles.size()) != n_patches)
    throw GeometryError("flat junction needs >= 2 patches with one angle each");
  for (int i = 0; i < n_patches; ++i)
    for (int j = i + 1; j < n_patches; ++j) {
      double d = std::remainder(angles[i] - angles[j], 2.0 * M_PI);
      if (std::abs(d) < 1e-9)
        throw GeometryError("duplicate fan angles give coincident patches");
    }

  CompositeSurface s;
  s.name = "flat_junction";
  InterfaceCurve iface;
  iface.id = 0;
  iface.master = line_segment3(Vec3(0, 0, 0), Vec3(0, 0, height));

  for (int k = 0; k < n_patches; ++k) {
    Vec3 e_xi(std::cos(angles[k]), std::sin(angles[k]), 0.0);
    s.patches.push_back(flat_patch(k, Vec2(0, 0), Vec2(width, height),
                                   Vec3(0, 0, 0), e_xi, Vec3(0, 0, 1)));
    iface.traces.push_back(
        {k, line_segment(Vec2(0, 0), Vec2(0, height))});
    // outer edges of each rectangle are Dirichlet
    s.dirichlet.push_back({k, rect_edge(Vec2(0, 0), Vec2(width, 0))});
    s.dirichlet.push_back({k, rect_edge(Vec2(width, 0), Vec2(width, height))});
    s.dirichlet.push_back({k, rect_edge(Vec2(width, height), Vec2(0, height))});
  }
  iface.set_uniform_weights();
  s.interfaces.push_back(iface);
  return s;
}

// ---------------------------------------------------------------------------
// Intersecting cylinders
// ---------------------------------------------------------------------------

namespace {

struct CylGeom {
  double R1, R2, theta, z0;
  double sin_t, cos_t, cot_t, csc_t;

  // cylinder 1: F1(x, phi) = (x, R1 sin phi, z0 + R1 cos phi)
  Vec3 F1(double x, double phi) const {
    return {x, R1 * std::sin(phi), z0 + R1 * std::cos(phi)};
  }
  // cylinder 2 reference (s, psi); axis through the origin in the xy plane
  Vec3 F2(double s, double psi) const {
    double u = R2 * std::cos(psi);
    return {-s * cos_t + u * sin_t, s * sin_t + u * cos_t, R2 * std::sin(psi)};
  }
  double s_of(const Vec3& p) const { return p.y() * sin_t - p.x() * cos_t; }
  double u_of(const Vec3& p) const { return p.x() * sin_t + p.y() * cos_t; }
  double psi_of(const Vec3& p) const {
    double psi = std::atan2(p.z(), u_of(p));
    if (psi < -M_PI / 2.0) psi += 2.0 * M_PI;  // seam at psi = -pi/2
    return psi;
  }

  // intersection loop on cylinder 1, parametrized by phi; s2 = sign of u
  double W(double phi) const {
    double z = z0 + R1 * std::cos(phi);
    return std::sqrt(R2 * R2 - z * z);
  }
  double x_loop(double s2, double phi) const {
    double y = R1 * std::sin(phi);
    return -y * cot_t + s2 * csc_t * W(phi);
  }
  double dx_loop(double s2, double phi) const {
    double z = z0 + R1 * std::cos(phi);
    double dz = -R1 * std::sin(phi);
    double dy = R1 * std::cos(phi);
    return -dy * cot_t + s2 * csc_t * (-z * dz) / W(phi);
  }
};

Curve3 loop_master(const CylGeom& g, double s2) {
  Curve3 c;
  c.at = [g, s2](double t) {
    double phi = 2.0 * M_PI * t;
    return g.F1(g.x_loop(s2, phi), phi);
  };
  c.deriv = [g, s2](double t) {
    double phi = 2.0 * M_PI * t;
    Vec3 d(g.dx_loop(s2, phi), g.R1 * std::cos(phi), -g.R1 * std::sin(phi));
    return Vec3(2.0 * M_PI * d);
  };
  return c;
}

Curve2 loop_trace_c1(const CylGeom& g, double s2) {
  Curve2 c;
  c.at = [g, s2](double t) {
    double phi = 2.0 * M_PI * t;
    return Vec2(g.x_loop(s2, phi), phi);
  };
  c.deriv = [g, s2](double t) {
    double phi = 2.0 * M_PI * t;
    return Vec2(2.0 * M_PI * g.dx_loop(s2, phi), 2.0 * M_PI);
  };
  return c;
}

Curve2 loop_trace_c2(const CylGeom& g, double s2) {
  Curve2 c;
  c.at = [g, s2](double t) {
    double phi = 2.0 * M_PI * t;
    Vec3 p = g.F1(g.x_loop(s2, phi), phi);
    return Vec2(g.s_of(p), g.psi_of(p));
  };
  return c;
}

RefSegment seam_edge(const Vec2& a, const Vec2& b) {
  RefSegment s;
  s.curve = line_segment(a, b);
  s.seam = true;
  s.straight = true;
  return s;
}

RefSegment straight_edge(const Vec2& a, const Vec2& b) {
  RefSegment s;
  s.curve = line_segment(a, b);
  s.straight = true;
  return s;
}

RefSegment curved_edge(const Curve2& c) {
  RefSegment s;
  s.curve = c;
  return s;
}

}  // namespace

CompositeSurface build_cylinder_intersection(double R1, double R2,
                                             double theta, double z0,
                                             double pad) {
  if (!(R1 > 0.0 && R1 < R2)) throw GeometryError("need 0 < R1 < R2");
  if (!(std::abs(z0) < R1)) throw GeometryError("need |z0| < R1");
  double st = std::sin(theta);
  if (st < 0.05)
    throw GeometryError("cylinder axes nearly parallel: intersection not transversal");
  if (R1 + std::abs(z0) >= R2 * (1.0 - 1e-6))
    throw GeometryError("tangential cylinder intersection (R1 + |z0| too close to R2)");

  CylGeom g;
  g.R1 = R1;
  g.R2 = R2;
  g.theta = theta;
  g.z0 = z0;
  g.sin_t = st;
  g.cos_t = std::cos(theta);
  g.cot_t = g.cos_t / st;
  g.csc_t = 1.0 / st;

  // axial extents from the loops plus padding
  double max_x = 0.0, max_s = 0.0;
  for (int i = 0; i < 2048; ++i) {
    double phi = 2.0 * M_PI * i / 2048.0;
    for (double s2 : {-1.0, 1.0}) {
      Vec3 p = g.F1(g.x_loop(s2, phi), phi);
      max_x = std::max(max_x, std::abs(p.x()));
      max_s = std::max(max_s, std::abs(g.s_of(p)));
      double psi = g.psi_of(p);
      if (psi < -M_PI / 2.0 + 0.05 || psi > 3.0 * M_PI / 2.0 - 0.05)
        throw GeometryError("intersection loop runs into the cylinder-2 seam");
    }
  }
  const double L = max_x + pad;
  const double S = max_s + pad;

  Curve2 tr1_minus = loop_trace_c1(g, -1.0);
  Curve2 tr1_plus = loop_trace_c1(g, +1.0);
  Curve2 tr2_minus = loop_trace_c2(g, -1.0);
  Curve2 tr2_plus = loop_trace_c2(g, +1.0);
  const double x_minus_0 = g.x_loop(-1.0, 0.0);
  const double x_plus_0 = g.x_loop(+1.0, 0.0);
  const double two_pi = 2.0 * M_PI;

  auto make_c1_patch = [&](int id) {
    ParametricPatch p;
    p.id = id;
    p.map = [g](const Vec2& r) { return g.F1(r.x(), r.y()); };
    p.jacobian = [g](const Vec2& r) {
      Mat32 J;
      J.col(0) = Vec3(1, 0, 0);
      J.col(1) = Vec3(0, g.R1 * std::cos(r.y()), -g.R1 * std::sin(r.y()));
      return J;
    };
    p.domain.periodic_eta = true;
    p.domain.eta_min = 0.0;
    p.domain.eta_max = two_pi;
    return p;
  };
  auto make_c2_patch = [&](int id, bool periodic) {
    ParametricPatch p;
    p.id = id;
    p.map = [g](const Vec2& r) { return g.F2(r.x(), r.y()); };
    p.jacobian = [g](const Vec2& r) {
      Mat32 J;
      J.col(0) = Vec3(-g.cos_t, g.sin_t, 0.0);
      J.col(1) = Vec3(-g.R2 * std::sin(r.y()) * g.sin_t,
                      -g.R2 * std::sin(r.y()) * g.cos_t,
                      g.R2 * std::cos(r.y()));
      return J;
    };
    if (periodic) {
      p.domain.periodic_eta = true;
      p.domain.eta_min = -M_PI / 2.0;
      p.domain.eta_max = 3.0 * M_PI / 2.0;
    }
    return p;
  };

  CompositeSurface s;
  s.name = "intersecting_cylinders";

  // patch 0: cylinder-1 tube left of the minus loop
  {
    ParametricPatch p = make_c1_patch(0);
    RefLoop loop;
    loop.segments.push_back(seam_edge(Vec2(-L, 0), Vec2(x_minus_0, 0)));
    loop.segments.push_back(curved_edge(tr1_minus));
    loop.segments.push_back(seam_edge(Vec2(x_minus_0, two_pi), Vec2(-L, two_pi)));
    loop.segments.push_back(straight_edge(Vec2(-L, two_pi), Vec2(-L, 0)));
    p.domain.loops.push_back(loop);
    s.patches.push_back(std::move(p));
  }
  // patch 1: cylinder-1 tube between the loops
  {
    ParametricPatch p = make_c1_patch(1);
    RefLoop loop;
    loop.segments.push_back(seam_edge(Vec2(x_minus_0, 0), Vec2(x_plus_0, 0)));
    loop.segments.push_back(curved_edge(tr1_plus));
    loop.segments.push_back(seam_edge(Vec2(x_plus_0, two_pi), Vec2(x_minus_0, two_pi)));
    loop.segments.push_back(curved_edge(tr1_minus.reversed()));
    p.domain.loops.push_back(loop);
    s.patches.push_back(std::move(p));
  }
  // patch 2: cylinder-1 tube right of the plus loop
  {
    ParametricPatch p = make_c1_patch(2);
    RefLoop loop;
    loop.segments.push_back(seam_edge(Vec2(x_plus_0, 0), Vec2(L, 0)));
    loop.segments.push_back(straight_edge(Vec2(L, 0), Vec2(L, two_pi)));
    loop.segments.push_back(seam_edge(Vec2(L, two_pi), Vec2(x_plus_0, two_pi)));
    loop.segments.push_back(curved_edge(tr1_plus.reversed()));
    p.domain.loops.push_back(loop);
    s.patches.push_back(std::move(p));
  }
  // patch 3: cylinder-2 body with the two penetration holes
  {
    ParametricPatch p = make_c2_patch(3, true);
    RefLoop outer;
    double lo = -M_PI / 2.0, hi = 3.0 * M_PI / 2.0;
    outer.segments.push_back(seam_edge(Vec2(-S, lo), Vec2(S, lo)));
    outer.segments.push_back(straight_edge(Vec2(S, lo), Vec2(S, hi)));
    outer.segments.push_back(seam_edge(Vec2(S, hi), Vec2(-S, hi)));
    outer.segments.push_back(straight_edge(Vec2(-S, hi), Vec2(-S, lo)));
    p.domain.loops.push_back(outer);
    for (const Curve2* tr : {&tr2_plus, &tr2_minus}) {
      // holes must run clockwise
      Polyline probe;
      for (int i = 0; i < 64; ++i) probe.push_back(tr->at(i / 64.0));
      RefLoop hole;
      hole.segments.push_back(
          curved_edge(shoelace_area(probe) > 0 ? tr->reversed() : *tr));
      p.domain.loops.push_back(hole);
    }
    s.patches.push_back(std::move(p));
  }
  // patches 4, 5: cylinder-2 caps inside cylinder 1
  for (int k = 0; k < 2; ++k) {
    const Curve2& tr = (k == 0) ? tr2_plus : tr2_minus;
    ParametricPatch p = make_c2_patch(4 + k, false);
    Polyline probe;
    for (int i = 0; i < 64; ++i) probe.push_back(tr.at(i / 64.0));
    RefLoop loop;
    loop.segments.push_back(
        curved_edge(shoelace_area(probe) > 0 ? tr : tr.reversed()));
    p.domain.loops.push_back(loop);
    s.patches.push_back(std::move(p));
  }

  // interfaces: the two intersection loops, four patches each
  for (int k = 0; k < 2; ++k) {
    double s2 = (k == 0) ? -1.0 : 1.0;
    InterfaceCurve iface;
    iface.id = k;
    iface.closed = true;
    iface.master = loop_master(g, s2);
    if (s2 < 0) {
      iface.traces.push_back({0, tr1_minus});
      iface.traces.push_back({1, tr1_minus});
      iface.traces.push_back({3, tr2_minus});
      iface.traces.push_back({5, tr2_minus});
    } else {
      iface.traces.push_back({1, tr1_plus});
      iface.traces.push_back({2, tr1_plus});
      iface.traces.push_back({3, tr2_plus});
      iface.traces.push_back({4, tr2_plus});
    }
    iface.set_uniform_weights();
    s.interfaces.push_back(std::move(iface));
  }

  // Dirichlet boundary: the four outer rim circles
  s.dirichlet.push_back({0, line_segment(Vec2(-L, 0), Vec2(-L, two_pi))});
  s.dirichlet.push_back({2, line_segment(Vec2(L, 0), Vec2(L, two_pi))});
  s.dirichlet.push_back(
      {3, line_segment(Vec2(-S, -M_PI / 2.0), Vec2(-S, 3.0 * M_PI / 2.0))});
  s.dirichlet.push_back(
      {3, line_segment(Vec2(S, -M_PI / 2.0), Vec2(S, 3.0 * M_PI / 2.0))});
  return s;
}

}  // namespace csfem
