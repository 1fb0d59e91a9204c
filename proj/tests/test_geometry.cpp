#include <cmath>
#include <random>

#include "csfem/builders.hpp"
#include "csfem/interface_curve.hpp"
#include "csfem/mesh.hpp"
#include "doctest.h"
#include "support/oracles.hpp"

using namespace csfem;

namespace {

ParametricPatch saddle_patch() {
  ParametricPatch p;
  p.id = 0;
  p.map = [](const Vec2& r) {
    return Vec3(r.x(), r.y(), 0.3 * r.x() * r.x() - 0.2 * r.y() * r.y());
  };
  p.jacobian = [](const Vec2& r) {
    Mat32 J;
    J.col(0) = Vec3(1, 0, 0.6 * r.x());
    J.col(1) = Vec3(0, 1, -0.4 * r.y());
    return J;
  };
  p.domain = rectangle_domain(Vec2(0, 0), Vec2(1, 1));
  return p;
}

}  // namespace

TEST_CASE("surface gradient: constant, flat and cylinder cases") {
  ParametricPatch flat = flat_patch(0, Vec2(0, 0), Vec2(1, 1), Vec3(0, 0, 0),
                                    Vec3(1, 0, 0), Vec3(0, 1, 0));
  CHECK(surface_gradient(flat, Vec2(0.4, 0.3), Vec2(0, 0)).norm() == 0.0);
  Vec3 g = surface_gradient(flat, Vec2(0.4, 0.3), Vec2(1, 0));
  CHECK((g - Vec3(1, 0, 0)).norm() < 1e-14);

  // cylinder R=1.5, field v = theta, at theta=0: grad = (0, 1/R, 0)
  ParametricPatch cyl = cylinder_strip_patch(1, 1.5, -1.0, 1.0, 0.0, 1.0);
  Vec3 gc = surface_gradient(cyl, Vec2(0.0, 0.5), Vec2(1, 0));
  CHECK((gc - Vec3(0, 1.0 / 1.5, 0)).norm() < 1e-13);

  // derived check: central finite differences of v(F(.)) along the surface
  double eps = 1e-6;
  auto v_of = [&](double theta) { return theta; };
  Vec3 xp = cyl.map(Vec2(eps, 0.5));
  Vec3 xm = cyl.map(Vec2(-eps, 0.5));
  double dv_ds = (v_of(eps) - v_of(-eps)) / (xp - xm).norm();
  CHECK(gc.norm() == doctest::Approx(std::abs(dv_ds)).epsilon(1e-6));
}

TEST_CASE("pushforward gradients are tangent and projection-invariant") {
  std::mt19937 rng(991);
  std::uniform_real_distribution<double> u01(0.05, 0.95);
  ParametricPatch patches[2] = {
      saddle_patch(), cylinder_strip_patch(1, 1.5, 0.0, 2.0, -1.0, 1.0)};
  for (const ParametricPatch& p : patches) {
    Box2 box = p.domain.bounding_box();
    for (int i = 0; i < 50; ++i) {
      Vec2 ref(box.lo.x() + u01(rng) * box.width(),
               box.lo.y() + u01(rng) * box.height());
      Vec2 gref(u01(rng) * 2 - 1, u01(rng) * 2 - 1);
      Vec3 g = p.push_gradient(ref, gref);
      Vec3 n = p.normal(ref);
      if (g.norm() < 1e-14) continue;
      CHECK(std::abs(g.dot(n)) < 1e-12 * g.norm());
      Mat3 P = Mat3::Identity() - n * n.transpose();
      CHECK(((P * g) - g).norm() < 1e-12 * g.norm());
    }
  }
}

TEST_CASE("conormals of coplanar and perpendicular flat pairs") {
  CompositeSurface pair = build_flat_junction(2, {0.0, M_PI});
  const InterfaceCurve& iface = pair.interfaces.front();
  Vec3 nu1 = conormal(iface, pair.patch(0), 0.5);
  Vec3 nu2 = conormal(iface, pair.patch(1), 0.5);
  CHECK(nu1.dot(nu2) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK((nu1 - Vec3(-1, 0, 0)).norm() < 1e-12);

  CompositeSurface perp = build_flat_junction(2, {0.0, M_PI / 2});
  const InterfaceCurve& iface2 = perp.interfaces.front();
  Vec3 m1 = conormal(iface2, perp.patch(0), 0.3);
  Vec3 m2 = conormal(iface2, perp.patch(1), 0.3);
  CHECK(std::abs(m1.dot(m2)) < 1e-12);
}

TEST_CASE("triple junction conormals sum to zero") {
  CompositeSurface fan =
      build_flat_junction(3, {0.0, 2 * M_PI / 3, 4 * M_PI / 3});
  const InterfaceCurve& iface = fan.interfaces.front();
  for (double t : {0.1, 0.5, 0.9}) {
    Vec3 sum = Vec3::Zero();
    for (int k = 0; k < 3; ++k) sum += conormal(iface, fan.patch(k), t);
    CHECK(sum.norm() < 1e-12);
  }
  fan.validate();
}

TEST_CASE("duplicate fan angles are rejected") {
  CHECK_THROWS_AS(build_flat_junction(2, {0.3, 0.3}), GeometryError);
}

TEST_CASE("conormal rejects bad parameters and non-members") {
  CompositeSurface pair = build_flat_junction(2, {0.0, M_PI});
  const InterfaceCurve& iface = pair.interfaces.front();
  CHECK_THROWS_AS(conormal(pair.patch(0), iface.traces[0].curve, 1.7),
                  GeometryError);
  ParametricPatch outsider = flat_patch(99, Vec2(0, 0), Vec2(1, 1),
                                        Vec3(5, 5, 5), Vec3(1, 0, 0),
                                        Vec3(0, 1, 0));
  CHECK_THROWS_AS(conormal(iface, outsider, 0.5), GeometryError);
}

TEST_CASE("cylinder intersection: curve equations and membership") {
  const double R1 = 1.5, R2 = 2.0, theta = 2 * M_PI / 3, z0 = 0.15;
  CompositeSurface s = build_cylinder_intersection(R1, R2, theta, z0);
  CHECK(s.patches.size() == 6);
  CHECK(s.interfaces.size() == 2);

  for (const InterfaceCurve& iface : s.interfaces) {
    CHECK(iface.member_count() == 4);
    for (int i = 0; i <= 200; ++i) {
      double t = i / 200.0;
      Vec3 x = iface.master.at(t);
      double c1 = x[1] * x[1] + (x[2] - z0) * (x[2] - z0) - R1 * R1;
      double u = x[0] * std::sin(theta) + x[1] * std::cos(theta);
      double c2 = u * u + x[2] * x[2] - R2 * R2;
      CHECK(std::abs(c1) < 1e-10);
      CHECK(std::abs(c2) < 1e-10);
    }
  }
  s.validate();

  // every interface point lies on exactly 4 patch boundaries: each member
  // trace is consistent and each non-member patch stays clear of the curve
  for (const InterfaceCurve& iface : s.interfaces) {
    for (int i = 1; i < 40; ++i) {
      double t = i / 40.0;
      Vec3 x = iface.master.at(t);
      int on_count = 0;
      for (const ParametricPatch& p : s.patches) {
        int ti = iface.trace_index(p.id);
        if (ti >= 0) {
          double gap = (p.map(iface.traces[ti].curve.at(t)) - x).norm();
          if (gap < 1e-9) ++on_count;
        } else {
          // non-members keep a positive distance from the loop
          double dmin = 1e300;
          Box2 b = p.domain.bounding_box();
          for (int a = 0; a <= 12; ++a)
            for (int c = 0; c <= 12; ++c) {
              Vec2 r(b.lo.x() + a / 12.0 * b.width(),
                     b.lo.y() + c / 12.0 * b.height());
              if (!p.domain.contains(r, 0.01)) continue;
              dmin = std::min(dmin, (p.map(r) - x).norm());
            }
          CHECK(dmin > 1e-3);
        }
      }
      CHECK(on_count == 4);
    }
  }
}

TEST_CASE("cylinder intersection conormal invariants") {
  CompositeSurface s = build_cylinder_intersection(1.5, 2.0, 2 * M_PI / 3, 0.15);
  for (const InterfaceCurve& iface : s.interfaces) {
    for (int i = 1; i < 25; ++i) {
      double t = i / 25.0;
      Vec3 tangent = iface.master.tangent(t).normalized();
      for (const InterfaceTrace& tr : iface.traces) {
        const ParametricPatch& p = s.patch(tr.patch);
        Vec3 nu = conormal(p, tr.curve, t);
        CHECK(std::abs(nu.norm() - 1.0) < 1e-12);
        CHECK(std::abs(nu.dot(tangent)) < 1e-10);
        Vec3 n = p.normal(tr.curve.at(t));
        CHECK(std::abs(nu.dot(n)) < 1e-10);
      }
    }
  }
}

TEST_CASE("perpendicular concentric cylinders are symmetric under z -> -z") {
  CompositeSurface s = build_cylinder_intersection(1.5, 2.0, M_PI / 2, 0.0);
  const InterfaceCurve& iface = s.interfaces.front();
  // the loop hits both signs of z and the point set is z-symmetric
  for (int i = 0; i <= 20; ++i) {
    double t = i / 20.0;
    Vec3 x = iface.master.at(t);
    // with theta = pi/2, z0 = 0: x = +-sqrt(R2^2 - z^2), y = +-sqrt(R1^2 - z^2)
    CHECK(std::abs(x[0] * x[0] + x[2] * x[2] - 4.0) < 1e-10);
    CHECK(std::abs(x[1] * x[1] + x[2] * x[2] - 2.25) < 1e-10);
    // mirrored point lies on the same loop (search over parameter)
    Vec3 mx(x[0], x[1], -x[2]);
    double dmin = 1e300;
    for (int j = 0; j <= 400; ++j)
      dmin = std::min(dmin, (iface.master.at(j / 400.0) - mx).norm());
    CHECK(dmin < 2e-2);
  }
}

TEST_CASE("tangential or degenerate cylinder parameters are rejected") {
  CHECK_THROWS_AS(build_cylinder_intersection(2.0, 1.5, 2.0, 0.0), GeometryError);
  CHECK_THROWS_AS(build_cylinder_intersection(1.5, 2.0, 0.001, 0.0), GeometryError);
  CHECK_THROWS_AS(build_cylinder_intersection(1.5, 2.0, 1.5, 0.6), GeometryError);
  CHECK_THROWS_AS(build_cylinder_intersection(1.9, 2.0, 2.0, 0.15), GeometryError);
}

TEST_CASE("interface trace consistency holds at scaled tolerance") {
  CompositeSurface s = build_cylinder_intersection(1.5, 2.0, 2 * M_PI / 3, 0.15);
  double diam = s.diameter();
  for (const InterfaceCurve& iface : s.interfaces)
    for (const InterfaceTrace& tr : iface.traces)
      for (int i = 0; i <= 20; ++i) {
        double t = i / 20.0;
        double gap =
            (s.patch(tr.patch).map(tr.curve.at(t)) - iface.master.at(t)).norm();
        CHECK(gap < 1e-9 * diam);
      }
}

TEST_CASE("cusp corners are rejected at construction") {
  // teardrop reference domain: two segments meeting at a near-zero angle,
  // so the adjacent conormals satisfy nu+ . nu- ~ -1
  CompositeSurface s;
  ParametricPatch p;
  p.id = 0;
  p.map = [](const Vec2& r) { return Vec3(r.x(), r.y(), 0.0); };
  p.jacobian = [](const Vec2&) {
    Mat32 J;
    J.col(0) = Vec3(1, 0, 0);
    J.col(1) = Vec3(0, 1, 0);
    return J;
  };
  // crescent between y = x^2 and y = 2x^2: the boundary arcs are tangent at
  // the origin, giving nu+ . nu- = -1 there
  RefLoop loop;
  RefSegment lower;
  lower.curve.at = [](double t) { return Vec2(t, t * t); };
  RefSegment right;
  right.curve = line_segment(Vec2(1, 1), Vec2(1, 2));
  right.straight = true;
  RefSegment upper;
  upper.curve.at = [](double t) {
    double u = 1.0 - t;
    return Vec2(u, 2.0 * u * u);
  };
  loop.segments.push_back(lower);
  loop.segments.push_back(right);
  loop.segments.push_back(upper);
  p.domain.loops.push_back(loop);
  s.patches.push_back(p);
  s.dirichlet.push_back({0, right.curve});
  CHECK_THROWS_AS(s.validate(), GeometryError);
}

TEST_CASE("matching mode rejects curved reference boundaries") {
  CompositeSurface s = build_cylinder_intersection(1.5, 2.0, 2 * M_PI / 3, 0.15);
  CHECK_THROWS_AS(build_mesh(s.patch(0), 0.3, MeshMode::Matching),
                  GeometryError);
}

TEST_CASE("metric oracle agrees with analytic Laplacian on a saddle") {
  // sanity for the test oracle itself: flat patch, u = x^2 + y^2
  ParametricPatch flat = flat_patch(0, Vec2(0, 0), Vec2(1, 1), Vec3(0, 0, 0),
                                    Vec3(1, 0, 0), Vec3(0, 1, 0));
  auto u = [](const Vec3& x) { return x[0] * x[0] + x[1] * x[1]; };
  double lap = testing::metric_laplacian_fd(flat, u, Vec2(0.4, 0.6));
  CHECK(lap == doctest::Approx(4.0).epsilon(1e-6));
}
