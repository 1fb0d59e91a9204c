#include <cmath>

#include "csfem/builders.hpp"
#include "csfem/quadrature.hpp"
#include "doctest.h"
#include "support/oracles.hpp"

using namespace csfem;

TEST_CASE("cell rules integrate monomials exactly") {
  const QuadRule& r = cell_quadrature(7);
  auto integrate = [&](int a, int b) {
    double s = 0.0;
    for (std::size_t q = 0; q < r.points.size(); ++q)
      s += r.weights[q] * std::pow(r.points[q].x(), a) *
           std::pow(r.points[q].y(), b);
    return s;
  };
  CHECK(integrate(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(integrate(1, 1) == doctest::Approx(0.25).epsilon(1e-13));
  CHECK(integrate(4, 3) == doctest::Approx(1.0 / 20.0).epsilon(1e-13));
}

TEST_CASE("weights sum to the reference measure") {
  for (int order : {2, 4, 6, 9, 12}) {
    const QuadRule& r = cell_quadrature(order);
    double s = 0.0;
    for (double w : r.weights) s += w;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("triangle rule matches closed forms") {
  Triangle2 tri{{0, 0}, {1, 0}, {0, 1}};
  QuadRule r = triangle_quadrature(tri, 5);
  double area = 0.0, mx = 0.0;
  for (std::size_t q = 0; q < r.points.size(); ++q) {
    area += r.weights[q];
    mx += r.weights[q] * r.points[q].x() * r.points[q].y();
  }
  CHECK(area == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(mx == doctest::Approx(1.0 / 24.0).epsilon(1e-12));  // int xy over T
}

TEST_CASE("surface measure of flat and cylindrical patches") {
  ParametricPatch flat = flat_patch(0, Vec2(0, 0), Vec2(1, 1), Vec3(0, 0, 0),
                                    Vec3(1, 0, 0), Vec3(0, 1, 0));
  CHECK(flat.measure(Vec2(0.3, 0.7)) == doctest::Approx(1.0).epsilon(1e-14));

  ParametricPatch cyl = cylinder_strip_patch(1, 1.5, 0, 2 * M_PI, 0, 1);
  CHECK(cyl.measure(Vec2(0.4, 0.2)) == doctest::Approx(1.5).epsilon(1e-13));

  // total area 2 pi R L = 3 pi by quadrature
  const QuadRule& r = cell_quadrature(8);
  double area = 0.0;
  for (std::size_t q = 0; q < r.points.size(); ++q) {
    Vec2 ref(2 * M_PI * r.points[q].x(), r.points[q].y());
    area += r.weights[q] * 2 * M_PI * cyl.measure(ref);
  }
  CHECK(area == doctest::Approx(3.0 * M_PI).epsilon(1e-10));
}

TEST_CASE("curve lengths: straight, circle, and intersection branch") {
  // unit straight segment
  Curve3 seg = line_segment3(Vec3(0, 0, 0), Vec3(1, 0, 0));
  const QuadRule1D& g = gauss_rule_1d(6);
  double len = 0.0;
  for (std::size_t q = 0; q < g.points.size(); ++q)
    len += g.weights[q] * seg.tangent(g.points[q]).norm();
  CHECK(len == doctest::Approx(1.0).epsilon(1e-14));

  // circle of radius 1.5: panelized Gauss arc length
  Curve3 circle;
  circle.at = [](double t) {
    return Vec3(1.5 * std::cos(2 * M_PI * t), 1.5 * std::sin(2 * M_PI * t), 0);
  };
  circle.deriv = [](double t) {
    return Vec3(-3 * M_PI * std::sin(2 * M_PI * t),
                3 * M_PI * std::cos(2 * M_PI * t), 0);
  };
  double clen = 0.0;
  int panels = 32;
  for (int pnl = 0; pnl < panels; ++pnl)
    for (std::size_t q = 0; q < g.points.size(); ++q) {
      double t = (pnl + g.points[q]) / panels;
      clen += g.weights[q] / panels * circle.tangent(t).norm();
    }
  CHECK(clen == doctest::Approx(3 * M_PI).epsilon(1e-8));

  // cylinder-intersection loop length against the chord-sum oracle
  CompositeSurface cyl = build_cylinder_intersection(1.5, 2.0, 2 * M_PI / 3, 0.15);
  const InterfaceCurve& iface = cyl.interfaces.front();
  double qlen = 0.0;
  int pn = 64;
  for (int pnl = 0; pnl < pn; ++pnl)
    for (std::size_t q = 0; q < g.points.size(); ++q) {
      double t = (pnl + g.points[q]) / pn;
      qlen += g.weights[q] / pn * iface.master.tangent(t).norm();
    }
  double expect = testing::arc_length_oracle(iface.master.at);
  CHECK(qlen == doctest::Approx(expect).epsilon(1e-6));
}
