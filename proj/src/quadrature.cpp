#include "csfem/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace csfem {

// Gauss-Legendre nodes on [-1,1] by Newton iteration on P_n, then mapped
// to [0,1].
static QuadRule1D make_gauss_1d(int n) {
  QuadRule1D rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  rule.order = 2 * n - 1;
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = n * (x * p1 - p0) / (x * x - 1.0);
    rule.points[n - 1 - i] = 0.5 * (x + 1.0);
    rule.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

const QuadRule1D& gauss_rule_1d(int order) {
  if (order < 0) throw std::invalid_argument("quadrature order must be >= 0");
  int n = order / 2 + 1;  // 2n-1 >= order
  static std::map<int, QuadRule1D> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_gauss_1d(n)).first;
  return it->second;
}

const QuadRule& cell_quadrature(int order) {
  static std::map<int, QuadRule> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(order);
  if (it == cache.end()) {
    const QuadRule1D& g = gauss_rule_1d(order);
    QuadRule r;
    r.order = g.order;
    for (std::size_t i = 0; i < g.points.size(); ++i)
      for (std::size_t j = 0; j < g.points.size(); ++j) {
        r.points.emplace_back(g.points[i], g.points[j]);
        r.weights.push_back(g.weights[i] * g.weights[j]);
      }
    it = cache.emplace(order, std::move(r)).first;
  }
  return it->second;
}

QuadRule triangle_quadrature(const Triangle2& tri, int order) {
  // Duffy transform of a tensor rule: (u,v) in [0,1]^2 -> (u, v(1-u)) in the
  // unit triangle; the extra (1-u) factor raises the needed 1D degree by one.
  const QuadRule1D& g = gauss_rule_1d(order + 1);
  QuadRule r;
  r.order = order;
  const Vec2 e1 = tri.b - tri.a;
  const Vec2 e2 = tri.c - tri.a;
  const double jac = e1.x() * e2.y() - e1.y() * e2.x();  // signed, 2*area
  for (std::size_t i = 0; i < g.points.size(); ++i)
    for (std::size_t j = 0; j < g.points.size(); ++j) {
      double u = g.points[i];
      double v = g.points[j] * (1.0 - u);
      double w = g.weights[i] * g.weights[j] * (1.0 - u);
      r.points.push_back(tri.a + u * e1 + v * e2);
      r.weights.push_back(w * std::abs(jac));
    }
  return r;
}

}  // namespace csfem
