#include "csfem/interface_curve.hpp"

#include <cmath>

namespace csfem {

Vec2 reference_conormal(const ParametricPatch& patch, const Curve2& trace,
                        double t) {
  if (t < -1e-12 || t > 1.0 + 1e-12)
    throw GeometryError("curve parameter outside [0,1]");
  Vec2 tau = trace.tangent(t);
  double len = tau.norm();
  if (len < 1e-14) throw GeometryError("degenerate trace tangent");
  tau /= len;
  Vec2 nu(tau.y(), -tau.x());  // right of travel; domain convention is left
  Vec2 p = trace.at(t);
  // Outwardness by a step test: -eps*nu must stay inside the domain.
  double diam = patch.domain.diameter();
  double res = 1e-3 * diam;
  double eps = 1e-6 * diam;
  bool inside_minus = patch.domain.contains(p - eps * nu, res);
  bool inside_plus = patch.domain.contains(p + eps * nu, res);
  if (inside_minus == inside_plus) {
    // point may sit near a polygonization kink; retry with a larger step
    eps = 1e-4 * diam;
    inside_minus = patch.domain.contains(p - eps * nu, res);
    inside_plus = patch.domain.contains(p + eps * nu, res);
    if (inside_minus == inside_plus)
      throw GeometryError("cannot orient reference conormal (step test failed)");
  }
  return inside_minus ? nu : Vec2(-nu);
}

Vec3 conormal(const ParametricPatch& patch, const Curve2& trace, double t) {
  Vec2 nu_ref = reference_conormal(patch, trace, t);
  Vec2 p = trace.at(t);
  Mat32 J = patch.jacobian(p);
  Mat2 G = J.transpose() * J;
  Vec3 nu = J * G.inverse() * nu_ref;  // cotangent pushforward
  double len = nu.norm();
  if (len < 1e-14) throw GeometryError("degenerate conormal");
  return nu / len;
}

Vec3 conormal(const InterfaceCurve& iface, const ParametricPatch& patch,
              double t) {
  int k = iface.trace_index(patch.id);
  if (k < 0) throw GeometryError("patch is not a member of the interface");
  return conormal(patch, iface.traces[k].curve, t);
}

}  // namespace csfem
