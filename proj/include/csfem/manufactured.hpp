#pragma once

#include <string>

#include "csfem/assembly.hpp"
#include "csfem/builders.hpp"

namespace csfem {

// Normal field and total curvature kappa = div(n) of one patch, as ambient
// functions (independent of the parametrization).
struct SurfaceInfo {
  std::function<Vec3(const Vec3&)> normal;
  std::function<double(const Vec3&)> kappa;
};

// Laplace-Beltrami of an ambient field through the extension identity
//   lap_S u = lap u - n^T (Hess u) n - kappa * (n . grad u).
double surface_laplacian(const AmbientField& u, const SurfaceInfo& geo,
                         const Vec3& x);

struct ManufacturedCase {
  std::string name;
  CompositeSurface surface;
  AmbientField u;
  std::vector<SurfaceInfo> patch_geo;  // indexed by patch id

  ExactSolution exact() const;
  // Problem data derived from u: f = -mu lap_S u, g_D = u, g_N = nu.sigma(u).
  ProblemData problem(double beta = 100.0,
                      std::vector<double> gamma = {1e-2, 1e-2},
                      StabilizerKind stab = StabilizerKind::Jump) const;
};

// Built-in benchmark cases: flat_square, flat_two_patch,
// flat_triple_junction, sharp_edge_L, intersecting_cylinders.
ManufacturedCase make_case(const std::string& name);

// Residual of the exact flux balance sum_k nu_k . sigma_k(u) over an
// interface, by quadrature; checked at construction for the built-ins.
double exact_kirchhoff_residual(const ManufacturedCase& mc,
                                const InterfaceCurve& iface, int n_samples = 80);

}  // namespace csfem
