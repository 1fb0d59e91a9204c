#pragma once

#include <vector>

#include "csfem/composite_surface.hpp"

namespace csfem {

// Planar patch spanned by two directions, reference rectangle [lo,hi].
ParametricPatch flat_patch(int id, const Vec2& lo, const Vec2& hi,
                           const Vec3& origin, const Vec3& e_xi,
                           const Vec3& e_eta);

// Open cylindrical strip around the z axis: F(theta, z) = (R cos, R sin, z).
ParametricPatch cylinder_strip_patch(int id, double radius, double theta0,
                                     double theta1, double z0, double z1);

// Unit square in the z=0 plane; edges 0..3 = bottom,right,top,left; edges in
// `neumann_edges` are tagged Neumann, all others Dirichlet.
CompositeSurface flat_square_surface(const std::vector<int>& neumann_edges = {});

// Unit square split at x = split into two patches coupled along one
// interface with convex weights alpha.
CompositeSurface flat_two_patch_surface(double split = 0.5,
                                        const Vec2& alpha = Vec2(0.5, 0.5));

// Planar rectangles [0,width]x[0,height] fanned around the shared segment
// x=y=0, z in [0,height], at the given angles in the xy plane.
CompositeSurface build_flat_junction(int n_patches,
                                     const std::vector<double>& angles,
                                     double width = 1.0, double height = 1.0);

// The two-cylinder composite of the convergence studies: cylinder 1 with
// y^2 + (z-z0)^2 = R1^2 pierces cylinder 2 with (x sin t + y cos t)^2 + z^2
// = R2^2; cutting both along the two intersection loops yields 6 patches
// with 4 patches meeting along each loop.
CompositeSurface build_cylinder_intersection(double R1, double R2,
                                             double theta, double z0,
                                             double pad = 0.75);

}  // namespace csfem
