#include "csfem/patch.hpp"

#include <cmath>
#include <random>

namespace csfem {

// Sampled construction checks: rank-2 Jacobian and bounded mu over the
// reference bounding box restricted to the domain.
void validate_patch(const ParametricPatch& patch, double mu_lo, double mu_hi) {
  Box2 box = patch.domain.bounding_box();
  double res = 0.01 * patch.domain.diameter();
  std::mt19937 rng(12345u + static_cast<unsigned>(patch.id));
  std::uniform_real_distribution<double> ux(box.lo.x(), box.hi.x());
  std::uniform_real_distribution<double> uy(box.lo.y(), box.hi.y());
  int checked = 0;
  for (int i = 0; i < 400 && checked < 60; ++i) {
    Vec2 p(ux(rng), uy(rng));
    if (!patch.domain.contains(p, res)) continue;
    ++checked;
    Mat2 G = patch.first_fundamental(p);
    if (G.determinant() <= ParametricPatch::kDetTol)
      throw GeometryError("patch Jacobian rank-deficient at sampled point");
    double m = patch.mu(patch.map(p));
    if (!(m >= mu_lo && m <= mu_hi))
      throw GeometryError("mu out of configured bounds on patch");
  }
  if (checked == 0)
    throw GeometryError("patch reference domain appears empty");
}

}  // namespace csfem
