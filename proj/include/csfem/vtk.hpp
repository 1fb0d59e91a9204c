#pragma once

#include <string>

#include "csfem/fe_space.hpp"

namespace csfem {

// Legacy-ASCII unstructured-grid export of a discrete field: triangulated
// physical surface with point fields "u" and "grad_magnitude". Cut cells are
// exported through their clipped triangulations.
void export_vtk(const BrokenSpace& space, const VectorX& u,
                const std::string& path);

}  // namespace csfem
