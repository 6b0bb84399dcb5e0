#pragma once

#include <iosfwd>
#include <string>

#include "gsd/quality.hpp"
#include "gsd/surface.hpp"

namespace gsd {

// Patch document: {"deg_u","deg_v","coeffs":[[...dim...],...]} with the
// coefficient rows in (u-index major) storage order.
std::string patch_to_json(const BBPatch<double>& p);
BBPatch<double> patch_from_json(const std::string& text);

// Surface document: {"valence","degree","lambda","rings":[{"level","sectors":
// [{"patches":[...]}]}],"cap":null|{"sectors":[{"patches":[...]}],"center"}}.
std::string surface_to_json(const GuidedSurface& s);

// Rebuilds the patch data only; the control net and guide are left empty.
GuidedSurface surface_from_json(const std::string& text);

// Guide document: valence, lambda, the n sector grids, and the label vector
// (row 0 = center) that regenerates them.
std::string guide_to_json(const Guide& g);

void write_obj(std::ostream& os, const TessMesh& m);

}  // namespace gsd
