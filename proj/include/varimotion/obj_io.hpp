#pragma once

#include "varimotion/trimesh.hpp"

#include <string>

namespace vmo {

// ASCII OBJ reader. Accepts `v x y z` and `f i j k ...` records (1-based,
// `i/t/n` index triplets tolerated); polygons are fan-triangulated. Normal,
// texture and grouping records are ignored. Malformed lines raise an error
// carrying the line number.
TriMesh load_obj(const std::string& path);

// Writes `v` records with 9 significant digits and triangular `f` records.
void save_obj(const TriMesh& mesh, const std::string& path);

} // namespace vmo
