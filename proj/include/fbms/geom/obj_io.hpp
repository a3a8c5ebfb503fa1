#pragma once

#include "fbms/geom/tri_mesh.hpp"

#include <iosfwd>
#include <string>

namespace fbms {

/// ASCII OBJ: `v x y z` lines with full round-trip precision for the scalar
/// type (at least 17 significant digits) and `f i j k` lines with 1-based
/// indices. No normals, no materials.
template <typename Scalar>
void write_obj(std::ostream& os, const TriMesh<Scalar>& mesh);

template <typename Scalar>
void write_obj(const std::string& path, const TriMesh<Scalar>& mesh);

/// Reads `v` and `f` records; other record types are ignored. Polygonal
/// faces are fan-triangulated. `f` entries of the form `i/j/k` use the
/// vertex index only.
template <typename Scalar>
TriMesh<Scalar> read_obj(std::istream& is);

template <typename Scalar>
TriMesh<Scalar> read_obj(const std::string& path);

}  // namespace fbms
