#pragma once

#include "fbms/geom/bvh.hpp"
#include "fbms/geom/group.hpp"
#include "fbms/geom/tri_mesh.hpp"

#include <unordered_map>
#include <vector>

namespace fbms {

/// Spatial hash of vertex positions for exact-image lookups.
class VertexHash {
public:
    VertexHash(const std::vector<Vec3d>& points, double cell);

    /// Index of a stored point within `tol` of p (the nearest one), or -1.
    int find(const Vec3d& p, double tol) const;

private:
    std::uint64_t key(long long i, long long j, long long k) const;

    const std::vector<Vec3d>* points_;
    double cell_;
    std::unordered_map<std::uint64_t, std::vector<int>> buckets_;
};

/// max over group elements of the one-sided vertex-to-surface distance from
/// phi(m) to m. Taking the max over the whole group makes this the symmetric
/// distance, since the one-sided distance from m to phi(m) equals the one
/// from phi^-1(m) to m.
double equivariance_residual(const TriMesh<double>& m, const DihedralGroup<double>& group);

template <typename Scalar>
double equivariance_residual(const TriMesh<Scalar>& m, const DihedralGroup<double>& group) {
    if constexpr (std::is_same_v<Scalar, double>) {
        return equivariance_residual(m, group);
    } else {
        return equivariance_residual(m.template cast<double>(), group);
    }
}

/// Vertex orbit table: table[i][v] is the vertex at group[i](x_v). Throws a
/// precondition error when some image is not a vertex to within `tol`.
std::vector<std::vector<int>> orbit_table(const TriMesh<double>& m, const DihedralGroup<double>& group, double tol = 1e-9);

/// Cyclic subgroup of a dihedral group (the rotations only), as a list of
/// isometries usable in place of a group for averaging.
std::vector<Isometry<double>> rotation_subgroup(const DihedralGroup<double>& group);

}  // namespace fbms
