#pragma once

#include "fbms/geom/bvh.hpp"
#include "fbms/geom/group.hpp"
#include "fbms/geom/topology.hpp"

#include <optional>
#include <utility>

namespace fbms {

/// chi(total) = n * chi(quotient) - (2j + 1) * g with n = g + 1: the
/// branched-cover count for a C_{g+1} action with 2j + 1 fixed points.
inline bool riemann_hurwitz_check(int chi_total, int chi_quotient, int g, int j) {
    require(g >= 1 && j >= 0, ErrorKind::Domain, "riemann_hurwitz_check needs g >= 1 and j >= 0");
    return chi_total == (g + 1) * chi_quotient - (2 * j + 1) * g;
}

/// Nonnegative integer solutions (gamma', j) of gamma = (g + 1) gamma' + j g
/// for 1 <= gamma <= g. The bound gamma <= g forces gamma' = 0, so a solution
/// exists only for gamma = g and it is (0, 1).
inline std::optional<std::pair<int, int>> equivariant_genus_solve(int g, int gamma) {
    require(g >= 1, ErrorKind::Domain, "equivariant_genus_solve needs g >= 1");
    require(gamma >= 1 && gamma <= g, ErrorKind::Domain,
            "gamma = " + std::to_string(gamma) + " outside {1, ..., " + std::to_string(g) + "}");
    for (int gq = 0; (g + 1) * gq <= gamma; ++gq) {
        const int rest = gamma - (g + 1) * gq;
        if (rest % g == 0) return std::make_pair(gq, rest / g);
    }
    return std::nullopt;
}

/// Quotient of a mesh by the rotations about the vertical axis through angle
/// 2 pi / n. The mesh must be the C_n-orbit of the faces with centroid angle in
/// [0, 2 pi / n); those faces are kept and vertices on the ray at angle
/// 2 pi / n are welded to their rotated partners on the ray at angle 0.
struct QuotientMesh {
    std::vector<Face> faces;
    int num_vertices = 0;
    int euler_characteristic = 0;
};

QuotientMesh rotation_quotient(const TriMesh<double>& m, int n, double tol = 1e-9);

/// Heights at which the surface meets the vertical axis, clustered so that a
/// vertex shared by many triangles counts once.
template <typename Scalar>
std::vector<Scalar> vertical_axis_crossings(const TriMesh<Scalar>& m, const Scalar& tol);

/// max over sample points of the closed axis segment [-1, 1] * axis of the
/// distance to the mesh.
double axis_containment_residual(const TriangleBvh& bvh, const Vec3d& axis, int samples = 401);

}  // namespace fbms
