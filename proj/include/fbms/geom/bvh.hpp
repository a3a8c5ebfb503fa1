#pragma once

#include "fbms/geom/tri_mesh.hpp"

#include <vector>

namespace fbms {

/// Result of a segment query: number of transversal triangle crossings and
/// whether any hit was too close to an edge, a vertex or a segment end to be
/// trusted.
struct SegmentHits {
    int crossings = 0;
    bool ambiguous = false;
};

/// Axis-aligned bounding-box tree over the triangles of a double-precision
/// mesh. Zero-area triangles are kept for distance queries (treated as
/// segments) and ignored for crossing counts.
class TriangleBvh {
public:
    TriangleBvh() = default;
    explicit TriangleBvh(const TriMesh<double>& mesh);

    int size() const { return static_cast<int>(tris_.size()); }

    /// Distance from p to the nearest triangle; returns `cap` if nothing is closer.
    double distance(const Vec3d& p, double cap = std::numeric_limits<double>::infinity()) const;

    /// Index of the nearest triangle and the distance to it.
    std::pair<int, double> nearest(const Vec3d& p) const;

    SegmentHits segment_hits(const Vec3d& a, const Vec3d& b) const;

private:
    struct Tri {
        Vec3d a, b, c;
        int face;
        bool degenerate;
    };
    struct Node {
        Eigen::AlignedBox3d box;
        int left = -1, right = -1;
        int begin = 0, end = 0;
    };

    int build(int begin, int end);

    std::vector<Tri> tris_;
    std::vector<Node> nodes_;
};

/// Closest-point distance between a point and a triangle, valid for
/// degenerate (collinear or coincident) triangles.
double point_triangle_distance(const Vec3d& p, const Vec3d& a, const Vec3d& b, const Vec3d& c);

double point_segment_distance(const Vec3d& p, const Vec3d& a, const Vec3d& b);

}  // namespace fbms
