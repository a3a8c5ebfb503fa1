#pragma once

#include "fbms/core/errors.hpp"
#include "fbms/core/scalar.hpp"

#include <array>
#include <utility>
#include <vector>

namespace fbms {

using Face = std::array<int, 3>;

/// Optional per-vertex markers. `axis` is the index k of the axis xi_k the
/// vertex is constrained to (-1 for none); `domain` names the piece of the
/// construction the vertex came from.
struct VertexTag {
    bool on_sphere = false;
    int axis = -1;
    int domain = -1;
};

/// Per-face part labels used by the sweepout builder.
enum class FacePart : int { Top = 0, Middle = 1, Bottom = 2, Wall = 3, Other = 4 };

/// Oriented triangle mesh stored as an indexed face set. Edge and boundary
/// structures are derived on demand (see topology.hpp).
template <typename Scalar>
class TriMesh {
public:
    TriMesh() = default;

    TriMesh(std::vector<Vec3<Scalar>> vertices, std::vector<Face> faces, std::vector<VertexTag> tags = {},
            std::vector<FacePart> parts = {})
        : vertices_(std::move(vertices)), faces_(std::move(faces)), tags_(std::move(tags)), parts_(std::move(parts)) {
        if (tags_.empty()) tags_.resize(vertices_.size());
        if (parts_.empty()) parts_.assign(faces_.size(), FacePart::Other);
        require(tags_.size() == vertices_.size(), ErrorKind::Precondition, "vertex tag count mismatch");
        require(parts_.size() == faces_.size(), ErrorKind::Precondition, "face part count mismatch");
        const int nv = static_cast<int>(vertices_.size());
        for (const auto& f : faces_) {
            for (int v : f) require(v >= 0 && v < nv, ErrorKind::Topology, "face references missing vertex");
            require(f[0] != f[1] && f[1] != f[2] && f[0] != f[2], ErrorKind::Topology, "face with repeated vertex");
        }
    }

    const std::vector<Vec3<Scalar>>& vertices() const { return vertices_; }
    const std::vector<Face>& faces() const { return faces_; }
    const std::vector<VertexTag>& tags() const { return tags_; }
    const std::vector<FacePart>& parts() const { return parts_; }

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_faces() const { return static_cast<int>(faces_.size()); }
    const Vec3<Scalar>& vertex(int i) const { return vertices_[i]; }
    const Face& face(int i) const { return faces_[i]; }

    /// Same combinatorics and tags, new positions.
    TriMesh with_vertices(std::vector<Vec3<Scalar>> vertices) const {
        require(vertices.size() == vertices_.size(), ErrorKind::Precondition, "vertex count mismatch");
        return TriMesh(std::move(vertices), faces_, tags_, parts_);
    }

    TriMesh with_faces(std::vector<Face> faces) const {
        std::vector<FacePart> parts = parts_;
        if (faces.size() != parts.size()) parts.assign(faces.size(), FacePart::Other);
        return TriMesh(vertices_, std::move(faces), tags_, std::move(parts));
    }

    template <typename Fn>
    TriMesh transformed(Fn&& fn) const {
        std::vector<Vec3<Scalar>> out;
        out.reserve(vertices_.size());
        for (const auto& v : vertices_) out.push_back(fn(v));
        return with_vertices(std::move(out));
    }

    template <typename To>
    TriMesh<To> cast() const {
        std::vector<Vec3<To>> out;
        out.reserve(vertices_.size());
        for (const auto& v : vertices_) out.push_back(cast_vec<To>(v));
        return TriMesh<To>(std::move(out), faces_, tags_, parts_);
    }

    Scalar face_area(int f) const {
        const Face& t = faces_[f];
        return Scalar(0.5) * (vertices_[t[1]] - vertices_[t[0]]).cross(vertices_[t[2]] - vertices_[t[0]]).norm();
    }

    Scalar area() const {
        Scalar total(0);
        for (int f = 0; f < num_faces(); ++f) total += face_area(f);
        return total;
    }

    Scalar max_edge_length() const {
        Scalar m(0);
        for (const auto& t : faces_)
            for (int k = 0; k < 3; ++k) {
                const Scalar l = (vertices_[t[k]] - vertices_[t[(k + 1) % 3]]).norm();
                if (l > m) m = l;
            }
        return m;
    }

private:
    std::vector<Vec3<Scalar>> vertices_;
    std::vector<Face> faces_;
    std::vector<VertexTag> tags_;
    std::vector<FacePart> parts_;
};

/// Concatenate meshes without welding.
template <typename Scalar>
TriMesh<Scalar> concatenate(const std::vector<TriMesh<Scalar>>& meshes) {
    std::vector<Vec3<Scalar>> verts;
    std::vector<Face> faces;
    std::vector<VertexTag> tags;
    std::vector<FacePart> parts;
    for (const auto& m : meshes) {
        const int off = static_cast<int>(verts.size());
        verts.insert(verts.end(), m.vertices().begin(), m.vertices().end());
        tags.insert(tags.end(), m.tags().begin(), m.tags().end());
        for (const auto& f : m.faces()) faces.push_back({f[0] + off, f[1] + off, f[2] + off});
        parts.insert(parts.end(), m.parts().begin(), m.parts().end());
    }
    return TriMesh<Scalar>(std::move(verts), std::move(faces), std::move(tags), std::move(parts));
}

}  // namespace fbms
