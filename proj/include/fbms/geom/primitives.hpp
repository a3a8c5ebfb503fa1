#pragma once

#include "fbms/geom/tri_mesh.hpp"

namespace fbms {

/// Polar-grid disc of the given radius in the plane z = height, centred on
/// the z-axis. `sectors` angular subdivisions, `rings` radial rings. The
/// centre is vertex 0 and the outer ring is tagged on-sphere when radius^2 +
/// height^2 = 1.
template <typename Scalar>
TriMesh<Scalar> disc_mesh(int sectors, int rings, const Scalar& radius = Scalar(1), const Scalar& height = Scalar(0)) {
    using std::cos;
    using std::sin;
    require(sectors >= 3 && rings >= 1, ErrorKind::Precondition, "disc needs >= 3 sectors and >= 1 ring");
    std::vector<Vec3<Scalar>> v;
    std::vector<VertexTag> tags;
    std::vector<Face> f;
    v.emplace_back(Scalar(0), Scalar(0), height);
    tags.push_back({false, 0, -1});
    for (int i = 1; i <= rings; ++i) {
        const Scalar rho = radius * Scalar(i) / Scalar(rings);
        for (int j = 0; j < sectors; ++j) {
            const Scalar th = Scalar(2) * pi<Scalar>() * Scalar(j) / Scalar(sectors);
            v.emplace_back(rho * cos(th), rho * sin(th), height);
            tags.push_back({i == rings, -1, -1});
        }
    }
    auto id = [&](int i, int j) { return 1 + (i - 1) * sectors + ((j % sectors) + sectors) % sectors; };
    for (int j = 0; j < sectors; ++j) f.push_back({0, id(1, j), id(1, j + 1)});
    for (int i = 1; i < rings; ++i)
        for (int j = 0; j < sectors; ++j) {
            f.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            f.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    return TriMesh<Scalar>(std::move(v), std::move(f), std::move(tags));
}

template <typename Scalar>
TriMesh<Scalar> annulus_mesh(int sectors, int rings, const Scalar& inner, const Scalar& outer) {
    using std::cos;
    using std::sin;
    require(sectors >= 3 && rings >= 1 && inner > Scalar(0) && outer > inner, ErrorKind::Precondition, "bad annulus");
    std::vector<Vec3<Scalar>> v;
    std::vector<Face> f;
    for (int i = 0; i <= rings; ++i) {
        const Scalar rho = inner + (outer - inner) * Scalar(i) / Scalar(rings);
        for (int j = 0; j < sectors; ++j) {
            const Scalar th = Scalar(2) * pi<Scalar>() * Scalar(j) / Scalar(sectors);
            v.emplace_back(rho * cos(th), rho * sin(th), Scalar(0));
        }
    }
    auto id = [&](int i, int j) { return i * sectors + ((j % sectors) + sectors) % sectors; };
    for (int i = 0; i < rings; ++i)
        for (int j = 0; j < sectors; ++j) {
            f.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            f.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    return TriMesh<Scalar>(std::move(v), std::move(f));
}

template <typename Scalar>
TriMesh<Scalar> octahedron_mesh() {
    std::vector<Vec3<Scalar>> v = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
    std::vector<Face> f = {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4}, {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}};
    return TriMesh<Scalar>(std::move(v), std::move(f));
}

/// Closed torus grid (major radius R, minor radius a).
template <typename Scalar>
TriMesh<Scalar> torus_mesh(int nu, int nv, const Scalar& R = Scalar(0.6), const Scalar& a = Scalar(0.2)) {
    using std::cos;
    using std::sin;
    require(nu >= 3 && nv >= 3, ErrorKind::Precondition, "torus needs >= 3 subdivisions");
    std::vector<Vec3<Scalar>> v;
    std::vector<Face> f;
    for (int i = 0; i < nu; ++i)
        for (int j = 0; j < nv; ++j) {
            const Scalar u = Scalar(2) * pi<Scalar>() * Scalar(i) / Scalar(nu);
            const Scalar w = Scalar(2) * pi<Scalar>() * Scalar(j) / Scalar(nv);
            v.emplace_back((R + a * cos(w)) * cos(u), (R + a * cos(w)) * sin(u), a * sin(w));
        }
    auto id = [&](int i, int j) { return ((i % nu) + nu) % nu * nv + ((j % nv) + nv) % nv; };
    for (int i = 0; i < nu; ++i)
        for (int j = 0; j < nv; ++j) {
            f.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            f.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    return TriMesh<Scalar>(std::move(v), std::move(f));
}

/// Torus with one face removed: genus 1, one boundary loop, chi = -1.
template <typename Scalar>
TriMesh<Scalar> torus_with_hole_mesh(int nu = 8, int nv = 6) {
    auto t = torus_mesh<Scalar>(nu, nv);
    std::vector<Face> faces(t.faces().begin() + 1, t.faces().end());
    return TriMesh<Scalar>(t.vertices(), std::move(faces));
}

/// Closed orientable surface of genus `g` built as a chain of tori glued
/// along triangular holes, then one face removed when `holed` is set.
/// Geometry is not embedded; the mesh is meant for topology queries only.
template <typename Scalar>
TriMesh<Scalar> genus_surface_mesh(int g, bool holed, int nu = 8, int nv = 6) {
    require(g >= 1, ErrorKind::Precondition, "genus_surface_mesh needs g >= 1");
    const auto torus = torus_mesh<Scalar>(nu, nv);
    std::vector<Vec3<Scalar>> verts;
    std::vector<Face> faces;
    // Each torus copy drops two faces (one for each neighbour) except the ends.
    const int nvt = torus.num_vertices();
    const Face hole_a = torus.face(0);
    const Face hole_b = torus.face(torus.num_faces() / 2);
    std::vector<int> prev_b_map;
    for (int c = 0; c < g; ++c) {
        std::vector<int> map(nvt, -1);
        if (c > 0) {
            // identify this copy's hole_a triangle with the previous copy's hole_b, reversing orientation
            map[hole_a[0]] = prev_b_map[hole_b[0]];
            map[hole_a[1]] = prev_b_map[hole_b[2]];
            map[hole_a[2]] = prev_b_map[hole_b[1]];
        }
        for (int i = 0; i < nvt; ++i) {
            if (map[i] != -1) continue;
            map[i] = static_cast<int>(verts.size());
            verts.push_back(torus.vertex(i) + Vec3<Scalar>(Scalar(2 * c), Scalar(0), Scalar(0)));
        }
        for (int fi = 0; fi < torus.num_faces(); ++fi) {
            if (c > 0 && fi == 0) continue;
            if (c + 1 < g && fi == torus.num_faces() / 2) continue;
            const Face& t = torus.face(fi);
            faces.push_back({map[t[0]], map[t[1]], map[t[2]]});
        }
        prev_b_map = map;
    }
    if (holed) faces.erase(faces.begin() + faces.size() / 3);
    return TriMesh<Scalar>(std::move(verts), std::move(faces));
}

}  // namespace fbms
