#pragma once

#include "fbms/core/errors.hpp"
#include "fbms/geom/tri_mesh.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <span>
#include <unordered_map>
#include <vector>

namespace fbms {

/// Undirected edge with up to two incident faces. `local[i]` is the slot of
/// the edge inside faces[i]: the half-edge (f[local], f[local+1]).
struct Edge {
    int a = -1;
    int b = -1;
    int faces[2] = {-1, -1};
    int local[2] = {-1, -1};
    int count = 0;

    bool boundary() const { return count == 1; }
};

namespace detail {

inline std::uint64_t directed_key(int u, int v) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) | static_cast<std::uint32_t>(v);
}

}  // namespace detail

/// Derived edge table. Throws a topology error for edges shared by more
/// than two faces.
inline std::vector<Edge> edge_table(std::span<const Face> faces) {
    struct Item {
        int lo, hi, face, local;
    };
    std::vector<Item> items;
    items.reserve(faces.size() * 3);
    for (int f = 0; f < static_cast<int>(faces.size()); ++f)
        for (int k = 0; k < 3; ++k) {
            const int u = faces[f][k], v = faces[f][(k + 1) % 3];
            items.push_back({std::min(u, v), std::max(u, v), f, k});
        }
    std::sort(items.begin(), items.end(), [](const Item& x, const Item& y) {
        return x.lo != y.lo ? x.lo < y.lo : (x.hi != y.hi ? x.hi < y.hi : x.face < y.face);
    });
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < items.size();) {
        std::size_t j = i;
        while (j < items.size() && items[j].lo == items[i].lo && items[j].hi == items[i].hi) ++j;
        require(j - i <= 2, ErrorKind::Topology,
                "non-manifold edge (" + std::to_string(items[i].lo) + "," + std::to_string(items[i].hi) + ") shared by " +
                    std::to_string(j - i) + " faces");
        Edge e;
        e.a = items[i].lo;
        e.b = items[i].hi;
        e.count = static_cast<int>(j - i);
        for (std::size_t k = i; k < j; ++k) {
            e.faces[k - i] = items[k].face;
            e.local[k - i] = items[k].local;
        }
        edges.push_back(e);
        i = j;
    }
    return edges;
}

/// True when every interior edge is traversed in opposite directions by its two faces.
inline bool is_consistently_oriented(std::span<const Face> faces) {
    for (const Edge& e : edge_table(faces)) {
        if (e.count != 2) continue;
        const Face& f0 = faces[e.faces[0]];
        const Face& f1 = faces[e.faces[1]];
        if (f0[e.local[0]] == f1[e.local[1]]) return false;
    }
    return true;
}

/// Flip faces so that orientations agree across every interior edge. The
/// first face of each component keeps its orientation. Throws an
/// unsupported-topology error for non-orientable input.
inline std::vector<Face> orient_consistently(std::span<const Face> faces) {
    const auto edges = edge_table(faces);
    const int nf = static_cast<int>(faces.size());
    std::vector<std::vector<int>> adj_edges(nf);
    for (int i = 0; i < static_cast<int>(edges.size()); ++i)
        if (edges[i].count == 2) {
            adj_edges[edges[i].faces[0]].push_back(i);
            adj_edges[edges[i].faces[1]].push_back(i);
        }
    std::vector<int> flip(nf, -1);
    std::deque<int> queue;
    for (int seed = 0; seed < nf; ++seed) {
        if (flip[seed] != -1) continue;
        flip[seed] = 0;
        queue.push_back(seed);
        while (!queue.empty()) {
            const int f = queue.front();
            queue.pop_front();
            for (int ei : adj_edges[f]) {
                const Edge& e = edges[ei];
                const int side = e.faces[0] == f ? 0 : 1;
                const int g = e.faces[1 - side];
                // same start vertex on the shared edge means same direction
                const bool same_dir = faces[f][e.local[side]] == faces[g][e.local[1 - side]];
                const int want = flip[f] ^ (same_dir ? 1 : 0);
                if (flip[g] == -1) {
                    flip[g] = want;
                    queue.push_back(g);
                } else if (flip[g] != want) {
                    throw Error(ErrorKind::UnsupportedTopology, "mesh is not orientable");
                }
            }
        }
    }
    std::vector<Face> out(faces.begin(), faces.end());
    for (int f = 0; f < nf; ++f)
        if (flip[f]) std::swap(out[f][1], out[f][2]);
    return out;
}

/// Connected components of the face graph (faces adjacent through edges).
/// Returns the component id per face; `count` receives the number of components.
inline std::vector<int> face_components(std::span<const Face> faces, int* count = nullptr) {
    const auto edges = edge_table(faces);
    const int nf = static_cast<int>(faces.size());
    std::vector<int> parent(nf);
    for (int i = 0; i < nf; ++i) parent[i] = i;
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const Edge& e : edges)
        if (e.count == 2) parent[find(e.faces[0])] = find(e.faces[1]);
    std::vector<int> id(nf, -1), root_id(nf, -1);
    int n = 0;
    for (int f = 0; f < nf; ++f) {
        const int r = find(f);
        if (root_id[r] == -1) root_id[r] = n++;
        id[f] = root_id[r];
    }
    if (count) *count = n;
    return id;
}

/// Closed boundary loops as vertex cycles, traversed along face orientation.
/// Requires a consistently oriented mesh; walks the face fan at each vertex so
/// loops that touch at a vertex stay separate.
inline std::vector<std::vector<int>> boundary_loops(std::span<const Face> faces) {
    require(is_consistently_oriented(faces), ErrorKind::Topology, "boundary loops need consistent face orientation");
    std::unordered_map<std::uint64_t, int> half_edge_face;
    half_edge_face.reserve(faces.size() * 3);
    for (int f = 0; f < static_cast<int>(faces.size()); ++f)
        for (int k = 0; k < 3; ++k) half_edge_face[detail::directed_key(faces[f][k], faces[f][(k + 1) % 3])] = f;

    auto next_in_face = [&](int f, int from) {
        for (int k = 0; k < 3; ++k)
            if (faces[f][k] == from) return faces[f][(k + 1) % 3];
        throw Error(ErrorKind::Topology, "vertex not in face");
    };

    std::vector<std::uint64_t> boundary;
    for (const auto& [key, f] : half_edge_face) {
        const int u = static_cast<int>(key >> 32), v = static_cast<int>(key & 0xffffffffu);
        if (!half_edge_face.count(detail::directed_key(v, u))) boundary.push_back(key);
    }
    std::sort(boundary.begin(), boundary.end());
    std::unordered_map<std::uint64_t, bool> used;
    std::vector<std::vector<int>> loops;
    for (std::uint64_t start : boundary) {
        if (used[start]) continue;
        std::vector<int> loop;
        std::uint64_t cur = start;
        while (!used[cur]) {
            used[cur] = true;
            const int u = static_cast<int>(cur >> 32), v = static_cast<int>(cur & 0xffffffffu);
            loop.push_back(u);
            // rotate around v until the outgoing half-edge has no twin
            int f = half_edge_face.at(cur);
            int w = next_in_face(f, v);
            std::size_t guard = 0;
            while (half_edge_face.count(detail::directed_key(w, v))) {
                f = half_edge_face.at(detail::directed_key(w, v));
                w = next_in_face(f, v);
                require(++guard <= faces.size(), ErrorKind::Topology, "boundary walk did not terminate");
            }
            cur = detail::directed_key(v, w);
            (void)u;
        }
        require(cur == start, ErrorKind::Topology, "boundary edges do not close into loops");
        loops.push_back(std::move(loop));
    }
    return loops;
}

/// V - E + F, counting only vertices referenced by some face.
template <typename Scalar>
int euler_characteristic(const TriMesh<Scalar>& m) {
    const auto edges = edge_table(m.faces());
    std::vector<char> used(m.num_vertices(), 0);
    for (const auto& f : m.faces())
        for (int v : f) used[v] = 1;
    const int V = static_cast<int>(std::count(used.begin(), used.end(), 1));
    return V - static_cast<int>(edges.size()) + m.num_faces();
}

template <typename Scalar>
int boundary_components(const TriMesh<Scalar>& m) {
    if (is_consistently_oriented(m.faces())) return static_cast<int>(boundary_loops(m.faces()).size());
    const auto oriented = orient_consistently(m.faces());
    return static_cast<int>(boundary_loops(oriented).size());
}

/// Genus of a connected orientable surface: (2 - b - chi) / 2.
template <typename Scalar>
int genus(const TriMesh<Scalar>& m) {
    int ncomp = 0;
    face_components(m.faces(), &ncomp);
    require(ncomp == 1, ErrorKind::UnsupportedTopology, "genus needs a connected mesh, got " + std::to_string(ncomp) + " components");
    const std::vector<Face> oriented = orient_consistently(m.faces());
    const int b = static_cast<int>(boundary_loops(oriented).size());
    const int chi = euler_characteristic(m);
    const int twice = 2 - b - chi;
    require(twice >= 0 && twice % 2 == 0, ErrorKind::UnsupportedTopology,
            "chi = " + std::to_string(chi) + ", b = " + std::to_string(b) + " gives no nonnegative integer genus");
    return twice / 2;
}

}  // namespace fbms
