#include "fbms/geom/equivariance.hpp"

#include <cmath>

namespace fbms {

VertexHash::VertexHash(const std::vector<Vec3d>& points, double cell) : points_(&points), cell_(cell) {
    buckets_.reserve(points.size());
    for (int i = 0; i < static_cast<int>(points.size()); ++i) {
        const Vec3d& p = points[i];
        buckets_[key(std::llround(p.x() / cell_), std::llround(p.y() / cell_), std::llround(p.z() / cell_))].push_back(i);
    }
}

std::uint64_t VertexHash::key(long long i, long long j, long long k) const {
    const auto h = [](long long x) { return static_cast<std::uint64_t>(x) * 0x9E3779B97F4A7C15ull; };
    return h(i) ^ (h(j) << 1 | h(j) >> 63) ^ (h(k) << 2 | h(k) >> 62);
}

int VertexHash::find(const Vec3d& p, double tol) const {
    const long long ci = std::llround(p.x() / cell_), cj = std::llround(p.y() / cell_), ck = std::llround(p.z() / cell_);
    int best = -1;
    double best_d = tol;
    for (long long i = ci - 1; i <= ci + 1; ++i)
        for (long long j = cj - 1; j <= cj + 1; ++j)
            for (long long k = ck - 1; k <= ck + 1; ++k) {
                auto it = buckets_.find(key(i, j, k));
                if (it == buckets_.end()) continue;
                for (int v : it->second) {
                    const double d = ((*points_)[v] - p).norm();
                    if (d <= best_d) {
                        best_d = d;
                        best = v;
                    }
                }
            }
    return best;
}

double equivariance_residual(const TriMesh<double>& m, const DihedralGroup<double>& group) {
    const TriangleBvh bvh(m);
    const VertexHash hash(m.vertices(), 1e-7);
    constexpr double kExact = 1e-12;
    // only vertices used by faces take part
    std::vector<char> used(m.num_vertices(), 0);
    for (const auto& f : m.faces())
        for (int v : f) used[v] = 1;
    double worst = 0.0;
    for (const auto& phi : group.elements()) {
        for (int v = 0; v < m.num_vertices(); ++v) {
            if (!used[v]) continue;
            const Vec3d q = phi(m.vertex(v));
            const int w = hash.find(q, kExact);
            double d;
            if (w >= 0 && used[w]) {
                d = (m.vertex(w) - q).norm();
            } else {
                d = bvh.distance(q);
            }
            worst = std::max(worst, d);
        }
    }
    return worst;
}

std::vector<std::vector<int>> orbit_table(const TriMesh<double>& m, const DihedralGroup<double>& group, double tol) {
    const VertexHash hash(m.vertices(), std::max(tol, 1e-12) * 4.0);
    std::vector<std::vector<int>> table(group.order(), std::vector<int>(m.num_vertices(), -1));
    for (int i = 0; i < group.order(); ++i)
        for (int v = 0; v < m.num_vertices(); ++v) {
            const int w = hash.find(group[i](m.vertex(v)), tol);
            require(w >= 0, ErrorKind::Precondition,
                    "vertex " + std::to_string(v) + " has no image under group element " + std::to_string(i));
            table[i][v] = w;
        }
    return table;
}

std::vector<Isometry<double>> rotation_subgroup(const DihedralGroup<double>& group) {
    std::vector<Isometry<double>> out;
    for (int m = 0; m < group.n(); ++m) out.push_back(group.rotation(m));
    return out;
}

}  // namespace fbms
