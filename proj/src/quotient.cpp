#include "fbms/geom/quotient.hpp"

#include "fbms/geom/equivariance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fbms {

QuotientMesh rotation_quotient(const TriMesh<double>& m, int n, double tol) {
    require(n >= 2, ErrorKind::InvalidOrder, "rotation_quotient needs n >= 2");
    const double wedge = 2.0 * pi<double>() / n;
    std::vector<Face> kept;
    for (const auto& f : m.faces()) {
        const Vec3d c = (m.vertex(f[0]) + m.vertex(f[1]) + m.vertex(f[2])) / 3.0;
        double ang = std::atan2(c.y(), c.x());
        if (ang < 0) ang += 2.0 * pi<double>();
        if (ang >= wedge - 1e-15 && ang < 2.0 * pi<double>() - 1e-15) continue;
        kept.push_back(f);
    }
    require(!kept.empty(), ErrorKind::Topology, "no faces in the fundamental wedge");
    const auto back = Isometry<double>::rotation_z(-wedge);
    const VertexHash hash(m.vertices(), std::max(tol, 1e-12) * 4.0);
    std::vector<int> rep(m.num_vertices());
    std::iota(rep.begin(), rep.end(), 0);
    std::vector<char> used(m.num_vertices(), 0);
    for (const auto& f : kept)
        for (int v : f) used[v] = 1;
    for (int v = 0; v < m.num_vertices(); ++v) {
        if (!used[v]) continue;
        const Vec3d& p = m.vertex(v);
        const double rho = std::hypot(p.x(), p.y());
        if (rho <= tol) continue;
        const double ang = std::atan2(p.y(), p.x());
        // vertices on the far cut ray map back to the ray at angle 0
        if (std::abs(std::remainder(ang - wedge, 2.0 * pi<double>())) > 1e-9) continue;
        const int w = hash.find(back(p), tol);
        require(w >= 0 && used[w], ErrorKind::Topology, "cut ray vertex has no partner on the ray at angle 0");
        rep[v] = w;
    }
    QuotientMesh q;
    std::vector<int> remap(m.num_vertices(), -1);
    for (auto f : kept) {
        for (int& v : f) {
            v = rep[v];
            if (remap[v] < 0) remap[v] = q.num_vertices++;
            v = remap[v];
        }
        q.faces.push_back(f);
    }
    const auto edges = edge_table(q.faces);
    q.euler_characteristic = q.num_vertices - static_cast<int>(edges.size()) + static_cast<int>(q.faces.size());
    return q;
}

template <typename Scalar>
std::vector<Scalar> vertical_axis_crossings(const TriMesh<Scalar>& m, const Scalar& tol) {
    using std::abs;
    std::vector<Scalar> zs;
    for (const auto& f : m.faces()) {
        const Vec3<Scalar>& a = m.vertex(f[0]);
        const Vec3<Scalar>& b = m.vertex(f[1]);
        const Vec3<Scalar>& c = m.vertex(f[2]);
        // barycentric coordinates of the origin in the xy-projection
        const Scalar det = (b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y());
        if (det == Scalar(0)) {
            // vertical or degenerate triangle: count vertices sitting on the axis
            for (const auto* p : {&a, &b, &c})
                if (abs(p->x()) <= tol && abs(p->y()) <= tol) zs.push_back(p->z());
            continue;
        }
        const Scalar u = ((-a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (-a.y())) / det;
        const Scalar v = ((b.x() - a.x()) * (-a.y()) - (-a.x()) * (b.y() - a.y())) / det;
        const Scalar slack = tol;
        if (u < -slack || v < -slack || u + v > Scalar(1) + slack) continue;
        zs.push_back(a.z() + u * (b.z() - a.z()) + v * (c.z() - a.z()));
    }
    std::sort(zs.begin(), zs.end());
    std::vector<Scalar> out;
    for (const Scalar& z : zs)
        if (out.empty() || z - out.back() > tol) out.push_back(z);
    return out;
}

template std::vector<double> vertical_axis_crossings<double>(const TriMesh<double>&, const double&);
template std::vector<Quad> vertical_axis_crossings<Quad>(const TriMesh<Quad>&, const Quad&);

double axis_containment_residual(const TriangleBvh& bvh, const Vec3d& axis, int samples) {
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double s = -1.0 + 2.0 * i / (samples - 1);
        worst = std::max(worst, bvh.distance(s * axis));
    }
    return worst;
}

}  // namespace fbms
