#include "fbms/geom/bvh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fbms {

double point_segment_distance(const Vec3d& p, const Vec3d& a, const Vec3d& b) {
    const Vec3d ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 == 0.0) return (p - a).norm();
    const double s = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - (a + s * ab)).norm();
}

double point_triangle_distance(const Vec3d& p, const Vec3d& a, const Vec3d& b, const Vec3d& c) {
    const Vec3d ab = b - a, ac = c - a;
    const Vec3d n = ab.cross(ac);
    const double scale = std::max({ab.squaredNorm(), ac.squaredNorm(), (c - b).squaredNorm()});
    if (n.squaredNorm() <= 1e-24 * scale * scale) {
        return std::min({point_segment_distance(p, a, b), point_segment_distance(p, b, c), point_segment_distance(p, a, c)});
    }
    // Ericson, Real-Time Collision Detection 5.1.5
    const Vec3d ap = p - a;
    const double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0 && d2 <= 0) return ap.norm();
    const Vec3d bp = p - b;
    const double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0 && d4 <= d3) return bp.norm();
    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0 && d1 >= 0 && d3 <= 0) return (p - (a + d1 / (d1 - d3) * ab)).norm();
    const Vec3d cp = p - c;
    const double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0 && d5 <= d6) return cp.norm();
    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0 && d2 >= 0 && d6 <= 0) return (p - (a + d2 / (d2 - d6) * ac)).norm();
    const double va = d3 * d6 - d5 * d4;
    if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0)
        return (p - (b + (d4 - d3) / ((d4 - d3) + (d5 - d6)) * (c - b))).norm();
    const double denom = 1.0 / (va + vb + vc);
    return (p - (a + ab * (vb * denom) + ac * (vc * denom))).norm();
}

TriangleBvh::TriangleBvh(const TriMesh<double>& mesh) {
    tris_.reserve(mesh.num_faces());
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const Face& t = mesh.face(f);
        const Vec3d& a = mesh.vertex(t[0]);
        const Vec3d& b = mesh.vertex(t[1]);
        const Vec3d& c = mesh.vertex(t[2]);
        tris_.push_back({a, b, c, f, (b - a).cross(c - a).squaredNorm() == 0.0});
    }
    if (!tris_.empty()) {
        nodes_.reserve(2 * tris_.size() / 2 + 1);
        build(0, size());
    }
}

int TriangleBvh::build(int begin, int end) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    Eigen::AlignedBox3d box, cbox;
    for (int i = begin; i < end; ++i) {
        box.extend(tris_[i].a).extend(tris_[i].b).extend(tris_[i].c);
        cbox.extend(Vec3d((tris_[i].a + tris_[i].b + tris_[i].c) / 3.0));
    }
    nodes_[id].box = box;
    nodes_[id].begin = begin;
    nodes_[id].end = end;
    if (end - begin <= 4) return id;
    int axis = 0;
    cbox.sizes().maxCoeff(&axis);
    const int mid = (begin + end) / 2;
    std::nth_element(tris_.begin() + begin, tris_.begin() + mid, tris_.begin() + end, [axis](const Tri& x, const Tri& y) {
        return x.a[axis] + x.b[axis] + x.c[axis] < y.a[axis] + y.b[axis] + y.c[axis];
    });
    const int l = build(begin, mid);
    const int r = build(mid, end);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
}

namespace {

double box_distance(const Eigen::AlignedBox3d& box, const Vec3d& p) {
    return (p.cwiseMax(box.min()).cwiseMin(box.max()) - p).norm();
}

bool segment_box_overlap(const Eigen::AlignedBox3d& box, const Vec3d& a, const Vec3d& d, double pad) {
    double t0 = 0.0, t1 = 1.0;
    for (int k = 0; k < 3; ++k) {
        const double lo = box.min()[k] - pad, hi = box.max()[k] + pad;
        if (d[k] == 0.0) {
            if (a[k] < lo || a[k] > hi) return false;
            continue;
        }
        double u = (lo - a[k]) / d[k], v = (hi - a[k]) / d[k];
        if (u > v) std::swap(u, v);
        t0 = std::max(t0, u);
        t1 = std::min(t1, v);
        if (t0 > t1) return false;
    }
    return true;
}

}  // namespace

std::pair<int, double> TriangleBvh::nearest(const Vec3d& p) const {
    double best = std::numeric_limits<double>::infinity();
    int best_face = -1;
    if (nodes_.empty()) return {best_face, best};
    int stack[128];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
        const Node& n = nodes_[stack[--top]];
        if (box_distance(n.box, p) >= best) continue;
        if (n.left < 0) {
            for (int i = n.begin; i < n.end; ++i) {
                const double d = point_triangle_distance(p, tris_[i].a, tris_[i].b, tris_[i].c);
                if (d < best) {
                    best = d;
                    best_face = tris_[i].face;
                }
            }
            continue;
        }
        const double dl = box_distance(nodes_[n.left].box, p);
        const double dr = box_distance(nodes_[n.right].box, p);
        // push the farther child first so the nearer one is searched first
        if (dl < dr) {
            stack[top++] = n.right;
            stack[top++] = n.left;
        } else {
            stack[top++] = n.left;
            stack[top++] = n.right;
        }
    }
    return {best_face, best};
}

double TriangleBvh::distance(const Vec3d& p, double cap) const {
    double best = cap;
    if (nodes_.empty()) return best;
    int stack[128];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
        const Node& n = nodes_[stack[--top]];
        if (box_distance(n.box, p) >= best) continue;
        if (n.left < 0) {
            for (int i = n.begin; i < n.end; ++i)
                best = std::min(best, point_triangle_distance(p, tris_[i].a, tris_[i].b, tris_[i].c));
            if (best == 0.0) return 0.0;
            continue;
        }
        const double dl = box_distance(nodes_[n.left].box, p);
        const double dr = box_distance(nodes_[n.right].box, p);
        if (dl < dr) {
            stack[top++] = n.right;
            stack[top++] = n.left;
        } else {
            stack[top++] = n.left;
            stack[top++] = n.right;
        }
    }
    return best;
}

SegmentHits TriangleBvh::segment_hits(const Vec3d& a, const Vec3d& b) const {
    SegmentHits out;
    if (nodes_.empty()) return out;
    const Vec3d d = b - a;
    const double len = d.norm();
    const double pad = 1e-12 * (1.0 + len);
    constexpr double kEdgeTol = 1e-10;
    int stack[128];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
        const Node& n = nodes_[stack[--top]];
        if (!segment_box_overlap(n.box, a, d, pad)) continue;
        if (n.left >= 0) {
            stack[top++] = n.left;
            stack[top++] = n.right;
            continue;
        }
        for (int i = n.begin; i < n.end; ++i) {
            const Tri& t = tris_[i];
            if (t.degenerate) continue;
            // Moller-Trumbore
            const Vec3d e1 = t.b - t.a, e2 = t.c - t.a;
            const Vec3d pv = d.cross(e2);
            const double det = e1.dot(pv);
            const double scale = e1.norm() * e2.norm() * len;
            if (std::abs(det) <= 1e-14 * scale) {
                // segment parallel to the triangle plane: only a problem if it lies in it
                const Vec3d nrm = e1.cross(e2);
                if (std::abs(nrm.normalized().dot(a - t.a)) <= 1e-12) {
                    const double dist = point_triangle_distance(a, t.a, t.b, t.c);
                    if (dist <= len) out.ambiguous = true;
                }
                continue;
            }
            const double inv = 1.0 / det;
            const Vec3d s = a - t.a;
            const double u = s.dot(pv) * inv;
            if (u < -kEdgeTol || u > 1.0 + kEdgeTol) continue;
            const Vec3d q = s.cross(e1);
            const double v = d.dot(q) * inv;
            if (v < -kEdgeTol || u + v > 1.0 + kEdgeTol) continue;
            const double tt = e2.dot(q) * inv;
            if (tt < -kEdgeTol || tt > 1.0 + kEdgeTol) continue;
            if (u < kEdgeTol || v < kEdgeTol || u + v > 1.0 - kEdgeTol || tt < kEdgeTol || tt > 1.0 - kEdgeTol) {
                out.ambiguous = true;
                continue;
            }
            ++out.crossings;
        }
    }
    return out;
}

}  // namespace fbms
