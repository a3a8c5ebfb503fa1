#include "fbms/geom/equivariance.hpp"
#include "fbms/geom/group.hpp"
#include "fbms/geom/topology.hpp"
#include "fbms/sweepout/sweepout.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace fbms {

template <typename Scalar>
Scalar slice_area_bound(int g, const Scalar& t, const Scalar& eps) {
    require(g >= 1, ErrorKind::Precondition, "bound needs g >= 1");
    require(t >= Scalar(0) && t <= Scalar(1) && eps >= Scalar(0), ErrorKind::Precondition, "bound needs t in [0, 1], eps >= 0");
    return Scalar(3) * pi<Scalar>() - Scalar(2) * pi<Scalar>() * (t * t - Scalar(g + 1) * eps * t);
}

template <typename Scalar>
Scalar slice_area_bound_excess(int g, const Scalar& t, const Scalar& eps) {
    require(g >= 1, ErrorKind::Precondition, "bound needs g >= 1");
    require(t >= Scalar(0) && t <= Scalar(1) && eps >= Scalar(0), ErrorKind::Precondition, "bound needs t in [0, 1], eps >= 0");
    return Scalar(2) * pi<Scalar>() * t * (Scalar(g + 1) * eps - t);
}

template <typename Scalar>
Scalar ribbon_area_bound(const Scalar& eps, const Scalar& t) {
    require(eps >= Scalar(0) && t >= Scalar(0), ErrorKind::Precondition, "ribbon bound needs eps, t >= 0");
    return pi<Scalar>() * eps * t;
}

template <typename Scalar>
Scalar replacement_stage_bound(int g, const Scalar& t0) {
    using std::log;
    require(g >= 1, ErrorKind::Precondition, "bound needs g >= 1");
    require(t0 > Scalar(0) && t0 < Scalar(1), ErrorKind::Precondition, "bound needs t0 in (0, 1)");
    require(-log(t0) > Scalar(4 * (g + 1)), ErrorKind::Precondition, "bound needs -log t0 > 4(g+1)");
    return (Scalar(3) - t0 * t0) * pi<Scalar>() + Scalar(g + 1) * Scalar(4) * pi<Scalar>() * t0 * t0 / (-log(t0));
}

template <typename Scalar>
Scalar widening_bound(int g, const Scalar& r, const Scalar& t0) {
    require(g >= 1, ErrorKind::Precondition, "bound needs g >= 1");
    require(t0 > Scalar(0) && t0 < Scalar(1), ErrorKind::Precondition, "bound needs t0 in (0, 1)");
    require(r >= Scalar(5) * t0, ErrorKind::Precondition, "bound needs r >= 5 t0");
    return Scalar(3) * pi<Scalar>() - Scalar(g + 1) * pi<Scalar>() * (r * r - Scalar(4) * r * t0);
}

template <typename Scalar>
Scalar stage_bound(const SweepoutSchedule<Scalar>& s, const Scalar& t) {
    switch (stage_of(t, s)) {
        case Stage::Ribbons: return slice_area_bound(s.g, t, s.eps_fn(t));
        case Stage::Necks: return replacement_stage_bound(s.g, s.t0);
        default: return widening_bound(s.g, s.r, s.t0);
    }
}

template <typename Scalar>
double mesh_tolerance(const TriMesh<Scalar>& m) {
    const int nv = m.num_vertices();
    std::vector<Vec3d> p(nv);
    for (int i = 0; i < nv; ++i) p[i] = cast_vec<double>(m.vertex(i));
    const auto& faces = m.faces();
    const int nf = m.num_faces();
    std::vector<Vec3d> normal(nf);
    std::vector<double> area(nf);
    std::vector<char> valid(nf, 0);
    for (int f = 0; f < nf; ++f) {
        const Vec3d c = (p[faces[f][1]] - p[faces[f][0]]).cross(p[faces[f][2]] - p[faces[f][0]]);
        const double len = c.norm();
        area[f] = 0.5 * len;
        if (len > 0 && std::isfinite(len)) {
            normal[f] = c / len;
            valid[f] = 1;
        }
    }
    const auto edges = edge_table(faces);
    std::vector<double> turn(nf, 0.0);
    // feature edges, classed by the parts on either side so that genuine
    // corners where pieces meet are not read as polyline turning
    std::vector<std::vector<std::pair<int, int>>> feature(nv);
    std::vector<std::pair<int, int>> feature_edges;  // (edge index, class)
    for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
        const Edge& ed = edges[e];
        int cls = -1;
        const int p0 = static_cast<int>(m.parts()[ed.faces[0]]);
        if (ed.count == 1) {
            cls = p0;
        } else if (p0 != static_cast<int>(m.parts()[ed.faces[1]])) {
            const int p1 = static_cast<int>(m.parts()[ed.faces[1]]);
            cls = 16 + 8 * std::min(p0, p1) + std::max(p0, p1);
        } else if (valid[ed.faces[0]] && valid[ed.faces[1]]) {
            const double c = std::clamp(std::abs(normal[ed.faces[0]].dot(normal[ed.faces[1]])), -1.0, 1.0);
            const double th = std::acos(c);
            turn[ed.faces[0]] = std::max(turn[ed.faces[0]], th);
            turn[ed.faces[1]] = std::max(turn[ed.faces[1]], th);
        }
        if (cls >= 0) {
            feature[ed.a].push_back({e, cls});
            feature[ed.b].push_back({e, cls});
            feature_edges.push_back({e, cls});
        }
    }
    double total = 0;
    for (int f = 0; f < nf; ++f) total += area[f] * turn[f] * turn[f];
    auto turning_at = [&](int v, int e, int cls) {
        int other = -1, count = 0;
        for (const auto& [e2, c2] : feature[v])
            if (c2 == cls) {
                ++count;
                if (e2 != e) other = e2;
            }
        if (count != 2 || other < 0) return 0.0;
        const int a = edges[e].a == v ? edges[e].b : edges[e].a;
        const int b = edges[other].a == v ? edges[other].b : edges[other].a;
        const Vec3d u = p[v] - p[a], w = p[b] - p[v];
        const double nu = u.norm(), nw = w.norm();
        if (!(nu > 0) || !(nw > 0)) return 0.0;
        return std::acos(std::clamp(u.dot(w) / (nu * nw), -1.0, 1.0));
    };
    for (const auto& [e, cls] : feature_edges) {
        const double len = (p[edges[e].a] - p[edges[e].b]).norm();
        const double phi = std::max(turning_at(edges[e].a, e, cls), turning_at(edges[e].b, e, cls));
        total += len * len * phi / 12.0;
    }
    return 10.0 * total;
}

SliceCertificate certify_slice(const SliceSpec<Quad>& spec, const TriMesh<Quad>& mesh) {
    SliceCertificate c;
    const auto& s = spec.schedule;
    c.g = s.g;
    c.t = static_cast<double>(spec.t);
    c.t_exact = spec.t;
    try {
        c.stage = stage_of(spec.t, s);
        c.area = mesh.area();
        c.bound = stage_bound(s, spec.t);
        c.tolerance = mesh_tolerance(mesh);
        c.genus = genus(mesh);
        c.boundary_components = boundary_components(mesh);
        std::vector<Face> walls;
        for (int f = 0; f < mesh.num_faces(); ++f)
            if (mesh.parts()[f] == FacePart::Wall) walls.push_back(mesh.face(f));
        face_components(walls, &c.ribbons);
        const TriMesh<double> md = mesh.cast<double>();
        c.max_edge = md.max_edge_length();
        c.equivariance_residual = equivariance_residual(md, dihedral_group<double>(s.n()));
        c.genus_ok = c.genus == s.g;
        c.boundary_ok = c.boundary_components == 1;
        c.ribbons_ok = c.ribbons == 2 * s.n();
        c.equivariance_ok = c.equivariance_residual <= 2 * c.max_edge;
        c.bound_ok = c.area <= c.bound + Quad(c.tolerance);
        c.below_3pi = c.area < Quad(3) * pi<Quad>();
    } catch (const Error& e) {
        c.error = e.what();
    }
    return c;
}

SliceCertificate certify_slice(const SliceSpec<Quad>& spec) {
    try {
        return certify_slice(spec, build_slice(spec));
    } catch (const Error& e) {
        SliceCertificate c;
        c.g = spec.schedule.g;
        c.t = static_cast<double>(spec.t);
        c.t_exact = spec.t;
        c.error = e.what();
        return c;
    }
}

std::vector<Quad> sweep_t_grid(const SweepoutSchedule<Quad>& s, int N) {
    require(N >= 8, ErrorKind::Precondition, "sweep grid needs at least 8 points");
    const int n4 = N / 8, n3 = N / 8, n2 = N / 4;
    const int n1 = N - n4 - n3 - n2;
    const Quad t0 = s.t0;
    std::vector<Quad> t;
    for (int i = 0; i < n4; ++i) t.push_back(t0 / Quad(4) * (Quad(i) + Quad(0.5)) / Quad(n4));
    for (int i = 0; i < n3; ++i) t.push_back(t0 / Quad(4) + t0 / Quad(4) * Quad(i) / Quad(n3));
    for (int i = 0; i < n2; ++i) t.push_back(t0 / Quad(2) + t0 / Quad(2) * Quad(i) / Quad(n2));
    for (int i = 0; i < n1; ++i) t.push_back(t0 + (Quad(1) - t0) * Quad(i) / Quad(n1));
    return t;
}

int SweepReport::failed_slices() const {
    return static_cast<int>(std::count_if(slices.begin(), slices.end(), [](const auto& c) { return !c.passed(); }));
}

SweepReport run_sweep(const SweepoutSchedule<Quad>& s, int N, int resolution, const SliceVisitor& visit) {
    SweepReport rep;
    rep.g = s.g;
    rep.schedule = s;
    rep.resolution = resolution > 0 ? resolution : 64 * s.n();
    const auto grid = sweep_t_grid(s, N);
    for (const Quad& t : grid) {
        SliceSpec<Quad> spec{s, t, rep.resolution};
        SliceCertificate c;
        try {
            const auto mesh = build_slice(spec);
            c = certify_slice(spec, mesh);
            if (visit && c.error.empty()) visit(spec, mesh, c);
        } catch (const Error& e) {
            c.g = s.g;
            c.t = static_cast<double>(t);
            c.t_exact = t;
            c.error = e.what();
        }
        rep.slices.push_back(std::move(c));
    }

    // margin over t in [t0, 1)
    rep.margin_ok = true;
    bool any = false;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& c = rep.slices[i];
        if (!c.error.empty()) continue;
        if (!any || c.area > rep.max_area) {
            rep.max_area = c.area;
            rep.max_area_tolerance = c.tolerance;
        }
        any = true;
        if (grid[i] >= s.t0) {
            const Quad margin = Quad(3) * pi<Quad>() - c.area;
            if (margin < Quad(2) * pi<Quad>() * s.t0 * s.t0 - Quad(c.tolerance)) rep.margin_ok = false;
        }
    }
    if (!any) rep.margin_ok = false;

    // areas in stages 3-4 must not increase as t decreases
    rep.monotone_ok = true;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (grid[i + 1] > s.t0 / Quad(2)) break;
        const auto& lo = rep.slices[i];
        const auto& hi = rep.slices[i + 1];
        if (!lo.error.empty() || !hi.error.empty() || lo.area > hi.area) rep.monotone_ok = false;
    }

    // both constructions at each stage boundary
    rep.continuity_ok = true;
    const std::pair<Quad, std::pair<Stage, Stage>> joins[] = {
        {s.t0, {Stage::Ribbons, Stage::Necks}},
        {s.t0 / Quad(2), {Stage::Necks, Stage::Widening}},
        {s.t0 / Quad(4), {Stage::Widening, Stage::Retraction}},
    };
    for (const auto& [t, st] : joins) {
        StageJoin j{t, st.first, st.second, 0, 0, 0, false};
        try {
            SliceSpec<Quad> spec{s, t, rep.resolution};
            const auto above = build_slice_in_stage(spec, st.first);
            const auto below = build_slice_in_stage(spec, st.second);
            j.area_above = above.area();
            j.area_below = below.area();
            j.tolerance = std::max(mesh_tolerance(above), mesh_tolerance(below));
            using std::abs;
            j.ok = abs(j.area_above - j.area_below) <= Quad(j.tolerance);
        } catch (const Error&) {
            j.ok = false;
        }
        rep.continuity_ok = rep.continuity_ok && j.ok;
        rep.joins.push_back(j);
    }
    return rep;
}

void write_sweep_csv(std::ostream& os, const SweepReport& r) {
    os << "g,t,stage,area,bound,genus,boundary_components,equivariance_residual,pass\n";
    const auto old = os.precision();
    for (const auto& c : r.slices) {
        os << c.g << ',' << std::setprecision(21) << c.t << ',' << static_cast<int>(c.stage) << ','
           << std::setprecision(36) << c.area << ',' << c.bound << ',' << c.genus << ',' << c.boundary_components
           << ',' << std::setprecision(6) << c.equivariance_residual << ',' << (c.passed() ? 1 : 0) << '\n';
    }
    os.precision(old);
}

#define FBMS_INSTANTIATE(S)                                             \
    template S slice_area_bound<S>(int, const S&, const S&);            \
    template S slice_area_bound_excess<S>(int, const S&, const S&);     \
    template S ribbon_area_bound<S>(const S&, const S&);                \
    template S replacement_stage_bound<S>(int, const S&);               \
    template S widening_bound<S>(int, const S&, const S&);              \
    template S stage_bound<S>(const SweepoutSchedule<S>&, const S&);    \
    template double mesh_tolerance<S>(const TriMesh<S>&);

FBMS_INSTANTIATE(double)
FBMS_INSTANTIATE(Quad)
#undef FBMS_INSTANTIATE

}  // namespace fbms
