#include "fbms/minimizer/minimizer.hpp"

#include "fbms/geom/bvh.hpp"
#include "fbms/geom/equivariance.hpp"
#include "fbms/geom/primitives.hpp"
#include "fbms/geom/quotient.hpp"
#include "fbms/geom/topology.hpp"
#include "fbms/sweepout/sweepout.hpp"
#include "fbms/width/width.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

namespace fbms {

namespace {

/// Combinatorial data that stays fixed while vertices move.
struct MeshStructure {
    std::vector<Face> faces;  // consistently oriented
    std::vector<char> boundary;
    std::vector<std::array<int, 2>> boundary_nbrs;  // previous and next along the loop
    std::vector<std::vector<int>> nbrs;
    std::vector<std::vector<int>> incident;  // faces per vertex
    std::vector<char> used;
};

MeshStructure structure_of(const TriMesh<double>& m) {
    MeshStructure s;
    s.faces = is_consistently_oriented(m.faces()) ? m.faces() : orient_consistently(m.faces());
    const int nv = m.num_vertices();
    s.boundary.assign(nv, 0);
    s.boundary_nbrs.assign(nv, {-1, -1});
    s.nbrs.assign(nv, {});
    s.incident.assign(nv, {});
    s.used.assign(nv, 0);
    for (int f = 0; f < static_cast<int>(s.faces.size()); ++f)
        for (int k = 0; k < 3; ++k) {
            const int v = s.faces[f][k];
            s.used[v] = 1;
            s.incident[v].push_back(f);
        }
    for (const Edge& e : edge_table(s.faces)) {
        s.nbrs[e.a].push_back(e.b);
        s.nbrs[e.b].push_back(e.a);
    }
    for (const auto& loop : boundary_loops(s.faces)) {
        const int L = static_cast<int>(loop.size());
        for (int i = 0; i < L; ++i) {
            const int v = loop[i];
            s.boundary[v] = 1;
            s.boundary_nbrs[v] = {loop[(i + L - 1) % L], loop[(i + 1) % L]};
        }
    }
    return s;
}

std::vector<Vec3d> gradient_of(const std::vector<Vec3d>& x, const std::vector<Face>& faces) {
    std::vector<Vec3d> grad(x.size(), Vec3d::Zero());
    for (const Face& f : faces) {
        const Vec3d N = (x[f[1]] - x[f[0]]).cross(x[f[2]] - x[f[0]]);
        const double len = N.norm();
        require(len > 0.0, ErrorKind::DegenerateMesh, "zero-area triangle");
        const Vec3d n = N / len;
        for (int k = 0; k < 3; ++k) grad[f[k]] += 0.5 * n.cross(x[f[(k + 2) % 3]] - x[f[(k + 1) % 3]]);
    }
    return grad;
}

double area_of(const std::vector<Vec3d>& x, const std::vector<Face>& faces) {
    double total = 0.0;
    for (const Face& f : faces) {
        const double a = 0.5 * (x[f[1]] - x[f[0]]).cross(x[f[2]] - x[f[0]]).norm();
        require(a > 0.0, ErrorKind::DegenerateMesh, "zero-area triangle");
        total += a;
    }
    return total;
}

std::vector<Vec3d> vertex_normals(const std::vector<Vec3d>& x, const MeshStructure& s) {
    std::vector<Vec3d> nrm(x.size(), Vec3d::Zero());
    for (const Face& f : s.faces) {
        const Vec3d N = (x[f[1]] - x[f[0]]).cross(x[f[2]] - x[f[0]]);
        for (int v : f) nrm[v] += N;
    }
    return nrm;
}

Vec3d axis_direction(int k, int n) {
    if (k == 0) return Vec3d::UnitZ();
    const double a = std::numbers::pi * k / n;
    return {std::cos(a), std::sin(a), 0.0};
}

Vec3d boundary_tangent(const std::vector<Vec3d>& x, const MeshStructure& s, int v) {
    const auto [a, b] = s.boundary_nbrs[v];
    Vec3d t = x[b] - x[a];
    const double len = t.norm();
    return len > 0.0 ? Vec3d(t / len) : Vec3d::Zero();
}

std::vector<Vec3d> constrain(const std::vector<Vec3d>& x, const std::vector<Vec3d>& grad, const MeshStructure& s,
                             const std::vector<VertexTag>& tags, int n) {
    const auto nrm = vertex_normals(x, s);
    std::vector<Vec3d> out(x.size(), Vec3d::Zero());
    for (int v = 0; v < static_cast<int>(x.size()); ++v) {
        if (!s.used[v]) continue;
        const int k = n >= 2 ? tags[v].axis : -1;
        if (k >= 0 && k <= n) {
            if (s.boundary[v]) continue;  // on the sphere and on an axis: fixed
            const Vec3d a = axis_direction(k, n);
            out[v] = a * a.dot(grad[v]);
        } else if (s.boundary[v]) {
            const Vec3d r = x[v].normalized();
            Vec3d u = r.cross(boundary_tangent(x, s, v));
            if (u.norm() == 0.0) continue;
            u.normalize();
            out[v] = u * u.dot(grad[v]);
        } else {
            const double len = nrm[v].norm();
            if (len == 0.0) {
                out[v] = grad[v];
            } else {
                const Vec3d nn = nrm[v] / len;
                out[v] = nn * nn.dot(grad[v]);
            }
        }
    }
    return out;
}

void orbit_average(std::vector<Vec3d>& x, const VertexOrbits& orbits) {
    if (orbits.empty()) return;
    const int order = static_cast<int>(orbits.elements.size());
    std::vector<Vec3d> out(x.size());
    for (int v = 0; v < static_cast<int>(x.size()); ++v) {
        Vec3d acc = Vec3d::Zero();
        for (int i = 0; i < order; ++i) acc += orbits.elements[i].matrix().transpose() * x[orbits.table[i][v]];
        out[v] = acc / order;
    }
    x = std::move(out);
}

void apply_constraints(std::vector<Vec3d>& x, const MeshStructure& s, const std::vector<VertexTag>& tags, int n,
                       const VertexOrbits* orbits) {
    if (orbits) orbit_average(x, *orbits);
    if (n >= 2)
        for (int v = 0; v < static_cast<int>(x.size()); ++v) {
            const int k = tags[v].axis;
            if (k < 0 || k > n) continue;
            const Vec3d a = axis_direction(k, n);
            x[v] = a * a.dot(x[v]);
        }
    for (int v = 0; v < static_cast<int>(x.size()); ++v) {
        const double r = x[v].norm();
        if (s.boundary[v]) {
            require(r > 0.0, ErrorKind::DegenerateMesh, "boundary vertex at the origin");
            x[v] /= r;
        } else if (r > 1.0) {
            x[v] /= r;
        }
    }
}

double orbit_residual(const std::vector<Vec3d>& x, const VertexOrbits& orbits) {
    double worst = 0.0;
    for (std::size_t i = 0; i < orbits.elements.size(); ++i)
        for (std::size_t v = 0; v < x.size(); ++v)
            worst = std::max(worst, (orbits.elements[i](x[v]) - x[orbits.table[i][v]]).norm());
    return worst;
}

double sphere_residual(const std::vector<Vec3d>& x, const MeshStructure& s) {
    double worst = 0.0;
    for (std::size_t v = 0; v < x.size(); ++v)
        if (s.boundary[v]) worst = std::max(worst, std::abs(x[v].norm() - 1.0));
    return worst;
}

double max_aspect(const std::vector<Vec3d>& x, const std::vector<Face>& faces) {
    double worst = 0.0;
    for (const Face& f : faces) {
        double l2 = 0.0;
        for (int k = 0; k < 3; ++k) l2 = std::max(l2, (x[f[k]] - x[f[(k + 1) % 3]]).squaredNorm());
        const double twice_area = (x[f[1]] - x[f[0]]).cross(x[f[2]] - x[f[0]]).norm();
        worst = std::max(worst, twice_area > 0.0 ? l2 / twice_area : std::numeric_limits<double>::infinity());
    }
    return worst;
}

double max_norm(const std::vector<Vec3d>& d) {
    double m = 0.0;
    for (const auto& v : d) m = std::max(m, v.norm());
    return m;
}

/// Tangential Laplacian smoothing; boundary vertices slide along the loop.
void smooth_tangentially(std::vector<Vec3d>& x, const MeshStructure& s, const std::vector<VertexTag>& tags, int n) {
    const auto nrm = vertex_normals(x, s);
    std::vector<Vec3d> out = x;
    for (int v = 0; v < static_cast<int>(x.size()); ++v) {
        if (!s.used[v] || (n >= 2 && tags[v].axis >= 0 && tags[v].axis <= n)) continue;
        if (s.boundary[v]) {
            const auto [a, b] = s.boundary_nbrs[v];
            const Vec3d t = boundary_tangent(x, s, v);
            out[v] = x[v] + 0.5 * t * t.dot(0.5 * (x[a] + x[b]) - x[v]);
            continue;
        }
        Vec3d c = Vec3d::Zero();
        for (int w : s.nbrs[v]) c += x[w];
        c /= static_cast<double>(s.nbrs[v].size());
        const double len = nrm[v].norm();
        const Vec3d nn = len > 0.0 ? Vec3d(nrm[v] / len) : Vec3d::Zero();
        const Vec3d d = c - x[v];
        out[v] = x[v] + 0.5 * (d - nn * nn.dot(d));
    }
    x = std::move(out);
}

double point_loop_distance(const Vec3d& p, const std::vector<Vec3d>& x, const std::vector<int>& loop) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < loop.size(); ++i)
        best = std::min(best, point_segment_distance(p, x[loop[i]], x[loop[(i + 1) % loop.size()]]));
    return best;
}

double free_boundary_residual(const std::vector<Vec3d>& x, const MeshStructure& s, const std::vector<Vec3d>& grad) {
    double worst = 0.0;
    for (std::size_t v = 0; v < x.size(); ++v) {
        if (!s.boundary[v]) continue;
        // the loop direction inside the sphere's tangent plane
        const Vec3d r = x[v].normalized();
        Vec3d t = boundary_tangent(x, s, static_cast<int>(v));
        t -= r * r.dot(t);
        if (t.norm() > 0.0) t.normalize();
        const Vec3d conormal = grad[v] - t * t.dot(grad[v]);
        const double len = conormal.norm();
        if (len == 0.0) continue;
        const double c = std::clamp(conormal.dot(r) / len, -1.0, 1.0);
        worst = std::max(worst, std::acos(c));
    }
    return worst;
}

double mean_curvature_residual(const std::vector<Vec3d>& x, const MeshStructure& s, const std::vector<Vec3d>& grad) {
    const auto nrm = vertex_normals(x, s);
    double worst = 0.0;
    for (std::size_t v = 0; v < x.size(); ++v) {
        if (!s.used[v] || s.boundary[v] || s.nbrs[v].empty()) continue;
        double vertex_area = 0.0;
        for (int f : s.incident[v]) {
            const Face& t = s.faces[f];
            vertex_area += 0.5 * (x[t[1]] - x[t[0]]).cross(x[t[2]] - x[t[0]]).norm() / 3.0;
        }
        double ell = 0.0;
        for (int w : s.nbrs[v]) ell += (x[w] - x[v]).norm();
        ell /= static_cast<double>(s.nbrs[v].size());
        const double len = nrm[v].norm();
        if (len == 0.0 || vertex_area == 0.0) continue;
        const double hn = std::abs(nrm[v].dot(grad[v]) / len);
        worst = std::max(worst, hn / vertex_area * ell);
    }
    return worst;
}

/// Points where xi_0 meets the surface, found combinatorially: each face
/// hit is classified as a hit at a vertex, on an edge or inside the face by
/// its barycentric coordinates, which are scale free, so sheets 1e-20 apart
/// still count separately.
struct AxisHit {
    double z = 0.0;
    Vec3d normal = Vec3d::Zero();  // sum of area vectors of the faces involved
};

std::vector<AxisHit> axis_hits(const std::vector<Vec3d>& x, const std::vector<Face>& faces) {
    constexpr double kSlack = 1e-12;
    std::map<std::array<int, 3>, AxisHit> hits;  // key: sorted simplex, -1 padded
    for (int fi = 0; fi < static_cast<int>(faces.size()); ++fi) {
        const Face& f = faces[fi];
        const Vec3d &a = x[f[0]], &b = x[f[1]], &c = x[f[2]];
        const double det = (b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y());
        if (det == 0.0) continue;
        const double u = ((-a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (-a.y())) / det;
        const double v = ((b.x() - a.x()) * (-a.y()) - (-a.x()) * (b.y() - a.y())) / det;
        const std::array<double, 3> w = {1.0 - u - v, u, v};
        if (w[0] < -kSlack || w[1] < -kSlack || w[2] < -kSlack) continue;
        std::array<int, 3> key = {-1, -1, -1};
        int k = 0;
        for (int i = 0; i < 3; ++i)
            if (w[i] > kSlack) key[k++] = f[i];
        std::sort(key.begin(), key.begin() + k);
        const bool fresh = !hits.count(key);
        AxisHit& h = hits[key];
        if (fresh) h.z = a.z() + u * (b.z() - a.z()) + v * (c.z() - a.z());
        h.normal += (b - a).cross(c - a);
    }
    std::vector<AxisHit> out;
    for (const auto& [key, h] : hits) out.push_back(h);
    std::sort(out.begin(), out.end(), [](const AxisHit& p, const AxisHit& q) { return p.z < q.z; });
    return out;
}

/// Max over xi_0 crossings of the angle between the surface normal there and xi_0.
double axis_orthogonality(const std::vector<AxisHit>& hits) {
    double worst = 0.0;
    for (const auto& h : hits) {
        const double len = h.normal.norm();
        if (len == 0.0) continue;
        worst = std::max(worst, std::acos(std::clamp(std::abs(h.normal.z()) / len, 0.0, 1.0)));
    }
    return worst;
}

}  // namespace

double discrete_area(const TriMesh<double>& m) { return area_of(m.vertices(), m.faces()); }

std::vector<Vec3d> area_gradient(const TriMesh<double>& m) { return gradient_of(m.vertices(), m.faces()); }

VertexOrbits vertex_orbits(const TriMesh<double>& m, const DihedralGroup<double>& group, double tol) {
    VertexOrbits o;
    o.elements = group.elements();
    o.table = orbit_table(m, group, tol);
    return o;
}

TriMesh<double> tag_axis_vertices(const TriMesh<double>& m, const DihedralGroup<double>& group, double tol) {
    std::vector<VertexTag> tags = m.tags();
    for (int v = 0; v < m.num_vertices(); ++v) {
        if (tags[v].axis >= 0 && tags[v].axis <= group.n()) {
            const Vec3d& a = group.axis(tags[v].axis);
            if ((m.vertex(v) - a * a.dot(m.vertex(v))).norm() <= tol) continue;
        }
        tags[v].axis = -1;
        for (int k = 0; k <= group.n(); ++k) {
            const Vec3d& a = group.axis(k);
            if ((m.vertex(v) - a * a.dot(m.vertex(v))).norm() <= tol) {
                tags[v].axis = k;
                break;
            }
        }
    }
    return TriMesh<double>(m.vertices(), m.faces(), std::move(tags), m.parts());
}

TriMesh<double> project_constraints(const TriMesh<double>& m, const DihedralGroup<double>& group, const VertexOrbits& orbits) {
    require(!orbits.empty() && orbits.table.size() == orbits.elements.size(), ErrorKind::Precondition, "vertex orbits missing");
    for (const auto& row : orbits.table)
        require(static_cast<int>(row.size()) == m.num_vertices(), ErrorKind::Precondition, "vertex orbits do not match the mesh");
    const MeshStructure s = structure_of(m);
    std::vector<Vec3d> x = m.vertices();
    apply_constraints(x, s, m.tags(), group.n(), &orbits);
    return m.with_vertices(std::move(x));
}

TriMesh<double> project_constraints(const TriMesh<double>& m, const DihedralGroup<double>& group) {
    return project_constraints(m, group, vertex_orbits(m, group));
}

TriMesh<double> project_constraints(const TriMesh<double>& m) {
    const MeshStructure s = structure_of(m);
    std::vector<Vec3d> x = m.vertices();
    apply_constraints(x, s, m.tags(), 0, nullptr);
    return m.with_vertices(std::move(x));
}

std::vector<Vec3d> constrained_gradient(const TriMesh<double>& m, const std::vector<Vec3d>& grad, int n) {
    return constrain(m.vertices(), grad, structure_of(m), m.tags(), n);
}

double free_boundary_residual(const TriMesh<double>& m) {
    return free_boundary_residual(m.vertices(), structure_of(m), area_gradient(m));
}

double mean_curvature_residual(const TriMesh<double>& m) {
    return mean_curvature_residual(m.vertices(), structure_of(m), area_gradient(m));
}

void MinimizeOptions::validate() const {
    require(step > 0.0 && tol > 0.0, ErrorKind::Precondition, "step and tolerance must be positive");
    require(max_iter >= 0, ErrorKind::Precondition, "max_iter must be nonnegative");
    require(symmetrize_every >= 1, ErrorKind::Precondition, "symmetrization cadence must be >= 1");
    require(remesh_every >= 0, ErrorKind::Precondition, "remeshing cadence must be >= 0 (0 disables)");
    require(symmetry == 0 || symmetry >= 2, ErrorKind::Precondition, "symmetry order must be 0 or >= 2");
    require(max_aspect > 1.0 && max_move > 0.0, ErrorKind::Precondition, "max_aspect > 1 and max_move > 0 required");
}

MinimizeOptions read_minimize_options(std::istream& is, MinimizeOptions o) {
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        for (char& c : line)
            if (c == '=') c = ' ';
        std::istringstream ls(line);
        std::string key, value;
        if (!(ls >> key)) continue;
        require(static_cast<bool>(ls >> value), ErrorKind::Usage, "line " + std::to_string(lineno) + ": missing value for " + key);
        try {
            if (key == "step") o.step = std::stod(value);
            else if (key == "tol") o.tol = std::stod(value);
            else if (key == "max_iter") o.max_iter = std::stoi(value);
            else if (key == "cadence") o.symmetrize_every = std::stoi(value);
            else if (key == "remesh") o.remesh_every = std::stoi(value);
            else if (key == "symmetry") o.symmetry = std::stoi(value);
            else if (key == "seed") o.seed = std::stoull(value);
            else if (key == "max_aspect") o.max_aspect = std::stod(value);
            else if (key == "max_move") o.max_move = std::stod(value);
            else throw Error(ErrorKind::Usage, "line " + std::to_string(lineno) + ": unknown key " + key);
        } catch (const std::logic_error&) {
            throw Error(ErrorKind::Usage, "line " + std::to_string(lineno) + ": bad value for " + key);
        }
    }
    o.validate();
    return o;
}

MinimizeOptions read_minimize_options(const std::string& path, MinimizeOptions base) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorKind::Io, "cannot open " + path);
    return read_minimize_options(in, base);
}

bool MinimalSurfaceCertificate::passed() const {
    return error.empty() && genus_ok && boundary_ok && area_in_range && equivariance_ok && axes_ok && endpoints_on_one_loop;
}

MinimalSurfaceCertificate certify_surface(const TriMesh<double>& m, int n, int expected_genus) {
    MinimalSurfaceCertificate c;
    const MeshStructure s = structure_of(m);
    const auto& x = m.vertices();
    c.area = m.area();
    try {
        const auto grad = gradient_of(x, s.faces);
        c.mean_curvature_residual = mean_curvature_residual(x, s, grad);
        c.free_boundary_residual = free_boundary_residual(x, s, grad);
    } catch (const Error& e) {
        c.error = e.what();
    }
    c.boundary_components = boundary_components(m);
    try {
        c.genus = genus(m);
    } catch (const Error& e) {
        if (c.error.empty()) c.error = e.what();
    }
    c.genus_ok = expected_genus < 0 ? c.genus >= 0 : c.genus == expected_genus;
    c.boundary_ok = c.boundary_components == 1;
    c.area_in_range = c.area > std::numbers::pi && c.area < 3.0 * std::numbers::pi;

    const auto hits = axis_hits(x, s.faces);
    c.axis_crossings = static_cast<int>(hits.size());
    c.j = c.axis_crossings % 2 == 1 ? (c.axis_crossings - 1) / 2 : -1;
    c.axis_orthogonality_residual = axis_orthogonality(hits);

    if (n >= 2) {
        const auto group = dihedral_group<double>(n);
        const TriangleBvh bvh(m);
        double worst = 0.0;
        for (int k = 1; k <= n; ++k) {
            c.axis_residuals.push_back(axis_containment_residual(bvh, group.axis(k)));
            worst = std::max(worst, c.axis_residuals.back());
        }
        c.axes_ok = worst <= 1e-8;
        c.equivariance_residual = equivariance_residual(m, group);
        c.equivariance_ok = c.equivariance_residual <= 1e-12;
        try {
            c.endpoints_on_one_loop = boundary_endpoint_check(m, n - 1);
        } catch (const Error&) {
            c.endpoints_on_one_loop = false;
        }
    }
    return c;
}

MinimizeResult minimize(const TriMesh<double>& seed, const MinimizeOptions& opts) {
    opts.validate();
    MinimizeResult res;
    const int n = opts.symmetry;
    TriMesh<double> mesh = seed;
    std::optional<DihedralGroup<double>> group;
    VertexOrbits orbits;
    if (n >= 2) {
        group.emplace(n);
        mesh = tag_axis_vertices(mesh, *group);
        orbits = vertex_orbits(mesh, *group);
    }
    const MeshStructure s = structure_of(mesh);
    const auto& tags = mesh.tags();
    const int genus0 = genus(mesh), boundary0 = boundary_components(mesh);

    std::vector<Vec3d> x = mesh.vertices();
    auto& cert = res.certificate;
    try {
        apply_constraints(x, s, tags, n, orbits.empty() ? nullptr : &orbits);
        double area = area_of(x, s.faces);
        const double aspect_limit = std::max(opts.max_aspect, 4.0 * max_aspect(x, s.faces));
        double step = opts.step;
        std::vector<double> min_edge(x.size());
        int it = 0;
        for (;; ++it) {
            auto dir = constrain(x, gradient_of(x, s.faces), s, tags, n);
            if (!orbits.empty()) orbit_average(dir, orbits);
            const double gnorm = max_norm(dir);
            res.history.push_back({it, area, gnorm, step, sphere_residual(x, s), orbits.empty() ? 0.0 : orbit_residual(x, orbits)});
            cert.grad_norm = gnorm;
            if (gnorm <= opts.tol) {
                cert.converged = true;
                break;
            }
            if (it >= opts.max_iter) break;

            for (std::size_t v = 0; v < x.size(); ++v) {
                double m = std::numeric_limits<double>::infinity();
                for (int w : s.nbrs[v]) m = std::min(m, (x[w] - x[v]).norm());
                min_edge[v] = m;
            }
            double slope = 0.0;
            for (const auto& d : dir) slope += d.squaredNorm();

            bool accepted = false;
            for (int tries = 0; tries < 60 && !accepted; ++tries) {
                std::vector<Vec3d> y = x;
                for (std::size_t v = 0; v < x.size(); ++v) {
                    Vec3d d = step * dir[v];
                    const double cap = opts.max_move * min_edge[v];
                    if (d.norm() > cap) d *= cap / d.norm();
                    y[v] -= d;
                }
                const bool sym = !orbits.empty() && (it + 1) % opts.symmetrize_every == 0;
                apply_constraints(y, s, tags, n, sym ? &orbits : nullptr);
                double trial;
                try {
                    trial = area_of(y, s.faces);
                } catch (const Error&) {
                    step *= 0.5;
                    continue;
                }
                if (trial <= area - 1e-4 * step * slope && trial < area) {
                    x = std::move(y);
                    area = trial;
                    accepted = true;
                    step = std::min(step * 1.5, opts.step * 1e3);
                } else {
                    step *= 0.5;
                }
            }
            if (!accepted) {
                cert.stalled = true;
                break;
            }
            if (opts.remesh_every > 0 && (it + 1) % opts.remesh_every == 0) {
                std::vector<Vec3d> y = x;
                smooth_tangentially(y, s, tags, n);
                apply_constraints(y, s, tags, n, orbits.empty() ? nullptr : &orbits);
                const TriMesh<double> check = mesh.with_vertices(y);
                require(genus(check) == genus0 && boundary_components(check) == boundary0, ErrorKind::Topology,
                        "remeshing changed the topology");
                try {
                    const double a = area_of(y, s.faces);
                    if (a <= area) {
                        x = std::move(y);
                        area = a;
                    }
                } catch (const Error&) {
                }
            }
            if (max_aspect(x, s.faces) > aspect_limit) {
                cert.degenerate = true;
                cert.error = "mesh degeneration: aspect ratio above " + std::to_string(aspect_limit);
                ++it;
                break;
            }
        }
        cert.iterations = it;
    } catch (const Error& e) {
        cert.error = e.what();
        if (e.kind() == ErrorKind::DegenerateMesh) cert.degenerate = true;
    }

    res.mesh = mesh.with_vertices(std::move(x));
    const auto iter_fields = cert;
    cert = certify_surface(res.mesh, n, opts.expected_genus);
    cert.iterations = iter_fields.iterations;
    cert.grad_norm = iter_fields.grad_norm;
    cert.converged = iter_fields.converged;
    cert.stalled = iter_fields.stalled;
    cert.degenerate = iter_fields.degenerate;
    if (!iter_fields.error.empty()) cert.error = iter_fields.error;
    return res;
}

bool boundary_endpoint_check(const TriMesh<double>& m, int g, double tol) {
    require(g >= 1, ErrorKind::Domain, "boundary_endpoint_check needs g >= 1");
    const int n = g + 1;
    if (tol <= 0.0) tol = m.max_edge_length();
    const auto group = dihedral_group<double>(n);
    const TriangleBvh bvh(m);
    for (int k = 1; k <= n; ++k)
        require(axis_containment_residual(bvh, group.axis(k)) <= tol, ErrorKind::Precondition,
                "horizontal axis " + std::to_string(k) + " is not contained in the surface");
    const MeshStructure s = structure_of(m);
    const auto loops = boundary_loops(s.faces);
    if (loops.empty()) return false;
    int common = -1;
    for (int k = 0; k < 2 * n; ++k) {
        const double a = std::numbers::pi * k / n;
        const Vec3d q(std::cos(a), std::sin(a), 0.0);
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (int l = 0; l < static_cast<int>(loops.size()); ++l) {
            const double d = point_loop_distance(q, m.vertices(), loops[l]);
            if (d < best_d) best_d = d, best = l;
        }
        if (best_d > tol) return false;
        if (common == -1) common = best;
        if (best != common) return false;
    }
    return true;
}

GenusReport genus_certificate(const TriMesh<double>& m, int g) {
    require(g >= 1, ErrorKind::Domain, "genus_certificate needs g >= 1");
    int ncomp = 0;
    face_components(m.faces(), &ncomp);
    require(ncomp == 1, ErrorKind::Precondition, "genus certificate needs a connected surface");
    require(boundary_components(m) == 1, ErrorKind::Precondition, "genus certificate needs exactly one boundary loop");
    GenusReport r;
    r.g = g;
    r.crossings = static_cast<int>(axis_hits(m.vertices(), m.faces()).size());
    require(r.crossings % 2 == 1, ErrorKind::InconsistentWithOrigin,
            "surface meets the vertical axis " + std::to_string(r.crossings) + " times; an odd count is needed");
    r.j = (r.crossings - 1) / 2;
    r.genus = genus(m);
    if (r.genus >= 1 && r.genus <= g) r.solution = equivariant_genus_solve(g, r.genus);
    r.equivariance_residual = equivariance_residual(m, dihedral_group<double>(g + 1));
    r.pass = r.genus == g && r.solution && *r.solution == std::make_pair(0, 1) && (g == 1 || r.j == 1);
    return r;
}

SeedSlice max_area_seed(const SweepoutSchedule<Quad>& s, int grid, int resolution) {
    const auto ts = sweep_t_grid(s, grid);
    std::vector<double> areas, tols;
    for (const Quad& t : ts) {
        const auto m = build_slice(SliceSpec<Quad>{s, t, resolution});
        areas.push_back(static_cast<double>(m.area()));
        tols.push_back(mesh_tolerance(m));
    }
    const int top = static_cast<int>(std::max_element(areas.begin(), areas.end()) - areas.begin());
    SeedSlice out;
    for (int i = 0; i < static_cast<int>(ts.size()); ++i)
        if (areas[i] >= areas[top] - tols[top] && (out.index < 0 || ts[i] < ts[out.index])) out.index = i;
    out.t = ts[out.index];
    out.area = areas[out.index];
    out.mesh = build_slice(SliceSpec<Quad>{s, out.t, resolution}).cast<double>();
    return out;
}

TriMesh<double> perturbed_disc(int resolution, double amplitude, std::uint64_t seed) {
    require(resolution >= 8 && resolution % 4 == 0, ErrorKind::Precondition, "disc resolution must be a multiple of 4, >= 8");
    const auto group = dihedral_group<double>(2);
    TriMesh<double> disc = tag_axis_vertices(disc_mesh<double>(resolution, resolution / 4), group);
    std::mt19937_64 rng(splitmix64(seed));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Vec3d> x = disc.vertices();
    const auto& tags = disc.tags();
    for (std::size_t v = 0; v < x.size(); ++v) {
        const double dz = amplitude * u(rng);
        const double dr = amplitude * u(rng);
        if (tags[v].on_sphere) x[v] *= 1.0 + dr;
        const double rho = std::hypot(x[v].x(), x[v].y());
        x[v].z() += dz * std::sin(std::numbers::pi * std::min(rho, 1.0));
    }
    orbit_average(x, vertex_orbits(disc, group));
    return disc.with_vertices(std::move(x));
}

void write_certificate_json(std::ostream& os, const MinimalSurfaceCertificate& c, const std::string& extra_json) {
    nlohmann::ordered_json j;
    j["area"] = c.area;
    j["mean_curvature_residual"] = c.mean_curvature_residual;
    j["free_boundary_residual"] = c.free_boundary_residual;
    j["genus"] = c.genus;
    j["boundary_components"] = c.boundary_components;
    j["axis_residuals"] = c.axis_residuals;
    j["axis_crossings"] = c.axis_crossings;
    j["axis_orthogonality_residual"] = c.axis_orthogonality_residual;
    j["equivariance_residual"] = c.equivariance_residual;
    j["j"] = c.j;
    j["endpoints_on_one_loop"] = c.endpoints_on_one_loop;
    j["iterations"] = c.iterations;
    j["grad_norm"] = c.grad_norm;
    j["converged"] = c.converged;
    j["stalled"] = c.stalled;
    j["degenerate"] = c.degenerate;
    j["genus_ok"] = c.genus_ok;
    j["boundary_ok"] = c.boundary_ok;
    j["area_in_range"] = c.area_in_range;
    j["equivariance_ok"] = c.equivariance_ok;
    j["axes_ok"] = c.axes_ok;
    j["pass"] = c.passed();
    if (!c.error.empty()) j["error"] = c.error;
    if (!extra_json.empty()) j["config"] = nlohmann::ordered_json::parse(extra_json);
    os << j.dump(2) << '\n';
}

void write_history_csv(std::ostream& os, const std::vector<IterationRecord>& history) {
    os << "iter,area,grad_norm,step,sphere_residual,equivariance_residual\n";
    os << std::setprecision(17);
    for (const auto& r : history)
        os << r.iter << ',' << r.area << ',' << r.grad_norm << ',' << r.step << ',' << r.sphere_residual << ','
           << r.equivariance_residual << '\n';
}

}  // namespace fbms
