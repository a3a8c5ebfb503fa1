#pragma once

#include "fbms/geom/group.hpp"
#include "fbms/sweepout/schedule.hpp"
#include "fbms/geom/tri_mesh.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fbms {

/// Sum of triangle areas. Throws a degenerate-mesh error on a zero-area face.
double discrete_area(const TriMesh<double>& m);

/// Exact derivative of discrete_area with respect to every vertex position.
std::vector<Vec3d> area_gradient(const TriMesh<double>& m);

/// Vertex orbits plus the group they came from. Built once from an
/// equivariant mesh and reused for later iterates, whose positions no longer
/// match exactly.
struct VertexOrbits {
    std::vector<Isometry<double>> elements;
    std::vector<std::vector<int>> table;  // table[i][v] = vertex at elements[i](x_v)
    bool empty() const { return elements.empty(); }
};

VertexOrbits vertex_orbits(const TriMesh<double>& m, const DihedralGroup<double>& group, double tol = 1e-9);

/// Tags vertices lying within tol of an axis of the group (xi_0 first, then
/// xi_1..xi_n). Existing tags other than `axis` are kept.
TriMesh<double> tag_axis_vertices(const TriMesh<double>& m, const DihedralGroup<double>& group, double tol = 1e-9);

/// Boundary vertices to the unit sphere, interior vertices clamped to the
/// closed ball, orbit averaging, then axis-tagged vertices snapped to their axes.
TriMesh<double> project_constraints(const TriMesh<double>& m, const DihedralGroup<double>& group, const VertexOrbits& orbits);

/// Same, computing the orbits from m itself (precondition error when m is not
/// equivariant to within 1e-9).
TriMesh<double> project_constraints(const TriMesh<double>& m, const DihedralGroup<double>& group);

/// Sphere and ball constraints only.
TriMesh<double> project_constraints(const TriMesh<double>& m);

struct MinimizeOptions {
    double step = 1.0;             // initial step of the line search
    double tol = 1e-7;             // max vertex norm of the constrained gradient
    int max_iter = 5000;
    int symmetrize_every = 1;
    int remesh_every = 0;          // 0 disables tangential smoothing
    int symmetry = 0;              // n of D_n; 0 means no symmetry constraint
    int expected_genus = -1;       // -1 skips the genus flag
    double max_aspect = 1e6;       // abort threshold; never below 4x the seed's
    double max_move = 0.25;        // per-vertex step cap, fraction of shortest incident edge
    std::uint64_t seed = 1;

    void validate() const;
};

/// Reads `key = value` lines (# comments). Keys: step, tol, max_iter, cadence,
/// remesh, symmetry, seed, max_aspect, max_move. Unknown keys are a usage error.
MinimizeOptions read_minimize_options(std::istream& is, MinimizeOptions base = {});
MinimizeOptions read_minimize_options(const std::string& path, MinimizeOptions base = {});

struct MinimalSurfaceCertificate {
    double area = 0.0;
    double mean_curvature_residual = 0.0;
    double free_boundary_residual = 0.0;  // radians
    int genus = -1;
    int boundary_components = -1;
    std::vector<double> axis_residuals;   // xi_1..xi_n
    int axis_crossings = 0;               // |surface ∩ xi_0|
    double axis_orthogonality_residual = 0.0;  // radians
    double equivariance_residual = 0.0;
    int j = -1;
    bool endpoints_on_one_loop = false;

    int iterations = 0;
    double grad_norm = 0.0;
    bool converged = false;
    bool stalled = false;
    bool degenerate = false;
    std::string error;

    // flags
    bool genus_ok = false;
    bool boundary_ok = false;
    bool area_in_range = false;  // pi < area < 3 pi
    bool equivariance_ok = false;
    bool axes_ok = false;

    bool passed() const;
};

struct IterationRecord {
    int iter = 0;
    double area = 0.0;
    double grad_norm = 0.0;
    double step = 0.0;
    double sphere_residual = 0.0;
    double equivariance_residual = 0.0;
};

struct MinimizeResult {
    TriMesh<double> mesh;
    MinimalSurfaceCertificate certificate;
    std::vector<IterationRecord> history;
};

/// Projected gradient descent with backtracking. Never throws on stalls or
/// degeneration; those end the run and are flagged on the certificate.
MinimizeResult minimize(const TriMesh<double>& seed, const MinimizeOptions& opts);

/// Certificate fields computed on a mesh (no iteration data). n = 0 skips the
/// symmetry-dependent fields.
MinimalSurfaceCertificate certify_surface(const TriMesh<double>& m, int n, int expected_genus = -1);

/// Constrained gradient: tangent to the sphere and orthogonal to the boundary
/// at boundary vertices, normal to the surface inside, along the axis on
/// axis-tagged vertices (axes of D_n; n = 0 ignores axis tags).
std::vector<Vec3d> constrained_gradient(const TriMesh<double>& m, const std::vector<Vec3d>& grad, int n = 0);

/// Per-boundary-vertex angle between the discrete outward conormal and the position.
double free_boundary_residual(const TriMesh<double>& m);

/// Max over interior vertices of |normal part of the area gradient| / vertex
/// area * mean incident edge length.
double mean_curvature_residual(const TriMesh<double>& m);

/// True iff the 2(g+1) points at angles k pi / (g+1) on the equator all lie
/// within tol of one boundary loop. tol <= 0 means the max edge length.
/// Precondition error when the horizontal axes are not contained in m.
bool boundary_endpoint_check(const TriMesh<double>& m, int g, double tol = -1.0);

struct GenusReport {
    int g = 0;
    int genus = -1;
    int crossings = 0;
    int j = -1;
    std::optional<std::pair<int, int>> solution;  // (gamma', j) from the arithmetic
    double equivariance_residual = 0.0;
    bool pass = false;
};

GenusReport genus_certificate(const TriMesh<double>& m, int g);

/// Largest-area slice on the sweep grid; slices within the mesh tolerance of
/// the maximum tie, and the smallest t among them wins.
struct SeedSlice {
    Quad t = 0;
    double area = 0.0;
    int index = -1;
    TriMesh<double> mesh;
};

SeedSlice max_area_seed(const SweepoutSchedule<Quad>& s, int grid, int resolution = 0);

/// Polar disc with D_2-symmetric normal noise of the given amplitude; boundary
/// vertices are pushed off the sphere radially by up to `amplitude` as well.
TriMesh<double> perturbed_disc(int resolution, double amplitude, std::uint64_t seed);

void write_certificate_json(std::ostream& os, const MinimalSurfaceCertificate& c, const std::string& extra_json = "");
void write_history_csv(std::ostream& os, const std::vector<IterationRecord>& history);

}  // namespace fbms
