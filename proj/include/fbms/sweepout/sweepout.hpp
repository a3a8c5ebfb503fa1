#pragma once

#include "fbms/geom/tri_mesh.hpp"
#include "fbms/sweepout/schedule.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fbms {

/// Stages of the sweepout, ordered by decreasing t.
/// Ribbons: t in [t0, 1). Necks: [t0/2, t0). Widening: [t0/4, t0/2).
/// Retraction: (0, t0/4).
enum class Stage : int { Ribbons = 1, Necks = 2, Widening = 3, Retraction = 4 };

const char* to_string(Stage s);

template <typename Scalar>
struct SliceSpec {
    SweepoutSchedule<Scalar> schedule;
    Scalar t;
    int resolution = 0;  ///< boundary points per full circle; 0 selects 64(g+1)

    int effective_resolution() const { return resolution > 0 ? resolution : 64 * schedule.n(); }
};

/// Stage containing t. Throws a degenerate-slice error for t <= 0 or t >= 1.
template <typename Scalar>
Stage stage_of(const Scalar& t, const SweepoutSchedule<Scalar>& s);

/// Anchor points on the equator: entry 2k is p_k^+ at angle (2k + 1/2) pi/(g+1),
/// entry 2k+1 is p_k^- at angle (2k - 1/2) pi/(g+1), k = 0..g.
template <typename Scalar>
std::vector<Vec3<Scalar>> anchor_points(int g);

/// Equatorial disc with half-balls of radius eps removed at the anchors of
/// the given sign (+1 or -1).
template <typename Scalar>
TriMesh<Scalar> punctured_disc_mesh(int g, const Scalar& eps, int sign, int resolution = 0);

/// Slice of the sweepout at parameter t, built with the construction of the
/// stage containing t.
template <typename Scalar>
TriMesh<Scalar> build_slice(const SliceSpec<Scalar>& spec);

/// Slice built with the construction of `stage`, which must contain t in its
/// closed parameter interval. Used to compare both sides of a stage boundary.
template <typename Scalar>
TriMesh<Scalar> build_slice_in_stage(const SliceSpec<Scalar>& spec, Stage stage);

/// Degenerate ends of the sweepout. which = 0: the equatorial disc and no
/// arcs. which = 1: the disc plus 2(g+1) meridian arcs from the anchors to
/// the poles (p^+ to the north pole, p^- to the south pole).
struct EndpointSlice {
    TriMesh<double> mesh;
    std::vector<std::vector<Vec3d>> arcs;
};

EndpointSlice endpoint_slice(int which, int g, int resolution = 0);

/// 3 pi - 2 pi (t^2 - (g+1) eps t).
template <typename Scalar>
Scalar slice_area_bound(int g, const Scalar& t, const Scalar& eps);

/// slice_area_bound - 3 pi, evaluated without cancellation so the sign is
/// meaningful when t^2 is below the resolution of 3 pi.
template <typename Scalar>
Scalar slice_area_bound_excess(int g, const Scalar& t, const Scalar& eps);

/// pi eps t: area of one ribbon of radius eps and height t.
template <typename Scalar>
Scalar ribbon_area_bound(const Scalar& eps, const Scalar& t);

/// (3 - t0^2) pi + (g+1) 4 pi t0^2 / (-log t0).
template <typename Scalar>
Scalar replacement_stage_bound(int g, const Scalar& t0);

/// 3 pi - (g+1) pi (r^2 - 4 r t0).
template <typename Scalar>
Scalar widening_bound(int g, const Scalar& r, const Scalar& t0);

/// Area bound that applies to the slice at t.
template <typename Scalar>
Scalar stage_bound(const SweepoutSchedule<Scalar>& s, const Scalar& t);

/// Discretization error allowance: 10 times the sum of per-face curvature
/// terms (area times squared dihedral turn inside a smooth part) and chord
/// terms along boundary and crease polylines.
template <typename Scalar>
double mesh_tolerance(const TriMesh<Scalar>& m);

struct SliceCertificate {
    int g = 0;
    double t = 0;
    Quad t_exact = 0;
    Stage stage = Stage::Ribbons;
    Quad area = 0;
    Quad bound = 0;
    double tolerance = 0;
    int genus = -1;
    int boundary_components = -1;
    int ribbons = -1;  ///< connected wall components
    double equivariance_residual = 0;
    double max_edge = 0;
    bool genus_ok = false;
    bool boundary_ok = false;
    bool ribbons_ok = false;
    bool equivariance_ok = false;
    bool bound_ok = false;
    bool below_3pi = false;
    std::string error;

    bool passed() const {
        return error.empty() && genus_ok && boundary_ok && ribbons_ok && equivariance_ok && bound_ok && below_3pi;
    }
};

/// Checks one slice: genus g, one boundary component, 2(g+1) wall pieces,
/// D_{g+1}-invariance, area <= stage bound + tolerance and area < 3 pi.
SliceCertificate certify_slice(const SliceSpec<Quad>& spec, const TriMesh<Quad>& mesh);
SliceCertificate certify_slice(const SliceSpec<Quad>& spec);

/// Parameter grid of N points that reaches every stage: N/8 midpoints in
/// (0, t0/4), N/8 in [t0/4, t0/2), N/4 in [t0/2, t0), the rest in [t0, 1).
std::vector<Quad> sweep_t_grid(const SweepoutSchedule<Quad>& s, int N);

struct StageJoin {
    Quad t;
    Stage above;
    Stage below;
    Quad area_above;
    Quad area_below;
    double tolerance;
    bool ok;
};

struct SweepReport {
    int g = 0;
    SweepoutSchedule<Quad> schedule;
    int resolution = 0;
    std::vector<SliceCertificate> slices;
    std::vector<StageJoin> joins;
    Quad max_area = 0;
    double max_area_tolerance = 0;
    bool margin_ok = false;     ///< max area <= 3 pi - (2 pi t0^2 - tolerance)
    bool monotone_ok = false;   ///< area does not increase as t decreases in stages 3-4
    bool continuity_ok = false;

    int failed_slices() const;
    bool passed() const { return failed_slices() == 0 && margin_ok && monotone_ok && continuity_ok; }
};

using SliceVisitor = std::function<void(const SliceSpec<Quad>&, const TriMesh<Quad>&, SliceCertificate&)>;

/// Certifies every slice of the grid; `visit` (if set) sees each mesh and can
/// add its own checks to the certificate.
SweepReport run_sweep(const SweepoutSchedule<Quad>& s, int N, int resolution = 0, const SliceVisitor& visit = {});

/// Columns: g,t,stage,area,bound,genus,boundary_components,equivariance_residual,pass
void write_sweep_csv(std::ostream& os, const SweepReport& r);

}  // namespace fbms
