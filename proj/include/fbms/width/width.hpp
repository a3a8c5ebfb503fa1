#pragma once

#include "fbms/geom/bvh.hpp"
#include "fbms/geom/group.hpp"
#include "fbms/sweepout/sweepout.hpp"

#include <algorithm>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace fbms {

/// {x in B^3 : x . normal >= 0}
struct HalfBall {
    Vec3d normal;

    bool contains(const Vec3d& x) const { return x.dot(normal) >= 0; }
};

/// Half-balls F with phi(F) = F or phi(F) = B^3 \ F for every phi in D_n:
/// the upper and lower half-balls, plus the four vertical ones bounded by
/// the planes through xi_0 and xi_1 or xi_2 when n = 2.
std::vector<HalfBall> equivariant_half_balls(int n);

/// splitmix64 step; used to derive independent stream seeds from one run seed.
std::uint64_t splitmix64(std::uint64_t x);

/// Inside/outside labels for points of B^3 off a slice mesh.
///
/// Labels are carried by a lattice of anchor points inside the ball. Anchor
/// labels are propagated across lattice edges by segment crossing parity and
/// every lattice edge is re-checked, so a surface that does not separate the
/// ball shows up as inconsistent edges. A point takes the label of an anchor
/// near it, flipped by the parity of the segment between them. Segments stay
/// inside the ball, so the piece of sphere that closes up each side is never
/// crossed and does not need to be meshed.
///
/// Convention: the side the face normals point into has label 0.
class SideField {
public:
    explicit SideField(const TriMesh<double>& mesh, double spacing = 1.0 / 16);

    /// 0 or 1, or -1 if every nearby anchor segment is ambiguous.
    int label(const Vec3d& p) const;

    /// Lattice edges whose parity disagrees with the labels, relative to the
    /// number of edges that pass near the surface.
    double inconsistency() const { return double(bad_edges_) / std::max(checked_edges_, 1); }
    int checked_edges() const { return checked_edges_; }

    const TriangleBvh& bvh() const { return bvh_; }

    /// Largest gap ell^2/8 between a boundary edge and the circle through its ends
    /// on a unit sphere; near the boundary curve labels are path dependent at this scale.
    double boundary_sagitta() const { return boundary_sagitta_; }

private:
    int anchor_index(int i, int j, int k) const;
    Vec3d anchor_position(int i, int j, int k) const;

    TriangleBvh bvh_;
    double spacing_;
    Vec3d origin_;
    int dim_;
    std::vector<int> label_;      // per lattice node, -1 if unused or unlabeled
    std::vector<double> clear_;   // distance from the anchor to the mesh
    int checked_edges_ = 0;
    int bad_edges_ = 0;
    double boundary_sagitta_ = 0;
};

struct VolumeEstimate {
    double volume = 0;    ///< estimated volume of the label-1 side
    double residual = 0;  ///< |volume - 2 pi/3|
    double sigma = 0;     ///< binomial standard error vol(B) sqrt(p(1-p)/N)
    long samples = 0;     ///< samples inside the ball
    long unlabeled = 0;
    double inconsistency = 0;

    bool within(double k = 3) const { return residual <= k * sigma; }
};

/// Monte Carlo half-volume test with about `samples` points in the ball,
/// drawn one per cell of a jittered cubic grid. Throws a geometry error if
/// the side field is inconsistent above `max_inconsistency`.
VolumeEstimate half_volume_residual(const TriMesh<double>& mesh, long samples = 1000000, std::uint64_t seed = 1,
                                    double max_inconsistency = 0.01);
VolumeEstimate half_volume_residual(const SideField& field, long samples = 1000000, std::uint64_t seed = 1);

struct ComplementCheck {
    bool ok = false;
    long samples = 0;
    long compared = 0;
    long mismatches = 0;
    long skipped = 0;  ///< samples within the exclusion distance of the surface
};

/// Samples points of the ball and checks label(psi x) != label(x) for the
/// half-turn psi about xi_1 of D_{g+1}. Points closer than `exclusion` to the
/// surface (either x or psi x) are skipped; a negative exclusion selects
/// twice the boundary sagitta.
ComplementCheck complement_symmetry_check(const SideField& field, int g, long samples = 100000, std::uint64_t seed = 1,
                                          double exclusion = -1);
ComplementCheck complement_symmetry_check(const TriMesh<double>& mesh, int g, long samples = 100000,
                                          std::uint64_t seed = 1, double exclusion = -1);

struct WidthSlice {
    double t = 0;
    Quad area = 0;
    double tolerance = 0;
    double volume_residual = 0;
    double volume_sigma = 0;
    bool volume_ok = false;
    bool complement_ok = false;
    /// 3 pi minus the certified upper bound for this slice, evaluated without cancellation
    Quad margin = 0;
};

struct WidthBracket {
    double lower = 0;  ///< pi, the analytic lower bound
    Quad upper = 0;    ///< max over slices of min(analytic bound, area + tolerance)
    Quad margin = 0;   ///< 3 pi - upper, evaluated without cancellation
    Quad upper_discrete = 0;  ///< max over slices of area + tolerance (diagnostic)
};

/// Bracket from a certified sweep. Throws a bracket-violation error if any
/// slice area is >= 3 pi, or if the sweep has failed slices.
WidthBracket width_bracket(const SweepReport& sweep);

/// 3 pi - stage_bound(s, t), without cancellation.
Quad stage_bound_deficit(const SweepoutSchedule<Quad>& s, const Quad& t);

struct WidthOptions {
    int grid = 200;
    int resolution = 0;
    long volume_samples = 1000000;
    long complement_samples = 100000;
    std::uint64_t seed = 1;
    double sigma_k = 3.0;              ///< volume residual must be within sigma_k standard errors
    double max_inconsistency = 0.01;   ///< side-label inconsistency above which a slice is rejected
};

struct WidthReport {
    int g = 0;
    WidthOptions options;
    SweepReport sweep;
    std::vector<WidthSlice> slices;
    WidthBracket bracket;
    bool bracket_ok = false;
    std::string bracket_error;

    bool volumes_ok() const;
    bool complements_ok() const;
};

/// Certified sweep plus volume and complement checks on every slice.
WidthReport audit_width(const SweepoutSchedule<Quad>& s, const WidthOptions& opt);

/// {g, grid_size, lower, upper, margin, per_slice: [{t, area, volume_residual, complement_ok}], seed}
void write_width_json(std::ostream& os, const WidthReport& r, const std::string& extra_json = "");

}  // namespace fbms
